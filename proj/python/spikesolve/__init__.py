"""Sparse spike recovery on the torus from low-frequency Fourier data."""

from ._core import (
    IoError,
    Measure,
    NumericalError,
    ParameterError,
    SolveResult,
    SolverConfig,
    certificate,
    duality_gap,
    epsilon_from_gaussian,
    evaluate,
    far_mass,
    is_approximation,
    near_second_moment,
    observe,
    project,
    random_measure,
    run_suite,
    smoothed_error,
    smoothed_error_bound,
    solve_constrained,
    solve_noiseless,
    solve_tikhonov,
    suite_names,
)

__all__ = [
    "IoError",
    "Measure",
    "NumericalError",
    "ParameterError",
    "SolveResult",
    "SolverConfig",
    "certificate",
    "duality_gap",
    "epsilon_from_gaussian",
    "evaluate",
    "far_mass",
    "is_approximation",
    "near_second_moment",
    "observe",
    "project",
    "random_measure",
    "run_suite",
    "smoothed_error",
    "smoothed_error_bound",
    "solve_constrained",
    "solve_noiseless",
    "solve_tikhonov",
    "suite_names",
]
