#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spikesolve/noise.hpp"
#include "spikesolve/torus.hpp"

namespace spikesolve {

/// Below this multiple of |y|^2 a computed duality gap is rounding noise.
inline constexpr double kGapRoundingFloor = 1e-14;

struct SolverConfig {
    /// Candidate grid has grid_factor * (2M + 1) points.
    int grid_factor = 16;
    int max_iterations = 200;
    /// Stop once duality_gap <= gap_tolerance * primal objective. A run that
    /// stops decreasing also counts as converged when the gap is below
    /// kGapRoundingFloor * |y|^2.
    double gap_tolerance = 1e-10;
    /// Newton refinement of inserted atoms plus joint position/amplitude descent.
    bool refine_positions = true;
    double merge_tolerance = 1e-7;
    /// Keep atoms on the candidate grid and measure the gap against the grid
    /// only (the finite-dimensional grid Lasso).
    bool restrict_to_grid = false;

    void validate() const;
};

struct SolveResult {
    DiscreteMeasure measure;
    double residual_l2 = 0.0;   ///< |P_M mu - y|_{L2}
    double duality_gap = 0.0;
    double objective = 0.0;     ///< penalized objective at tau (Tikhonov path point)
    double tau = 0.0;
    int iterations = 0;
    std::vector<double> objective_trace;
    bool converged = false;
    std::string status;
    int path_solves = 0;        ///< Tikhonov solves used by the constrained solver
};

/// min_mu 1/2 |P_M mu - y|^2 + tau |mu| by conditional gradient over measures with
/// fully-corrective amplitude updates. `warm_start` seeds the atom set.
SolveResult solve_tikhonov(const Observation& obs, double tau, const SolverConfig& cfg = {},
                           const DiscreteMeasure* warm_start = nullptr);

/// min |mu| subject to |P_M mu - y|_{L2} <= delta, via bisection along the
/// Tikhonov path in tau.
SolveResult solve_constrained(const Observation& obs, double delta, const SolverConfig& cfg = {});

/// Exact-data problem, run as solve_constrained with a tiny delta.
SolveResult solve_noiseless(const Observation& obs, const SolverConfig& cfg = {});

/// Delta used by solve_noiseless.
double noiseless_delta(const Observation& obs);

/// Primal objective of the penalized problem.
double tikhonov_objective(const Observation& obs, double tau, const DiscreteMeasure& mu);

/// Primal objective minus the dual objective of the residual rescaled into the
/// dual feasible set { p : |sum_m p_m e^{2 pi i m x}|_inf <= tau }.
double duality_gap(const Observation& obs, double tau, const DiscreteMeasure& mu,
                   int grid_factor = 16);

struct GridLassoResult {
    DiscreteMeasure measure;
    double objective = 0.0;
    double duality_gap = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Brute-force reference: amplitudes on the fixed grid k / grid_size solved by
/// accelerated proximal gradient with an explicit measurement matrix.
GridLassoResult grid_lasso_oracle(const Observation& obs, double tau, std::size_t grid_size);

struct ApproximationReport {
    double total_variation = 0.0;
    double reference_total_variation = 0.0;
    double l2_distance = 0.0;    ///< |P_M (mu - mu0)|_{L2}
    double linf_distance = 0.0;  ///< sup |P_M (mu - mu0)|, reported only
    bool tv_ok = false;          ///< |mu| <= |mu0| + 2 eps
    bool l2_ok = false;          ///< |P_M (mu - mu0)|_{L2} <= 2 eps
    bool pass() const noexcept { return tv_ok && l2_ok; }
};

/// Position and amplitude agreement of a recovered measure with the truth. Recovered
/// spikes within `capture_radius` of a true spike are pooled: their total amplitude is
/// compared with the true one and their mass-weighted position with the true position.
struct MatchReport {
    double max_position_error = 0.0;
    double max_amplitude_error = 0.0;  ///< relative
    double unmatched_mass = 0.0;       ///< recovered mass not assigned to a true spike
    std::size_t recovered = 0;
};

MatchReport match_measures(const DiscreteMeasure& recovered, const DiscreteMeasure& truth,
                           double capture_radius);

ApproximationReport is_approximation(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, int M,
                                     double epsilon);

}  // namespace spikesolve
