import math

import numpy as np
import pytest

import spikesolve as ss


def direct_projection(positions, amplitudes, M):
    m = np.arange(-M, M + 1)
    return np.exp(-2j * np.pi * np.outer(m, positions)) @ amplitudes


def test_project_matches_direct_sum():
    mu = ss.random_measure(5, 32, margin=1.2, seed=3, law="complex-gaussian")
    assert len(mu) == 5
    y = ss.project(mu, 32)
    assert y.shape == (65,)
    np.testing.assert_allclose(y, direct_projection(mu.positions, mu.amplitudes, 32), atol=1e-12)


def test_noiseless_recovery():
    mu0 = ss.random_measure(3, 32, margin=1.5, seed=11)
    res = ss.solve_noiseless(ss.project(mu0, 32))
    assert res.converged
    mu = res.measure.canonical()
    np.testing.assert_allclose(mu.positions, mu0.positions, atol=1e-6)
    np.testing.assert_allclose(mu.amplitudes, mu0.amplitudes, atol=1e-5)


def test_single_spike_soft_threshold():
    M, c, tau = 16, 1.2 - 0.5j, 4.0
    y = ss.project(ss.Measure(np.array([0.25]), np.array([c])), M)
    res = ss.solve_tikhonov(y, tau)
    assert res.converged
    expect = c * (1 - tau / ((2 * M + 1) * abs(c)))
    assert abs(res.measure.amplitudes[0] - expect) < 1e-9
    assert ss.duality_gap(y, tau, res.measure) <= 1e-9 * res.objective


def test_noisy_pipeline():
    M = 32
    mu0 = ss.random_measure(3, M, margin=1.5, seed=5)
    y, eps = ss.observe(mu0, M, kind="bounded", epsilon=0.1, seed=2)
    assert eps == 0.1
    res = ss.solve_constrained(y, eps)
    assert res.residual_l2 <= eps * (1 + 1e-9)
    rep = ss.is_approximation(res.measure, mu0, M, eps)
    assert rep["pass"]
    nu = res.measure - mu0
    assert ss.far_mass(nu, mu0.positions, M) >= 0.0
    assert ss.near_second_moment(nu, mu0.positions, M) >= 0.0
    s = ss.smoothed_error(res.measure, mu0, M, kernel="bump", N=2 * M)
    assert 0.0 <= s <= ss.smoothed_error_bound(M, eps, kernel="bump", N=2 * M, C=10.0)


def test_certificate_interpolates():
    M = 128
    support = np.array([0.1, 0.4, 0.75])
    a = np.array([1.0, -1.0j, 0.5])
    b = np.zeros(3, dtype=complex)
    f, residual = ss.certificate(support, a, b, M)
    assert residual < 1e-10
    for s, v in zip(support, a):
        assert abs(ss.evaluate(f, s) - v) < 1e-10


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        ss.random_measure(100, 16)
    with pytest.raises(ValueError):
        ss.solve_tikhonov(np.ones(5, dtype=complex), -1.0)


def test_suite_runner():
    assert "kernels" in ss.suite_names()
    ok, summary = ss.run_suite("kernels")
    assert ok, summary
    assert ss.epsilon_from_gaussian(4, 1.0, 0.0) == pytest.approx(math.sqrt(18))
