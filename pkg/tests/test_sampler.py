"""Distributional contracts and determinism of the Monte Carlo layer."""

import numpy as np
import pytest

from gbe_spectral import linalg, sampler
from gbe_spectral.sampler import RngStream


def _z(sample_fn, target, n):
    draws = np.array([sample_fn() for _ in range(n)])
    se = draws.std(ddof=1) / np.sqrt(n)
    return (draws.mean() - target) / se


def test_chi_tilde_moments():
    # X^2 ~ Gamma(k/2, 1): E X^2 = k/2, E X^4 = (k/2)(k/2 + 1)
    gen = RngStream(314, 0).generator()
    for k in (0.6, 3.0, 12.0):
        x2 = sampler._gamma_mt(np.full(100_000, k / 2), gen)
        se2 = x2.std(ddof=1) / np.sqrt(x2.size)
        assert abs(x2.mean() - k / 2) <= 4 * se2
        x4 = x2 * x2
        se4 = x4.std(ddof=1) / np.sqrt(x4.size)
        assert abs(x4.mean() - (k / 2) * (k / 2 + 1)) <= 4 * se4


def test_chi_tilde_determinism_and_domain():
    a = sampler.sample_chi_tilde(3.0, RngStream(5, 9))
    b = sampler.sample_chi_tilde(3.0, RngStream(5, 9))
    c = sampler.sample_chi_tilde(3.0, RngStream(5, 10))
    assert a == b
    assert a != c
    assert a > 0
    with pytest.raises(ValueError):
        sampler.sample_chi_tilde(0.0, RngStream(1))


def test_build_T_shapes_and_moments():
    J = sampler.build_T(1, 2.0, RngStream(3))
    assert J.n == 1 and J.offdiag.size == 0

    # E[offdiag[0]^2] = (N-1)*beta/2 at the first edge
    N, beta = 6, 0.8
    gen = RngStream(11, 0).generator()
    first = np.array([sampler.build_T(N, beta, gen).offdiag[0] ** 2 for _ in range(20_000)])
    se = first.std(ddof=1) / np.sqrt(first.size)
    assert abs(first.mean() - (N - 1) * beta / 2) <= 4 * se

    # E[T^2(1,1)] = 1 + (N-1)*beta/2
    gen = RngStream(12, 0).generator()
    entries = np.array([
        linalg.matrix_power_entry(sampler.build_T(N, beta, gen), 2)
        for _ in range(20_000)
    ])
    se = entries.std(ddof=1) / np.sqrt(entries.size)
    assert abs(entries.mean() - (1 + (N - 1) * beta / 2)) <= 4 * se

    with pytest.raises(ValueError):
        sampler.build_T(0, 1.0, RngStream(1))
    with pytest.raises(ValueError):
        sampler.build_T(3, 0.0, RngStream(1))


def test_build_J_trunc_moments():
    J = sampler.build_J_trunc(1, 0.7, RngStream(3))
    assert J.n == 1

    alpha = 0.7
    gen = RngStream(21, 0).generator()
    b2 = np.array([sampler.build_J_trunc(4, alpha, gen).offdiag[0] ** 2 for _ in range(20_000)])
    se = b2.std(ddof=1) / np.sqrt(b2.size)
    assert abs(b2.mean() - alpha) <= 4 * se

    gen = RngStream(22, 0).generator()
    entries = np.array([
        linalg.matrix_power_entry(sampler.build_J_trunc(4, alpha, gen), 2)
        for _ in range(20_000)
    ])
    se = entries.std(ddof=1) / np.sqrt(entries.size)
    assert abs(entries.mean() - (1 + alpha)) <= 4 * se


def test_mc_mean_moments_small_run():
    report = sampler.mc_mean_moments(1.0, 8, 6000, 2, RngStream(3))
    mean0, se0 = report.moment_estimates[0]
    assert mean0 == 1.0 and se0 == 0.0
    mean1, se1 = report.moment_estimates[1]
    assert abs(mean1 - 2.0) <= 4 * se1
    mean2, se2 = report.moment_estimates[2]
    assert abs(mean2 - 10.0) <= 4 * se2


def test_mc_mean_moments_requires_wide_enough_truncation():
    with pytest.raises(ValueError):
        sampler.mc_mean_moments(1.0, 4, 100, 4, RngStream(1))


def test_mc_unbiased_at_minimal_truncation():
    # estimates at M = p+1 and M = 4(p+1) must agree within a joint CI
    p = 2
    r1 = sampler.mc_mean_moments(1.0, p + 1, 30_000, p, RngStream(42, 0))
    r2 = sampler.mc_mean_moments(1.0, 4 * (p + 1), 30_000, p, RngStream(42, 5))
    m1, s1 = r1.moment_estimates[p]
    m2, s2 = r2.moment_estimates[p]
    assert abs(m1 - m2) <= 4 * np.hypot(s1, s2)


def test_mc_reports_reproducible_and_thread_independent():
    r1 = sampler.mc_mean_moments(1.0, 8, 5000, 2, RngStream(3), threads=1)
    r2 = sampler.mc_mean_moments(1.0, 8, 5000, 2, RngStream(3), threads=4)
    assert r1.moment_estimates == r2.moment_estimates

    h1 = sampler.mc_histogram(1.0, 24, 3000, 24, 6.0, RngStream(3), threads=1)
    h2 = sampler.mc_histogram(1.0, 24, 3000, 24, 6.0, RngStream(3), threads=3)
    assert h1.histogram == h2.histogram
    assert h1.out_of_range_mass == h2.out_of_range_mass

    h3 = sampler.mc_histogram(1.0, 24, 3000, 24, 6.0, RngStream(4), threads=1)
    assert h3.histogram != h1.histogram


def test_mc_histogram_mass_accounting_and_symmetry():
    report = sampler.mc_histogram(1.0, 48, 4000, 30, 6.0, RngStream(9, 0))
    total = sum(m for _, m, _ in report.histogram) + report.out_of_range_mass
    assert total == pytest.approx(1.0, abs=1e-12)
    # distributional symmetry of the ensemble under sign conjugation
    hist = report.histogram
    for i in range(len(hist) // 2):
        _, m_lo, s_lo = hist[i]
        _, m_hi, s_hi = hist[-1 - i]
        joint = np.hypot(s_lo, s_hi)
        if joint > 0:
            assert abs(m_lo - m_hi) <= 5 * joint


def test_truncation_stability_coupled():
    # same realizations truncated at 25 and 200: the per-bin change is the
    # truncation effect alone, and stays within noise of zero on [-6, 6]
    edges = np.linspace(-6, 6, 31)
    gen = RngStream(42, 3).generator()
    n = 1500
    diff_sum = np.zeros(30)
    diff_sq = np.zeros(30)
    for _ in range(n):
        J = sampler.build_J_trunc(200, 1.0, gen)
        small = linalg.FiniteJacobi(diag=J.diag[:25], offdiag=J.offdiag[:24])
        big = linalg.spectral_decomposition(J)
        little = linalg.spectral_decomposition(small)
        h_big, _ = np.histogram(big.points, bins=edges, weights=big.weights)
        h_small, _ = np.histogram(little.points, bins=edges, weights=little.weights)
        d = h_small - h_big
        diff_sum += d
        diff_sq += d * d
    mean = diff_sum / n
    se = np.sqrt(np.maximum(diff_sq - n * mean**2, 0.0) / (n - 1) / n)
    assert np.all(np.abs(mean) <= 5 * se + 1e-4)


def test_mc_report_serialization():
    report = sampler.mc_mean_moments(1.0, 4, 64, 1, RngStream(8, 2))
    doc = report.to_dict()
    assert doc["seed"] == {"seed": 8, "stream_id": 2}
    assert doc["moment_estimates"][0] == {"p": 0, "mean": 1.0, "std_error": 0.0}
    assert doc["samples"] == 64
