"""Random tridiagonal ensembles and Monte Carlo spectral estimates.

Sampling is reproducible by construction: an `RngStream` (seed, stream_id)
pins down every draw, Monte Carlo work is partitioned into fixed-size chunks
with per-chunk derived generators, and partial results are merged in chunk
order.  Output therefore depends only on the master seed and the chunk
layout, never on scheduling or worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .linalg import FiniteJacobi, spectral_decomposition

__all__ = [
    "CHUNK_SIZE",
    "McReport",
    "RngStream",
    "build_J_trunc",
    "build_T",
    "mc_histogram",
    "mc_mean_moments",
    "sample_chi_tilde",
]

# Fixed chunk layout for the deterministic-merge contract.
CHUNK_SIZE = 1024


@dataclass(frozen=True)
class RngStream:
    """Seed plus stream index; identical pairs reproduce identical draws."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,)))
        )

    def chunk_generator(self, index: int) -> np.random.Generator:
        return np.random.Generator(
            np.random.PCG64(
                np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, index))
            )
        )


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    raise TypeError("rng must be an RngStream or numpy Generator")


# ---------------------------------------------------------------------------
# Gamma / chi-tilde sampling
# ---------------------------------------------------------------------------

def _mt_draw(a: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """One Gamma(a_i, 1) draw per entry, Marsaglia-Tsang squeeze-accept.

    Shapes below 1 use the boost trick: draw at shape+1 and multiply by
    U^(1/shape).
    """
    small = a < 1.0
    d = np.where(small, a + 1.0, a) - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(a.shape)
    pending = np.ones(a.shape, dtype=bool)
    while pending.any():
        idx = np.nonzero(pending)[0]
        x = gen.standard_normal(idx.size)
        u = gen.random(idx.size)
        v = 1.0 + c[idx] * x
        v3 = v * v * v
        positive = v > 0.0
        squeeze = u < 1.0 - 0.0331 * x**4
        log_u = np.log(np.where(u > 0.0, u, np.finfo(float).tiny))
        full = log_u < 0.5 * x * x + d[idx] * (1.0 - v3 + np.log(np.where(positive, v3, 1.0)))
        accept = positive & (squeeze | full)
        take = idx[accept]
        out[take] = d[take] * v3[accept]
        pending[take] = False
    if small.any():
        boost = gen.random(int(small.sum())) ** (1.0 / a[small])
        out[small] *= boost
    return out


def _gamma_mt(shape, gen: np.random.Generator) -> np.ndarray:
    """Gamma draws with exact zeros (underflow at tiny shapes) redrawn,
    conditioning on a probability-one event."""
    a = np.atleast_1d(np.asarray(shape, dtype=np.float64))
    if np.any(a <= 0):
        raise ValueError("gamma shape parameters must be positive")
    out = _mt_draw(a, gen)
    for _ in range(100):
        zero = out <= 0.0
        if not zero.any():
            return out
        out[zero] = _mt_draw(a[zero], gen)
    raise RuntimeError("gamma sampler kept underflowing to zero")


def sample_chi_tilde(k: float, rng) -> float:
    """One draw of the chi-tilde distribution with parameter k > 0,
    i.e. the square root of Gamma(k/2, 1)."""
    if k <= 0:
        raise ValueError("chi-tilde parameter must be positive")
    gen = _as_generator(rng)
    return float(np.sqrt(_gamma_mt(np.array([0.5 * k]), gen))[0])


def _chi_tilde_vector(ks: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    return np.sqrt(_gamma_mt(0.5 * ks, gen))


# ---------------------------------------------------------------------------
# Matrix builders (draw order: diagonal first, then off-diagonal)
# ---------------------------------------------------------------------------

def build_T(N: int, beta: float, rng) -> FiniteJacobi:
    """Random tridiagonal matrix of the finite ensemble: standard-normal
    diagonal, chi-tilde off-diagonal with parameters (N-1)beta, ..., beta."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if beta <= 0:
        raise ValueError("beta must be positive")
    gen = _as_generator(rng)
    diag = gen.standard_normal(N)
    if N == 1:
        return FiniteJacobi(diag=diag, offdiag=np.empty(0))
    ks = np.arange(N - 1, 0, -1, dtype=np.float64) * beta
    return FiniteJacobi(diag=diag, offdiag=_chi_tilde_vector(ks, gen))


def build_J_trunc(M: int, alpha: float, rng) -> FiniteJacobi:
    """M x M truncation of the infinite random Jacobi matrix: standard-normal
    diagonal, i.i.d. chi-tilde off-diagonal with parameter 2*alpha."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    gen = _as_generator(rng)
    diag = gen.standard_normal(M)
    if M == 1:
        return FiniteJacobi(diag=diag, offdiag=np.empty(0))
    ks = np.full(M - 1, 2.0 * alpha)
    return FiniteJacobi(diag=diag, offdiag=_chi_tilde_vector(ks, gen))


# ---------------------------------------------------------------------------
# Monte Carlo estimates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class McReport:
    """Monte Carlo estimates with standard errors and full reproducibility data."""

    alpha: float
    truncation: int
    samples: int
    moment_estimates: tuple  # (mean, std_error) indexed by p
    histogram: tuple         # (bin_center, mass, std_error)
    out_of_range_mass: float
    out_of_range_std_error: float
    seed: RngStream

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "truncation": self.truncation,
            "samples": self.samples,
            "moment_estimates": [
                {"p": p, "mean": m, "std_error": s}
                for p, (m, s) in enumerate(self.moment_estimates)
            ],
            "histogram": [
                {"bin_center": b, "mass": m, "std_error": s}
                for b, m, s in self.histogram
            ],
            "out_of_range_mass": self.out_of_range_mass,
            "out_of_range_std_error": self.out_of_range_std_error,
            "seed": {"seed": self.seed.seed, "stream_id": self.seed.stream_id},
        }


def _chunk_sizes(samples: int):
    full, rest = divmod(samples, CHUNK_SIZE)
    sizes = [CHUNK_SIZE] * full
    if rest:
        sizes.append(rest)
    return sizes


def _run_chunks(worker, n_chunks: int, threads: int):
    if threads <= 1:
        return [worker(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(n_chunks)))


def _mean_and_se(total: np.ndarray, total_sq: np.ndarray, n: int):
    mean = total / n
    if n > 1:
        var = np.maximum(total_sq - n * mean * mean, 0.0) / (n - 1)
    else:
        var = np.zeros_like(mean)
    return mean, np.sqrt(var / n)


def _even_power_entries(J: FiniteJacobi, p_max: int) -> np.ndarray:
    """(1,1) entries of J^(2p) for p = 0..p_max, one matrix-vector sweep."""
    out = np.empty(p_max + 1)
    out[0] = 1.0
    v = np.zeros(J.n)
    v[0] = 1.0
    d, e = J.diag, J.offdiag
    for p in range(1, p_max + 1):
        for _ in range(2):
            nxt = d * v
            nxt[:-1] += e * v[1:]
            nxt[1:] += e * v[:-1]
            v = nxt
        out[p] = v[0]
    return out


def mc_mean_moments(alpha: float, M: int, samples: int, p_max: int, rng: RngStream,
                    threads: int = 1) -> McReport:
    """Monte Carlo estimate of the even-moment expectations E[J^(2p)(1,1)].

    Requires M >= p_max + 1 so a length-2p walk from the first site cannot
    feel the truncation edge and the estimator is unbiased for every
    estimated moment.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    if p_max < 0:
        raise ValueError("p_max must be >= 0")
    if M < p_max + 1:
        raise ValueError("truncation M must be at least p_max + 1 for unbiased moments")
    sizes = _chunk_sizes(samples)

    def worker(index: int):
        gen = rng.chunk_generator(index)
        sums = np.zeros(p_max + 1)
        sums_sq = np.zeros(p_max + 1)
        for _ in range(sizes[index]):
            J = build_J_trunc(M, alpha, gen)
            vals = _even_power_entries(J, p_max)
            sums += vals
            sums_sq += vals * vals
        return sums, sums_sq

    partials = _run_chunks(worker, len(sizes), threads)
    total = np.zeros(p_max + 1)
    total_sq = np.zeros(p_max + 1)
    for sums, sums_sq in partials:  # fixed merge order
        total += sums
        total_sq += sums_sq
    mean, se = _mean_and_se(total, total_sq, samples)
    return McReport(
        alpha=alpha,
        truncation=M,
        samples=samples,
        moment_estimates=tuple(zip(mean.tolist(), se.tolist())),
        histogram=(),
        out_of_range_mass=0.0,
        out_of_range_std_error=0.0,
        seed=rng,
    )


def mc_histogram(alpha: float, M: int, samples: int, bins: int, y_max: float,
                 rng: RngStream, threads: int = 1) -> McReport:
    """Mean spectral measure estimated as a weighted eigenvalue histogram.

    Each sample contributes its spectral weights q_j^2 binned by eigenvalue
    position on [-y_max, y_max]; mass falling outside the range is tracked
    and reported, never hidden.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    if bins < 1:
        raise ValueError("need at least one bin")
    if y_max <= 0:
        raise ValueError("y_max must be positive")
    edges = np.linspace(-y_max, y_max, bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    sizes = _chunk_sizes(samples)

    def worker(index: int):
        gen = rng.chunk_generator(index)
        sums = np.zeros(bins)
        sums_sq = np.zeros(bins)
        oor = 0.0
        oor_sq = 0.0
        for _ in range(sizes[index]):
            measure = spectral_decomposition(build_J_trunc(M, alpha, gen))
            mass, _ = np.histogram(measure.points, bins=edges, weights=measure.weights)
            sums += mass
            sums_sq += mass * mass
            out = 1.0 - mass.sum()
            oor += out
            oor_sq += out * out
        return sums, sums_sq, oor, oor_sq

    partials = _run_chunks(worker, len(sizes), threads)
    total = np.zeros(bins)
    total_sq = np.zeros(bins)
    oor_total = 0.0
    oor_total_sq = 0.0
    for sums, sums_sq, oor, oor_sq in partials:  # fixed merge order
        total += sums
        total_sq += sums_sq
        oor_total += oor
        oor_total_sq += oor_sq
    mean, se = _mean_and_se(total, total_sq, samples)
    oor_mean, oor_se = _mean_and_se(
        np.array([oor_total]), np.array([oor_total_sq]), samples
    )
    return McReport(
        alpha=alpha,
        truncation=M,
        samples=samples,
        moment_estimates=(),
        histogram=tuple(zip(centers.tolist(), mean.tolist(), se.tolist())),
        out_of_range_mass=float(oor_mean[0]),
        out_of_range_std_error=float(oor_se[0]),
        seed=rng,
    )
