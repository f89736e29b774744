"""Symmetric tridiagonal spectral data: eigenvalues and first-row weights.

Only the pairs (lambda_j, v_j(1)^2) are needed anywhere in this package, so
the eigensolver is an implicit-shift QL iteration that accumulates just the
first row of the rotation product (the classical quadrature-weights device),
O(N^2) instead of O(N^3).  The kernel is JIT-compiled; a Monte Carlo run
decomposes tens of thousands of matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = [
    "DiscreteSpectralMeasure",
    "FiniteJacobi",
    "matrix_power_entry",
    "mean_measure_truncation",
    "spectral_decomposition",
]

MAX_QL_SWEEPS = 50
MATRIX_POWER_BUDGET = 10**6
WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class FiniteJacobi:
    """Finite symmetric tridiagonal matrix with strictly positive off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=np.float64)
        e = np.asarray(self.offdiag, dtype=np.float64)
        if d.ndim != 1 or e.ndim != 1:
            raise ValueError("diag and offdiag must be one-dimensional")
        if d.size < 1:
            raise ValueError("matrix must have at least one row")
        if e.size != d.size - 1:
            raise ValueError("offdiag must have length N-1")
        if e.size and not np.all(e > 0):
            raise ValueError("off-diagonal entries must be strictly positive")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size


@dataclass(frozen=True)
class DiscreteSpectralMeasure:
    """Eigenvalue positions with the squared first eigenvector components."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        wts = np.asarray(self.weights, dtype=np.float64)
        if pts.shape != wts.shape or pts.ndim != 1:
            raise ValueError("points and weights must be 1-d arrays of equal length")
        if np.any(wts < 0):
            raise ValueError("weights must be nonnegative")
        if abs(wts.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1 within {WEIGHT_SUM_TOL}")
        if pts.size > 1 and not np.all(np.diff(pts) > 0):
            raise ValueError("points must be strictly increasing (simple spectrum)")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    def moment(self, k: int) -> float:
        return float(np.sum(self.weights * self.points**k))


@njit(cache=True, nogil=True)
def _ql_first_row(d, e, w, max_sweeps):  # pragma: no cover - exercised via wrapper
    """Implicit-shift QL on (d, e), rotating the first-row vector w along.

    d: diagonal, overwritten with eigenvalues (unordered).
    e: off-diagonal in e[0:n-1], destroyed; e[n-1] must be 0.
    w: workspace starting as the first basis vector, overwritten with the
       first components of the eigenvectors.
    Returns -1 on success, else the index that failed to converge.
    """
    n = d.shape[0]
    eps = 2.220446049250313e-16
    for l in range(n):
        for sweep in range(max_sweeps + 1):
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if sweep == max_sweeps:
                return l
            # Wilkinson-style shift from the trailing 2x2 block
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            sg = r if g >= 0.0 else -r
            g = d[m] - d[l] + e[l] / (g + sg)
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = w[i + 1]
                w[i + 1] = s * w[i] + c * f
                w[i] = c * w[i] - s * f
            if not underflow:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    return -1


def spectral_decomposition(J: FiniteJacobi) -> DiscreteSpectralMeasure:
    """Eigenvalues of J with the squared first components of an orthonormal
    eigenbasis, i.e. the weights of the spectral measure at the first site."""
    n = J.n
    if n == 1:
        return DiscreteSpectralMeasure(
            points=np.array([J.diag[0]]), weights=np.array([1.0])
        )
    d = J.diag.copy()
    e = np.zeros(n)
    e[: n - 1] = J.offdiag
    w = np.zeros(n)
    w[0] = 1.0
    bad = _ql_first_row(d, e, w, MAX_QL_SWEEPS)
    if bad >= 0:
        raise RuntimeError(f"QL iteration failed to converge at eigenvalue index {bad}")
    order = np.argsort(d, kind="stable")
    return DiscreteSpectralMeasure(points=d[order], weights=w[order] ** 2)


def _apply(J: FiniteJacobi, v: np.ndarray) -> np.ndarray:
    out = J.diag * v
    if J.n > 1:
        out[:-1] += J.offdiag * v[1:]
        out[1:] += J.offdiag * v[:-1]
    return out


def matrix_power_entry(J: FiniteJacobi, k: int) -> float:
    """(1,1) entry of J^k by repeated tridiagonal application to e_1.

    Independent of the eigendecomposition; used as its oracle.
    """
    if k < 0:
        raise ValueError("power must be >= 0")
    if k * J.n > MATRIX_POWER_BUDGET:
        raise ValueError(f"k*N exceeds the {MATRIX_POWER_BUDGET} multiply-add budget")
    v = np.zeros(J.n)
    v[0] = 1.0
    for _ in range(k):
        v = _apply(J, v)
    return float(v[0])


def mean_measure_truncation(M: int, alpha: float) -> FiniteJacobi:
    """Leading M x M block of the deterministic Jacobi operator whose
    spectral measure is the mean spectral measure: zero diagonal,
    off-diagonal sqrt(alpha + j)."""
    if M < 1:
        raise ValueError("truncation size must be >= 1")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    return FiniteJacobi(
        diag=np.zeros(M), offdiag=np.sqrt(alpha + np.arange(1, M, dtype=np.float64))
    )
