"""Exact moment engines for the mean spectral measure and its finite-size kin.

The even moments u_n(alpha) of the mean spectral measure are computed two
independent ways (deliberate redundancy for cross-validation):

* ``u_polynomials`` builds the exact degree-n polynomials through the
  cross-parameter recurrence
      u_n(a) = (a + 1) * sum_{i<n} u_i(a + 1) * u_{n-1-i}(a),
  where the shifted-argument factors come from an exact Taylor shift;
* ``u_sequence_numeric`` iterates the self-convolutive recurrence
      u_n(a) = (2n - 1) u_{n-1}(a) + a * sum_{i<n} u_i(a) u_{n-1-i}(a).

``dyck_weight_sum`` is the brute-force oracle: u_n(alpha) equals the total
weight of all Dyck paths of length 2n when a rise from level k carries weight
(alpha + k + 1).

For the N x N random tridiagonal ensemble with Gaussian diagonal and
chi-tilde off-diagonal of parameters (N-1)*beta, ..., beta (beta = 2*beta_hat),
``m_polynomial`` returns the exact expectation of the 2p-th power's (1,1)
entry as a degree-p polynomial in N, and ``h_polynomial`` its
beta_hat -> infinity companion with off-diagonal sqrt(N-1), ..., 1.  The
``verify_*`` functions check the exact identities relating all of the above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .ratpoly import RationalPoly

__all__ = [
    "DYCK_BRUTE_FORCE_MAX",
    "DUALITY_MAX_P",
    "U_H_MAX_P",
    "GbeParams",
    "MomentSequence",
    "dyck_paths",
    "dyck_weight_sum",
    "h_polynomial",
    "lemma_two_step",
    "m_polynomial",
    "u_polynomials",
    "u_sequence_numeric",
    "verify_duality",
    "verify_kappa_limit",
    "verify_limit_to_u",
    "verify_u_h_relation",
]

# Catalan(10) = 16796 paths; beyond that brute-force enumeration is pointless.
DYCK_BRUTE_FORCE_MAX = 10
# Enumeration budget for the exact duality check.
DUALITY_MAX_P = 8
U_H_MAX_P = 10


@dataclass(frozen=True)
class MomentSequence:
    """Even moments u_0..u_n of the mean spectral measure at a fixed alpha."""

    alpha: object
    values: tuple

    def __post_init__(self):
        if not self.values or self.values[0] != 1:
            raise ValueError("moment sequence must start with u_0 = 1")


@dataclass(frozen=True)
class GbeParams:
    """Size and half-beta parameter of the finite tridiagonal ensemble."""

    N: int
    beta_hat: Fraction

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("matrix size N must be >= 1")
        object.__setattr__(self, "beta_hat", Fraction(self.beta_hat))
        if self.beta_hat <= 0:
            raise ValueError("beta_hat must be positive")

    def m_moment(self, p: int) -> Fraction:
        """Exact expectation of the 2p-th power's (1,1) entry at these parameters."""
        return m_polynomial(p, self.beta_hat)(self.N)


# ---------------------------------------------------------------------------
# The two recurrences for u_n(alpha)
# ---------------------------------------------------------------------------

def u_sequence_numeric(alpha, n_max: int) -> MomentSequence:
    """u_0..u_{n_max} at a numeric alpha via the self-convolutive recurrence.

    Works with int, Fraction or float alpha and preserves the input's
    arithmetic (exact for exact inputs).  alpha < 0 is rejected: the values
    extend analytically but stop being moments of a measure.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0 (measure interpretation lost for alpha < 0)")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    us = [1]
    for n in range(1, n_max + 1):
        conv = sum(us[i] * us[n - 1 - i] for i in range(n))
        us.append((2 * n - 1) * us[n - 1] + alpha * conv)
    return MomentSequence(alpha=alpha, values=tuple(us))


def u_polynomials(n_max: int) -> list:
    """Exact polynomials u_0(a)..u_{n_max}(a), entry n of degree n.

    Built from the cross-parameter recurrence; the u_i(a+1) factors are
    Taylor shifts of the already-computed polynomials.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    a_plus_1 = RationalPoly([1, 1])
    us = [RationalPoly.one()]
    shifted = [RationalPoly.one()]  # shifted[i] = u_i(a + 1)
    for n in range(1, n_max + 1):
        conv = RationalPoly.zero()
        for i in range(n):
            conv = conv + shifted[i] * us[n - 1 - i]
        us.append(a_plus_1 * conv)
        shifted.append(us[n].shift(1))
    return us


# ---------------------------------------------------------------------------
# Brute-force Dyck-path oracle
# ---------------------------------------------------------------------------

def dyck_paths(n: int) -> Iterator[tuple]:
    """All Dyck paths of length 2n as tuples of +1/-1 steps."""

    def rec(height, remaining, prefix):
        if remaining == 0:
            yield tuple(prefix)
            return
        if remaining > height:
            prefix.append(1)
            yield from rec(height + 1, remaining - 1, prefix)
            prefix.pop()
        if height > 0:
            prefix.append(-1)
            yield from rec(height - 1, remaining - 1, prefix)
            prefix.pop()

    yield from rec(0, 2 * n, [])


def dyck_weight_sum(n: int, alpha):
    """Sum of weights over all Dyck paths of length 2n, enumerated one by one.

    A rise from level k carries weight (alpha + k + 1).  Exact for exact
    alpha.  This is the independent oracle for both u-recurrences; n is
    capped so the enumeration stays honest.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n > DYCK_BRUTE_FORCE_MAX:
        raise ValueError(
            f"brute-force Dyck enumeration is capped at n <= {DYCK_BRUTE_FORCE_MAX} "
            f"(Catalan growth), got n = {n}"
        )
    total = 0
    for path in dyck_paths(n):
        height = 0
        w = 1
        for step in path:
            if step > 0:
                w = w * (alpha + height + 1)
                height += 1
            else:
                height -= 1
        total = total + w
    return total


# ---------------------------------------------------------------------------
# Closed walks of the finite ensemble, grouped by edge/site profile
# ---------------------------------------------------------------------------
#
# A closed length-2p walk on sites 1, 2, ... (steps: stay, up, down) is
# determined by its up/down skeleton plus the placement of its flat steps.
# Walks are grouped by profile: k_j = number of up-crossings of the edge
# (j, j+1) and m_i = number of flat steps at site i.  Independence of the
# matrix entries makes the expectation a function of the profile alone:
# each site contributes the Gaussian moment (m_i - 1)!! (zero for odd m_i),
# each edge the rising factorial (theta_j)_{k_j} of its squared chi-tilde
# entry.  The number of walks with a given profile factorizes into
# interleaving binomials, so no path-by-path enumeration is needed.

def _compositions(total: int) -> Iterator[tuple]:
    """Ordered tuples of positive integers with the given sum."""
    if total == 0:
        yield ()
        return
    for head in range(1, total + 1):
        for tail in _compositions(total - head):
            yield (head,) + tail


def _weak_compositions(total: int, parts: int) -> Iterator[tuple]:
    """Ordered tuples of `parts` nonnegative integers with the given sum."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _weak_compositions(total - head, parts - 1):
            yield (head,) + tail


def _double_factorial(n: int) -> int:
    """n!! with the empty-product conventions (-1)!! = 0!! = 1."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _skeleton_count(kvec: Sequence[int]) -> int:
    """Closed pure up/down walks from site 1 with kvec[j-1] up-crossings of edge j.

    The k_{j+1} excursions above level j distribute freely over the k_j
    visit intervals at level j, giving one interleaving binomial per edge.
    """
    out = 1
    for j in range(len(kvec) - 1):
        out *= math.comb(kvec[j] + kvec[j + 1] - 1, kvec[j + 1])
    return out


def _stay_counts(kvec: Sequence[int]) -> tuple:
    """Number of maximal visits of the skeleton to each site 1..L+1."""
    if not kvec:
        return (1,)
    L = len(kvec)
    stays = [kvec[0] + 1]
    for i in range(1, L + 1):
        stays.append(kvec[i - 1] + (kvec[i] if i < L else 0))
    return tuple(stays)


def _walk_profiles(p: int) -> Iterator[tuple]:
    """Yield (kvec, mvec, count) over profiles with all-even flat counts.

    Profiles with an odd flat count at any site have zero expectation and
    are skipped outright.
    """
    for K in range(p + 1):
        for kvec in _compositions(K):
            skel = _skeleton_count(kvec)
            stays = _stay_counts(kvec)
            for halves in _weak_compositions(p - K, len(stays)):
                count = skel
                for r, s in zip(halves, stays):
                    count *= math.comb(2 * r + s - 1, s - 1)
                yield kvec, tuple(2 * r for r in halves), count


def _expected_power_polynomial(p: int, size_poly: RationalPoly, gamma: Fraction) -> RationalPoly:
    """Expectation of the 2p-th power's (1,1) entry, as a polynomial.

    The matrix-size argument enters through `size_poly` (a linear polynomial
    in the output indeterminate), and the squared off-diagonal entry at edge
    j is Gamma-distributed with shape gamma * (size - j).
    """
    total = RationalPoly.zero()
    for kvec, mvec, count in _walk_profiles(p):
        scalar = count
        for m in mvec:
            scalar *= _double_factorial(m - 1)
        term = RationalPoly.constant(scalar)
        for j, k in enumerate(kvec, start=1):
            theta = gamma * (size_poly - j)
            for t in range(k):
                term = term * (theta + t)
        total = total + term
    return total


def m_polynomial(p: int, beta_hat) -> RationalPoly:
    """Exact E[(1,1) entry of the 2p-th ensemble power] as a polynomial in N."""
    if p < 0:
        raise ValueError("p must be >= 0")
    beta_hat = Fraction(beta_hat)
    if beta_hat <= 0:
        raise ValueError("beta_hat must be positive")
    return _expected_power_polynomial(p, RationalPoly.x(), beta_hat)


def h_polynomial(p: int) -> RationalPoly:
    """Exact (1,1) entry of the 2p-th power of the flat-free limit matrix.

    Dyck-path sum where a rise from level k carries weight (N - k - 1);
    grouped by edge profile, each path class contributes
    count * prod_j (N - j)^{k_j}.
    """
    if p < 0:
        raise ValueError("p must be >= 0")
    total = RationalPoly.zero()
    for kvec in _compositions(p):
        term = RationalPoly.constant(_skeleton_count(kvec))
        for j, k in enumerate(kvec, start=1):
            edge = RationalPoly([-j, 1])  # N - j
            for _ in range(k):
                term = term * edge
        total = total + term
    return total


# ---------------------------------------------------------------------------
# Identity checks (all exact unless stated otherwise)
# ---------------------------------------------------------------------------

def verify_duality(p: int, beta_hat) -> bool:
    """Exact polynomial identity m_p(N, bh) = (-1)^p bh^p m_p(-bh*N, 1/bh)."""
    if p < 0:
        raise ValueError("p must be >= 0")
    if p > DUALITY_MAX_P:
        raise ValueError(f"duality check budget is p <= {DUALITY_MAX_P}, got p = {p}")
    bh = Fraction(beta_hat)
    if bh <= 0:
        raise ValueError("beta_hat must be positive")
    lhs = _expected_power_polynomial(p, RationalPoly.x(), bh)
    mirrored_size = RationalPoly([0, -bh])  # -bh * N
    rhs = _expected_power_polynomial(p, mirrored_size, 1 / bh)
    rhs = RationalPoly.constant((-1) ** p * bh**p) * rhs
    return lhs == rhs


def verify_u_h_relation(p: int) -> bool:
    """Exact polynomial identity u_p(a) = (-1)^p h_p(-a)."""
    if p < 0:
        raise ValueError("p must be >= 0")
    if p > U_H_MAX_P:
        raise ValueError(f"u/h relation check budget is p <= {U_H_MAX_P}, got p = {p}")
    u = u_polynomials(p)[p]
    h = h_polynomial(p)
    reflected = RationalPoly([(-1) ** (p + i) * c for i, c in enumerate(h.coeffs)])
    return u == reflected


def verify_kappa_limit(p: int, N: int, beta_hat_grid: Sequence[float]) -> list:
    """Deviations |bh^{-p} m_p(N, bh) - h_p(N)| along an increasing bh grid.

    Each grid value is evaluated exactly (floats are taken at face value as
    rationals); the caller asserts monotone decay to zero.
    """
    if any(b2 <= b1 for b1, b2 in zip(beta_hat_grid, beta_hat_grid[1:])):
        raise ValueError("beta_hat_grid must be strictly increasing")
    h_val = h_polynomial(p)(N)
    out = []
    for bh in beta_hat_grid:
        bh = Fraction(bh)
        if bh <= 0:
            raise ValueError("beta_hat grid values must be positive")
        dev = abs(bh ** (-p) * m_polynomial(p, bh)(N) - h_val)
        out.append(float(dev))
    return out


def verify_limit_to_u(p: int, alpha, N_grid: Sequence[int]) -> list:
    """Deviations |m_p(N, alpha/N) - u_p(alpha)| along an increasing N grid.

    Exact evaluation per grid point; the decay is O(1/N).
    """
    if any(n2 <= n1 for n1, n2 in zip(N_grid, N_grid[1:])):
        raise ValueError("N_grid must be strictly increasing")
    if min(N_grid) <= p:
        raise ValueError("N grid must stay above p (polynomial regime)")
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    u_val = u_polynomials(p)[p](alpha)
    out = []
    for N in N_grid:
        dev = abs(m_polynomial(p, alpha / N)(N) - u_val)
        out.append(float(dev))
    return out


def lemma_two_step(a: Sequence, alpha) -> list:
    """Solve the lower-triangular system a_n = (alpha+1) * sum b_i a_{n-1-i}.

    Given a_0..a_L with a_0 = 1, returns b_0..b_{L-1}.  When the input
    sequence satisfies the self-convolutive recurrence at alpha, the output
    satisfies the same recurrence at alpha + 1 (callers verify this).
    """
    if not a or a[0] != 1:
        raise ValueError("input sequence must start with a_0 = 1")
    b = []
    for n in range(1, len(a)):
        conv = sum(b[i] * a[n - 1 - i] for i in range(n - 1))
        b.append(a[n] / (alpha + 1) - conv)
    return b
