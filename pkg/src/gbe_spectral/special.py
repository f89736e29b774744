"""Closed-form density of the mean spectral measure.

The density at a point y is

    exp(-y^2/2) / (sqrt(2*pi) * (V_R(y)^2 + V_I(y)^2)),

where V_R and V_I are the Fourier cosine and sine transforms of the weight
function

    f_alpha(t) = pi * sqrt(alpha / Gamma(alpha)) * t^(alpha-1)
                 * exp(-t^2/2) / sqrt(2*pi),      t > 0.

Both transforms have confluent hypergeometric closed forms, evaluated here
through a log-scaled Kummer series; the alternative route integrates the
transform directly by adaptive quadrature, and `nu_general` implements the
general solution of the self-convolutive moment recurrence, giving a third
expression for the same density on the squared variable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

from scipy.integrate import quad

from .moments import u_sequence_numeric

__all__ = [
    "DensityParams",
    "ScaledValue",
    "SelfConvParams",
    "V_I",
    "V_R",
    "density",
    "density_moment_check",
    "f_hat",
    "hermite_He",
    "kummer_1f1",
    "ln_gamma",
    "nu_general",
    "semicircle_density",
]

_LN2 = math.log(2.0)
_LNPI = math.log(math.pi)
_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Natural-log size of alternating-head cancellation the double-precision
# series is allowed to absorb (about 7 digits) before escalating precision.
_SERIES_LOSS_CAP = 16.0

# Below this magnitude the additive noise floor of double-precision
# quadrature swamps the transform value and the scaled series is the only
# usable route.
_QUADRATURE_FLOOR = 1e-6

HERMITE_MAX_DEGREE = 50


class ScaledValue(NamedTuple):
    """A real number carried as (log of magnitude, sign in {-1, 0, +1})."""

    log_abs: float
    sign: float

    def value(self) -> float:
        if self.sign == 0.0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_abs)
        except OverflowError:
            return self.sign * math.inf


@dataclass(frozen=True)
class DensityParams:
    """Evaluation strategy for the density at a fixed alpha.

    method 'kummer' uses the hypergeometric closed forms, 'quadrature'
    integrates the Fourier transform directly, 'auto' uses the closed forms
    up to x_switch in the argument x = y^2/2 and quadrature beyond, checking
    that the two agree on the overlap band.
    """

    alpha: float
    method: str = "auto"
    series_tol: float = 1e-12
    x_switch: float = 50.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.method not in ("kummer", "quadrature", "auto"):
            raise ValueError(f"unknown method {self.method!r}")
        if not 0 < self.series_tol <= 1e-6:
            raise ValueError("series_tol must lie in (0, 1e-6]")
        if self.x_switch <= 0:
            raise ValueError("x_switch must be positive")


@dataclass(frozen=True)
class SelfConvParams:
    """Constants (a1, a2, a3) of the self-convolutive recurrence
    u_n = (a1*n + a2) u_{n-1} + a3 * sum u_i u_{n-i}."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        if self.a1 == 0:
            raise ValueError("a1 must be nonzero")

    @property
    def k(self) -> float:
        return 1.0 / self.a1

    @property
    def a(self) -> float:
        return self.a3 / self.a1

    @property
    def b(self) -> float:
        return -1.0 - self.a2 / self.a1


# ---------------------------------------------------------------------------
# Scalar special functions
# ---------------------------------------------------------------------------

def ln_gamma(x: float) -> float:
    """log Gamma(x) for x > 0."""
    if x <= 0:
        raise ValueError("ln_gamma requires x > 0")
    return math.lgamma(x)


def _series_head_loss(a: float, x: float) -> float:
    """Natural-log estimate of the alternating-head/sum ratio of the series.

    Zero for a >= 0 (all terms eventually positive, no cancellation); for
    a < 0 the head peaks near exp(2*sqrt(|a|*x) - x/2) relative to the sum.
    """
    if a >= 0.0 or x <= 0.0:
        return 0.0
    return max(0.0, 2.0 * math.sqrt(-a * x) - 0.5 * x)


def _kummer_mp(a: float, b: float, x: float, loss: float) -> ScaledValue:
    """High-precision fallback for head-cancellation regimes (large -a)."""
    import mpmath

    dps = int(loss / math.log(10.0)) + 25
    with mpmath.workdps(dps):
        v = mpmath.hyp1f1(a, b, x)
        if v == 0:
            return ScaledValue(-math.inf, 0.0)
        return ScaledValue(float(mpmath.log(abs(v))), 1.0 if v > 0 else -1.0)


def kummer_1f1(a: float, b: float, x: float, tol: float = 1e-15) -> ScaledValue:
    """Confluent hypergeometric 1F1(a; b; x) for x >= 0, in log scale.

    Power series with the term recurrence t_{k+1} = t_k (a+k) x / ((b+k)(k+1)),
    stopped once |term| <= tol * |partial sum| past the growth hump; partial
    sums are rescaled on the fly so arguments up to ~1e3 survive.  When a is
    negative enough that the alternating head would cancel below double
    precision, the evaluation escalates to an arbitrary-precision path.
    """
    if x < 0:
        raise ValueError("series evaluation requires x >= 0")
    if b <= 0 and b == int(b):
        raise ValueError("b must not be a nonpositive integer")
    loss = _series_head_loss(a, x)
    if loss > _SERIES_LOSS_CAP:
        return _kummer_mp(a, b, x, loss)

    term = 1.0
    total = 1.0
    offset = 0.0
    k = 0
    while True:
        term *= (a + k) * x / ((b + k) * (k + 1.0))
        total += term
        k += 1
        if term == 0.0 or (abs(term) <= tol * abs(total) and k > x):
            break
        if k > 200_000:
            raise RuntimeError(f"Kummer series did not converge at a={a}, b={b}, x={x}")
        if abs(total) > 1e250 or abs(term) > 1e250:
            total *= 1e-250
            term *= 1e-250
            offset += 250.0 * math.log(10.0)
    if total == 0.0:
        return ScaledValue(-math.inf, 0.0)
    return ScaledValue(math.log(abs(total)) + offset, math.copysign(1.0, total))


def hermite_He(m: int, y: float) -> float:
    """Probabilists' Hermite polynomial He_m(y) by the three-term recurrence."""
    if m < 0:
        raise ValueError("degree must be >= 0")
    if m > HERMITE_MAX_DEGREE:
        raise ValueError(f"Hermite recurrence capped at degree {HERMITE_MAX_DEGREE}")
    prev, cur = 1.0, y
    if m == 0:
        return prev
    for j in range(1, m):
        prev, cur = cur, y * cur - j * prev
    return cur


# ---------------------------------------------------------------------------
# Fourier transforms of the weight function
# ---------------------------------------------------------------------------

def _V_R_scaled(y: float, alpha: float, tol: float = 1e-15) -> ScaledValue:
    x = 0.5 * y * y
    F = kummer_1f1(0.5 * (1.0 - alpha), 0.5, x, tol)
    log_pref = (
        -0.5 * alpha * _LN2
        + 0.5 * math.lgamma(alpha + 1.0)
        + 0.5 * _LNPI
        - math.lgamma(0.5 * alpha + 0.5)
    )
    return ScaledValue(log_pref - x + F.log_abs, F.sign)


def _V_I_scaled(y: float, alpha: float, tol: float = 1e-15) -> ScaledValue:
    if y == 0.0:
        return ScaledValue(-math.inf, 0.0)
    x = 0.5 * y * y
    F = kummer_1f1(1.0 - 0.5 * alpha, 1.5, x, tol)
    log_pref = (
        0.5 * (1.0 - alpha) * _LN2
        + 0.5 * _LNPI
        + 0.5 * math.lgamma(alpha + 1.0)
        - math.lgamma(0.5 * alpha)
        + math.log(abs(y))
    )
    sign = F.sign if y > 0 else -F.sign
    return ScaledValue(log_pref - x + F.log_abs, sign)


def V_R(y: float, alpha: float) -> float:
    """Fourier cosine transform of the weight function (even in y)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return _V_R_scaled(y, alpha).value()


def V_I(y: float, alpha: float) -> float:
    """Fourier sine transform of the weight function (odd in y)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return _V_I_scaled(y, alpha).value()


def _f_hat_quadrature(y: float, alpha: float, tol: float = 1e-12) -> complex:
    """sqrt(2/pi) * integral of f_alpha(t) e^{iyt} over t > 0, by quadrature.

    The Gaussian factor confines the mass to t <= T; for alpha < 1 the
    endpoint singularity t^(alpha-1) is removed by the substitution
    t = s^(1/alpha).
    """
    log_c = _LNPI + 0.5 * (math.log(alpha) - math.lgamma(alpha)) - _LN_SQRT_2PI
    T = math.sqrt(2.0 * math.log(1.0 / tol)) + 10.0 + math.sqrt(max(alpha - 1.0, 0.0))
    ay = abs(y)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if alpha >= 1.0:
            def envelope(t):
                if t <= 0.0:
                    return math.exp(log_c) if alpha == 1.0 else 0.0
                return math.exp(log_c + (alpha - 1.0) * math.log(t) - 0.5 * t * t)

            if ay < 1e-14:
                re, re_err = quad(envelope, 0.0, T, epsabs=tol, epsrel=tol, limit=400)
                im, im_err = 0.0, 0.0
            else:
                re, re_err = quad(envelope, 0.0, T, weight="cos", wvar=ay,
                                  epsabs=tol, epsrel=tol, limit=400)
                im, im_err = quad(envelope, 0.0, T, weight="sin", wvar=ay,
                                  epsabs=tol, epsrel=tol, limit=400)
        else:
            inv = 1.0 / alpha
            c = math.exp(log_c) * inv

            def part(s, trig):
                u = s ** inv if s > 0.0 else 0.0
                return c * math.exp(-0.5 * u * u) * trig(ay * u)

            S = T ** alpha
            re, re_err = quad(part, 0.0, S, args=(math.cos,), epsabs=tol, epsrel=tol, limit=400)
            im, im_err = quad(part, 0.0, S, args=(math.sin,), epsabs=tol, epsrel=tol, limit=400)
    err = max(re_err, im_err)
    if err > 1e-8:
        raise RuntimeError(f"transform quadrature did not converge: achieved error estimate {err:.3e}")
    pref = math.sqrt(2.0 / math.pi)
    val = complex(pref * re, pref * im)
    return val.conjugate() if y < 0 else val


def _resolve_params(alpha: float, params) -> DensityParams:
    if params is None:
        return DensityParams(alpha=alpha)
    return params


def _kummer_branch(alpha: float, x: float, params: DensityParams,
                   vr: ScaledValue, vi: ScaledValue) -> bool:
    """Branch choice for method 'auto'.

    Quadrature takes over past x_switch, except where the transform value
    sits below the quadrature noise floor (large alpha, large y) and only
    the scaled closed form can represent it.
    """
    if x <= params.x_switch:
        return True
    return max(vr.log_abs, vi.log_abs) < math.log(_QUADRATURE_FLOOR)


def _band_check(y: float, alpha: float, params: DensityParams, kval: complex) -> None:
    qval = _f_hat_quadrature(y, alpha)
    if abs(kval - qval) > 1e-8 * (1.0 + abs(kval)):
        raise RuntimeError(
            f"closed-form/quadrature disagreement at y={y}, alpha={alpha}: "
            f"|diff|={abs(kval - qval):.3e}"
        )


def f_hat(y: float, alpha: float, params: DensityParams | None = None) -> complex:
    """Fourier transform of the weight function, V_R(y) + i V_I(y)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    params = _resolve_params(alpha, params)
    if params.method == "quadrature":
        return _f_hat_quadrature(y, alpha)
    x = 0.5 * y * y
    vr = _V_R_scaled(y, alpha, params.series_tol)
    vi = _V_I_scaled(y, alpha, params.series_tol)
    kval = complex(vr.value(), vi.value())
    if params.method == "kummer":
        return kval
    if _kummer_branch(alpha, x, params, vr, vi):
        if 0.5 * params.x_switch <= x <= params.x_switch:
            _band_check(y, alpha, params, kval)
        return kval
    return _f_hat_quadrature(y, alpha)


def density(y: float, alpha: float, params: DensityParams | None = None) -> float:
    """Density of the mean spectral measure at y (strictly positive, even)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    params = _resolve_params(alpha, params)
    x = 0.5 * y * y
    if params.method == "quadrature":
        fh = _f_hat_quadrature(y, alpha)
        return math.exp(-x) / math.sqrt(2.0 * math.pi) / (fh.real**2 + fh.imag**2)
    vr = _V_R_scaled(y, alpha, params.series_tol)
    vi = _V_I_scaled(y, alpha, params.series_tol)
    if params.method == "auto":
        if not _kummer_branch(alpha, x, params, vr, vi):
            fh = _f_hat_quadrature(y, alpha)
            return math.exp(-x) / math.sqrt(2.0 * math.pi) / (fh.real**2 + fh.imag**2)
        if 0.5 * params.x_switch <= x <= params.x_switch:
            _band_check(y, alpha, params, complex(vr.value(), vi.value()))
    # log-sum-exp over the two squared transforms keeps extreme arguments alive
    m2 = max(2.0 * vr.log_abs, 2.0 * vi.log_abs)
    if m2 == -math.inf:
        raise RuntimeError(f"transform vanished identically at y={y}, alpha={alpha}")
    log_sq = m2 + math.log(math.exp(2.0 * vr.log_abs - m2) + math.exp(2.0 * vi.log_abs - m2))
    return math.exp(-x - _LN_SQRT_2PI - log_sq)


# ---------------------------------------------------------------------------
# General self-convolutive solution
# ---------------------------------------------------------------------------

def nu_general(x: float, params: SelfConvParams, tol: float = 1e-15) -> float:
    """Stieltjes-solution density of the self-convolutive recurrence at x > 0.

    nu(x) = k (kx)^{-b} e^{-kx} / (Gamma(a+1) Gamma(a-b+1) (U_R(kx)^2 + U_I(kx)^2)),

    with U_R and U_I combinations of e^{-z} 1F1 terms.  Restricted to
    b in (0, 1): integer b makes the Gamma(b-1)/sin(pi b) pairing singular
    and is out of scope.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    a, b, k = params.a, params.b, params.k
    if not 0.0 < b < 1.0:
        raise ValueError(f"b = {b} outside (0, 1); the two-term closed form is only used there")
    if a <= 0:
        raise ValueError(f"a = {a} must be positive")
    z = k * x
    if z <= 0:
        raise ValueError("k*x must be positive")

    F1 = kummer_1f1(b - a, b, z, tol)
    F2 = kummer_1f1(1.0 - a, 2.0 - b, z, tol)
    t1 = F1.sign * math.exp(
        math.lgamma(1.0 - b) - math.lgamma(a - b + 1.0) + F1.log_abs - z
    ) if F1.sign else 0.0
    g = math.gamma(b - 1.0)  # finite and negative on (0, 1)
    t2 = F2.sign * math.copysign(1.0, g) * math.exp(
        math.log(abs(g)) - math.lgamma(a) + (1.0 - b) * math.log(z) + F2.log_abs - z
    ) if F2.sign else 0.0
    u_r = t1 - math.cos(math.pi * b) * t2
    u_i = math.sin(math.pi * b) * t2

    log_num = math.log(k) - b * math.log(z) - z - math.lgamma(a + 1.0) - math.lgamma(a - b + 1.0)
    return math.exp(log_num - math.log(u_r * u_r + u_i * u_i))


# ---------------------------------------------------------------------------
# Cross checks against the moment engine and the semicircle limit
# ---------------------------------------------------------------------------

def density_moment_check(alpha: float, n_max: int) -> list:
    """Relative deviations of quadrature moments of the density from u_n.

    Entry n compares 2 * integral_0^T y^{2n} density(y) dy against the exact
    recurrence value; T is chosen so the Gaussian-type tail is far below the
    integration tolerance (validated by self-consistency of entry 0).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 0 <= n_max <= 6:
        raise ValueError("moment check supports 0 <= n_max <= 6")
    params = DensityParams(alpha=alpha, method="kummer")
    targets = u_sequence_numeric(float(alpha), n_max).values
    T = math.sqrt(2.0 * math.log(1e16)) + 2.0 * math.sqrt(alpha) + 2.0
    out = []
    for n in range(n_max + 1):
        val, _ = quad(
            lambda t, n=n: t ** (2 * n) * density(t, alpha, params),
            0.0, T, epsabs=1e-13, epsrel=1e-11, limit=300,
        )
        out.append(abs(2.0 * val - targets[n]) / targets[n])
    return out


def semicircle_density(x: float) -> float:
    """Semicircle density on [-2, 2]; the large-alpha scaling limit."""
    if abs(x) >= 2.0:
        return 0.0
    return math.sqrt(4.0 - x * x) / (2.0 * math.pi)
