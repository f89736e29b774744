"""Exact univariate polynomials over arbitrary-precision rationals.

Every identity check in this package is a pass/fail comparison with zero
tolerance, so polynomial coefficients are `fractions.Fraction` values (always
reduced, positive denominator) rather than floats.  Coefficients are stored
lowest degree first with no trailing zeros; the zero polynomial has an empty
coefficient tuple.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["BigRational", "RationalPoly"]

# Arbitrary-precision rational number, reduced, denominator > 0.
BigRational = Fraction


def _coerce(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(
        f"exact coefficient expected (int, Fraction or 'num/den' string), got {type(value).__name__}; "
        "wrap floats in Fraction explicitly if binary representation is intended"
    )


class RationalPoly:
    """Immutable univariate polynomial with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_coerce(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("RationalPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "RationalPoly":
        return cls(())

    @classmethod
    def one(cls) -> "RationalPoly":
        return cls((Fraction(1),))

    @classmethod
    def x(cls) -> "RationalPoly":
        """The identity polynomial p(t) = t."""
        return cls((Fraction(0), Fraction(1)))

    @classmethod
    def constant(cls, c) -> "RationalPoly":
        return cls((_coerce(c),))

    # -- structure ---------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading_coefficient(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    # -- ring operations ---------------------------------------------------

    def __add__(self, other) -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            other = RationalPoly.constant(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RationalPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            other = RationalPoly.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "RationalPoly":
        return RationalPoly.constant(other) + (-self)

    def __mul__(self, other) -> "RationalPoly":
        if not isinstance(other, RationalPoly):
            other = RationalPoly.constant(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return RationalPoly.zero()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca == 0:
                continue
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RationalPoly":
        if n < 0:
            raise ValueError("negative polynomial power")
        out = RationalPoly.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # -- evaluation and composition ----------------------------------------

    def __call__(self, x):
        """Horner evaluation; exact for int/Fraction arguments, float for floats."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def shift(self, c) -> "RationalPoly":
        """Return q with q(t) = p(t + c), exactly.

        Taylor shift by repeated synthetic division (Horner shift), O(n^2);
        degrees in this package stay small, so nothing faster is needed.
        """
        c = _coerce(c)
        cs = list(self.coeffs)
        n = len(cs)
        for k in range(n):
            for i in range(n - 2, k - 1, -1):
                cs[i] += c * cs[i + 1]
        return RationalPoly(cs)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> list:
        """Coefficients as "num/den" strings, lowest degree first."""
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    @classmethod
    def from_json(cls, items) -> "RationalPoly":
        return cls(Fraction(s) for s in items)

    def __repr__(self):
        return f"RationalPoly([{', '.join(str(c) for c in self.coeffs)}])"
