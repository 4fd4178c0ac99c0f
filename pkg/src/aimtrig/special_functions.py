"""Pochhammer symbols, terminating Gauss hypergeometric sums, and the
Gamma-ratio normalization of the cotangent polynomials.

Exact inputs (int, Fraction, ComplexExact) give exact outputs.  Anything
else is evaluated with mpmath at the ambient precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .exact_algebra import ComplexExact, _is_exact, _squash, to_mp


class ParameterError(ValueError):
    pass


class ValidityError(ValueError):
    """Parameters outside the range where a closed form holds."""


def _lift(x):
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Fraction(x)
    if _is_exact(x):
        return x
    return to_mp(x)


def pochhammer(lam, k: int):
    """Rising factorial ``lam (lam+1) ... (lam+k-1)``."""
    if k < 0:
        raise ParameterError(f"k must be >= 0, got {k}")
    lam = _lift(lam)
    out = Fraction(1) if _is_exact(lam) else mpmath.mpf(1)
    for j in range(k):
        out = out * (lam + j)
    return _squash(out) if _is_exact(out) else out


def _is_zero(x) -> bool:
    if isinstance(x, ComplexExact):
        return x.re == 0 and x.im == 0
    return x == 0


@dataclass(frozen=True)
class Hyp2F1Params:
    a: object
    b: object
    c: object

    def __post_init__(self):
        a = _lift(self.a)
        if not (isinstance(a, Fraction) and a.denominator == 1 and a <= 0):
            raise ParameterError(f"only terminating series are supported (a = -n), got a = {self.a}")

    @property
    def n(self) -> int:
        return int(-_lift(self.a))

    def __call__(self, z):
        return hyp2f1_poly(self.n, self.b, self.c, z)


def hyp2f1_poly(n: int, b, c, z):
    """``2F1(-n, b; c; z)`` as the finite sum of ``n+1`` terms."""
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    b, c, z = _lift(b), _lift(c), _lift(z)
    for j in range(n):
        if _is_zero(c + j):
            raise ParameterError(f"c = {c} hits a pole of (c)_k within the first {n + 1} terms")
    exact = all(_is_exact(v) for v in (b, c, z))
    term = Fraction(1) if exact else mpmath.mpf(1)
    total = term
    for k in range(n):
        # ratio of consecutive terms
        term = term * (k - n) * (b + k) * z / ((c + k) * (k + 1))
        total = total + term
    return _squash(total) if exact else total


def gamma_ratio_norm(alpha, beta, n: int):
    """Closed-form diagonal value of the weighted cotangent-polynomial integral.

    ``int g_n^2 (1+y^2)^(alpha-1) exp(2 beta arctan y) dy`` over the real line,
    valid for ``alpha < 1/2 - n``.  The complex Gamma values come from mpmath.
    """
    a = _lift(alpha)
    if isinstance(a, ComplexExact):
        raise ValidityError("alpha must be real")
    if not a < Fraction(1, 2) - n:
        raise ValidityError(f"alpha = {alpha} is outside alpha < 1/2 - n = {Fraction(1, 2) - n}")
    a = to_mp(a)
    b = to_mp(_lift(beta))
    ib = mpmath.mpc(0, 1) * b
    head = (-1) ** n * mpmath.power(4, n + a) * mpmath.rf(a + ib, n) * mpmath.pi * mpmath.gamma(1 - 2 * a)
    head /= mpmath.gamma(-a + ib + 1) * mpmath.gamma(-a - ib + 1)
    tail = mpmath.rf(a - ib, n) / mpmath.rf(2 * a, n) * (2 * a + n - 1) / (2 * a + 2 * n - 1) * mpmath.factorial(n)
    out = head * tail
    if isinstance(out, mpmath.mpc) and abs(out.imag) <= mpmath.mpf(10) ** (5 - mpmath.mp.dps) * abs(out):
        return out.real
    return out
