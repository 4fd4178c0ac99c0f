from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from aimtrig.exact_algebra import ComplexExact
from aimtrig.potentials import cotangent_orthogonality_integral, tan2_factor_root
from aimtrig.special_functions import (
    Hyp2F1Params,
    ParameterError,
    ValidityError,
    gamma_ratio_norm,
    hyp2f1_poly,
    pochhammer,
)

rats = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def test_pochhammer_values():
    assert pochhammer(2, 3) == 24
    assert pochhammer(-3, 5) == 0
    assert pochhammer(Fraction(1, 2), 2) == Fraction(3, 4)
    assert pochhammer(7, 0) == 1
    with pytest.raises(ParameterError):
        pochhammer(1, -1)


@given(rats, st.integers(0, 6))
def test_pochhammer_step(lam, k):
    assert pochhammer(lam, k + 1) == pochhammer(lam, k) * (lam + k)


def test_pochhammer_complex_exact():
    p = pochhammer(ComplexExact(0, 1), 2)
    assert p == ComplexExact(-1, 1)


def test_terminating_sum():
    assert hyp2f1_poly(1, 3, Fraction(3, 2), Fraction(1, 3)) == Fraction(1, 3)
    assert hyp2f1_poly(0, 5, 7, 11) == 1


@given(st.integers(0, 5), rats, rats, rats)
def test_against_mpmath(n, b, c, z):
    if any(c + j == 0 for j in range(n)):
        with pytest.raises(ParameterError):
            hyp2f1_poly(n, b, c, z)
        return
    exact = hyp2f1_poly(n, b, c, z)
    with mpmath.workdps(30):
        ref = mpmath.hyp2f1(-n, b, c, z) if c.denominator != 1 or c > 0 else None
        if ref is not None:
            assert abs(mpmath.mpf(exact.numerator) / exact.denominator - ref) < 1e-20 * max(1, abs(ref))


@given(st.integers(1, 5), rats, rats.filter(lambda c: c.denominator > 1), rats)
def test_contiguous_relation_in_c(n, b, c, z):
    # c(c-1)(z-1) F(c-1) + c[c-1-(2c-a-b-1)z] F(c) + (c-a)(c-b) z F(c+1) = 0
    a = -n
    F = lambda cc: hyp2f1_poly(n, b, cc, z)
    lhs = c * (c - 1) * (z - 1) * F(c - 1) + c * (c - 1 - (2 * c - a - b - 1) * z) * F(c) + (c - a) * (c - b) * z * F(c + 1)
    assert lhs == 0


def test_parameter_object():
    p = Hyp2F1Params(-2, 3, Fraction(5, 2))
    assert p.n == 2 and p(0) == 1
    with pytest.raises(ParameterError):
        Hyp2F1Params(Fraction(1, 2), 1, 1)


@pytest.mark.parametrize("alpha", [Fraction(1, 2), Fraction(1), Fraction(3, 2)])
@pytest.mark.parametrize("n", range(5))
def test_tan2_polynomial_solutions(alpha, n):
    """2F1(-n, n+4a+2; 2a+3/2; (1-y)/2) solves the reduced tangent-squared equation."""
    y = sp.Symbol("y")
    w = tan2_factor_root(n, alpha)
    pts = [Fraction(k, n + 2) for k in range(n + 1)]
    vals = [hyp2f1_poly(n, n + 4 * alpha + 2, 2 * alpha + Fraction(3, 2), (1 - t) / 2) for t in pts]
    g = sp.interpolate([(sp.Rational(t.numerator, t.denominator), sp.Rational(v.numerator, v.denominator))
                        for t, v in zip(pts, vals)], y) if n else sp.Integer(vals[0])
    a = sp.Rational(alpha.numerator, alpha.denominator)
    res = (1 - y**2) * sp.diff(g, y, 2) - (4 * a + 3) * y * sp.diff(g, y) - (sp.Integer(w) + 2 * a) * g
    assert sp.expand(res) == 0


@pytest.mark.parametrize("beta", [Fraction(7, 10), ComplexExact(0, Fraction(3, 10))])
@pytest.mark.parametrize("n", range(4))
def test_norm_matches_quadrature(beta, n):
    alpha = -3 - n
    with mpmath.workdps(30):
        closed = gamma_ratio_norm(alpha, beta, n)
        quad = cotangent_orthogonality_integral(n, n, alpha, beta)
        assert abs(quad - closed) < 1e-12 * abs(closed)


def test_norm_simplest_case():
    assert abs(gamma_ratio_norm(-1, 0, 0) - mpmath.pi / 2) < 1e-14


def test_norm_validity_range():
    with pytest.raises(ValidityError):
        gamma_ratio_norm(0, 1, 1)
    with pytest.raises(ValidityError):
        gamma_ratio_norm(ComplexExact(0, 1), 1, 0)
