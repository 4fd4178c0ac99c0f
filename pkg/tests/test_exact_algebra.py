from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import assume, given
from hypothesis import strategies as st

from aimtrig.exact_algebra import (
    ComplexExact,
    ModeError,
    ParamPoly,
    PoleError,
    PolyRing,
    RatFunc,
    RingMismatchError,
    as_exact,
    coeff_of_mu,
    content_in,
    divide_exact,
    real_roots,
    reduce_in_y,
)
from conftest import to_sympy

RING = PolyRing(("a",))
Y, A = sp.symbols("y a")

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gauss = st.builds(ComplexExact, fractions, fractions)


def polys(max_terms=4, ring=RING):
    key = st.tuples(st.integers(0, 3), st.integers(0, 2))
    return st.dictionaries(key, fractions, max_size=max_terms).map(lambda t: ParamPoly(ring, t))


nonzero_polys = polys().filter(lambda p: not p.is_zero())


# -- scalars -----------------------------------------------------------------

def test_float_goes_through_decimal_repr():
    assert as_exact(0.1) == Fraction(1, 10)
    assert as_exact("-3/8") == Fraction(-3, 8)
    with pytest.raises(TypeError):
        as_exact(True)


@given(gauss, gauss, gauss)
def test_gaussian_rationals_form_a_field(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if b != 0:
        assert (a / b) * b == a


def test_complex_squash():
    assert as_exact(2 + 0j) == 2
    assert isinstance(as_exact(1 + 2j), ComplexExact)


# -- polynomials ---------------------------------------------------------------

@given(polys(), polys())
def test_ring_ops_agree_with_sympy(p, q):
    assert to_sympy(p + q) == sp.expand(to_sympy(p) + to_sympy(q))
    assert to_sympy(p * q) == sp.expand(to_sympy(p) * to_sympy(q))
    assert to_sympy(p - q) == sp.expand(to_sympy(p) - to_sympy(q))


@given(polys())
def test_derivative_matches_sympy(p):
    assert to_sympy(p.diff_y()) == sp.diff(to_sympy(p), Y)


@given(polys(), polys())
def test_exact_division_recovers_factor(p, q):
    assume(not q.is_zero())
    assert divide_exact(p * q, q) == p


@given(polys(), fractions, fractions)
def test_eval_matches_sympy(p, yv, av):
    expect = to_sympy(p).subs({Y: sym(yv), A: sym(av)})
    assert sym(p.eval_at(yv, {"a": av})) == expect


def sym(c):
    return sp.Rational(c.numerator, c.denominator)


def test_ring_mismatch_is_an_error():
    other = PolyRing(("b",))
    with pytest.raises(RingMismatchError):
        RING.y() + other.y()


def test_real_ring_rejects_imaginary_coefficients():
    with pytest.raises(ModeError):
        RING.const(ComplexExact(0, 1))
    assert RING.with_complex().const(ComplexExact(0, 1)).terms


def test_content_in_parameter():
    # (a - 2)(a + 1) y^2 + (a - 2) y
    a, y = RING.sym("a"), RING.y()
    p = (a - 2) * (a + 1) * y * y + (a - 2) * y
    assert content_in(p, "a") == [Fraction(-2), Fraction(1)]


# -- rational functions --------------------------------------------------------

@given(polys(), nonzero_polys, polys(), nonzero_polys)
def test_ratfunc_field_ops(n1, d1, n2, d2):
    f = RatFunc(n1, [(d1, 1)])
    g = RatFunc(n2, [(d2, 2)])
    lhs = to_sympy(f + g) - (to_sympy(n1) / to_sympy(d1) + to_sympy(n2) / to_sympy(d2) ** 2)
    assert sp.cancel(lhs) == 0
    lhs = to_sympy(f * g) - to_sympy(n1) * to_sympy(n2) / (to_sympy(d1) * to_sympy(d2) ** 2)
    assert sp.cancel(lhs) == 0


@given(polys(), nonzero_polys)
def test_ratfunc_derivative(n, d):
    f = RatFunc(n, [(d, 1)])
    assert sp.cancel(to_sympy(f.diff()) - sp.diff(to_sympy(n) / to_sympy(d), Y)) == 0


def test_repeated_derivatives_keep_denominator_factored():
    ring = PolyRing()
    f = RatFunc(ring.y(), [(ring.poly_y([1, 0, -1]), 1)])
    for _ in range(6):
        f = f.diff()
    assert len(f.factors) == 1
    base, power = f.factors[0]
    assert power == 7 and base.degree_y() == 2
    assert sp.cancel(to_sympy(f) - sp.diff(Y / (1 - Y**2), Y, 6)) == 0


def test_pole_error_on_evaluation():
    ring = PolyRing()
    f = RatFunc(ring.const(1), [(ring.poly_y([-1, 2]), 1)])
    with pytest.raises(PoleError):
        f.eval_at(Fraction(1, 2))
    assert f.eval_at(1) == 1


def test_reduce_in_y_cancels_common_factor():
    ring = PolyRing()
    y = ring.y()
    f = RatFunc((y - 1) * (y + 2), [((y - 1) * (y + 3), 1)])
    r = reduce_in_y(f)
    assert r.den.degree_y() == 1
    assert sp.cancel(to_sympy(r) - (Y + 2) / (Y + 3)) == 0


def test_coefficient_of_mu():
    ring = PolyRing(("mu",))
    mu, y = ring.sym("mu"), ring.y()
    f = RatFunc.from_poly(y + mu * y * y * 3 + mu * mu)
    assert coeff_of_mu(f, 1) == RatFunc.from_poly(ring.poly_y([0, 0, 3]))


# -- roots ---------------------------------------------------------------------

@given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=5), min_size=1, max_size=4),
       st.lists(st.integers(2, 7), max_size=2))
def test_real_roots_with_multiplicity(rats, irr):
    # product of (y - r) and (y^2 - k) for nonsquare k
    irr = [k for k in irr if k not in (4,)]
    ring = PolyRing()
    p = ring.const(1)
    for r in rats:
        p = p * (ring.y() - r)
    for k in irr:
        p = p * ring.poly_y([-k, 0, 1])
    roots = real_roots(p, digits=25)
    expect = sp.Poly(to_sympy(p), Y).real_roots()
    assert sum(r.multiplicity for r in roots) == len(expect)
    for r in roots:
        if r.exact:
            assert p.eval_at(r.value) == 0
        else:
            with mpmath.workdps(40):
                assert any(abs(r.value - mpmath.mpf(str(sp.N(e, 40)))) < mpmath.mpf(10) ** -22 for e in expect)
    assert sorted(set(Fraction(r.value) for r in roots if r.exact)) == sorted(set(rats))


def test_real_roots_interval_is_half_open():
    ring = PolyRing()
    p = ring.poly_y([0, -1, 0, 1])  # y^3 - y
    got = [r.value for r in real_roots(p, interval=(-1, 1))]
    assert got == [0, 1]


def test_sqrt2_to_requested_digits():
    ring = PolyRing()
    (neg, pos) = real_roots(ring.poly_y([-2, 0, 1]), digits=40)
    with mpmath.workdps(50):
        assert abs(pos.value - mpmath.sqrt(2)) < mpmath.mpf(10) ** -39
    assert not pos.exact and neg.value < 0
