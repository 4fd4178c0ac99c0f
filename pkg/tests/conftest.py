from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import settings

from aimtrig.exact_algebra import ComplexExact, RatFunc

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def sym_scalar(c):
    if isinstance(c, ComplexExact):
        return sp.Rational(c.re.numerator, c.re.denominator) + sp.I * sp.Rational(c.im.numerator, c.im.denominator)
    c = Fraction(c)
    return sp.Rational(c.numerator, c.denominator)


def to_sympy(p, names=None):
    """ParamPoly or RatFunc -> sympy expression in symbols named after the ring."""
    if isinstance(p, RatFunc):
        return to_sympy(p.num, names) / to_sympy(p.den, names)
    names = names or ["y", *p.ring.params]
    syms = [sp.Symbol(n) for n in names]
    out = sp.Integer(0)
    for key, c in p.terms.items():
        term = sym_scalar(c)
        for s, e in zip(syms, key):
            term *= s**e
        out += term
    return sp.expand(out)


@pytest.fixture
def sympify_poly():
    return to_sympy


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
