from fractions import Fraction

import mpmath
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from aimtrig.exact_algebra import ComplexExact, to_mp
from aimtrig.potentials import (
    ConfigError,
    LadderBreakError,
    apply_equivalence,
    build_cos2_well,
    build_cos2x_well,
    build_cotangent_complex,
    build_double_cosine,
    build_mixed_cos_well,
    build_secant_squared,
    build_sine_squared,
    build_tangent_squared,
    cotangent_energy,
    cotangent_ladder,
    cotangent_ode_residual,
    cotangent_orthogonality_integral,
    cotangent_polynomials,
    load_config,
    quasi_exact_condition_double_cosine,
    sec2_energy,
    sine2_equivalences,
    spec_from_params,
    tan2_alpha,
    tan2_energy,
)
from conftest import to_sympy

REAL_SPECS = [
    build_sine_squared(Fraction(3, 2)),
    build_cos2_well(2),
    build_cos2x_well(2),
    build_mixed_cos_well(2),
    build_double_cosine(1, Fraction(-1, 8)),
    build_double_cosine(Fraction(1, 2), Fraction(1, 3), boundary="neumann"),
    build_tangent_squared(alpha=Fraction(1, 2)),
    build_tangent_squared(mu=3),
    build_secant_squared(3),
]


def _value(f, y, values):
    with mpmath.workdps(40):
        return f.num.eval_at(y, values) / f.den.eval_at(y, values)


@pytest.mark.parametrize("spec", REAL_SPECS, ids=lambda s: f"{s.name}-{s.params}")
@settings(max_examples=8)
@given(x_frac=st.floats(0.1, 0.9), energy=st.floats(-3, 20), c=st.floats(-1, 1))
def test_reduced_equation_matches_the_potential(spec, x_frac, energy, c):
    """psi = P f(y) turns the Schrodinger operator into -P y'^2 (f'' - lambda0 f' - s0 f)."""
    with mpmath.workdps(40):
        lo, hi = spec.x_interval()
        x = lo + (hi - lo) * mpmath.mpf(x_frac)
        E = mpmath.mpf(energy)
        f = lambda t: mpmath.exp(c * t) + t**3
        psi = lambda s: spec.prefactor(s) * f(spec.y_of_x(s))
        lhs = -mpmath.diff(psi, x, 2) + (spec.potential(x) - E) * psi(x)
        y = spec.y_of_x(x)
        yp = mpmath.diff(spec.y_of_x, x)
        values = {k: mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else v
                  for k, v in spec.values.items()}
        values[spec.energy_symbol] = spec.energy_map.to_internal(E)
        lam0, s0 = _value(spec.lambda0, y, values), _value(spec.s0, y, values)
        r = mpmath.diff(f, y, 2) - lam0 * mpmath.diff(f, y) - s0 * f(y)
        rhs = -spec.prefactor(x) * yp**2 * r
        assert abs(lhs - rhs) < 1e-20 * max(1, abs(lhs))


# -- double cosine and tangent squared -------------------------------------------------

def test_double_cosine_quasi_exact_condition():
    assert quasi_exact_condition_double_cosine(1) == (Fraction(-1, 8), Fraction(-3, 8))
    with pytest.raises(ConfigError):
        build_double_cosine(1, 0, boundary="periodic")


def test_tan2_alpha_is_rational_on_squares():
    assert tan2_alpha(2) == Fraction(1, 2)
    assert tan2_alpha(6) == 1
    a = tan2_alpha(3)
    assert abs(2 * a * (2 * a + 1) - 3) < 1e-40
    with pytest.raises(ConfigError):
        tan2_alpha(-1)
    with pytest.raises(ConfigError):
        build_tangent_squared()


def test_tan2_ground_state_is_poschl_teller():
    # mu sec^2 x with lambda (lambda - 1) = mu has ground energy lambda^2
    for mu in (2, 3, 6, 12):
        with mpmath.workdps(40):
            lam = (1 + mpmath.sqrt(1 + 4 * mu)) / 2
            assert abs(to_mp(tan2_energy(0, tan2_alpha(mu))) - lam**2 + mu) < 1e-30


def test_sec2_is_a_constant_shift():
    assert sec2_energy(2, 2) == tan2_energy(2, Fraction(1, 2)) + 2


def test_sine2_equivalence_shifts():
    rel = sine2_equivalences(4)
    assert apply_equivalence(rel["cos2_well"], [Fraction(1)]) == [Fraction(-3)]
    assert apply_equivalence(rel["cos2x_well"], [Fraction(1)]) == [Fraction(-1)]
    assert apply_equivalence(rel["mixed_cos_well"], [Fraction(1)]) == [Fraction(1)]


# -- complex cotangent ---------------------------------------------------------

Y, B = sp.symbols("y beta")
LISTED = [
    sp.Integer(1),
    -2 * Y + 2 * B,
    3 * Y**2 - 6 * B * Y + 2 * B**2 - 1,
    -3 * Y**3 + 9 * B * Y**2 - (6 * B**2 - 3) * Y + B**3 - 2 * B,
    15 * Y**4 - 60 * B * Y**3 + 30 * (2 * B**2 - 1) * Y**2 - 20 * B * (B**2 - 2) * Y + 2 * B**4 - 10 * B**2 + 3,
]


@pytest.mark.parametrize("n", range(5))
def test_cotangent_polynomials_match_listed_forms(n):
    g = cotangent_polynomials(-n, None, n)[n]
    ratio = sp.cancel(to_sympy(g) / LISTED[n])
    assert ratio.is_number and ratio != 0


@pytest.mark.parametrize("n", range(7))
def test_cotangent_ode_residual_vanishes(n):
    g = cotangent_polynomials(-n, None, n)[n]
    assert cotangent_ode_residual(g, -n).is_zero()


@given(st.fractions(min_value=-4, max_value=4, max_denominator=3))
def test_cotangent_residual_for_numeric_beta(v):
    for lev in cotangent_ladder(v, 4):
        assert cotangent_ode_residual(lev.g, lev.alpha, lev.beta).is_zero()
        assert lev.energy == (lev.alpha - 1) ** 2 + (lev.beta.im) ** 2


def test_cotangent_energies_for_v2():
    ladder = cotangent_ladder(2, 3)
    assert [lev.energy for lev in ladder] == [Fraction(2), Fraction(17, 4), Fraction(82, 9)]
    assert ladder[0].flagged and not ladder[1].flagged
    assert cotangent_energy(Fraction(-1), ComplexExact(0, Fraction(-1, 2))) == Fraction(17, 4)


def test_cotangent_ladder_break():
    with pytest.raises(LadderBreakError):
        cotangent_polynomials(Fraction(-1, 2), None, 3)


def test_cotangent_off_diagonal_integral_vanishes():
    with mpmath.workdps(30):
        assert abs(cotangent_orthogonality_integral(1, 2, -3, ComplexExact(0, Fraction(1, 3)))) < 1e-15


def test_complex_builder_flags_itself():
    spec = build_cotangent_complex(2)
    assert spec.complex and spec.energy_symbol is None


# -- configuration ---------------------------------------------------------------

def test_spec_from_params_and_config(tmp_path):
    path = tmp_path / "well.toml"
    path.write_text('potential = "double_cosine"\nv1 = 1\nv2 = "-1/8"\nboundary = "neumann"\n')
    data = load_config(path)
    spec = spec_from_params(data["potential"], data)
    assert spec.params["v2"] == Fraction(-1, 8) and spec.params["boundary"] == "neumann"
    bad = tmp_path / "bad.toml"
    bad.write_text("colour = 3\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        spec_from_params("morse", {})
