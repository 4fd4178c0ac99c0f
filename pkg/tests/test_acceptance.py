"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed in the pytest
terminal summary.
"""

import math
import time
from fractions import Fraction
from itertools import product

import mpmath
import numpy as np
import pytest

from aimtrig import tables
from aimtrig.aim_engine import certify_spectrum, eigenvalues_numeric, iterate_exact, spectrum_from_certificate
from aimtrig.exact_algebra import ComplexExact, divide_exact, to_mp
from aimtrig.perturbation import alpha_correction, alpha_integral, perturbation_series, series_eval
from aimtrig.potentials import (
    apply_equivalence,
    build_cos2_well,
    build_cos2x_well,
    build_double_cosine,
    build_mixed_cos_well,
    build_secant_squared,
    build_sine_squared,
    build_tangent_squared,
    build_wide_double_cosine_potential,
    cotangent_ode_residual,
    cotangent_orthogonality_integral,
    cotangent_polynomials,
    scaling_relation,
    sec2_energy,
    sine2_equivalences,
    tan2_energy,
    tan2_factor_root,
)
from aimtrig.reference_oracle import GridProblem, extrapolated_eigenvalues, problem_from_spec
from aimtrig.special_functions import gamma_ratio_norm
from conftest import ACCEPTANCE_LINES, to_sympy


def report(label: str, ok: bool, detail: str = ""):
    line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def mp(x):
    return to_mp(x) if isinstance(x, Fraction) else mpmath.mpf(x)


# 1 ---------------------------------------------------------------------------------

def test_criterion_1_table1():
    t0 = time.time()
    mus = [m for m in tables.TABLE1_MU if m != "0"]
    got = tables.compute_table1(mus, levels=6, digits=12, max_iter=40, precision=50)
    elapsed = time.time() - t0
    worst = 0.0
    for mu in mus:
        for n, (e, _) in enumerate(got[mu]):
            worst = max(worst, float(abs(e - mpmath.mpf(tables.TABLE1[mu][n]))))
    complete = all(len(got[mu]) == 6 for mu in mus)
    report("1 Table 1, 30 entries within 1e-9", complete and worst < 1e-9 and elapsed < 120,
           f"max |diff| = {worst:.1e}, {elapsed:.0f} s")


# 2 ---------------------------------------------------------------------------------

def test_criterion_2_box_column():
    cert = certify_spectrum(build_sine_squared(0), 6)
    exact = spectrum_from_certificate(cert, 6)
    res = eigenvalues_numeric(build_sine_squared(0), levels=6, digits=35, precision=50)
    with mpmath.workdps(50):
        worst = max(abs(r.energy - (n + 1) ** 2) for n, r in enumerate(res))
    ok = exact == [Fraction((n + 1) ** 2) for n in range(6)] and len(res) == 6 and worst < mpmath.mpf(10) ** -30
    report("2 mu = 0 column equals (n+1)^2", ok, f"exact certificate; numeric max |diff| = {mpmath.nstr(worst, 3)}")


# 3 ---------------------------------------------------------------------------------

def test_criterion_3_perturbation_coefficients():
    spec = build_sine_squared(1)
    s0 = perturbation_series(spec, 0, 4).coeffs[1:]
    s1 = perturbation_series(spec, 1, 2).coeffs[1:]
    s2 = perturbation_series(spec, 2, 2).coeffs[2]
    s3 = perturbation_series(spec, 3, 2).coeffs[2]
    ok = (list(s0) == [Fraction(1, 4), Fraction(-1, 128), Fraction(1, 4096), Fraction(-1, 393216)]
          and list(s1) == [Fraction(1, 2), Fraction(-1, 192)]
          and s2 == Fraction(1, 256) == Fraction(1, 32 * 2 * 4)
          and s3 == Fraction(1, 480) == Fraction(1, 32 * 3 * 5))
    report("3 exact energy coefficients", ok, f"level 0: {[str(c) for c in s0]}")


# 4 ---------------------------------------------------------------------------------

def test_criterion_4_table2():
    got = tables.compute_table2()
    bad = [(lev, mu) for lev, row in got.items() for mu, (_, s) in zip(tables.TABLE2_MU, row)
           if s != tables.TABLE2[lev][tables.TABLE2_MU.index(mu)]]
    report("4 Table 2 decimal strings", not bad, f"{9 - len(bad)}/9 identical")


# 5 ---------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def dirichlet_table3():
    return tables.compute_table3(levels=10, digits=12, max_iter=70, precision=50)


@pytest.mark.xfail(strict=True, reason="printed levels 1..9 belong to the zero-slope wall problem; see Neumann test")
def test_criterion_5_table3(dirichlet_table3):
    diffs = [abs(e - mpmath.mpf(ref)) for (e, _), ref in zip(dirichlet_table3, tables.TABLE3)]
    bad = [n for n, d in enumerate(diffs) if d >= 1e-9]
    report("5 Table 3, 10 levels within 1e-9 (vanishing walls)", len(diffs) == 10 and not bad,
           f"levels off: {bad}")


def test_criterion_5_quasi_exact_ground_state(dirichlet_table3):
    cert = certify_spectrum(build_double_cosine(*tables.TABLE3_PARAMS), 1)
    e0 = spectrum_from_certificate(cert)
    numeric = dirichlet_table3[0][0]
    ok = e0 == [Fraction(-3, 8)] and abs(numeric + mpmath.mpf(3) / 8) < 1e-12
    report("5 E0 = -3/8 exactly (quasi-exact path)", ok, f"certified at iteration {cert.n}")


def test_criterion_5_supplement_zero_slope_walls():
    got = tables.compute_table3(levels=10, digits=12, max_iter=70, precision=50, boundary="neumann")
    diffs = [abs(e - mpmath.mpf(ref)) for (e, _), ref in zip(got[1:], tables.TABLE3[1:])]
    ok = len(diffs) == 9 and max(diffs) < 1e-9
    report("5 (supplement) Table 3 levels 1..9 within 1e-9 with zero-slope walls", ok,
           f"max |diff| = {mpmath.nstr(max(diffs), 3)}")


# 6 ---------------------------------------------------------------------------------

def test_criterion_6_tangent_squared():
    ok, worst = True, 0.0
    for alpha in (Fraction(1, 2), Fraction(1), Fraction(3, 2)):
        spec = build_tangent_squared(alpha=alpha)
        lam0, s0 = spec.exact_pair()
        rest = iterate_exact(lam0, s0, 6).delta.num
        w = rest.ring.sym("w")
        for n in range(6):
            rest = divide_exact(rest, w - tan2_factor_root(n, alpha))
            ok = ok and rest is not None
        res = eigenvalues_numeric(spec, levels=6, digits=14, precision=50)
        ok = ok and len(res) == 6
        worst = max([worst] + [float(abs(r.energy - mp(tan2_energy(n, alpha)))) for n, r in enumerate(res)])
    report("6 tangent-squared factor ladder and jet eigenvalues", ok and worst < 1e-10, f"max |diff| = {worst:.1e}")


# 7 ---------------------------------------------------------------------------------

def test_criterion_7_cotangent_suite():
    import sympy as sp

    y, b = sp.Symbol("y"), sp.Symbol("beta")
    listed = [
        sp.Integer(1),
        -2 * y + 2 * b,
        3 * y**2 - 6 * b * y + 2 * b**2 - 1,
        -3 * y**3 + 9 * b * y**2 - (6 * b**2 - 3) * y + b**3 - 2 * b,
        15 * y**4 - 60 * b * y**3 + 30 * (2 * b**2 - 1) * y**2 - 20 * b * (b**2 - 2) * y + 2 * b**4 - 10 * b**2 + 3,
    ]
    scales_ok = all(sp.cancel(to_sympy(cotangent_polynomials(-n, None, n)[n]) / listed[n]).is_number
                    for n in range(5))
    residual_ok = all(cotangent_ode_residual(cotangent_polynomials(-n, None, n)[n], -n).is_zero() for n in range(7))
    off, rel = 0, 0
    with mpmath.workdps(30):
        for alpha, beta in product((-4, Fraction(-7, 2)), (Fraction(7, 10), ComplexExact(0, Fraction(3, 10)))):
            for n, m in product(range(4), repeat=2):
                val = cotangent_orthogonality_integral(n, m, alpha, beta)
                if n != m:
                    off = max(off, abs(val))
                else:
                    closed = gamma_ratio_norm(alpha, beta, n)
                    rel = max(rel, abs(val - closed) / abs(closed))
    ok = scales_ok and residual_ok and off < 1e-8 and rel < 1e-8
    report("7 cotangent polynomials, residuals, orthogonality", ok,
           f"max |off-diagonal| = {mpmath.nstr(off, 3)}, max diagonal rel err = {mpmath.nstr(rel, 3)}")


# 8 ---------------------------------------------------------------------------------

def test_criterion_8_equivalences():
    worst = 0.0
    for mu in (1, 5):
        base = eigenvalues_numeric(build_sine_squared(mu), levels=6, digits=12).energies
        rels = sine2_equivalences(mu)
        for key, builder in (("cos2_well", build_cos2_well), ("cos2x_well", build_cos2x_well),
                             ("mixed_cos_well", build_mixed_cos_well)):
            other = eigenvalues_numeric(builder(mu), levels=6, digits=12).energies
            shifted = apply_equivalence(rels[key], base)
            worst = max([worst] + [float(abs(a - b)) for a, b in zip(other, shifted)])
    sec_worst = 0.0
    for mu in (2, 3, 7):
        res = eigenvalues_numeric(build_secant_squared(mu), levels=5, digits=14, precision=50)
        sec_worst = max([sec_worst] + [float(abs(r.energy - mp(sec2_energy(n, mu)))) for n, r in enumerate(res)])
    # k = 2: V(x) = v1 cos(x/2) + v2 cos(x) on (0, 4 pi) against the rescaled couplings
    k = 2
    pot, (lo, hi) = build_wide_double_cosine_potential(Fraction(1, 4), Fraction(-1, 32), k)
    wide = extrapolated_eigenvalues(GridProblem(lo, hi, 2000, lambda x: pot(x, np)), 4)
    narrow = eigenvalues_numeric(build_double_cosine(1, Fraction(-1, 8)), levels=4, digits=12, max_iter=60).energies
    scaled = apply_equivalence(scaling_relation(k), narrow)
    scale_worst = max(abs(w.value - float(s)) for w, s in zip(wide, scaled))
    ok = worst < 1e-9 and sec_worst < 1e-10 and scale_worst < 1e-6
    report("8 equivalence relations", ok,
           f"shifts {worst:.1e}, sec^2 {sec_worst:.1e}, k=2 scaling {scale_worst:.1e}")


# 9 ---------------------------------------------------------------------------------

def test_criterion_9_oracle_concordance():
    worst = 0.0
    specs = [build_sine_squared(1), build_sine_squared(10), build_double_cosine(*tables.TABLE3_PARAMS)]
    for spec in specs:
        aim = eigenvalues_numeric(spec, levels=4, digits=12, max_iter=60).energies
        fd = extrapolated_eigenvalues(problem_from_spec(spec, N=1000), 4)
        worst = max([worst] + [abs(f.value - float(a)) for f, a in zip(fd, aim)])
        assert len(aim) == 4
    report("9 finite differences agree with iteration", worst < 1e-6, f"max |diff| = {worst:.1e}")


# 10 --------------------------------------------------------------------------------

def test_criterion_10_wavefunction_perturbation():
    spec = build_sine_squared(1)
    integral_err = 0.0
    for level, coef in ((0, Fraction(1, 8)), (1, Fraction(1, 12))):
        a1 = alpha_correction(spec, level, 1, perturbation_series(spec, level, 1))
        for y in (0.2, 0.5, 0.8):
            integral_err = max(integral_err, float(abs(alpha_integral(a1, y) - mp(coef) * mpmath.mpf(y) ** 2)))
    mus = ("0.1", "0.01", "0.001")
    series = perturbation_series(spec, 0, 4)
    exact = [eigenvalues_numeric(build_sine_squared(m), levels=1, digits=40, precision=60, max_iter=60)[0].energy
             for m in mus]
    slopes = []
    with mpmath.workdps(60):
        for K in range(1, 5):
            errs = [abs(e - to_mp(series_eval(series, m, K=K))) for e, m in zip(exact, mus)]
            slope = np.polyfit(np.log([float(m) for m in mus]), [float(mpmath.log(e)) for e in errs], 1)[0]
            slopes.append(slope)
    slopes_ok = all(s >= K + 0.5 for K, s in enumerate(slopes, start=1))
    report("10 first-order integrals and series error scaling", integral_err < 1e-10 and slopes_ok,
           f"integral err {integral_err:.1e}; slopes K=1..4: {', '.join(f'{s:.2f}' for s in slopes)}")
