"""Energy and wavefunction corrections in powers of a coupling ``mu``.

The energy is written ``E = sum_k nu_k mu^k``.  Order ``k`` substitutes the
known ``nu_0 .. nu_{k-1}`` plus an unknown ``nu`` into the exact recurrence,
keeps powers of ``mu`` up to ``k`` only, and solves the ``mu^k`` part of the
termination condition, which is linear in ``nu``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .aim_engine import delta_terminates_identically, iterate_exact, spectrum_from_certificate
from .exact_algebra import (
    AlgebraError,
    ParamPoly,
    PoleError,
    PolyRing,
    RatFunc,
    as_exact,
    real_roots,
    reduce_in_y,
    to_mp,
)
from .potentials import PotentialSpec


class AmbiguityError(AlgebraError):
    """The order-k condition does not determine nu uniquely."""


class ZeroDivisorError(AlgebraError):
    """The order-k condition degenerated; lower coefficients are inconsistent."""


class ExpansionError(AlgebraError):
    pass


MAX_DEPTH = 16


@dataclass
class PerturbationSeries:
    level: int
    coeffs: list  # exact nu_0 .. nu_K
    depths: list = field(default_factory=list)  # recurrence depth used per order

    @property
    def K(self) -> int:
        return len(self.coeffs) - 1

    def as_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]


@dataclass
class AlphaExpansion:
    level: int
    k: int
    alpha_k: RatFunc  # function of y only
    depth: int


def _check_mu(spec: PotentialSpec):
    if "mu" not in spec.ring.params or spec.energy_symbol is None:
        raise ExpansionError(f"{spec.name} has no mu expansion")


def unperturbed_energy(spec: PotentialSpec, level: int):
    """Exact level at mu = 0 from the termination certificate."""
    _check_mu(spec)
    zero = {k: (0 if k == "mu" else v) for k, v in spec.values.items()}
    lam0, s0 = spec.lambda0.subs(zero), spec.s0.subs(zero)
    for n in range(level + 1, level + 1 + MAX_DEPTH):
        pair = iterate_exact(lam0, s0, n)
        _, cert = delta_terminates_identically(pair, symbol=spec.energy_symbol)
        cert.energy_rule = lambda r: spec.energy_map.to_physical(r.value)
        levels = spectrum_from_certificate(cert)
        if len(levels) > level:
            return levels[level], n
    raise ExpansionError(f"unperturbed level {level} not certified")


def _substituted_pair(spec: PotentialSpec, energy_poly: ParamPoly):
    """lambda0, s0 with the energy symbol replaced by a polynomial in mu (and nu)."""
    ring = energy_poly.ring
    other = {k: v for k, v in spec.values.items() if k != "mu"}
    lam0, s0 = spec.lambda0, spec.s0
    if other:
        lam0, s0 = lam0.subs(other), s0.subs(other)
    internal = (energy_poly - spec.energy_map.offset).scale(1 / spec.energy_map.scale)
    mapping = {spec.energy_symbol: internal}
    return lam0.compose(ring, mapping), s0.compose(ring, mapping)


def _partial_sum(ring: PolyRing, coeffs: Sequence) -> ParamPoly:
    mu = ring.sym("mu")
    out = ring.zero()
    for j, c in enumerate(coeffs):
        out = out + mu**j * c
    return out


def _solve_order(num: ParamPoly, k: int):
    """nu from the mu^k part of a delta numerator, or None if not yet determined."""
    for j in range(k):
        if not num.coeff("mu", j).is_zero():
            return None
    c = num.coeff("mu", k)
    if c.is_zero():
        return None
    if c.degree("nu") > 1:
        raise AmbiguityError(f"order-{k} condition has degree {c.degree('nu')} in nu")
    a, b = c.coeff("nu", 1), c.coeff("nu", 0)
    if a.is_zero():
        raise ZeroDivisorError(f"order-{k} condition does not involve nu; lower coefficients inconsistent")
    key = next(iter(a.terms))
    nu = -b.terms.get(key, Fraction(0)) / a.terms[key]
    if not (b + a * nu).is_zero():
        return None  # root still depends on y
    return nu


def energy_coefficient(spec: PotentialSpec, level: int, k: int, lower_coeffs: Sequence = ()) -> Fraction:
    return _energy_coefficient(spec, level, k, lower_coeffs)[0]


def _energy_coefficient(spec, level, k, lower_coeffs):
    _check_mu(spec)
    if k == 0:
        return unperturbed_energy(spec, level)
    if len(lower_coeffs) != k:
        raise ValueError(f"order {k} needs {k} lower coefficients, got {len(lower_coeffs)}")
    ring = PolyRing(("mu", "nu"))
    e = _partial_sum(ring, [as_exact(c) for c in lower_coeffs]) + ring.sym("mu") ** k * ring.sym("nu")
    lam0, s0 = _substituted_pair(spec, e)
    start = max(2, level + 2)
    found = None
    for depth in range(start, start + MAX_DEPTH):
        pair = iterate_exact(lam0, s0, depth, mu_truncate=("mu", k))
        nu = _solve_order(pair.delta.num, k)
        if nu is None:
            continue
        if found is not None and found[0] == nu:
            return found
        found = (nu, depth)
    raise ExpansionError(f"level {level}, order {k}: no y-independent coefficient up to depth {start + MAX_DEPTH}")


def perturbation_series(spec: PotentialSpec, level: int, K: int) -> PerturbationSeries:
    coeffs, depths = [], []
    for k in range(K + 1):
        c, d = _energy_coefficient(spec, level, k, coeffs)
        coeffs.append(c)
        depths.append(d)
    return PerturbationSeries(level, coeffs, depths)


def series_eval(series: PerturbationSeries, mu, K: int | None = None):
    """Partial sum through order K; exact when mu is exact (floats read as decimals)."""
    K = series.K if K is None else K
    m = as_exact(mu) if isinstance(mu, (int, float, str, Fraction)) else mu
    if isinstance(m, Fraction):
        return sum((c * m**k for k, c in enumerate(series.coeffs[: K + 1])), Fraction(0))
    return mpmath.fsum(to_mp(c) * m**k for k, c in enumerate(series.coeffs[: K + 1]))


def decimal_string(q: Fraction, places: int) -> str:
    """Round an exact rational to a fixed number of decimals (half away from zero)."""
    q = Fraction(q)
    if places < 0:
        raise ValueError("places must be >= 0")
    scaled = abs(q) * 10**places
    digits = str(math.floor(scaled + Fraction(1, 2))).rjust(places + 1, "0")
    sign = "-" if q < 0 and digits.strip("0") else ""
    if not places:
        return sign + digits
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


# ---------------------------------------------------------------------------
# wavefunction corrections


def _series_divide(num: list, den: list, order: int) -> list:
    """Coefficients of num/den as a power series, both given as coefficient lists."""
    if den[0].is_zero():
        raise ExpansionError("lambda_n has no mu^0 part")
    out = []
    for j in range(order + 1):
        acc = num[j] if j < len(num) else None
        for i in range(1, j + 1):
            if i < len(den) and not den[i].is_zero():
                t = den[i] * out[j - i]
                acc = t * -1 if acc is None else acc - t
        out.append((acc if acc is not None else den[0] * 0) / den[0])
    return out


def alpha_correction(spec: PotentialSpec, level: int, k: int, series: PerturbationSeries) -> AlphaExpansion:
    """mu^k coefficient of ``s_n / lambda_n`` at the eigen-energy series.

    The recurrence depth grows until that coefficient no longer changes.
    """
    _check_mu(spec)
    if series.K < k:
        raise ValueError(f"series has order {series.K} < {k}")
    ring = PolyRing(("mu",))
    lam0, s0 = _substituted_pair(spec, _partial_sum(ring, series.coeffs[: k + 1]))
    prev = None
    start = max(level + 1, 1)
    for depth in range(start, start + MAX_DEPTH):
        pair = iterate_exact(lam0, s0, depth, mu_truncate=("mu", k))
        lam = [pair.lam.coeff("mu", j) for j in range(k + 1)]
        s = [pair.s.coeff("mu", j) for j in range(k + 1)]
        ak = reduce_in_y(_series_divide(s, lam, k)[k].subs({"mu": 0}))
        if prev is not None and prev == ak:
            return AlphaExpansion(level, k, ak, depth - 1)
        prev = ak
    raise ExpansionError(f"alpha_{k} for level {level} did not settle")


def _poles_on_path(f: RatFunc, a, b):
    lo, hi = sorted((to_mp(a), to_mp(b)))
    return [r.value for base, _ in f.factors for r in real_roots(base.as_univariate("y"))
            if lo <= to_mp(r.value) <= hi]


def alpha_integral(alpha: AlphaExpansion, y, y_start=0):
    """``int_{y_start}^{y} alpha_k`` by adaptive quadrature (rel. tol 1e-12)."""
    f = alpha.alpha_k
    y = as_exact(y) if isinstance(y, (int, float, str)) else y
    poles = _poles_on_path(f, as_exact(y_start), y)
    if poles:
        raise PoleError(f"alpha_{alpha.k} has a pole at y = {', '.join(str(p) for p in poles)} on the path")
    num = [to_mp(c) for c in f.num.as_univariate("y")] if not f.num.is_zero() else [mpmath.mpf(0)]
    den = [to_mp(c) for c in f.den.as_univariate("y")]

    def g(t):
        return mpmath.polyval(num[::-1], t) / mpmath.polyval(den[::-1], t)

    with mpmath.workdps(max(mpmath.mp.dps, 30)):
        val, err = mpmath.quad(g, [to_mp(y_start), to_mp(y)], error=True)
        if abs(err) > mpmath.mpf(10) ** -12 * max(1, abs(val)):
            val = mpmath.quad(g, mpmath.linspace(to_mp(y_start), to_mp(y), 9))
    return val


def wavefunction_factor(alpha: AlphaExpansion, y, mu, y_start=0):
    """``exp(-mu^k int alpha_k)``; raises PoleError when a pole lies on the path."""
    q = alpha_integral(alpha, y, y_start)
    return mpmath.exp(-to_mp(as_exact(mu) if isinstance(mu, (float, int, str)) else mu) ** alpha.k * q)
