"""Catalog of confined trigonometric potentials in AIM form.

Every builder returns a :class:`PotentialSpec`: the pair ``(lambda0, s0)`` of
the transformed equation ``f'' = lambda0 f' + s0 f`` in the coordinate ``y``,
plus what is needed to map back to ``x`` and to a physical energy.  Units are
chosen so the well parameter ``a`` is 1; energies are the dimensionless
``a^2 E``.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Mapping

import mpmath

from .exact_algebra import (
    AlgebraError,
    ComplexExact,
    ParamPoly,
    PolyRing,
    RatFunc,
    as_exact,
    to_mp,
)
from .series_jets import DEFAULT_PRECISION

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib


class ConfigError(ValueError):
    pass


class LadderBreakError(AlgebraError, ZeroDivisionError):
    def __init__(self, index: int, msg: str):
        super().__init__(f"recurrence denominator vanishes at step {index}: {msg}")
        self.index = index


@dataclass(frozen=True)
class EnergyMap:
    """``physical = offset + scale * internal``."""

    scale: Fraction = Fraction(1)
    offset: Fraction = Fraction(0)

    def to_physical(self, e):
        if isinstance(e, (Fraction, int, ComplexExact)):
            return self.offset + self.scale * e
        return to_mp(self.offset) + to_mp(self.scale) * e

    def to_internal(self, e):
        if isinstance(e, (Fraction, int, ComplexExact)):
            return (e - self.offset) / self.scale
        return (e - to_mp(self.offset)) / to_mp(self.scale)


@dataclass(frozen=True)
class PotentialSpec:
    name: str
    params: Mapping[str, object]
    ring: PolyRing
    energy_symbol: str | None
    lambda0: RatFunc
    s0: RatFunc
    values: Mapping[str, object]
    energy_map: EnergyMap
    y0: Fraction
    x_domain: tuple  # endpoints as multiples of pi
    y_of_x: Callable
    prefactor: Callable
    potential: Callable
    v_bounds: tuple  # (min, max); max may be inf
    complex: bool = False
    note: str = ""
    extras: Mapping[str, object] = field(default_factory=dict)

    def x_interval(self):
        return tuple(to_mp(e) * mpmath.pi for e in self.x_domain)

    def width(self):
        lo, hi = self.x_domain
        return to_mp(hi - lo) * mpmath.pi

    def box_level(self, n: int):
        """Rigid-box energy with n nodes on the same interval."""
        return ((n + 1) * mpmath.pi / self.width()) ** 2

    def exact_values(self) -> dict | None:
        """Parameter values as exact scalars, or None if some are irrational."""
        out = {}
        for k, v in self.values.items():
            if isinstance(v, (Fraction, int, ComplexExact)):
                out[k] = v
            else:
                return None
        return out

    def exact_pair(self):
        """(lambda0, s0) with every non-energy parameter substituted."""
        vals = self.exact_values()
        if vals is None:
            raise AlgebraError(f"{self.name}: parameters are not exact rationals")
        if not vals:
            return self.lambda0, self.s0
        return self.lambda0.subs(vals), self.s0.subs(vals)


def _one_minus_y2(ring: PolyRing) -> ParamPoly:
    return ring.poly_y([1, 0, -1])


def _rat(x):
    return as_exact(x) if not isinstance(x, (Fraction, ComplexExact)) else x


# ---------------------------------------------------------------------------
# cos(x)-prefactor family on (-pi/2, pi/2) with y = sin x


def cos_prefactor_well(name: str, ring: PolyRing, v_of_y: ParamPoly, values: Mapping, params: Mapping,
                       potential: Callable, v_bounds: tuple) -> PotentialSpec:
    """Potential that is a polynomial in ``sin x`` on ``(-pi/2, pi/2)``.

    With the wavefunction written as ``cos(x) f`` and ``y = sin x`` the
    equation becomes ``f'' = 3y/(1-y^2) f' + (1 - E + V(y))/(1-y^2) f``.
    """
    d = _one_minus_y2(ring)
    lam0 = RatFunc(ring.poly_y([0, 3]), [(d, 1)])
    s0 = RatFunc(ring.const(1) - ring.sym("E") + v_of_y, [(d, 1)])
    return PotentialSpec(
        name=name,
        params=dict(params),
        ring=ring,
        energy_symbol="E",
        lambda0=lam0,
        s0=s0,
        values=dict(values),
        energy_map=EnergyMap(),
        y0=Fraction(0),
        x_domain=(Fraction(-1, 2), Fraction(1, 2)),
        y_of_x=lambda x, m=mpmath: m.sin(x),
        prefactor=lambda x, m=mpmath: m.cos(x),
        potential=potential,
        v_bounds=v_bounds,
    )


def build_sine_squared(mu) -> PotentialSpec:
    """``mu sin^2 x`` in a rigid box of width pi."""
    mu = _rat(mu)
    ring = PolyRing(("E", "mu"))
    v = ring.sym("mu") * ring.poly_y([0, 0, 1])
    return cos_prefactor_well(
        "sine2", ring, v, {"mu": mu}, {"mu": mu},
        potential=lambda x, m=mpmath, mu=mu: _num(mu, m) * m.sin(x) ** 2,
        v_bounds=(min(0, mu), max(0, mu)),
    )


def build_cos2_well(mu) -> PotentialSpec:
    """``-mu cos^2 x``; same spectrum as sine2 shifted down by mu."""
    mu = _rat(mu)
    ring = PolyRing(("E",))
    v = ring.poly_y([-mu, 0, mu])
    return cos_prefactor_well(
        "cos2_well", ring, v, {}, {"mu": mu},
        potential=lambda x, m=mpmath, mu=mu: -_num(mu, m) * m.cos(x) ** 2,
        v_bounds=(min(0, -mu), max(0, -mu)),
    )


def build_cos2x_well(mu) -> PotentialSpec:
    """``-(mu/2) cos 2x``; sine2 spectrum shifted down by mu/2."""
    mu = _rat(mu)
    ring = PolyRing(("E",))
    v = ring.poly_y([-mu / 2, 0, mu])
    return cos_prefactor_well(
        "cos2x_well", ring, v, {}, {"mu": mu},
        potential=lambda x, m=mpmath, mu=mu: -_num(mu, m) / 2 * m.cos(2 * x),
        v_bounds=(-abs(mu) / 2, abs(mu) / 2),
    )


def build_mixed_cos_well(mu) -> PotentialSpec:
    """``mu cos^2 x - mu cos 2x``; identical to sine2 pointwise."""
    mu = _rat(mu)
    ring = PolyRing(("E",))
    v = ring.poly_y([0, 0, mu])
    return cos_prefactor_well(
        "mixed_cos_well", ring, v, {}, {"mu": mu},
        potential=lambda x, m=mpmath, mu=mu: _num(mu, m) * (m.cos(x) ** 2 - m.cos(2 * x)),
        v_bounds=(min(0, mu), max(0, mu)),
    )


def _num(c, m):
    return to_mp(c) if m is mpmath else float(c)


# ---------------------------------------------------------------------------
# double cosine on (0, 2 pi)


def build_double_cosine(v1, v2, boundary: str = "dirichlet") -> PotentialSpec:
    """``v1 cos x + v2 cos 2x`` with walls at 0 and 2 pi, ``y = cos(x/2)``.

    Dirichlet walls use the wavefunction ``sin(x/2) exp(-v1 cos(x)/2) g``.
    ``boundary="neumann"`` drops the ``sin(x/2)`` factor, which selects
    solutions with vanishing slope at the walls instead.
    """
    v1, v2 = _rat(v1), _rat(v2)
    ring = PolyRing(("E",))
    d = _one_minus_y2(ring)
    quartic = ring.poly_y([0, 0, 4 * (v1 * v1 + 8 * v2)])
    if boundary == "dirichlet":
        lam0 = RatFunc(ring.poly_y([0, 3]), [(d, 1)]) + ring.poly_y([0, 4 * v1])
        s0 = RatFunc(ring.const(1 - 2 * v1 + 4 * v2) - ring.sym("E") * 4, [(d, 1)]) - quartic
        pref = lambda x, m=mpmath, v1=v1: m.sin(x / 2) * m.exp(-_num(v1, m) / 2 * m.cos(x))
    elif boundary == "neumann":
        lam0 = RatFunc(ring.poly_y([0, 1]), [(d, 1)]) + ring.poly_y([0, 4 * v1])
        s0 = RatFunc(ring.const(2 * v1 + 4 * v2) - ring.sym("E") * 4, [(d, 1)]) - ring.const(4 * v1) - quartic
        pref = lambda x, m=mpmath, v1=v1: m.exp(-_num(v1, m) / 2 * m.cos(x))
    else:
        raise ConfigError(f"boundary must be 'dirichlet' or 'neumann', not {boundary!r}")
    # potential range on [0, 2pi]: with c = cos x in [-1, 1], V = v1 c + v2 (2c^2 - 1)
    cands = [v1 + v2, -v1 + v2]
    if v2 != 0:
        cs = -v1 / (4 * v2)
        if -1 < cs < 1:
            cands.append(v1 * cs + v2 * (2 * cs * cs - 1))
    return PotentialSpec(
        name="double_cosine",
        params={"v1": v1, "v2": v2, "boundary": boundary},
        ring=ring,
        energy_symbol="E",
        lambda0=lam0,
        s0=s0,
        values={},
        energy_map=EnergyMap(),
        y0=Fraction(0),
        x_domain=(Fraction(0), Fraction(2)),
        y_of_x=lambda x, m=mpmath: m.cos(x / 2),
        prefactor=pref,
        potential=lambda x, m=mpmath, v1=v1, v2=v2: _num(v1, m) * m.cos(x) + _num(v2, m) * m.cos(2 * x),
        v_bounds=(min(cands), max(cands)),
    )


def quasi_exact_condition_double_cosine(v1):
    """Coupling ``v2`` and energy for which ``g = 1`` is an exact ground state."""
    v1 = _rat(v1)
    v2 = -v1 * v1 / 8
    return v2, Fraction(1, 4) - v1 / 2 + v2


# ---------------------------------------------------------------------------
# tangent squared


def tan2_alpha(mu):
    """Exponent of the boundary factor ``cos^(2 alpha + 1)`` for ``mu tan^2 x``.

    It solves ``2 alpha (2 alpha + 1) = mu``; rational when ``1 + 4 mu`` is a
    rational square.
    """
    mu = _rat(mu)
    disc = 1 + 4 * mu
    if disc < 0:
        raise ConfigError("mu must be >= -1/4")
    rn, rd = math.isqrt(disc.numerator), math.isqrt(disc.denominator)
    if rn * rn == disc.numerator and rd * rd == disc.denominator:
        return (Fraction(rn, rd) - 1) / 4
    # kept with guard digits so later high-precision solves see a consistent value
    with mpmath.workdps(max(mpmath.mp.dps, DEFAULT_PRECISION) + 30):
        return (mpmath.sqrt(to_mp(disc)) - 1) / 4


def tan2_mu(alpha):
    alpha = _rat(alpha)
    return 2 * alpha * (2 * alpha + 1)


def build_tangent_squared(mu=None, alpha=None) -> PotentialSpec:
    """``mu tan^2 x`` on ``(-pi/2, pi/2)``; give either ``mu`` or ``alpha``.

    ``g`` obeys ``g'' = (4a+3) y/(1-y^2) g' + (w + 2a)/(1-y^2) g`` with
    ``w = 1 - E``.
    """
    if (mu is None) == (alpha is None):
        raise ConfigError("give exactly one of mu or alpha")
    if alpha is None:
        alpha = tan2_alpha(mu)
        mu = _rat(mu)
    else:
        alpha = _rat(alpha)
        mu = tan2_mu(alpha)
    ring = PolyRing(("w", "alpha"))
    d = _one_minus_y2(ring)
    a = ring.sym("alpha")
    lam0 = RatFunc((a * 4 + 3) * ring.y(), [(d, 1)])
    s0 = RatFunc(ring.sym("w") + a * 2, [(d, 1)])
    return PotentialSpec(
        name="tan2",
        params={"mu": mu, "alpha": alpha},
        ring=ring,
        energy_symbol="w",
        lambda0=lam0,
        s0=s0,
        values={"alpha": alpha},
        energy_map=EnergyMap(Fraction(-1), Fraction(1)),
        y0=Fraction(0),
        x_domain=(Fraction(-1, 2), Fraction(1, 2)),
        y_of_x=lambda x, m=mpmath: m.sin(x),
        prefactor=lambda x, m=mpmath, al=alpha: m.cos(x) ** (2 * _num(al, m) + 1),
        potential=lambda x, m=mpmath, mu=mu: _num(mu, m) * m.tan(x) ** 2,
        v_bounds=(0, math.inf),
    )


def build_secant_squared(mu) -> PotentialSpec:
    """``mu sec^2 x`` on ``(-pi/2, pi/2)``: the tangent-squared reduction with energies raised by mu."""
    base = build_tangent_squared(mu=mu)
    mu = base.params["mu"]
    return replace(
        base,
        name="sec2",
        energy_map=EnergyMap(Fraction(-1), 1 + mu),
        potential=lambda x, m=mpmath, mu=mu: _num(mu, m) / m.cos(x) ** 2,
        v_bounds=(mu, math.inf),
    )


def tan2_energy(n: int, alpha):
    """Closed-form level ``n``: ``n^2 + (2n+1)(2 alpha + 1)``."""
    return n * n + (2 * n + 1) * (2 * alpha + 1)


def tan2_factor_root(n: int, alpha):
    """Value of ``w`` at which the level-``n`` factor of the eigencondition vanishes."""
    return -n * (n + 4 * alpha + 2) - 2 * alpha


# ---------------------------------------------------------------------------
# complex cotangent


def build_cotangent_complex(v, a=1) -> PotentialSpec:
    """``i v cot(x/a)`` on ``(0, pi a)``, reduced to the polynomial equation.

    After ``y = cot(x/a)`` and ``f = exp(-beta arccot y) (1+y^2)^(alpha/2) g``
    (valid once ``beta = a^2 V0 / (2(alpha-1))`` and
    ``a^2 E = (alpha-1)^2 - beta^2``) one has
    ``g'' = -2(alpha y + beta)/(1+y^2) g' - alpha(alpha-1)/(1+y^2) g``.
    Both ``alpha`` and ``beta`` stay symbolic.
    """
    v, a = _rat(v), _rat(a)
    ring = PolyRing(("alpha", "beta"))
    d = ring.poly_y([1, 0, 1])
    al, be = ring.sym("alpha"), ring.sym("beta")
    lam0 = RatFunc((al * ring.y() + be) * -2, [(d, 1)])
    s0 = RatFunc(-(al * (al - 1)), [(d, 1)])
    return PotentialSpec(
        name="cot_complex",
        params={"v": v, "a": a},
        ring=ring,
        energy_symbol=None,
        lambda0=lam0,
        s0=s0,
        values={},
        energy_map=EnergyMap(),
        y0=Fraction(0),
        x_domain=(Fraction(0), Fraction(1)),
        y_of_x=lambda x, m=mpmath: m.cot(x),
        prefactor=lambda x, m=mpmath: m.sin(x),
        potential=lambda x, m=mpmath, v=v: 1j * _num(v, m) * m.cot(x),
        v_bounds=(0, 0),
        complex=True,
    )


@dataclass(frozen=True)
class CotangentLevel:
    n: int
    alpha: Fraction
    beta: ComplexExact
    energy: Fraction  # a^2 E, real
    g: ParamPoly  # polynomial in y with complex-exact coefficients
    flagged: bool = False  # the n = 0 member uses alpha = 0


def cotangent_beta(alpha, v, a=1):
    alpha, v, a = _rat(alpha), _rat(v), _rat(a)
    if alpha == 1:
        raise ConfigError("alpha = 1 is excluded")
    return ComplexExact(0, a * a * v / (2 * (alpha - 1)))


def cotangent_energy(alpha, beta):
    """``(alpha - 1)^2 - beta^2``."""
    e = (alpha - 1) ** 2 - beta * beta
    return e.re if isinstance(e, ComplexExact) and e.im == 0 else e


def cotangent_ladder(v, levels: int, a=1) -> list[CotangentLevel]:
    """The quasi-exact family: level n has ``alpha = -n`` (``alpha = 0`` for n = 0)."""
    out = []
    for n in range(levels):
        alpha = Fraction(-n)
        beta = cotangent_beta(alpha, v, a)
        g = cotangent_polynomials(alpha, beta, n)[n]
        out.append(CotangentLevel(n, alpha, beta, cotangent_energy(alpha, beta), g, flagged=(n == 0)))
    return out


def cotangent_polynomials(alpha, beta=None, N: int = 4) -> list[ParamPoly]:
    """``g_0 .. g_N`` from the three-term recurrence at fixed ``alpha``.

    With ``beta=None`` the polynomials carry ``beta`` as a symbol.
    """
    alpha = _rat(alpha)
    if beta is None:
        ring = PolyRing(("beta",))
        b = ring.sym("beta")
    else:
        beta = _rat(beta) if not isinstance(beta, ComplexExact) else beta
        ring = PolyRing((), complex=isinstance(beta, ComplexExact) and beta.im != 0)
        b = ring.const(beta)
    y = ring.y()
    g = [ring.const(1), y * (2 * alpha) + b * 2]
    for n in range(N - 1):
        d1 = n + 2 * alpha
        d2 = (n + 2 * alpha) * (n + alpha)
        if d1 == 0 or d2 == 0:
            raise LadderBreakError(n, f"(n + 2 alpha)(n + alpha) = 0 at alpha = {alpha}")
        lin = y * (2 * (2 * n + 1 + 2 * alpha) * (n + 1 + alpha) / d1)
        con = b * (2 * (2 * n + 1 + 2 * alpha) * (alpha - 1) / d2)
        c = (b * b + (n * n + 2 * alpha * n + alpha * alpha)) * (4 * (n + 1) * (n + 1 + alpha) / d2)
        g.append((lin + con) * g[-1] + c * g[-2])
    return g[: N + 1]


def cotangent_ode_residual(g: ParamPoly, alpha, beta=None) -> ParamPoly:
    """``(1+y^2) g'' + 2(alpha y + beta) g' + alpha(alpha-1) g`` exactly."""
    ring = g.ring
    alpha = _rat(alpha)
    b = ring.sym("beta") if beta is None else ring.const(beta)
    g1 = g.diff_y()
    return ring.poly_y([1, 0, 1]) * g1.diff_y() + (ring.y() * alpha + b) * 2 * g1 + g * (alpha * (alpha - 1))


def cotangent_orthogonality_integral(n: int, m: int, alpha, beta):
    """``int g_n g_m (1+y^2)^(alpha-1) exp(2 beta arctan y) dy`` over the real line.

    Uses ``y = tan(theta)`` so the range is finite; real and imaginary parts
    are integrated separately.
    """
    gs = cotangent_polynomials(alpha, beta, max(n, m, 1))

    def coeffs(g):
        return [to_mp(c) for c in g.as_univariate("y")] if not g.is_constant() else [to_mp(g.constant_value())]

    with mpmath.workdps(max(mpmath.mp.dps, 30)):
        cn, cm = coeffs(gs[n]), coeffs(gs[m])
        a, b = to_mp(_rat(alpha)), to_mp(beta if isinstance(beta, ComplexExact) else _rat(beta))

        def f(th):
            y = mpmath.tan(th)
            # dy = (1+y^2) dtheta, absorbed into the power
            return mpmath.polyval(cn[::-1], y) * mpmath.polyval(cm[::-1], y) * (1 + y * y) ** a * mpmath.exp(2 * b * th)

        half_pi = mpmath.pi / 2
        re = mpmath.quad(lambda t: mpmath.re(f(t)), [-half_pi, 0, half_pi])
        im = mpmath.quad(lambda t: mpmath.im(f(t)), [-half_pi, 0, half_pi])
    return re if im == 0 else mpmath.mpc(re, im)


# ---------------------------------------------------------------------------
# equivalences


@dataclass(frozen=True)
class EquivalenceRelation:
    """``target_energy = scale * source_energy + shift``."""

    name: str
    source: str
    target: str
    shift: object = Fraction(0)
    scale: object = Fraction(1)


def apply_equivalence(rel: EquivalenceRelation, spectrum) -> list:
    out = []
    for e in spectrum:
        if isinstance(e, (Fraction, int)) and isinstance(rel.shift, Fraction) and isinstance(rel.scale, Fraction):
            out.append(rel.scale * e + rel.shift)
        else:
            out.append(to_mp(rel.scale) * e + to_mp(rel.shift))
    return out


def sine2_equivalences(mu) -> dict[str, EquivalenceRelation]:
    mu = _rat(mu)
    return {
        "cos2_well": EquivalenceRelation("cos2_well", "sine2", "-mu cos^2 x", shift=-mu),
        "cos2x_well": EquivalenceRelation("cos2x_well", "sine2", "-(mu/2) cos 2x", shift=-mu / 2),
        "mixed_cos_well": EquivalenceRelation("mixed_cos_well", "sine2", "mu cos^2 x - mu cos 2x"),
    }


def sec2_relation(mu) -> EquivalenceRelation:
    """``mu sec^2 x = mu tan^2 x + mu``; the csc^2 well on (0, pi) shares it."""
    mu = _rat(mu)
    return EquivalenceRelation("sec2", "tan2", "mu sec^2 x", shift=mu)


def sec2_energy(n: int, mu):
    alpha = tan2_alpha(mu)
    return tan2_energy(n, alpha) + (mu if isinstance(alpha, Fraction) else to_mp(_rat(mu)))


def scaling_relation(k: int) -> EquivalenceRelation:
    """Energies on the k-times wider box from the rescaled couplings."""
    k = Fraction(k)
    return EquivalenceRelation("scaling", "double_cosine(k^2 v1, k^2 v2)", f"width {k} x 2pi", scale=1 / (k * k))


def build_wide_double_cosine_potential(v1, v2, k: int):
    """Potential callable and interval for ``v1 cos(x/k) + v2 cos(2x/k)`` on (0, 2 k pi)."""
    v1, v2 = float(v1), float(v2)

    def pot(x, m=mpmath):
        return v1 * m.cos(x / k) + v2 * m.cos(2 * x / k)

    return pot, (0.0, 2 * k * math.pi)


# ---------------------------------------------------------------------------
# config files

BUILDERS = ("sine2", "double_cosine", "tan2", "cot_complex")


def spec_from_params(potential: str, params: Mapping) -> PotentialSpec:
    p = {k.lower(): v for k, v in params.items() if v is not None}
    if potential == "sine2":
        return build_sine_squared(p.get("mu", 0))
    if potential == "double_cosine":
        return build_double_cosine(p.get("v1", 0), p.get("v2", 0), p.get("boundary", "dirichlet"))
    if potential == "tan2":
        if "alpha" in p:
            return build_tangent_squared(alpha=p["alpha"])
        return build_tangent_squared(mu=p.get("mu", 0))
    if potential == "cot_complex":
        return build_cotangent_complex(p.get("v", 0), p.get("a", 1))
    raise ConfigError(f"unknown potential {potential!r}; expected one of {', '.join(BUILDERS)}")


CONFIG_KEYS = {"potential", "mu", "v1", "v2", "boundary", "alpha", "v", "a", "y0", "digits", "levels", "max_iter", "precision"}


def load_config(path) -> dict:
    """Read a ``key = value`` potential file (TOML syntax)."""
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    if "potential" in data and data["potential"] not in BUILDERS:
        raise ConfigError(f"{path}: unknown potential {data['potential']!r}")
    return data
