"""The asymptotic iteration recurrence, its termination test and eigenvalues.

Starting from ``f'' = lambda0 f' + s0 f`` the recurrence

    lambda_n = lambda_{n-1}' + s_{n-1} + lambda0 lambda_{n-1}
    s_n      = s_{n-1}'      + s0 lambda_{n-1}

is run either on exact rational functions (to detect exact solvability) or on
jets at a point (to get the eigencondition ``delta_n(y0; E) = 0`` as an
explicit polynomial in the energy).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import mpmath
import numpy as np

from .exact_algebra import (
    AlgebraError,
    ComplexExact,
    ModeError,
    ParamPoly,
    PoleError,
    RatFunc,
    RealRoot,
    content_in,
    divide_exact,
    real_roots,
    to_mp,
)
from .series_jets import DEFAULT_PRECISION, Jet, JetCapacityError, jet_from_ratfunc
from .potentials import PotentialSpec, cotangent_beta, cotangent_energy

log = logging.getLogger(__name__)


class CertificateError(AlgebraError, IndexError):
    """Fewer exact levels were certified than requested."""


class EnergyPoly:
    """Polynomial in one energy variable with mpmath coefficients (low first)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = list(coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        self.coeffs = c

    def __call__(self, e):
        acc = mpmath.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * e + c
        return acc

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)


@dataclass
class DeltaRecord:
    n: int
    delta: object  # ParamPoly numerator (exact) or EnergyPoly (jet)


@dataclass
class AimPair:
    lam: object
    s: object
    n: int
    lam0: object
    s0: object
    mode: str  # "exact" or "jet"
    history: list = field(default_factory=list)

    @classmethod
    def start(cls, lam0, s0) -> AimPair:
        if isinstance(lam0, Jet):
            if not isinstance(s0, Jet):
                raise TypeError("lambda0 and s0 must share one representation")
            return cls(lam0, s0, 0, lam0, s0, "jet")
        if isinstance(lam0, ParamPoly):
            lam0 = RatFunc.from_poly(lam0)
        if isinstance(s0, ParamPoly):
            s0 = RatFunc.from_poly(s0)
        if not isinstance(lam0, RatFunc) or not isinstance(s0, RatFunc):
            raise TypeError("lambda0 and s0 must be RatFunc or Jet")
        return cls(lam0, s0, 0, lam0, s0, "exact")

    @property
    def delta(self):
        return self.history[-1].delta if self.history else None


def aim_iterate(pair: AimPair, mu_truncate: tuple | None = None) -> AimPair:
    """One recurrence step.

    ``mu_truncate=(symbol, degree)`` drops higher powers of that symbol in
    exact mode; valid when denominators do not involve it.
    """
    lam, s = pair.lam, pair.s
    if pair.mode == "jet":
        m = len(lam) - 1
        if m < 1:
            raise JetCapacityError(f"jet length exhausted after {pair.n} iterations")
        l0 = pair.lam0.truncate(len(lam))
        s0 = pair.s0.truncate(len(lam))
        ln = lam.diff() + s.truncate(m) + (l0 * lam).truncate(m)
        sn = s.diff() + (s0 * lam).truncate(m)
        u = np.convolve(ln.coeffs[0], s.coeffs[0])
        v = np.convolve(sn.coeffs[0], lam.coeffs[0])
        d = [mpmath.mpf(0)] * max(len(u), len(v))
        for i, c in enumerate(u):
            d[i] += c
        for i, c in enumerate(v):
            d[i] -= c
        rec = DeltaRecord(pair.n + 1, EnergyPoly(d))
    else:
        ln = lam.diff() + s + pair.lam0 * lam
        sn = s.diff() + pair.s0 * lam
        if mu_truncate is not None:
            ln = ln.truncate(*mu_truncate)
            sn = sn.truncate(*mu_truncate)
        dl = ln * s - sn * lam
        if mu_truncate is not None:
            dl = dl.truncate(*mu_truncate)
        rec = DeltaRecord(pair.n + 1, dl)
    return AimPair(ln, sn, pair.n + 1, pair.lam0, pair.s0, pair.mode, pair.history + [rec])


def iterate_exact(lam0: RatFunc, s0: RatFunc, n: int, mu_truncate=None) -> AimPair:
    pair = AimPair.start(lam0, s0)
    for _ in range(n):
        pair = aim_iterate(pair, mu_truncate)
    return pair


# ---------------------------------------------------------------------------
# exact solvability


@dataclass
class ExactSolvabilityCertificate:
    n: int
    symbol: str | None
    numerator: ParamPoly
    content: list  # monic univariate polynomial in `symbol`, low first
    factors: list  # [(ParamPoly in symbol, multiplicity)]
    roots: list  # RealRoot, ascending
    cofactor: ParamPoly | None  # numerator / content (depends on y)
    energy_rule: Callable | None = None  # root -> physical energy, or None to skip
    notes: list = field(default_factory=list)

    def condition_poly(self) -> ParamPoly:
        out = self.numerator.ring.const(1)
        for f, m in self.factors:
            out = out * f**m
        return out


def _linear_factor(ring, symbol, r):
    return ring.sym(symbol) - r


def delta_terminates_identically(pair: AimPair, values: Mapping | None = None, symbol: str | None = None):
    """Whether the latest delta vanishes identically in y.

    ``values`` substitutes parameters first.  With ``symbol`` it returns a
    certificate whose roots are the values of that symbol making delta vanish
    for every y.
    """
    if pair.mode != "exact":
        raise ModeError("termination certificates need exact mode")
    if not pair.history:
        raise ValueError("iterate at least once")
    num = pair.history[-1].delta.num
    if values:
        num = num.subs(values)
    if num.is_zero():
        return True, ExactSolvabilityCertificate(pair.n, symbol, num, [], [], [], None)
    if symbol is None:
        return False, ExactSolvabilityCertificate(pair.n, None, num, [Fraction(1)], [], [], num)
    content = content_in(num, symbol)
    ring = num.ring
    cpoly = ring.zero()
    for d, c in enumerate(content):
        cpoly = cpoly + ring.sym(symbol) ** d * c
    roots = real_roots(content) if len(content) > 1 else []
    factors = []
    rest = cpoly
    for r in roots:
        if r.exact:
            f = _linear_factor(ring, symbol, r.value)
            factors.append((f, r.multiplicity))
            rest = divide_exact(rest, f**r.multiplicity)
    if rest is not None and not rest.is_constant():
        factors.append((rest, 1))
    cof = divide_exact(num, cpoly)
    return False, ExactSolvabilityCertificate(pair.n, symbol, num, content, factors, roots, cof)


def certify_spectrum(spec: PotentialSpec, n: int, mode_values: Mapping | None = None) -> ExactSolvabilityCertificate:
    """Run ``n`` exact iterations and certify the energy values that terminate."""
    if spec.name == "cot_complex":
        lam0, s0 = spec.lambda0, spec.s0
        symbol = "alpha"
        v, a = spec.params["v"], spec.params["a"]

        def rule(r):
            if r.value == 1:
                return None
            beta = cotangent_beta(r.value, v, a)
            return cotangent_energy(r.value, beta)

    else:
        lam0, s0 = spec.exact_pair()
        symbol = spec.energy_symbol

        def rule(r):
            return spec.energy_map.to_physical(r.value)

    if mode_values:
        lam0, s0 = lam0.subs(mode_values), s0.subs(mode_values)
    pair = iterate_exact(lam0, s0, n)
    ok, cert = delta_terminates_identically(pair, symbol=symbol)
    cert.energy_rule = rule
    if ok:
        cert.notes.append("delta vanished for every parameter value")
    return cert


def spectrum_from_certificate(cert: ExactSolvabilityCertificate, levels: int | None = None) -> list:
    """Energies of the certified exact levels, ascending."""
    if cert.energy_rule is None:
        raise CertificateError("certificate carries no energy rule")
    out = []
    for r in cert.roots:
        if not r.exact:
            continue
        e = cert.energy_rule(r)
        if e is not None:
            out.append(e)
    out.sort()
    if levels is not None:
        if len(out) < levels:
            raise CertificateError(f"only {len(out)} exact levels certified at iteration {cert.n}, {levels} requested")
        out = out[:levels]
    return out


# ---------------------------------------------------------------------------
# numeric eigenvalues


@dataclass
class EigenResult:
    node_index: int
    energy: object  # mpf, dimensionless physical energy
    iterations_used: int
    digits_stable: int


class Spectrum(list):
    """List of EigenResult with convergence metadata."""

    def __init__(self, items=(), complete=True, diagnostics=None, iterations=0):
        super().__init__(items)
        self.complete = complete
        self.diagnostics = list(diagnostics or [])
        self.iterations = iterations

    @property
    def energies(self):
        return [r.energy for r in self]


def _numeric_values(spec: PotentialSpec):
    return {k: v for k, v in spec.values.items()}


def delta_polynomials(spec: PotentialSpec, max_iter: int, y0=None, precision: int | None = None):
    """Yield ``(n, EnergyPoly)`` in the internal energy symbol, n = 1..max_iter."""
    if spec.complex:
        raise ModeError(f"{spec.name} is complex; use the exact path")
    y0 = spec.y0 if y0 is None else y0
    L = max_iter + 2
    lam0 = jet_from_ratfunc(spec.lambda0, y0, L, _numeric_values(spec), energy=spec.energy_symbol)
    s0 = jet_from_ratfunc(spec.s0, y0, L, _numeric_values(spec), energy=spec.energy_symbol)
    if lam0.is_complex() or s0.is_complex():
        raise ModeError("complex coefficients in a real jet computation")
    pair = AimPair.start(lam0, s0)
    for _ in range(max_iter):
        pair = aim_iterate(pair)
        yield pair.n, pair.delta


def _sign(v):
    return (v > 0) - (v < 0)


class _Scanner:
    """Sign-change search for a polynomial on a real interval."""

    def __init__(self, f, lo, hi, step, min_step):
        self.f, self.lo, self.hi, self.step, self.min_step = f, lo, hi, step, min_step

    def brackets(self, seeds=(), seed_width=None):
        f = self.f
        pts = set()
        n = max(2, int(mpmath.ceil((self.hi - self.lo) / self.step)) + 1)
        for i in range(n + 1):
            pts.add(self.lo + (self.hi - self.lo) * i / n)
        for s in seeds:
            if self.lo < s < self.hi and seed_width:
                pts.update((s - seed_width, s + seed_width))
        xs = sorted(pts)
        vals = [f(x) for x in xs]
        out = []
        i = 0
        stack = []
        for a, b, fa, fb in zip(xs, xs[1:], vals, vals[1:]):
            stack.append((a, b, fa, fb))
        # dips: |f| has an interior local minimum without a sign change
        for j in range(1, len(xs) - 1):
            if _sign(vals[j - 1]) == _sign(vals[j]) == _sign(vals[j + 1]) and abs(vals[j]) < abs(vals[j - 1]) and abs(vals[j]) < abs(vals[j + 1]):
                stack.append(("dip", xs[j - 1], xs[j + 1], None))
        seen = []
        while stack:
            item = stack.pop()
            if item[0] == "dip":
                _, a, b, _ = item
                if b - a < self.min_step:
                    continue
                m = [a + (b - a) * k / 8 for k in range(9)]
                mv = [f(x) for x in m]
                for k in range(8):
                    if _sign(mv[k]) != _sign(mv[k + 1]) or mv[k + 1] == 0:
                        seen.append((m[k], m[k + 1], mv[k], mv[k + 1]))
                # recurse into the deepest new dip
                for k in range(1, 8):
                    if _sign(mv[k - 1]) == _sign(mv[k]) == _sign(mv[k + 1]) and abs(mv[k]) < abs(mv[k - 1]) and abs(mv[k]) < abs(mv[k + 1]):
                        stack.append(("dip", m[k - 1], m[k + 1], None))
                continue
            a, b, fa, fb = item
            if fa == 0:
                out.append((a, a))
            elif _sign(fa) != _sign(fb) and fb != 0:
                out.append((a, b))
        for a, b, fa, fb in seen:
            if fb == 0:
                out.append((b, b))
            else:
                out.append((a, b))
        out.sort()
        merged = []
        for br in out:
            if merged and br[0] <= merged[-1][1] and (br[0] == br[1] or merged[-1][0] == merged[-1][1]):
                continue
            merged.append(br)
        return merged


def _refine(f, a, b, eps):
    if a == b:
        return a
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    # a few bisections, then a bracketed secant (Illinois) polish
    for _ in range(8):
        m = (a + b) / 2
        fm = f(m)
        if fm == 0:
            return m
        if _sign(fm) == _sign(fa):
            a, fa = m, fm
        else:
            b, fb = m, fm
    try:
        r = mpmath.findroot(f, (a, b), solver="illinois", tol=eps**2, maxsteps=200, verify=False)
        if a <= r <= b:
            return r
    except (ValueError, ZeroDivisionError):
        pass
    while b - a > eps * max(1, abs(a)):
        m = (a + b) / 2
        fm = f(m)
        if fm == 0:
            return m
        if _sign(fm) == _sign(fa):
            a, fa = m, fm
        else:
            b, fb = m, fm
    return (a + b) / 2


def default_energy_window(spec: PotentialSpec, levels: int):
    vmin, vmax = spec.v_bounds
    lo = to_mp(vmin) if vmin != -math.inf else -spec.box_level(levels + 2)
    top = vmax if vmax != math.inf else 0
    hi = spec.box_level(levels + 2) + to_mp(top)
    return lo - mpmath.mpf(1) / 8, hi


def eigenvalues_numeric(
    spec: PotentialSpec,
    levels: int = 6,
    digits: int = 12,
    max_iter: int = 40,
    precision: int | None = None,
    y0=None,
    window=None,
) -> Spectrum:
    """Lowest ``levels`` eigenvalues from the roots of ``delta_n(y0; E)``.

    A root counts as stable once it moves by less than
    ``10**-digits * max(1, |E|)`` between consecutive iterations.  Roots that
    move by less than ``1e-3`` relative are still settling and hold the run
    open; roots moving more than that are treated as spurious.  The run stops
    once the lowest ``levels`` non-spurious roots are all stable.  If
    ``max_iter`` is reached first, the contiguous stable prefix comes back with
    ``complete=False``.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    precision = precision or DEFAULT_PRECISION
    if digits > precision - 10:
        raise ValueError(f"digits={digits} needs precision >= {digits + 10}")
    with mpmath.workdps(precision):
        emap = spec.energy_map
        lo, hi = window if window else default_energy_window(spec, levels)
        lo, hi = mpmath.mpf(lo), mpmath.mpf(hi)
        gap = spec.box_level(1) - spec.box_level(0)
        step = gap / 2
        tol_rel = mpmath.mpf(10) ** (-digits)
        eps = mpmath.mpf(10) ** (-(precision - 5))
        # roots moving more than this between iterations are taken as spurious
        coarse = mpmath.mpf(10) ** -3
        prev: list = []
        prev2: list = []
        stable_since: dict = {}
        diagnostics = []
        result = None
        n = 0
        for n, dpoly in delta_polynomials(spec, max_iter, y0, precision):
            if dpoly.is_zero():
                diagnostics.append(f"iteration {n}: delta vanished identically")
                continue

            def f(e, dpoly=dpoly):
                return dpoly(emap.to_internal(e))

            # extend the window until enough sign changes are seen
            cur_hi = hi
            for _ in range(6):
                scanner = _Scanner(f, lo, cur_hi, step, step / 2**12)
                brs = scanner.brackets(seeds=prev, seed_width=max(tol_rel * 10, mpmath.mpf(10) ** (-digits // 2)))
                if len(brs) >= levels or spec.v_bounds[1] != math.inf:
                    break
                cur_hi = lo + 2 * (cur_hi - lo)
            roots = sorted({_refine(f, a, b, eps) for a, b in brs})
            roots = _dedupe(roots, eps * 100)
            # classify roots by their drift from the previous iteration
            entries = []
            for r in roots:
                # compare against the last two iterations: at a symmetry point
                # consecutive deltas share a factor, hence share roots exactly
                if prev and prev2:
                    p = min(prev, key=lambda q: abs(q - r))
                    drift = max(abs(p - r), min(abs(q - r) for q in prev2))
                else:
                    p, drift = None, mpmath.inf
                tol = tol_rel * max(1, abs(r))
                if drift < tol:
                    status = "stable"
                    since = stable_since.get(_key(p), n) if p is not None else n
                elif drift < coarse * max(1, abs(r)):
                    status = "settling"
                    since = None
                else:
                    status = "drifting"
                    since = None
                entries.append((r, status, drift, since))
            stable_since = {_key(r): s for r, st, _, s in entries if st == "stable"}
            accepted = [e for e in entries if e[1] != "drifting"]
            head = accepted[:levels]
            if len(head) == levels and all(e[1] == "stable" for e in head):
                result = head
                break
            prev2, prev = prev, roots
        if result is None:
            # give up: drop roots still drifting beyond ten times the tolerance and
            # keep the contiguous stable prefix
            head = []
            for r, st, drift, since in entries if n else []:
                if drift >= 10 * tol_rel * max(1, abs(r)):
                    if st == "drifting":
                        continue
                    break
                head.append((r, "stable", drift, since if since is not None else n))
            result = head[:levels]
            diagnostics.append(
                f"max_iter={n} reached before strict stabilization; kept {len(result)} of {levels} levels "
                f"within 10x the {digits}-digit tolerance"
            )
        out = []
        for i, (r, st, drift, since) in enumerate(result):
            if drift == 0:
                ds = digits
            else:
                ds = int(min(digits, mpmath.floor(-mpmath.log10(drift / max(1, abs(r))))))
            out.append(EigenResult(i, +r, since if since is not None else n, ds))
        return Spectrum(out, complete=len(out) == levels, diagnostics=diagnostics, iterations=n)


def _key(r):
    return mpmath.nstr(r, 25)


def _dedupe(roots, eps):
    out = []
    for r in roots:
        if out and abs(r - out[-1]) <= eps * max(1, abs(r)):
            continue
        out.append(r)
    return out


# ---------------------------------------------------------------------------
# wavefunctions


def _taylor_grid(f: RatFunc, values: Mapping, energy_symbol, energy_value):
    """Numerator and denominator of f as float coefficient lists in y."""
    vals = {k: to_mp(v) for k, v in values.items()}
    if energy_symbol:
        vals[energy_symbol] = energy_value

    def collapse(p: ParamPoly):
        deg = max(p.degree_y(), 0)
        out = [0.0] * (deg + 1)
        names = list(p.ring.params)
        for key, c in p.terms.items():
            t = to_mp(c)
            for name, e in zip(names, key[1:]):
                if e:
                    t = t * vals[name] ** e
            out[key[0]] += float(t)
        return np.array(out)

    return collapse(f.num), collapse(f.den)


def _shifted_series(poly, centers, length, radius):
    """Scaled Taylor coefficients ``c_k r^k`` of ``poly(center + t)``, shape (length, M)."""
    M = len(centers)
    out = np.zeros((length, M))
    for d, c in enumerate(poly):
        if c == 0:
            continue
        for k in range(min(d, length - 1) + 1):
            out[k] += c * math.comb(d, k) * centers ** (d - k) * radius**k
    return out


def _series_reciprocal(a):
    L = a.shape[0]
    r = np.zeros_like(a)
    r[0] = 1 / a[0]
    for k in range(1, L):
        r[k] = -(a[1 : k + 1][::-1] * r[:k]).sum(axis=0) / a[0]
    return r


def _series_mul(a, b, length):
    out = np.zeros((length, a.shape[1]))
    for j in range(min(length, a.shape[0])):
        out[j:] += a[j] * b[: length - j]
    return out


def _alpha_at(spec: PotentialSpec, energy_internal, iterations: int, ys: np.ndarray, singular: Sequence[float],
              grids=None):
    """``(s_n / lambda_n, lambda_n, lambda_n', s_n)`` at each point, in float arithmetic."""
    ys = np.asarray(ys, dtype=float)
    L = iterations + 3
    dist = np.min(np.abs(ys[None, :] - np.asarray(singular, dtype=float)[:, None]), axis=0) if singular else np.full(ys.shape, 2.0)
    radius = np.maximum(dist / 2, 1e-12)
    if grids is None:
        grids = [_taylor_grid(f, spec.values, spec.energy_symbol, energy_internal) for f in (spec.lambda0, spec.s0)]
    out = []
    for num, den in grids:
        nj = _shifted_series(num, ys, L, radius)
        dj = _shifted_series(den, ys, L, radius)
        out.append(_series_mul(nj, _series_reciprocal(dj), L))
    lam0, s0 = out
    lam, s = lam0, s0
    for _ in range(iterations):
        m = lam.shape[0] - 1
        k = np.arange(1, m + 1).reshape(-1, 1)
        ln = lam[1:] * k / radius + s[:m] + _series_mul(lam0, lam, m)
        sn = s[1:] * k / radius + _series_mul(s0, lam, m)
        lam, s = ln, sn
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(s[0] == 0, 0.0, s[0] / lam[0])
    return ratio, lam[0], lam[1] / radius, s[0]


def _pole_free_integral(g, a, b, tol=1e-9, depth=0):
    """Adaptive Gauss-Legendre integral of a vectorized function."""
    if a == b:
        return 0.0
    xg, wg = np.polynomial.legendre.leggauss(10)
    def gl(a, b):
        x = (b - a) / 2 * xg + (a + b) / 2
        return (b - a) / 2 * np.dot(wg, g(x))
    whole = gl(a, b)
    m = (a + b) / 2
    halves = gl(a, m) + gl(m, b)
    if not np.isfinite(halves):
        raise PoleError(f"integrand is not finite on [{a}, {b}]")
    if abs(whole - halves) <= tol * max(1.0, abs(halves)) or depth > 12:
        return halves
    return _pole_free_integral(g, a, m, tol / 2, depth + 1) + _pole_free_integral(g, m, b, tol / 2, depth + 1)


@dataclass
class WavefunctionSample:
    x: float
    y: float
    psi: float
    flagged: bool = False


def wavefunction_eval(spec: PotentialSpec, level: int, energy, y_samples=None, iterations: int | None = None,
                      samples: int = 201) -> list[WavefunctionSample]:
    """Samples of the eigenfunction built from ``exp(-int alpha)``, max |psi| = 1.

    ``alpha = s_n / lambda_n`` is evaluated from jets re-centred at each point
    and integrated from ``y0``.  Zeros of ``lambda_n`` are simple poles of
    ``alpha``; they are integrated through by removing the residue, which
    produces the sign change of a node.  Samples closer than 1e-9 to such a
    pole are flagged.
    """
    if spec.complex:
        raise ModeError("wavefunctions of the complex family come from the exact ladder")
    it = iterations or max(2 * level + 12, 16)
    e_int = spec.energy_map.to_internal(mpmath.mpf(energy))
    xlo, xhi = (float(v) for v in spec.x_interval())
    if y_samples is None:
        xs = np.linspace(xlo, xhi, samples)[1:-1]
        ys = np.array([float(spec.y_of_x(x, np)) for x in xs])
    else:
        ys = np.asarray(y_samples, dtype=float)
        xs = None
    singular = _singular_points(spec)
    y0 = float(spec.y0)
    grids = [_taylor_grid(f, spec.values, spec.energy_symbol, e_int) for f in (spec.lambda0, spec.s0)]

    def at(y):
        return _alpha_at(spec, e_int, it, np.atleast_1d(y), singular, grids)

    def alpha(y):
        return at(y)[0]

    # locate zeros of lambda_n (poles of alpha) on the sampled range
    grid = np.linspace(min(ys.min(), y0), max(ys.max(), y0), 4001)
    _, lam_g, _, _ = at(grid)

    poles = []  # (location, residue, node multiplicity or None if spurious)
    for i in range(len(grid) - 1):
        if np.sign(lam_g[i]) == np.sign(lam_g[i + 1]) or (lam_g[i] == 0 and i > 0):
            continue
        a, b = grid[i], grid[i + 1]
        sa = np.sign(lam_g[i])
        if sa == 0:
            a = b
        else:
            # multisection: 64 sub-points per pass
            for _ in range(5):
                sub = np.linspace(a, b, 66)[1:-1]
                sg = np.sign(at(sub)[1])
                j = int(np.argmax(sg != sa)) if np.any(sg != sa) else len(sub)
                a, b = (sub[j - 1] if j > 0 else a), (sub[j] if j < len(sub) else b)
        z = (a + b) / 2
        _, _, dlam, sz = at(z)
        res = float(sz[0] / dlam[0]) if dlam[0] != 0 else 0.0
        if abs(res) < 1e-10:
            continue  # removable: s_n vanishes with lambda_n
        k = round(-res)
        if k >= 1 and abs(res + k) < 1e-3:
            poles.append((z, float(-k), k))  # a node of order k has residue exactly -k
        else:
            poles.append((z, res, None))

    def regular(y):
        v = alpha(y)
        for z, res, _ in poles:
            v = v - res / (y - z)
        return v

    def integrate(a, b):
        # the subtracted pole is only known to round-off, so a small window
        # around it is bridged by the midpoint rule on the smooth remainder
        lo, hi = min(a, b), max(a, b)
        cuts = sorted(z for z, _, _ in poles if lo < z < hi)
        if not cuts:
            return _pole_free_integral(regular, a, b)
        total, start = 0.0, lo
        for z in cuts:
            eta = min(1e-3 * max(1.0, abs(z)), 0.5 * (z - start), 0.5 * (hi - z))
            total += _pole_free_integral(regular, start, z - eta)
            total += eta * float(np.sum(regular(np.array([z - eta, z + eta]))))
            start = z + eta
        total += _pole_free_integral(regular, start, hi)
        return total if b >= a else -total

    order = np.argsort(ys)
    log_f = np.zeros(len(ys))
    sign = np.ones(len(ys))
    flagged = np.zeros(len(ys), dtype=bool)
    on_node = np.zeros(len(ys), dtype=bool)
    base = y0
    # start away from any pole
    if any(abs(base - z) < 1e-6 for z, _, _ in poles):
        base = y0 + 1e-3 * (1 if abs(y0 + 1e-3) < 1 else -1)
    # integrate outward from the base point in both directions
    for direction in (1, -1):
        idx = [i for i in order if (ys[i] - base) * direction >= 0]
        if direction == -1:
            idx = idx[::-1]
        acc, last = 0.0, base
        for i in idx:
            near = [(z, k) for z, _, k in poles if abs(ys[i] - z) < 1e-9]
            if near:
                # too close to a pole to integrate up to; a node is a zero
                flagged[i] = True
                on_node[i] = all(k is not None for _, k in near)
                continue
            acc += integrate(last, ys[i])
            last = ys[i]
            val = -acc
            sg = 1.0
            for z, res, k in poles:
                gap = abs(ys[i] - z)
                # int res/(t - z) from base to y = res * log|(y - z)/(base - z)|
                val -= res * math.log(gap / abs(base - z))
                if (ys[i] - z) * (base - z) < 0 and k is not None and k % 2:
                    sg = -sg
                if k is None and gap < 1e-6:
                    flagged[i] = True
            log_f[i] = val
            sign[i] = sg
    pref = np.array([float(spec.prefactor(x, np)) for x in xs]) if xs is not None else np.ones(len(ys))
    if xs is None:
        xs = np.full(len(ys), np.nan)
    shift = np.max(log_f[~on_node]) if np.any(~on_node) else 0.0
    psi = np.where(on_node, 0.0, sign * np.exp(log_f - shift) * pref)
    psi = psi / np.max(np.abs(psi))
    return [WavefunctionSample(float(x), float(y), float(p), bool(fl)) for x, y, p, fl in zip(xs, ys, psi, flagged)]


def _singular_points(spec: PotentialSpec) -> list[float]:
    """Real zeros of the denominators of lambda0 and s0."""
    pts = set()
    for f in (spec.lambda0, spec.s0):
        for b, _ in f.factors:
            if b.free_symbols() == {"y"}:
                pts.update(float(r.value) for r in real_roots(b.as_univariate("y")))
    return sorted(pts)
