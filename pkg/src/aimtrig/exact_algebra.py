"""Exact arithmetic kernel.

Rationals are :class:`fractions.Fraction`; Gaussian rationals are
:class:`ComplexExact`.  :class:`ParamPoly` is a polynomial in the coordinate
``y`` whose coefficients are polynomials in a fixed, declared list of
parameter symbols.  :class:`RatFunc` divides such a polynomial by a product of
powers of "base" polynomials; keeping the denominator factored is what keeps
repeated differentiation cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import mpmath

ExactScalar = Fraction

__all__ = [
    "AlgebraError",
    "ComplexExact",
    "ExactScalar",
    "ModeError",
    "ParamPoly",
    "PoleError",
    "PolyRing",
    "RatFunc",
    "RealRoot",
    "RingMismatchError",
    "as_exact",
    "coeff_of_mu",
    "content_in",
    "eval_at",
    "poly_arith",
    "ratfunc_diff_y",
    "real_roots",
    "to_mp",
]


class AlgebraError(Exception):
    pass


class RingMismatchError(AlgebraError, ValueError):
    """Operands were built over different parameter lists."""


class ModeError(AlgebraError, TypeError):
    """An imaginary coefficient reached a real-mode computation."""


class PoleError(AlgebraError, ZeroDivisionError):
    """A denominator vanished at the evaluation point."""


# ---------------------------------------------------------------------------
# scalars


@dataclass(frozen=True)
class ComplexExact:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def _lift(other):
        if isinstance(other, ComplexExact):
            return other
        if isinstance(other, (int, Rational)):
            return ComplexExact(Fraction(other))
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return ComplexExact(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexExact(-self.re, -self.im)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return ComplexExact(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return ComplexExact(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("ComplexExact division by zero")
        return self * ComplexExact(o.re / n, -o.im / n)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return ComplexExact(1) / self ** (-k)
        out = ComplexExact(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash(self.re) if self.im == 0 else hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return ComplexExact(self.re, -self.im)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*I"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {abs(self.im)}*I)"

    __repr__ = __str__


def as_exact(x):
    """Convert ``x`` to a Fraction or ComplexExact.

    Floats go through their shortest decimal repr, so ``0.1`` becomes 1/10.
    """
    if isinstance(x, (Fraction, ComplexExact)):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, complex):
        return _squash(ComplexExact(Fraction(repr(x.real)), Fraction(repr(x.imag))))
    raise TypeError(f"cannot convert {x!r} to an exact scalar")


def _squash(c):
    """Drop a vanishing imaginary part."""
    if isinstance(c, ComplexExact) and c.im == 0:
        return c.re
    return c


def to_mp(c):
    """Exact (or already numeric) scalar -> mpmath number at current precision."""
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return mpmath.mpf(c.numerator)
        return mpmath.mpf(c.numerator) / c.denominator
    if isinstance(c, ComplexExact):
        return mpmath.mpc(to_mp(c.re), to_mp(c.im))
    if isinstance(c, int):
        return mpmath.mpf(c)
    return mpmath.mpmathify(c)


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction, ComplexExact))


# ---------------------------------------------------------------------------
# rings and polynomials


@dataclass(frozen=True)
class PolyRing:
    """Declared parameter symbols for one computation, plus the coefficient field."""

    params: tuple[str, ...] = ()
    complex: bool = False

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if len(set(self.params)) != len(self.params):
            raise ValueError(f"duplicate parameter symbols in {self.params}")
        if "y" in self.params:
            raise ValueError("'y' is reserved for the coordinate")

    def index(self, name: str) -> int:
        try:
            return self.params.index(name)
        except ValueError:
            raise RingMismatchError(f"symbol {name!r} not declared in {self.params}") from None

    def coerce(self, c):
        c = _squash(as_exact(c)) if not isinstance(c, (Fraction, ComplexExact)) else _squash(c)
        if isinstance(c, ComplexExact) and not self.complex:
            raise ModeError(f"imaginary coefficient {c} in a real-mode ring")
        return c

    def zero(self) -> ParamPoly:
        return ParamPoly(self, {})

    def const(self, c) -> ParamPoly:
        return ParamPoly(self, {(0,) * (len(self.params) + 1): c})

    def y(self) -> ParamPoly:
        return ParamPoly(self, {(1,) + (0,) * len(self.params): 1})

    def sym(self, name: str) -> ParamPoly:
        key = [0] * (len(self.params) + 1)
        key[1 + self.index(name)] = 1
        return ParamPoly(self, {tuple(key): 1})

    def poly_y(self, coeffs: Sequence) -> ParamPoly:
        """Polynomial in y from constant coefficients, lowest degree first."""
        pad = (0,) * len(self.params)
        return ParamPoly(self, {(d,) + pad: c for d, c in enumerate(coeffs)})

    def with_complex(self) -> PolyRing:
        return PolyRing(self.params, True)


class ParamPoly:
    """Sparse polynomial in y and the ring's parameters.

    ``terms`` maps exponent tuples ``(deg_y, deg_p1, deg_p2, ...)`` to nonzero
    exact coefficients.  Instances are treated as immutable.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[tuple, object]):
        self.ring = ring
        width = len(ring.params) + 1
        clean = {}
        for k, c in terms.items():
            if len(k) != width:
                raise ValueError(f"exponent tuple {k} does not match ring {ring.params}")
            c = ring.coerce(c)
            if c:
                clean[tuple(k)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms):
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        obj._hash = None
        return obj

    # -- structure ------------------------------------------------------
    def _check(self, other: ParamPoly):
        if other.ring.params != self.ring.params:
            raise RingMismatchError(
                f"parameter lists differ: {self.ring.params} vs {other.ring.params}"
            )

    def _promote(self, other):
        if isinstance(other, ParamPoly):
            self._check(other)
            if other.ring.complex != self.ring.complex:
                ring = self.ring.with_complex()
                return ParamPoly._raw(ring, self.terms), ParamPoly._raw(ring, other.terms)
            return self, other
        if isinstance(other, RatFunc):
            return NotImplemented, None
        try:
            return self, self.ring.const(other)
        except TypeError:
            return NotImplemented, None

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, ParamPoly):
            return self.ring.params == other.ring.params and self.terms == other.terms
        try:
            return self.terms == self.ring.const(other).terms
        except (TypeError, ModeError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.params, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        a, b = self._promote(other)
        if a is NotImplemented:
            return NotImplemented
        out = dict(a.terms)
        for k, c in b.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return ParamPoly._raw(a.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly._raw(self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._promote(other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._promote(other)
        if a is NotImplemented:
            return NotImplemented
        if len(b.terms) == 1 and not any(next(iter(b.terms))):
            c = next(iter(b.terms.values()))
            return ParamPoly._raw(a.ring, {k: v * c for k, v in a.terms.items()})
        out: dict = {}
        for k1, c1 in a.terms.items():
            for k2, c2 in b.terms.items():
                k = tuple(i + j for i, j in zip(k1, k2))
                v = out.get(k, 0) + c1 * c2
                if v:
                    out[k] = v
                else:
                    del out[k]
        return ParamPoly._raw(a.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        out = self.ring.const(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def scale(self, c) -> ParamPoly:
        c = self.ring.coerce(c) if not isinstance(c, ComplexExact) else c
        ring = self.ring.with_complex() if isinstance(c, ComplexExact) and c.im else self.ring
        if not c:
            return ring.zero()
        return ParamPoly._raw(ring, {k: v * c for k, v in self.terms.items()})

    # -- calculus and queries ----------------------------------------------
    def diff_y(self) -> ParamPoly:
        out = {}
        for k, c in self.terms.items():
            if k[0]:
                out[(k[0] - 1,) + k[1:]] = c * k[0]
        return ParamPoly._raw(self.ring, out)

    def degree_y(self) -> int:
        return max((k[0] for k in self.terms), default=-1)

    def degree(self, name: str) -> int:
        i = 1 + self.ring.index(name)
        return max((k[i] for k in self.terms), default=-1)

    def free_symbols(self) -> set[str]:
        names = ["y", *self.ring.params]
        return {names[i] for k in self.terms for i, e in enumerate(k) if e}

    def is_constant(self) -> bool:
        return all(not any(k) for k in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * (len(self.ring.params) + 1), Fraction(0))

    def coeff(self, name: str, k: int) -> ParamPoly:
        """Coefficient polynomial of ``name**k`` (``name`` may be ``"y"``)."""
        i = 0 if name == "y" else 1 + self.ring.index(name)
        out = {}
        for key, c in self.terms.items():
            if key[i] == k:
                out[key[:i] + (0,) + key[i + 1 :]] = c
        return ParamPoly._raw(self.ring, out)

    def truncate(self, name: str, max_deg: int) -> ParamPoly:
        """Drop every term of degree above ``max_deg`` in ``name``."""
        i = 0 if name == "y" else 1 + self.ring.index(name)
        return ParamPoly._raw(self.ring, {k: c for k, c in self.terms.items() if k[i] <= max_deg})

    def map_coeffs(self, f) -> ParamPoly:
        return ParamPoly(self.ring, {k: f(c) for k, c in self.terms.items()})

    def as_univariate(self, name: str | None = None) -> list:
        """Coefficient list (lowest first) in the single free variable ``name``."""
        free = self.free_symbols()
        if name is None:
            if len(free) > 1:
                raise ValueError(f"not univariate: {sorted(free)}")
            name = next(iter(free), "y")
        if free - {name}:
            raise ValueError(f"not univariate in {name!r}: also {sorted(free - {name})}")
        i = 0 if name == "y" else 1 + self.ring.index(name)
        deg = max((k[i] for k in self.terms), default=-1)
        out = [Fraction(0)] * (deg + 1)
        for k, c in self.terms.items():
            out[k[i]] = c
        return out

    # -- substitution -------------------------------------------------------
    def eval_at(self, y=None, values: Mapping | None = None):
        """Full evaluation; every symbol that occurs must receive a value."""
        values = dict(values or {})
        if y is not None:
            values["y"] = y
        names = ["y", *self.ring.params]
        numeric = any(not _is_exact(v) for v in values.values())
        vals = []
        for n in names:
            v = values.get(n)
            vals.append(None if v is None else (v if numeric or not isinstance(v, float) else as_exact(v)))
        total = mpmath.mpf(0) if numeric else Fraction(0)
        powcache: dict = {}
        for k, c in self.terms.items():
            term = to_mp(c) if numeric else c
            for i, e in enumerate(k):
                if e:
                    if vals[i] is None:
                        raise ValueError(f"no value supplied for symbol {names[i]!r}")
                    p = powcache.get((i, e))
                    if p is None:
                        p = powcache[(i, e)] = vals[i] ** e
                    term = term * p
            total = total + term
        return _squash(total) if not numeric else total

    def subs(self, values: Mapping) -> ParamPoly:
        """Substitute exact values for some parameters; they leave the ring."""
        values = {n: as_exact(v) for n, v in values.items()}
        for n in values:
            self.ring.index(n)
        keep = [i for i, p in enumerate(self.ring.params) if p not in values]
        cplx = self.ring.complex or any(isinstance(_squash(v), ComplexExact) for v in values.values())
        ring = PolyRing(tuple(self.ring.params[i] for i in keep), cplx)
        out: dict = {}
        for k, c in self.terms.items():
            for n, v in values.items():
                e = k[1 + self.ring.index(n)]
                if e:
                    c = c * v**e
            nk = (k[0],) + tuple(k[1 + i] for i in keep)
            s = out.get(nk, 0) + c
            if s:
                out[nk] = s
            else:
                out.pop(nk, None)
        return ParamPoly(ring, {k: _squash(c) for k, c in out.items()})

    def compose(self, ring: PolyRing, mapping: Mapping[str, object]) -> ParamPoly:
        """Rewrite in ``ring``: mapped symbols become polynomials of ``ring``.

        Unmapped symbols must exist in the target ring.  ``y`` is kept unless
        mapped explicitly.
        """
        names = ["y", *self.ring.params]
        images = []
        for n in names:
            if n in mapping:
                m = mapping[n]
                images.append(m if isinstance(m, ParamPoly) else ring.const(m))
            elif n == "y":
                images.append(ring.y())
            else:
                images.append(ring.sym(n))
        out = ring.zero()
        cache: dict = {}
        for k, c in self.terms.items():
            term = ring.const(c)
            for i, e in enumerate(k):
                if e:
                    p = cache.get((i, e))
                    if p is None:
                        p = cache[(i, e)] = images[i] ** e
                    term = term * p
            out = out + term
        return out

    # -- normalization ------------------------------------------------------
    def leading(self):
        """Lexicographically largest (key, coefficient); y weighs most."""
        k = max(self.terms)
        return k, self.terms[k]

    def primitive(self):
        """Split into (scalar content, monomial exponent tuple, primitive part).

        Real rings get an integer-primitive part with positive leading
        coefficient; complex rings are made monic.
        """
        if not self.terms:
            raise ValueError("zero polynomial has no primitive part")
        mono = tuple(min(k[i] for k in self.terms) for i in range(len(self.ring.params) + 1))
        lk, lc = self.leading()
        if self.ring.complex and any(isinstance(c, ComplexExact) for c in self.terms.values()):
            content = lc
        else:
            nums = [c.numerator for c in self.terms.values()]
            dens = [c.denominator for c in self.terms.values()]
            g = math.gcd(*nums)
            l = math.lcm(*dens)
            content = Fraction(g, l)
            if lc < 0:
                content = -content
        prim = {tuple(a - b for a, b in zip(k, mono)): _squash(c / content) for k, c in self.terms.items()}
        return content, mono, ParamPoly._raw(self.ring, prim)

    # -- display ------------------------------------------------------------
    def _mono_str(self, key) -> str:
        names = ["y", *self.ring.params]
        parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, key) if e]
        return "*".join(parts)

    def dump(self, group_by: str | None = None) -> str:
        """Plain-text form in lexicographic monomial order.

        With ``group_by`` the terms are collected by powers of that symbol,
        e.g. ``(-6 + 24*nu)*mu^1``.
        """
        if not self.terms:
            return "0"
        if group_by is None:
            out = []
            for k in sorted(self.terms):
                c, m = self.terms[k], self._mono_str(k)
                out.append(_fmt_term(c, m))
            return _join_terms(out)
        i = 0 if group_by == "y" else 1 + self.ring.index(group_by)
        groups = sorted({k[i] for k in self.terms})
        out = []
        for e in groups:
            inner = self.coeff(group_by, e)
            body = inner.dump()
            out.append(f"({body})*{group_by}^{e}" if e else f"({body})")
        return " + ".join(out)

    def __str__(self):
        return self.dump()

    def __repr__(self):
        return f"ParamPoly({self.dump()})"


def _fmt_term(c, mono: str) -> str:
    if not mono:
        return str(c)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    return f"{c}*{mono}"


def _join_terms(parts: list[str]) -> str:
    s = parts[0]
    for p in parts[1:]:
        s += " - " + p[1:] if p.startswith("-") else " + " + p
    return s


def divide_exact(a: ParamPoly, b: ParamPoly) -> ParamPoly | None:
    """Quotient ``a / b`` if ``b`` divides ``a`` exactly, else None."""
    a._check(b)
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return a.ring.zero()
    bk, bc = b.leading()
    rest = {k: c for k, c in b.terms.items() if k != bk}
    r = dict(a.terms)
    q: dict = {}
    while r:
        rk = max(r)
        if any(x < y for x, y in zip(rk, bk)):
            return None
        t = r[rk] / bc
        tk = tuple(x - y for x, y in zip(rk, bk))
        q[tk] = t
        del r[rk]
        for k, c in rest.items():
            kk = tuple(x + y for x, y in zip(k, tk))
            v = r.get(kk, 0) - c * t
            if v:
                r[kk] = v
            else:
                r.pop(kk, None)
    return ParamPoly._raw(a.ring, {k: _squash(c) for k, c in q.items()})


# ---------------------------------------------------------------------------
# rational functions


def _normalize_base(base: ParamPoly):
    """Return (scalar, [(base, exp), ...]) with base == scalar * prod."""
    content, mono, prim = base.primitive()
    factors = []
    width = len(base.ring.params) + 1
    for i, e in enumerate(mono):
        if e:
            key = [0] * width
            key[i] = 1
            factors.append((ParamPoly._raw(base.ring, {tuple(key): Fraction(1)}), e))
    if not prim.is_constant():
        factors.append((prim, 1))
    else:
        content = content * prim.constant_value()
    return content, factors


class RatFunc:
    """``num / prod(base**exp)`` over a :class:`PolyRing`.

    Bases are normalized (integer-primitive, positive leading coefficient) and
    merged by equality.  After every operation each base is trial-divided out
    of the numerator; no general multivariate GCD is ever computed.
    """

    __slots__ = ("num_poly", "factors")

    def __init__(self, num: ParamPoly, factors: Iterable[tuple[ParamPoly, int]] = ()):
        merged: dict[ParamPoly, int] = {}
        scalar = Fraction(1)
        for base, e in factors:
            if e < 0:
                raise ValueError("negative denominator exponent")
            if e == 0:
                continue
            num._check(base)
            if base.is_zero():
                raise ZeroDivisionError("zero denominator")
            c, parts = _normalize_base(base)
            scalar = scalar * c**e
            for b, m in parts:
                merged[b] = merged.get(b, 0) + m * e
        if scalar != 1:
            num = num.scale(1 / scalar)
        self.num_poly, self.factors = _cancel(num, merged)

    @classmethod
    def _raw(cls, num, factors):
        obj = cls.__new__(cls)
        obj.num_poly, obj.factors = _cancel(num, dict(factors))
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_poly(cls, p: ParamPoly) -> RatFunc:
        return cls._raw(p, {})

    @classmethod
    def const(cls, ring: PolyRing, c) -> RatFunc:
        return cls._raw(ring.const(c), {})

    @property
    def ring(self) -> PolyRing:
        return self.num_poly.ring

    @property
    def num(self) -> ParamPoly:
        return self.num_poly

    @property
    def den(self) -> ParamPoly:
        out = self.ring.const(1)
        for b, e in self.factors:
            out = out * b**e
        return out

    def is_zero(self) -> bool:
        return self.num_poly.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def _lift(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, ParamPoly):
            return RatFunc._raw(other, {})
        try:
            return RatFunc._raw(self.ring.const(other), {})
        except TypeError:
            return NotImplemented

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        self.num_poly._check(o.num_poly)
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        fa, fb = dict(self.factors), dict(o.factors)
        common = {b: max(fa.get(b, 0), fb.get(b, 0)) for b in {**fa, **fb}}
        na = self.num_poly * _product({b: e - fa.get(b, 0) for b, e in common.items()}, self.ring)
        nb = o.num_poly * _product({b: e - fb.get(b, 0) for b, e in common.items()}, self.ring)
        return RatFunc._raw(na + nb, common)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num_poly, dict(self.factors))

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        f = dict(self.factors)
        for b, e in o.factors:
            f[b] = f.get(b, 0) + e
        return RatFunc._raw(self.num_poly * o.num_poly, f)

    __rmul__ = __mul__

    def reciprocal(self) -> RatFunc:
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of zero rational function")
        return RatFunc(_product(dict(self.factors), self.ring), [(self.num_poly, 1)])

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __pow__(self, e: int):
        if e < 0:
            return self.reciprocal() ** (-e)
        return RatFunc._raw(self.num_poly**e, {b: m * e for b, m in self.factors})

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if self.ring.params != o.ring.params:
            return False
        if dict(self.factors) == dict(o.factors):
            return self.num_poly == o.num_poly
        return self.num_poly * o.den == o.num_poly * self.den

    __hash__ = None

    # -- calculus ---------------------------------------------------------------
    def diff(self) -> RatFunc:
        """Derivative in y by the quotient rule on the factored denominator."""
        if not self.factors:
            return RatFunc._raw(self.num_poly.diff_y(), {})
        bases = [b for b, _ in self.factors]
        full = _product({b: 1 for b in bases}, self.ring)
        out = self.num_poly.diff_y() * full
        for i, (b, e) in enumerate(self.factors):
            others = _product({c: 1 for j, c in enumerate(bases) if j != i}, self.ring)
            out = out - self.num_poly * b.diff_y() * others * e
        return RatFunc._raw(out, {b: e + 1 for b, e in self.factors})

    # -- evaluation and coefficient access ------------------------------------
    def eval_at(self, y=None, values: Mapping | None = None):
        d = self.den.eval_at(y, values)
        if d == 0:
            raise PoleError(f"denominator vanishes at y={y}, values={dict(values or {})}")
        n = self.num_poly.eval_at(y, values)
        if isinstance(n, (Fraction, ComplexExact)) and isinstance(d, (Fraction, ComplexExact)):
            return _squash(n / d) if isinstance(n, ComplexExact) or isinstance(d, ComplexExact) else n / d
        return n / d

    def subs(self, values: Mapping) -> RatFunc:
        num = self.num_poly.subs(values)
        return RatFunc(num, [(b.subs(values), e) for b, e in self.factors])

    def compose(self, ring: PolyRing, mapping: Mapping[str, object]) -> RatFunc:
        return RatFunc(
            self.num_poly.compose(ring, mapping),
            [(b.compose(ring, mapping), e) for b, e in self.factors],
        )

    def _param_free_den(self, name: str):
        for b, _ in self.factors:
            if name != "y" and b.degree(name) > 0:
                raise ValueError(f"denominator depends on {name!r}")

    def coeff(self, name: str, k: int) -> RatFunc:
        self._param_free_den(name)
        return RatFunc._raw(self.num_poly.coeff(name, k), dict(self.factors))

    def truncate(self, name: str, max_deg: int) -> RatFunc:
        self._param_free_den(name)
        return RatFunc._raw(self.num_poly.truncate(name, max_deg), dict(self.factors))

    def degree(self, name: str) -> int:
        self._param_free_den(name)
        return self.num_poly.degree(name)

    def __str__(self):
        if not self.factors:
            return self.num_poly.dump()
        den = " * ".join(f"({b.dump()})" + (f"^{e}" if e > 1 else "") for b, e in self.factors)
        return f"({self.num_poly.dump()}) / ({den})"

    def __repr__(self):
        return f"RatFunc({self})"


def _product(factors: Mapping[ParamPoly, int], ring: PolyRing) -> ParamPoly:
    out = ring.const(1)
    for b, e in factors.items():
        if e:
            out = out * b**e
    return out


def _cancel(num: ParamPoly, factors: dict):
    if num.is_zero():
        return num, ()
    kept = []
    for b in sorted(factors, key=lambda p: p.dump()):
        e = factors[b]
        while e:
            q = divide_exact(num, b)
            if q is None:
                break
            num, e = q, e - 1
        if e:
            kept.append((b, e))
    return num, tuple(kept)


# ---------------------------------------------------------------------------
# operation-style entry points


def poly_arith(a: ParamPoly, b: ParamPoly, op: str) -> ParamPoly:
    a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def ratfunc_diff_y(f: RatFunc) -> RatFunc:
    return f.diff()


def eval_at(f, y, param_values: Mapping | None = None):
    return f.eval_at(y, param_values)


def coeff_of_mu(f, k: int, name: str = "mu"):
    """Taylor coefficient of ``name**k`` (not multiplied by k!)."""
    return f.coeff(name, k)


# ---------------------------------------------------------------------------
# univariate machinery over Q


def _utrim(p: list) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _usub(a, b):
    n = max(len(a), len(b))
    return _utrim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _umul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _utrim(out)


def _udivmod(a, b):
    b = _utrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(_utrim(a))
    q = [Fraction(0)] * max(len(r) - len(b) + 1, 0)
    lb = b[-1]
    while len(r) >= len(b) and r:
        t = r[-1] / lb
        s = len(r) - len(b)
        q[s] = t
        for i, c in enumerate(b):
            r[s + i] -= t * c
        r = _utrim(r)
    return _utrim(q), r


def _umonic(p):
    p = _utrim(p)
    return [c / p[-1] for c in p] if p else p


def _ugcd(a, b):
    a, b = _umonic(a), _umonic(b)
    while b:
        _, r = _udivmod(a, b)
        a, b = b, _umonic(r)
    return a


def _uderiv(p):
    return _utrim([p[i] * i for i in range(1, len(p))])


def _ueval(p, x):
    acc = 0 * x
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _sturm_chain(p):
    chain = [p, _uderiv(p)]
    while len(chain[-1]) > 1:
        _, r = _udivmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _variations(chain, x) -> int:
    signs = [s for s in (_sign(_ueval(q, x)) for q in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _squarefree_decomposition(p):
    """Yun's algorithm: list of (factor, multiplicity)."""
    p = _umonic(p)
    out = []
    dp = _uderiv(p)
    a = _ugcd(p, dp)
    b, _ = _udivmod(p, a)
    c, _ = _udivmod(dp, a)
    d = _usub(c, _uderiv(b))
    i = 1
    while len(b) > 1:
        a = _ugcd(b, d) if d else _umonic(b)
        if len(a) > 1:
            out.append((a, i))
        b, _ = _udivmod(b, a)
        if d:
            c, _ = _udivmod(d, a)
        else:
            c = []
        d = _usub(c, _uderiv(b))
        i += 1
    return out


def _divisors(n: int, limit: int = 10**6):
    """Positive divisors of |n|, or None if n does not factor by trial division."""
    n = abs(n)
    if n == 0:
        return None
    primes = {}
    m, f = n, 2
    while f * f <= m and f <= limit:
        while m % f == 0:
            primes[f] = primes.get(f, 0) + 1
            m //= f
        f += 1 if f == 2 else 2
    if m > 1:
        if m > limit * limit:
            return None
        primes[m] = primes.get(m, 0) + 1
    divs = [1]
    for pr, e in primes.items():
        divs = [d * pr**k for d in divs for k in range(e + 1)]
    return divs


def _rational_root_candidates(p, max_candidates=20000):
    den = math.lcm(*(c.denominator for c in p))
    ints = [int(c * den) for c in p]
    g = math.gcd(*ints)
    ints = [c // g for c in ints]
    a0, an = ints[0], ints[-1]
    dp, dq = _divisors(a0), _divisors(an)
    if dp is None or dq is None or len(dp) * len(dq) > max_candidates:
        return None
    cands = {Fraction(s * x, y) for x in dp for y in dq for s in (1, -1)}
    return sorted(cands)


@dataclass(frozen=True)
class RealRoot:
    value: object  # Fraction when exact, else mpf
    multiplicity: int
    exact: bool
    lo: Fraction
    hi: Fraction

    def __float__(self):
        return float(self.value)


def _coerce_univariate(p):
    if isinstance(p, ParamPoly):
        coeffs = p.as_univariate()
    else:
        coeffs = [as_exact(c) for c in p]
    for c in coeffs:
        if isinstance(c, ComplexExact) and c.im:
            raise ModeError("real_roots needs real coefficients")
    return _utrim([Fraction(c.re) if isinstance(c, ComplexExact) else Fraction(c) for c in coeffs])


def real_roots(p, interval: tuple | None = None, digits: int = 30) -> list[RealRoot]:
    """All real roots of a univariate polynomial, ascending, with multiplicity.

    Rational roots are found exactly (rational-root test, then rational
    reconstruction of isolated roots); the rest are isolated with Sturm
    sequences and bisected to ``digits`` significant digits.  ``interval`` is
    half-open ``(lo, hi]``; the default covers every real root.
    """
    coeffs = _coerce_univariate(p)
    if not coeffs:
        raise ValueError("the zero polynomial has no isolated roots")
    if len(coeffs) == 1:
        return []
    if interval is None:
        lead = abs(coeffs[-1])
        bound = 1 + max(abs(c) / lead for c in coeffs[:-1])
        lo, hi = -Fraction(bound), Fraction(bound)
    else:
        lo, hi = (as_exact(v) for v in interval)
    found: list[RealRoot] = []
    for factor, mult in _squarefree_decomposition(coeffs):
        rest = factor
        if rest[0] == 0:
            if lo < 0 <= hi:
                found.append(RealRoot(Fraction(0), mult, True, Fraction(0), Fraction(0)))
            rest, _ = _udivmod(rest, [Fraction(0), Fraction(1)])
        cands = _rational_root_candidates(rest) if len(rest) > 1 else []
        for r in cands or []:
            if len(rest) <= 1:
                break
            if _ueval(rest, r) == 0:
                rest, _ = _udivmod(rest, [-r, Fraction(1)])
                if lo < r <= hi:
                    found.append(RealRoot(r, mult, True, r, r))
        if len(rest) > 1:
            found.extend(_isolate(rest, mult, lo, hi, digits))
    found.sort(key=lambda r: r.lo)
    return found


def _isolate(p, mult, lo, hi, digits):
    chain = _sturm_chain(p)
    out = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = _variations(chain, a) - _variations(chain, b)
        if n == 0:
            continue
        if n == 1:
            out.append(_refine(p, mult, a, b, digits))
            continue
        m = (a + b) / 2
        if _ueval(p, m) == 0:
            out.append(RealRoot(m, mult, True, m, m))
            eps = (b - a) / 2**20
            while _variations(chain, m - eps) - _variations(chain, m + eps) != 1:
                eps /= 2
            stack.append((a, m - eps))
            stack.append((m + eps, b))
        else:
            stack.append((a, m))
            stack.append((m, b))
    return out


def _refine(p, mult, a, b, digits):
    # root is in (a, b]
    if _ueval(p, b) == 0:
        return RealRoot(b, mult, True, b, b)
    sa = _sign(_ueval(p, a)) if _ueval(p, a) != 0 else None
    if sa is None:
        # a is a root of p but it lies outside (a, b]; nudge inside the interval
        sa = -_sign(_ueval(p, b))
    scale = max(abs(a), abs(b), Fraction(1))
    tol = scale / Fraction(10) ** digits
    while b - a > tol:
        m = (a + b) / 2
        v = _ueval(p, m)
        if v == 0:
            return RealRoot(m, mult, True, m, m)
        if _sign(v) == sa:
            a = m
        else:
            b = m
        # try a small-denominator rational every so often
        if (b - a) < scale / 10**6:
            r = ((a + b) / 2).limit_denominator(10**6)
            if a < r <= b and _ueval(p, r) == 0:
                return RealRoot(r, mult, True, r, r)
    with mpmath.workdps(digits + 10):
        mid = to_mp((a + b) / 2)
    return RealRoot(mid, mult, False, a, b)


def content_in(p: ParamPoly, name: str) -> list:
    """GCD, as a monic univariate polynomial in ``name``, of all coefficients
    of ``p`` viewed as a polynomial in every other variable."""
    i = 0 if name == "y" else 1 + p.ring.index(name)
    groups: dict = {}
    for k, c in p.terms.items():
        rest = k[:i] + k[i + 1 :]
        groups.setdefault(rest, {})[k[i]] = c
    g: list = []
    for coeffs in groups.values():
        deg = max(coeffs)
        u = [Fraction(0)] * (deg + 1)
        for d, c in coeffs.items():
            u[d] = c
        g = _umonic(u) if not g else _ugcd(g, u)
        if len(g) == 1:
            break
    return g


def reduce_in_y(f: RatFunc) -> RatFunc:
    """Lowest terms for a rational function of y alone (univariate gcd)."""
    used = f.num.free_symbols() | f.den.free_symbols()
    if not used <= {"y"}:
        raise AlgebraError(f"reduce_in_y needs a function of y only, got {sorted(used)}")
    ring = f.ring
    if f.num.is_zero() or not f.factors:
        return f
    n, d = f.num.as_univariate("y"), f.den.as_univariate("y")
    g = _ugcd(n, d)
    if len(g) > 1:
        n, _ = _udivmod(n, g)
        d, _ = _udivmod(d, g)
    lead = _utrim(d)[-1]
    parts = [(ring.poly_y(q), m) for q, m in _squarefree_decomposition(d)] if len(d) > 1 else []
    return RatFunc(ring.poly_y([c / lead for c in n]), parts)
