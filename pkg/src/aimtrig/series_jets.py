"""Truncated Taylor series ("jets") at a point, at configurable precision.

A :class:`Jet` stores ``coeffs[k, j]``: the coefficient of ``t**k * E**j``
in the expansion about ``y = center + t``.  The second axis carries an
optional polynomial dependence on one energy symbol, so a single recurrence
pass produces the eigenvalue condition as a polynomial in the energy.  Plain
numeric jets simply have one column.

Entries are mpmath numbers held in numpy object arrays; arithmetic happens at
the ambient ``mpmath.mp`` precision (use :func:`working_precision`).
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from typing import Mapping

import mpmath
import numpy as np

from .exact_algebra import (
    ModeError,
    ParamPoly,
    PoleError,
    RatFunc,
    as_exact,
    to_mp,
)

DEFAULT_PRECISION = int(os.environ.get("AIMTRIG_PRECISION", "50"))


class JetError(ValueError):
    pass


class JetCapacityError(JetError):
    """The recurrence asked for more derivative orders than the jet carries."""


@contextmanager
def working_precision(digits: int | None = None):
    with mpmath.workdps(digits or DEFAULT_PRECISION):
        yield


def _zeros(shape):
    out = np.empty(shape, dtype=object)
    out.fill(mpmath.mpf(0))
    return out


class Jet:
    __slots__ = ("center", "coeffs")

    def __init__(self, center, coeffs):
        arr = np.array(coeffs, dtype=object)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise JetError("a jet needs at least one coefficient")
        for idx, c in np.ndenumerate(arr):
            if not isinstance(c, (mpmath.mpf, mpmath.mpc)):
                arr[idx] = to_mp(c)
        self.center = center
        self.coeffs = arr

    @classmethod
    def _raw(cls, center, arr):
        obj = cls.__new__(cls)
        obj.center = center
        obj.coeffs = arr
        return obj

    @classmethod
    def constant(cls, center, c, length: int):
        arr = _zeros((length, 1))
        arr[0, 0] = to_mp(c)
        return cls._raw(center, arr)

    def __len__(self):
        return self.coeffs.shape[0]

    @property
    def energy_degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def values(self) -> list:
        """Plain coefficient list (only for energy-free jets)."""
        if self.coeffs.shape[1] != 1:
            raise JetError("jet depends on the energy symbol")
        return list(self.coeffs[:, 0])

    def is_complex(self) -> bool:
        return any(isinstance(c, mpmath.mpc) for c in self.coeffs.flat)

    # -- structural helpers -----------------------------------------------
    def _check(self, other: Jet):
        if not isinstance(other, Jet):
            raise TypeError(f"expected a Jet, got {type(other).__name__}")
        if other.center != self.center:
            raise JetError(f"jet centers differ: {self.center} vs {other.center}")
        if len(other) != len(self):
            raise JetError(f"jet lengths differ: {len(self)} vs {len(other)}")

    def truncate(self, length: int) -> Jet:
        if length > len(self):
            raise JetCapacityError(f"cannot extend a jet of length {len(self)} to {length}")
        return Jet._raw(self.center, self.coeffs[:length])

    def trim_energy(self) -> Jet:
        """Drop trailing all-zero energy columns."""
        d = self.coeffs.shape[1]
        while d > 1 and all(c == 0 for c in self.coeffs[:, d - 1]):
            d -= 1
        return Jet._raw(self.center, self.coeffs[:, :d])

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Jet):
            out = self.coeffs.copy()
            out[0, 0] = out[0, 0] + to_mp(other)
            return Jet._raw(self.center, out)
        self._check(other)
        a, b = self.coeffs, other.coeffs
        d = max(a.shape[1], b.shape[1])
        out = _zeros((len(self), d))
        out[:, : a.shape[1]] += a
        out[:, : b.shape[1]] += b
        return Jet._raw(self.center, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet._raw(self.center, -self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -to_mp(other))

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet._raw(self.center, self.coeffs * to_mp(other))
        self._check(other)
        return Jet._raw(self.center, _cauchy(self.coeffs, other.coeffs, len(self)))

    __rmul__ = __mul__

    def shift_energy(self, k: int = 1) -> Jet:
        """Multiply by ``E**k``."""
        L, d = self.coeffs.shape
        out = _zeros((L, d + k))
        out[:, k:] = self.coeffs
        return Jet._raw(self.center, out)

    def diff(self) -> Jet:
        if len(self) < 2:
            raise JetCapacityError("cannot differentiate a length-1 jet")
        k = np.arange(1, len(self), dtype=object).reshape(-1, 1)
        return Jet._raw(self.center, self.coeffs[1:] * k)

    def reciprocal(self) -> Jet:
        """Series reciprocal by Newton iteration ``r <- r (2 - a r)``."""
        if self.coeffs.shape[1] != 1:
            raise JetError("reciprocal of an energy-dependent jet is not supported")
        a0 = self.coeffs[0, 0]
        if a0 == 0:
            raise PoleError(f"jet has zero constant term at y={self.center}")
        L = len(self)
        r = _zeros((1, 1))
        r[0, 0] = 1 / a0
        n = 1
        while n < L:
            n = min(2 * n, L)
            a = self.coeffs[:n]
            rr = _zeros((n, 1))
            rr[: r.shape[0]] = r
            ar = _cauchy(a, rr, n)
            two_minus = -ar
            two_minus[0, 0] += 2
            r = _cauchy(rr, two_minus, n)
        return Jet._raw(self.center, r)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet._raw(self.center, self.coeffs / to_mp(other))
        return self * other.reciprocal()

    def eval_energy(self, e) -> Jet:
        """Substitute a numeric energy, leaving a one-column jet."""
        arr = self.coeffs
        out = _zeros((arr.shape[0], 1))
        for k in range(arr.shape[0]):
            acc = mpmath.mpf(0)
            for c in arr[k, ::-1]:
                acc = acc * e + c
            out[k, 0] = acc
        return Jet._raw(self.center, out)

    def __repr__(self):
        if self.coeffs.shape[1] == 1:
            body = ", ".join(mpmath.nstr(c, 8) for c in self.coeffs[:, 0])
        else:
            body = f"{self.coeffs.shape[0]}x{self.coeffs.shape[1]}"
        return f"Jet(center={self.center}, [{body}])"


def _cauchy(a, b, length: int):
    """Truncated product in t, full product in the energy axis."""
    if a.shape[1] > b.shape[1]:
        a, b = b, a
    da, db = a.shape[1], b.shape[1]
    la, lb = a.shape[0], b.shape[0]
    out = _zeros((length, da + db - 1))
    # loop over the energy columns of the narrower factor
    for j in range(da):
        col = a[:, j]
        if not any(col):
            continue
        for k in range(length):
            lo = max(0, k - lb + 1)
            hi = min(k, la - 1)
            if lo <= hi:
                out[k, j : j + db] += np.dot(col[lo : hi + 1][::-1], b[k - hi : k - lo + 1])
    return out


# ---------------------------------------------------------------------------
# bridges from exact algebra


def _numeric_values(values: Mapping | None):
    # floats go through their decimal repr so 0.1 means 1/10
    return {k: to_mp(as_exact(v) if isinstance(v, (float, str)) else v) for k, v in (values or {}).items()}


def _poly_to_grid(p: ParamPoly, values: Mapping, energy: str | None):
    """Collapse a ParamPoly to ``grid[y_degree][energy_degree]`` numbers."""
    ring = p.ring
    names = list(ring.params)
    e_idx = names.index(energy) + 1 if energy is not None and energy in names else None
    missing = set(names) - set(values) - ({energy} if energy else set())
    used = p.free_symbols() - {"y"}
    if missing & used:
        raise ValueError(f"no numeric value for {sorted(missing & used)}")
    out: dict = {}
    for key, c in p.terms.items():
        term = to_mp(c)
        for i, e in enumerate(key[1:], start=1):
            if e and i != e_idx:
                term = term * values[names[i - 1]] ** e
        slot = (key[0], key[e_idx] if e_idx is not None else 0)
        out[slot] = out.get(slot, 0) + term
    return out


def _taylor_shift(grid: dict, y0, length: int):
    """Coefficients of p(y0 + t) truncated to ``length`` orders in t."""
    if not grid:
        return _zeros((length, 1))
    deg_e = max(j for _, j in grid)
    out = _zeros((length, deg_e + 1))
    for (d, j), c in grid.items():
        # (y0 + t)^d = sum_k binom(d, k) y0^(d-k) t^k
        for k in range(min(d, length - 1) + 1):
            out[k, j] += c * mpmath.binomial(d, k) * y0 ** (d - k)
    return out


def jet_from_ratfunc(
    f: RatFunc | ParamPoly,
    y0,
    length: int,
    param_values: Mapping | None = None,
    energy: str | None = None,
) -> Jet:
    """First ``length`` Taylor coefficients of ``f`` about ``y0``.

    All parameters need numeric values except ``energy``, which stays
    symbolic and becomes the jet's second axis.  The denominator must not
    depend on ``energy``.
    """
    if isinstance(f, ParamPoly):
        f = RatFunc.from_poly(f)
    values = _numeric_values(param_values)
    yc = to_mp(y0) if not isinstance(y0, (mpmath.mpf, mpmath.mpc)) else y0
    num = Jet._raw(y0, _taylor_shift(_poly_to_grid(f.num, values, energy), yc, length))
    if not f.factors:
        return num
    den = f.den
    if energy is not None and energy in den.ring.params and den.degree(energy) > 0:
        raise JetError(f"denominator depends on the energy symbol {energy!r}")
    dj = Jet._raw(y0, _taylor_shift(_poly_to_grid(den, values, None), yc, length))
    if dj.coeffs[0, 0] == 0:
        raise PoleError(f"denominator vanishes at y0={y0}")
    return num * dj.reciprocal()


def jet_arith(a: Jet, b: Jet, op: str) -> Jet:
    a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def jet_diff(a: Jet) -> Jet:
    return a.diff()


def require_real(j: Jet):
    if j.is_complex():
        raise ModeError("complex jet in a real-mode computation")
