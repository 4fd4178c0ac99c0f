"""Finite-difference cross-check for Dirichlet problems on a finite interval.

``-psi'' + V psi = E psi`` is discretized with the three-point stencil on
``N`` equal cells.  The lowest eigenvalues of the resulting symmetric
tridiagonal matrix come from Sturm-count multisection, and three grid sizes
are combined by Richardson extrapolation.  The path shares no code with the
iteration engine; it works in double precision.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class OracleRangeError(ValueError):
    pass


@dataclass(frozen=True)
class GridProblem:
    x_lo: float
    x_hi: float
    N: int
    potential: Callable  # vectorized: numpy array -> numpy array
    boundary: str = "dirichlet"

    def __post_init__(self):
        if self.N < 64:
            raise OracleRangeError(f"N must be >= 64, got {self.N}")
        if self.boundary != "dirichlet":
            raise OracleRangeError("only Dirichlet walls are supported")
        if not self.x_hi > self.x_lo:
            raise OracleRangeError("empty interval")

    @property
    def h(self) -> float:
        return (self.x_hi - self.x_lo) / self.N

    def nodes(self) -> np.ndarray:
        return self.x_lo + self.h * np.arange(1, self.N)

    def refined(self, factor: int = 2) -> GridProblem:
        return GridProblem(self.x_lo, self.x_hi, self.N * factor, self.potential, self.boundary)


def _sturm_counts(diag: np.ndarray, off2: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """Number of eigenvalues below each shift (LDL^T pivot signs)."""
    count = np.zeros(shifts.shape, dtype=np.int64)
    d = diag[0] - shifts
    # a zero pivot is nudged to a small negative number
    nudge = np.finfo(float).eps * max(1.0, float(np.max(np.abs(diag))))
    for i in range(len(diag)):
        if i:
            d = diag[i] - shifts - off2[i - 1] / d
        d = np.where(d == 0, -nudge, d)
        count += d < 0
    return count


def fd_eigenvalues(problem: GridProblem, levels: int, sections: int = 16) -> list[float]:
    """Lowest ``levels`` eigenvalues of the discretized operator, ascending."""
    n_int = problem.N - 1
    if levels < 1 or levels >= problem.N / 4:
        raise OracleRangeError(f"levels must be in [1, N/4) = [1, {problem.N / 4}), got {levels}")
    v = np.asarray(problem.potential(problem.nodes()), dtype=float)
    if not np.all(np.isfinite(v)):
        raise OracleRangeError("potential is not finite on the interior nodes")
    h2 = problem.h**2
    diag = 2.0 / h2 + v
    off2 = np.full(n_int - 1, 1.0 / h2**2)
    # Gershgorin bounds
    lo0 = float(np.min(diag) - 2.0 / h2)
    hi0 = float(np.max(diag) + 2.0 / h2)
    lo = np.full(levels, lo0)
    hi = np.full(levels, hi0)
    target = np.arange(levels)
    fractions = np.arange(1, sections) / sections
    for _ in range(200):
        width = hi - lo
        if np.all(width <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(hi))):
            break
        pts = lo[:, None] + width[:, None] * fractions[None, :]
        cnt = _sturm_counts(diag, off2, pts.ravel()).reshape(pts.shape)
        # eigenvalue k lies where the count first exceeds k
        above = cnt > target[:, None]
        first = above.argmax(axis=1)
        new_hi = np.where(above.any(axis=1), pts[np.arange(levels), first], hi)
        prev = np.where(first > 0, pts[np.arange(levels), np.maximum(first - 1, 0)], lo)
        new_lo = np.where(above.any(axis=1), prev, pts[:, -1])
        lo, hi = new_lo, new_hi
    return list(0.5 * (lo + hi))


@dataclass
class RichardsonResult:
    value: float
    error: float
    raw: tuple
    monotone: bool = True


def richardson(values: Sequence[float]) -> RichardsonResult:
    """Extrapolate eigenvalues at N, 2N, 4N assuming an h^2, h^4 error series."""
    if len(values) != 3:
        raise ValueError("need values at N, 2N and 4N")
    e1, e2, e4 = (float(v) for v in values)
    d1, d2 = e1 - e2, e2 - e4
    if d1 == 0 and d2 == 0:
        return RichardsonResult(e4, 0.0, (e1, e2, e4))
    if d1 * d2 <= 0 or abs(d2) > abs(d1):
        warnings.warn(f"non-monotone refinement sequence {values}; returning the finest value", RuntimeWarning)
        return RichardsonResult(e4, abs(d2), (e1, e2, e4), monotone=False)
    r1 = (4 * e2 - e1) / 3
    r2 = (4 * e4 - e2) / 3
    r = (16 * r2 - r1) / 15
    return RichardsonResult(r, abs(r - r2), (e1, e2, e4))


def extrapolated_eigenvalues(problem: GridProblem, levels: int) -> list[RichardsonResult]:
    grids = [problem, problem.refined(2), problem.refined(4)]
    runs = [fd_eigenvalues(g, levels) for g in grids]
    return [richardson([r[k] for r in runs]) for k in range(levels)]


def problem_from_spec(spec, N: int = 1000) -> GridProblem:
    """GridProblem for a real catalog potential on its own interval."""
    if spec.complex:
        raise OracleRangeError(f"{spec.name} is complex; the oracle is real-only")
    lo, hi = (float(e) * math.pi for e in spec.x_domain)
    return GridProblem(lo, hi, N, lambda x: spec.potential(x, np))


def convergence_order(problem: GridProblem, level: int = 0, exact: float | None = None, doublings: int = 3) -> float:
    """Empirical order ``p`` in ``error ~ h^p`` from successive grid doublings."""
    vals, hs = [], []
    g = problem
    for _ in range(doublings + (0 if exact is not None else 1)):
        vals.append(fd_eigenvalues(g, level + 1)[level])
        hs.append(g.h)
        g = g.refined(2)
    if exact is not None:
        errs = [abs(v - exact) for v in vals]
        xs = np.log(hs)
    else:
        errs = [abs(a - b) for a, b in zip(vals, vals[1:])]
        xs = np.log(hs[:-1])
    slope, _ = np.polyfit(xs, np.log(errs), 1)
    return float(slope)
