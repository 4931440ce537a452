"""One-dimensional maximizers used throughout the package.

Everything here is a grid scan followed by golden-section refinement of the
best bracket.  The compiled ``sup_rho`` kernel mirrors ``maximize_on_grid``
step for step, so the two backends agree to rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import NonFinite

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
DEFAULT_RHO_MAX = 1e4
DEFAULT_TOL = 1e-9
DEFAULT_GRID = 64
MAX_GOLDEN_ITER = 200
# smallest positive grid point, relative to the cap, when the domain starts at 0
ZERO_START_SPAN = 1e-10


@dataclass(frozen=True)
class OptResult:
    value: float
    arg: float
    at_boundary: bool = False
    diverged: bool = False


def _checked(f: Callable[[float], float]) -> Callable[[float], float]:
    def g(x: float) -> float:
        v = f(x)
        if math.isnan(v):
            raise NonFinite(f"objective is NaN at {x!r}")
        return v

    return g


def golden_max(f: Callable[[float], float], a: float, b: float, tol: float) -> tuple[float, float]:
    """Golden-section search for a maximum of a unimodal ``f`` on ``[a, b]``.

    Returns ``(x, f(x))`` for the better of the two interior probes once the
    bracket is narrower than ``tol``. Endpoints are never evaluated.
    """
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = f(c)
    fd = f(d)
    for _ in range(MAX_GOLDEN_ITER):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    if fc >= fd:
        return c, fc
    return d, fd


@lru_cache(maxsize=64)
def _grid(lo: float, hi: float, n: int, geometric: bool) -> tuple[float, ...]:
    if n < 2 or hi <= lo:
        return (lo,)
    if not geometric:
        step = (hi - lo) / (n - 1)
        pts = [lo + k * step for k in range(n)]
    elif lo > 0:
        llo, lhi = math.log(lo), math.log(hi)
        step = (lhi - llo) / (n - 1)
        pts = [math.exp(llo + k * step) for k in range(n)]
    else:
        start = hi * ZERO_START_SPAN
        llo, lhi = math.log(start), math.log(hi)
        step = (lhi - llo) / (n - 2)
        pts = [0.0] + [math.exp(llo + k * step) for k in range(n - 1)]
    pts[0] = lo
    pts[-1] = hi
    return tuple(pts)


def rho_grid(lo: float, hi: float, n: int = DEFAULT_GRID) -> np.ndarray:
    """Log-spaced scan grid on ``[lo, hi]``; a zero lower end gets its own point."""
    return np.array(_grid(float(lo), float(hi), int(n), True))


def unit_grid(n: int) -> np.ndarray:
    return np.array(_grid(0.0, 1.0, int(n), False))


def maximize_on_grid(
    f: Callable[[float], float],
    grid: Sequence[float],
    tol: float = DEFAULT_TOL,
    detect_divergence: bool = True,
    values: Sequence[float] | None = None,
) -> OptResult:
    """Scan ``grid``, then golden-section the bracket around the best point.

    The refined point replaces the grid optimum only if it is strictly
    better, so the result never falls below the best grid value and a
    maximum sitting on an endpoint is reported exactly there. ``values``
    may carry ``f`` already evaluated on the grid.
    """
    f = _checked(f)
    grid = [float(x) for x in grid]
    n = len(grid)
    if values is None:
        vals = [f(x) for x in grid]
    else:
        vals = [float(v) for v in values]
        if any(math.isnan(v) for v in vals):
            raise NonFinite("objective is NaN on the scan grid")
    i = max(range(n), key=vals.__getitem__)
    lo_end, hi_end = grid[0], grid[-1]
    if detect_divergence and n >= 2 and i == n - 1 and vals[-1] > vals[-2]:
        return OptResult(vals[-1], hi_end, True, True)
    if n == 1:
        return OptResult(vals[0], grid[0], True, False)
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, n - 1)]
    x, fx = golden_max(f, a, b, tol)
    if fx > vals[i]:
        arg, val = x, fx
    else:
        arg, val = grid[i], vals[i]
    at_boundary = arg - lo_end <= tol or hi_end - arg <= tol
    return OptResult(val, arg, at_boundary, False)


def maximize_concave_unit(f: Callable[[float], float], tol: float = DEFAULT_TOL, n_grid: int = 0) -> OptResult:
    """Maximize ``f`` over ``s`` in ``[0, 1]``.

    With ``n_grid == 0`` this is plain golden section plus an endpoint check,
    which is exact under concavity. A positive ``n_grid`` scans that many
    equispaced points first, for objectives that are only roughly concave.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if n_grid:
        return maximize_on_grid(f, unit_grid(n_grid), tol, detect_divergence=False)
    g = _checked(f)
    x, fx = golden_max(g, 0.0, 1.0, tol)
    f0, f1 = g(0.0), g(1.0)
    arg, val = x, fx
    if f0 > val:
        arg, val = 0.0, f0
    if f1 > val:
        arg, val = 1.0, f1
    return OptResult(val, arg, arg <= tol or arg >= 1.0 - tol, False)


def maximize_over_rho(
    g: Callable[[float], float],
    rho_max: float = DEFAULT_RHO_MAX,
    tol: float = DEFAULT_TOL,
    rho_min: float = 1.0,
    n_grid: int = DEFAULT_GRID,
) -> OptResult:
    """Maximize ``g`` over ``[rho_min, rho_max]`` without assuming unimodality.

    ``diverged`` is set when the largest grid value sits at ``rho_max`` and
    the last two grid values are still strictly increasing; ``value`` is then
    ``g(rho_max)``, a lower bound on the supremum.
    """
    if rho_max < rho_min:
        raise ValueError(f"rho_max={rho_max} is below rho_min={rho_min}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    return maximize_on_grid(g, rho_grid(rho_min, rho_max, n_grid), tol)


def bisect_predicate(pred: Callable[[float], bool], lo: float, hi: float, tol: float) -> float:
    """Smallest ``x`` in ``(lo, hi]`` with ``pred(x)`` true, for monotone ``pred``.

    Requires ``pred(hi)`` true and ``pred(lo)`` false; returns a point where
    the predicate holds, within ``tol`` of the switch.
    """
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi
