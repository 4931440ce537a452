"""Exponent-versus-rate curves for the three expurgated bounds.

Each curve is curvy up to its critical rate ``R1`` (the glassy phase),
then a straight line of slope -1 (paramagnetic), then zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .channel import expected_distance
from .errors import NonFinite
from .exponents import ExponentInputs, asymptotic_slope
from .optimize import (
    DEFAULT_RHO_MAX,
    DEFAULT_TOL,
    maximize_concave_unit,
    maximize_on_grid,
    rho_grid,
    unit_grid,
)
from .ratedistortion import RHO_ONE_TOL, RdProblem, critical_rate, dq_of_r, tilted_point

GALLAGER = "gallager"
CKM = "ckm_bhatt"
CHERNOFF = "chernoff_new"
GAUSSIAN = "gaussian"
KINDS = (GALLAGER, CKM, CHERNOFF)

GLASSY = "glassy"
PARAMAGNETIC = "paramagnetic"
ZERO = "zero"

S_GRID = 33
DEFAULT_POINTS = 201
GRID_MARGIN = 1.2


@dataclass(frozen=True)
class CurvePoint:
    R: float
    value: float
    rho_star: float
    s_star: float
    phase: str
    raw: float = math.nan
    diverged: bool = False


@dataclass
class ExponentCurve:
    """Sampled exponent curve. ``value_R1`` is the exponent at the critical rate."""

    kind: str
    R1: float
    value_R1: float
    zero_rate_value: float
    points: list[CurvePoint] = field(default_factory=list)

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.R for p in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.points])

    @property
    def zero_crossing(self) -> float:
        return self.R1 + self.value_R1

    def phase_at(self, R: float) -> str:
        return classify_phase(self, R)


def classify_phase(curve: ExponentCurve, R: float) -> str:
    """Glassy below ``R1``, paramagnetic on the straight line, zero past it."""
    if R < curve.R1:
        return GLASSY
    if R < curve.R1 + curve.value_R1:
        return PARAMAGNETIC
    return ZERO


class PointSolver:
    """``sup_{rho >= 1} [E(rho, s) - rho R]`` for one exponent family.

    With ``optimize_s`` the Chernoff parameter is also maximized: a 33-point
    scan over ``[0, 1]`` followed by golden section on the best bracket,
    since a supremum over ``rho`` need not stay concave in ``s``.
    """

    def __init__(
        self,
        inputs: ExponentInputs,
        kind: int,
        s: float = 0.5,
        optimize_s: bool = False,
        rho_max: float = DEFAULT_RHO_MAX,
        tol: float = DEFAULT_TOL,
    ):
        self.inputs = inputs
        self.kind = kind
        self.s = s
        self.optimize_s = optimize_s
        self.tol = tol
        self.grid = rho_grid(1.0, rho_max)
        self.slope = asymptotic_slope(inputs.distance(0.5), inputs.q, kind)

    def _sup(self, R: float, s: float):
        out = kernels.sup_rho(self.inputs.distance(s).d, self.inputs.logq, R, self.kind, self.grid, self.tol)
        if math.isnan(out[0]):
            raise NonFinite(f"exponent objective is NaN at R={R}, s={s}")
        return out

    def solve(self, R: float) -> tuple[float, float, float]:
        """Return ``(raw value, rho*, s*)`` at rate ``R``."""
        if not self.optimize_s:
            value, rho, _, _ = self._sup(R, self.s)
            return value, rho, self.s
        seen: dict[float, tuple] = {}

        def h(s: float) -> float:
            seen[s] = self._sup(R, s)
            return seen[s][0]

        res = maximize_on_grid(h, unit_grid(S_GRID), self.tol, detect_divergence=False)
        value, rho, _, _ = seen[res.arg]
        return value, rho, res.arg

    def unbounded(self, R: float) -> bool:
        return R < self.slope

    def rho_is_one(self, R: float) -> bool:
        return self.solve(R)[1] <= 1.0 + RHO_ONE_TOL


def default_grid(R1: float, value_R1: float, n: int = DEFAULT_POINTS) -> np.ndarray:
    top = GRID_MARGIN * (R1 + value_R1)
    if not top > 0:
        top = 0.1
    return np.linspace(0.0, top, n)


def _build(
    kind_name: str,
    solver: PointSolver,
    R_grid: Sequence[float] | None,
    zero_rate_value: float,
) -> ExponentCurve:
    size = solver.inputs.channel.input_size
    R1 = critical_rate(solver.rho_is_one, size)
    value_R1 = max(0.0, solver.solve(R1)[0])
    curve = ExponentCurve(kind_name, R1, value_R1, zero_rate_value)
    grid = default_grid(R1, value_R1) if R_grid is None else _check_grid(R_grid)
    for R in grid:
        raw, rho, s = solver.solve(float(R))
        curve.points.append(
            CurvePoint(
                R=float(R),
                value=max(0.0, raw),
                rho_star=rho,
                s_star=s,
                phase=classify_phase(curve, float(R)),
                raw=raw,
                diverged=solver.unbounded(float(R)),
            )
        )
    return curve


def _check_grid(R_grid: Iterable[float]) -> np.ndarray:
    g = np.asarray(list(R_grid), dtype=np.float64)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("rate grid must be a non-empty 1-D sequence")
    if np.any(g < 0) or np.any(np.diff(g) < 0):
        raise ValueError("rate grid must be sorted and nonnegative")
    return g


def curve_gallager(
    inputs: ExponentInputs,
    R_grid: Sequence[float] | None = None,
    rho_max: float = DEFAULT_RHO_MAX,
    tol: float = DEFAULT_TOL,
) -> ExponentCurve:
    """Gallager's expurgated exponent at ``s = 1/2``, where its ``s``-optimum always lies."""
    solver = PointSolver(inputs, kernels.GALLAGER, 0.5, False, rho_max, tol)
    return _build(GALLAGER, solver, R_grid, expected_distance(inputs.distance(0.5), inputs.q))


def curve_ckm(
    inputs: ExponentInputs,
    R_grid: Sequence[float] | None = None,
    rho_max: float = DEFAULT_RHO_MAX,
    tol: float = DEFAULT_TOL,
) -> ExponentCurve:
    """CKM exponent through its one-parameter form, Bhattacharyya distance."""
    solver = PointSolver(inputs, kernels.CKM, 0.5, False, rho_max, tol)
    return _build(CKM, solver, R_grid, expected_distance(inputs.distance(0.5), inputs.q))


def curve_chernoff_new(
    inputs: ExponentInputs,
    R_grid: Sequence[float] | None = None,
    rho_max: float = DEFAULT_RHO_MAX,
    tol: float = DEFAULT_TOL,
    s: float | None = None,
) -> ExponentCurve:
    """``sup_{rho >= 1} sup_{0 <= s <= 1} [E(rho, s, Q) - rho R]``; a given ``s`` is held fixed."""
    if s is not None:
        solver = PointSolver(inputs, kernels.CKM, s, False, rho_max, tol)
        return _build(CHERNOFF, solver, R_grid, expected_distance(inputs.distance(s), inputs.q))
    solver = PointSolver(inputs, kernels.CKM, optimize_s=True, rho_max=rho_max, tol=tol)
    return _build(CHERNOFF, solver, R_grid, zero_rate_limit(inputs, tol))


def zero_rate_limit(inputs: ExponentInputs, tol: float = DEFAULT_TOL) -> float:
    """``max_s sum q q' d_s``; the ``s``-map is concave, so golden section suffices."""
    if math.isinf(expected_distance(inputs.distance(0.5), inputs.q)):
        return math.inf
    return maximize_concave_unit(lambda s: expected_distance(inputs.distance(s), inputs.q), tol).value


def all_curves(
    inputs: ExponentInputs,
    R_grid: Sequence[float] | None = None,
    rho_max: float = DEFAULT_RHO_MAX,
    tol: float = DEFAULT_TOL,
) -> dict[str, ExponentCurve]:
    """The three curves on one shared grid (taken from the Chernoff curve by default)."""
    new = curve_chernoff_new(inputs, R_grid, rho_max, tol)
    grid = new.rates if R_grid is None else R_grid
    return {
        GALLAGER: curve_gallager(inputs, grid, rho_max, tol),
        CKM: curve_ckm(inputs, grid, rho_max, tol),
        CHERNOFF: new,
    }


def e1_diagnostic(inputs: ExponentInputs, s: float, R: float, rho: float, rho_max: float = DEFAULT_RHO_MAX) -> float:
    """``min [E d + rho I] - rho R`` over conditionals with ``I >= R``, in closed form.

    Below ``R_Q(D_rho)`` this is the tangent line of slope ``-rho``; above it,
    ``D_Q(R)``.
    """
    if rho < 1:
        raise ValueError("rho must be at least 1")
    prob = RdProblem(inputs.q, inputs.distance(s))
    D_rho, R_rho = tilted_point(prob, 1.0 / rho)
    if R <= R_rho:
        return D_rho + rho * (R_rho - R)
    return dq_of_r(prob, R, False, rho_max).value


def e2_value(inputs: ExponentInputs, s: float, R: float, rho_max: float = DEFAULT_RHO_MAX) -> float:
    """``sup_{rho >= 1} [E(rho, s, Q) - rho R]`` (unclamped)."""
    return dq_of_r(RdProblem(inputs.q, inputs.distance(s)), R, True, rho_max).value
