"""Additive Gaussian channel with codewords uniform on the power sphere.

Distances are Bhattacharyya, ``(x - x')**2 / (8 sigma2)``, per symbol.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curves import GAUSSIAN, CurvePoint, ExponentCurve, classify_phase, default_grid, _check_grid
from .errors import DomainError
from .optimize import bisect_predicate

R1_LO = 1e-6
R1_HI = 10.0
R1_TOL = 1e-8


@dataclass(frozen=True)
class GaussianParams:
    S: float
    sigma2: float

    def __post_init__(self):
        if not (self.S > 0 and self.sigma2 > 0):
            raise DomainError(f"need S > 0 and sigma2 > 0, got S={self.S}, sigma2={self.sigma2}")

    @property
    def mean_distance(self) -> float:
        """``S / (4 sigma2)``: average distance between independent codewords."""
        return self.S / (4.0 * self.sigma2)


def gaussian_R_of_D(p: GaussianParams, D: float) -> float:
    """Rate function ``1/2 ln[S / (8 sigma2 D (1 - 2 sigma2 D / S))]``; zero from ``S/(4 sigma2)`` on."""
    u = 2.0 * p.sigma2 * D / p.S
    if D <= 0 or u >= 1.0:
        raise DomainError(f"D={D} outside (0, S/(2 sigma2))")
    if D >= p.mean_distance:
        return 0.0
    # the bracket equals 1 / (4u(1-u))
    return -0.5 * (math.log(4.0 * u) + math.log1p(-u))


def gaussian_D_of_R(p: GaussianParams, R: float) -> float:
    """``S (1 - sqrt(1 - e^{-2R})) / (4 sigma2)``, written to avoid cancellation at large ``R``."""
    if R < 0:
        raise DomainError("rate must be nonnegative")
    if R == 0:
        return p.mean_distance
    e = math.exp(-2.0 * R)
    return p.mean_distance * e / (1.0 + math.sqrt(-math.expm1(-2.0 * R)))


def _slope(p: GaussianParams, R: float) -> float:
    h = 1e-6 * max(1.0, R)
    lo = max(0.0, R - h)
    return (gaussian_D_of_R(p, R + h) - gaussian_D_of_R(p, lo)) / (R + h - lo)


def gaussian_R1(p: GaussianParams) -> float:
    """Rate where ``D'(R) = -1``, by bisection on a central-difference slope."""
    if _slope(p, R1_LO) >= -1.0:
        return 0.0
    if _slope(p, R1_HI) < -1.0:
        return R1_HI
    return bisect_predicate(lambda R: _slope(p, R) >= -1.0, R1_LO, R1_HI, R1_TOL)


def gaussian_exponent(p: GaussianParams, R: float, R1: float | None = None) -> float:
    if R1 is None:
        R1 = gaussian_R1(p)
    if R <= R1:
        return gaussian_D_of_R(p, R)
    return max(0.0, gaussian_D_of_R(p, R1) + R1 - R)


def gaussian_exponent_curve(p: GaussianParams, R_grid: Sequence[float] | None = None) -> ExponentCurve:
    """Curvy part ``D(R)`` up to ``R1``, then the tangent of slope -1, then zero."""
    R1 = gaussian_R1(p)
    value_R1 = gaussian_D_of_R(p, R1)
    curve = ExponentCurve(GAUSSIAN, R1, value_R1, p.mean_distance)
    grid = default_grid(R1, value_R1) if R_grid is None else _check_grid(R_grid)
    for R in grid:
        R = float(R)
        if R <= R1:
            raw = gaussian_D_of_R(p, R)
            rho = -_slope(p, R) if R > 0 else math.inf
        else:
            raw = value_R1 + R1 - R
            rho = 1.0
        curve.points.append(CurvePoint(R, max(0.0, raw), rho, 0.5, classify_phase(curve, R), raw))
    return curve


def gaussian_rate_array(p: GaussianParams, D: np.ndarray) -> np.ndarray:
    """Vectorized rate function: ``inf`` at ``D <= 0``, zero from ``S/(4 sigma2)`` on."""
    D = np.asarray(D, dtype=np.float64)
    out = np.zeros_like(D)
    inside = (D > 0) & (D < p.mean_distance)
    u = 2.0 * p.sigma2 * D[inside] / p.S
    out[inside] = -0.5 * (np.log(4.0 * u) + np.log1p(-u))
    out[D <= 0] = np.inf
    return out
