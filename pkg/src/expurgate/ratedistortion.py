"""Rate-distortion functions with the reproduction distribution tied to ``Q``.

The distortion measure is a Chernoff distance matrix.  ``rq_of_d`` and
``dq_of_r`` use the one-parameter Legendre forms; ``joint_oracle`` scans
the polytope of joint distributions with both marginals equal to ``Q``
and serves as an independent check on small alphabets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from . import kernels
from .channel import DistanceMatrix, InputDistribution, expected_distance
from .errors import AlphabetTooLarge, Diverged, NoFiniteR1, NonFinite
from .optimize import DEFAULT_RHO_MAX, DEFAULT_TOL, OptResult, bisect_predicate, maximize_on_grid, rho_grid

BETA_MAX = 1e6
R1_TOL = 1e-6
# rho* within this of 1 counts as the boundary optimum
RHO_ONE_TOL = 1e-6
ORACLE_MAX_ALPHABET = 3


@dataclass(frozen=True, eq=False)
class RdProblem:
    q: InputDistribution
    dm: DistanceMatrix
    beta_max: float = BETA_MAX

    def __post_init__(self):
        if self.dm.size != len(self.q):
            raise ValueError("distance matrix does not match the input alphabet")

    @property
    def logq(self) -> NDArray[np.float64]:
        return np.ascontiguousarray(self.q.log_probs)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    w: NDArray[np.float64]

    def marginals(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return self.w.sum(axis=1), self.w.sum(axis=0)

    def mutual_information(self) -> float:
        """``I(X;X')`` in nats with ``0 ln 0 = 0``."""
        px, py = self.marginals()
        pos = self.w > 0
        prod = np.outer(px, py)
        return math.fsum((self.w[pos] * np.log(self.w[pos] / prod[pos])).tolist())

    def expected_distance(self, d: NDArray[np.float64]) -> float:
        pos = self.w > 0
        return math.fsum((self.w[pos] * d[pos]).tolist())

    def in_feasible_set(self, q: InputDistribution, R: float, tol: float = 1e-9) -> bool:
        """Both marginals equal ``q`` and ``I(X;X') <= R``."""
        px, py = self.marginals()
        return (
            bool(np.all(self.w >= -tol))
            and np.allclose(px, q.probs, atol=tol)
            and np.allclose(py, q.probs, atol=tol)
            and self.mutual_information() <= R + tol
        )


def log_partition(prob: RdProblem, beta: float) -> float:
    """``sum_x q(x) ln sum_x' q(x') exp(-beta d(x, x'))``."""
    return kernels.log_partition(prob.dm.d, prob.logq, float(beta), kernels.CKM)


def _zero_distortion_rate(prob: RdProblem) -> float:
    p = prob.q.probs
    near = ((prob.dm.d == 0) * p[None, :]).sum(axis=1)
    active = p > 0
    return max(0.0, -math.fsum((p[active] * np.log(near[active])).tolist()))


def rq_of_d(prob: RdProblem, D: float, tol: float = DEFAULT_TOL) -> float:
    """``R_Q(D) = -inf_{beta >= 0} [beta D + log_partition(beta)]``, clamped at 0.

    ``D = 0`` returns the ``beta -> inf`` limit. Raises :class:`Diverged`
    if the objective is still improving at ``beta_max``.
    """
    if D < 0:
        raise ValueError("distortion must be nonnegative")
    if D == 0:
        return _zero_distortion_rate(prob)
    res = maximize_on_grid(lambda b: -(b * D + log_partition(prob, b)), rho_grid(0.0, prob.beta_max), tol)
    if res.diverged:
        raise Diverged(f"R_Q(D) objective still decreasing at beta_max={prob.beta_max} (D={D})")
    return max(0.0, res.value)


def dq_of_r(
    prob: RdProblem,
    R: float,
    rho_constraint: bool = False,
    rho_max: float = DEFAULT_RHO_MAX,
    tol: float = DEFAULT_TOL,
) -> OptResult:
    """``sup_rho [E(rho) - rho R]`` with ``E(rho) = -rho log_partition(1/rho)``.

    ``rho`` ranges over ``[0, rho_max]``, or ``[1, rho_max]`` when
    ``rho_constraint`` is set; the constrained value is the CKM-type exponent
    before clamping. ``arg`` is the maximizing ``rho``.
    """
    if R < 0:
        raise ValueError("rate must be nonnegative")
    grid = rho_grid(1.0 if rho_constraint else 0.0, rho_max)
    value, arg, at_boundary, diverged = kernels.sup_rho(prob.dm.d, prob.logq, float(R), kernels.CKM, grid, tol)
    if math.isnan(value):
        raise NonFinite(f"exponent objective is NaN at R={R}")
    return OptResult(value, arg, at_boundary, diverged)


def rate_cap(size: int) -> float:
    return math.log(size) + 1.0


def critical_rate(pred, size: int, tol: float = R1_TOL) -> float:
    """Smallest rate where ``pred(R)`` (``rho* == 1``) holds, by bisection on ``[0, ln|X| + 1]``."""
    if pred(0.0):
        return 0.0
    cap = rate_cap(size)
    if not pred(cap):
        raise NoFiniteR1(f"rho* > 1 for all rates up to {cap}")
    return bisect_predicate(pred, 0.0, cap, tol)


def critical_rate_R1(prob: RdProblem, tol: float = R1_TOL, rho_max: float = DEFAULT_RHO_MAX) -> float:
    """Rate at which the constrained optimizer of ``dq_of_r`` first returns ``rho* = 1``.

    Equivalently the rate where ``D_Q'(R) = -1``.
    """
    return critical_rate(
        lambda R: dq_of_r(prob, R, True, rho_max).arg <= 1.0 + RHO_ONE_TOL, prob.dm.size, tol
    )


def ckm_exponent(prob: RdProblem, R: float, rho_max: float = DEFAULT_RHO_MAX) -> float:
    return max(0.0, dq_of_r(prob, R, True, rho_max).value)


def tilted_point(prob: RdProblem, beta: float) -> tuple[float, float]:
    """Point ``(D, R_Q(D))`` of the curve where its slope is ``-beta``.

    ``D`` is the mean distortion under ``w(x'|x) ~ q(x') exp(-beta d)``.
    """
    d = prob.dm.d
    p = prob.q.probs
    with np.errstate(invalid="ignore"):
        wts = np.where(np.isfinite(d), p[None, :] * np.exp(-beta * d), 0.0)
        cond = wts / wts.sum(axis=1, keepdims=True)
        dist = np.where(cond > 0, cond * d, 0.0).sum(axis=1)
    active = p > 0
    D = math.fsum((p[active] * dist[active]).tolist())
    rate = -beta * D - log_partition(prob, beta)
    return D, max(0.0, rate)


def _axis(lo: float, hi: float, n: int, extra: float) -> np.ndarray:
    pts = np.linspace(lo, hi, n)
    if lo <= extra <= hi:
        pts = np.append(pts, extra)
    return np.unique(np.clip(pts, 0.0, None))


def _pack(axes: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    lengths = np.array([len(a) for a in axes], dtype=np.int64)
    grids = np.zeros((len(axes), int(lengths.max())))
    for j, a in enumerate(axes):
        grids[j, : len(a)] = a
    return np.ascontiguousarray(grids), lengths


def joint_oracle(
    prob: RdProblem,
    R: float,
    grid: int = 100,
    refine_rounds: int = 12,
    refine_points: int = 21,
) -> tuple[float, JointDistribution]:
    """Brute-force ``min [I(X;X') + E d(X,X')]`` over joints with both marginals ``q`` and ``I <= R``.

    The polytope is parameterized by its ``(|X|-1)**2`` upper-left entries;
    each is scanned on ``grid`` points (plus the product value ``q_i q_j``),
    then the best point is refined by repeated zooming. Callers subtract
    ``R`` themselves.
    """
    k = len(prob.q)
    if k > ORACLE_MAX_ALPHABET:
        raise AlphabetTooLarge(f"joint oracle handles |X| <= {ORACLE_MAX_ALPHABET}, got {k}")
    if grid < 100:
        raise ValueError("oracle grid resolution must be at least 100")
    q = np.ascontiguousarray(prob.q.probs)
    d = np.ascontiguousarray(prob.dm.d)
    if R <= 0:
        # independence is the only way to reach I = 0 with these marginals
        witness = JointDistribution(np.outer(q, q))
        return witness.expected_distance(d), witness
    m = k - 1
    pairs = [(i, j) for i in range(m) for j in range(m)]
    his = [min(q[i], q[j]) for i, j in pairs]
    prods = [q[i] * q[j] for i, j in pairs]
    axes = [_axis(0.0, hi, grid, pr) for hi, pr in zip(his, prods)]
    best, coords = kernels.oracle_scan(q, d, float(R), *_pack(axes))
    if not math.isfinite(best):
        # the product joint is always feasible; rebuild it exactly
        coords = np.array(prods)
    steps = [hi / (grid - 1) for hi in his]
    for _ in range(refine_rounds):
        axes = [
            _axis(max(0.0, c - 2 * h), min(hi, c + 2 * h), refine_points, c)
            for c, h, hi in zip(coords, steps, his)
        ]
        val, cand = kernels.oracle_scan(q, d, float(R), *_pack(axes))
        if val < best:
            best, coords = val, cand
        steps = [h * 4 / (refine_points - 1) for h in steps]
    w = _joint(q, np.asarray(coords))
    witness = JointDistribution(w)
    if not math.isfinite(best):
        best = witness.mutual_information() + witness.expected_distance(d)
    return best, witness


def _joint(q: np.ndarray, c: np.ndarray) -> np.ndarray:
    k = q.shape[0]
    m = k - 1
    w = np.empty((k, k))
    w[:m, :m] = c.reshape(m, m)
    w[:m, m] = q[:m] - w[:m, :m].sum(axis=1)
    w[m, :m] = q[:m] - w[:m, :m].sum(axis=0)
    w[m, m] = q[m] - w[m, :m].sum()
    return np.clip(w, 0.0, None)


def ckm_oracle_exponent(prob: RdProblem, R: float, grid: int = 100) -> float:
    """``inf_{A(R,Q)} [I + E d] - R`` from the brute-force oracle, clamped at 0."""
    value, _ = joint_oracle(prob, R, grid)
    return max(0.0, value - R)


def zero_rate_value(prob: RdProblem) -> float:
    return expected_distance(prob.dm, prob.q)
