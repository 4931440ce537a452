"""Single-letter exponent functions of ``(rho, s, Q)`` for a fixed channel.

``gallager_EG`` averages over input pairs inside the logarithm, ``ckm_E``
averages over ``x`` outside it; by Jensen the latter is never smaller.
"""
from __future__ import annotations

import math
import threading

import numpy as np
from scipy.special import logsumexp

from . import kernels
from .channel import Channel, DistanceMatrix, InputDistribution, chernoff_distance_matrix, validate_input
from .optimize import DEFAULT_TOL, OptResult, maximize_concave_unit


class ExponentInputs:
    """A channel, an input distribution and a memo of distance matrices keyed by ``s``.

    The memo is guarded by a lock, so one instance can be shared between
    threads.
    """

    def __init__(self, channel: Channel, q: InputDistribution):
        if len(q) != channel.input_size:
            q = validate_input(q.probs, channel)
        self.channel = channel
        self.q = q
        self.logq = np.ascontiguousarray(q.log_probs)
        self._cache: dict[float, DistanceMatrix] = {}
        self._lock = threading.Lock()

    def distance(self, s: float) -> DistanceMatrix:
        s = float(s)
        with self._lock:
            dm = self._cache.get(s)
        if dm is None:
            dm = chernoff_distance_matrix(self.channel, s)
            with self._lock:
                dm = self._cache.setdefault(s, dm)
        return dm

    def clear_cache(self) -> None:
        with self._lock:
            self._cache.clear()

    def __repr__(self) -> str:
        return f"ExponentInputs({self.channel!r}, {self.q!r})"


def gallager_E0(inputs: ExponentInputs, rho: float) -> float:
    """Gallager's random-coding function ``E_0(rho, Q)``."""
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    logp = inputs.channel.log_transition
    # ln sum_x q(x) p(y|x)^{1/(1+rho)} for each y
    inner = logsumexp(inputs.logq[:, None] + logp / (1.0 + rho), axis=0)
    return float(-logsumexp((1.0 + rho) * inner))


def random_coding_exponent(inputs: ExponentInputs, R: float, tol: float = DEFAULT_TOL) -> float:
    """``sup_{0 <= rho <= 1} [E_0(rho, Q) - rho R]`` for the fixed ``Q``."""
    if R < 0:
        raise ValueError("rate must be nonnegative")
    res = maximize_concave_unit(lambda r: gallager_E0(inputs, r) - r * R, tol)
    return res.value


def gallager_EG(inputs: ExponentInputs, rho: float, s: float = 0.5) -> float:
    """``-rho ln sum_{x,x'} q(x) q(x') exp(-d_s(x,x')/rho)``; ``s = 1/2`` is Gallager's ``E_x``."""
    if rho < 1:
        raise ValueError("rho must be at least 1")
    return kernels.e_value(inputs.distance(s).d, inputs.logq, float(rho), kernels.GALLAGER)


def ckm_E(inputs: ExponentInputs, rho: float, s: float = 0.5) -> float:
    """``-rho sum_x q(x) ln sum_{x'} q(x') exp(-d_s(x,x')/rho)``."""
    if rho < 1:
        raise ValueError("rho must be at least 1")
    return kernels.e_value(inputs.distance(s).d, inputs.logq, float(rho), kernels.CKM)


def best_chernoff_parameter(inputs: ExponentInputs, rho: float = 1.0, tol: float = DEFAULT_TOL) -> OptResult:
    """``max_s ckm_E(rho, s)``; concave in ``s``, so golden section is exact."""
    return maximize_concave_unit(lambda s: ckm_E(inputs, rho, s), tol)


def asymptotic_slope(dm: DistanceMatrix, q: InputDistribution, kind: int) -> float:
    """``lim_{rho -> inf} dE/drho`` for the E-function of ``kind``.

    Zero when every pair with positive weight is at finite distance; otherwise
    the exponent grows linearly in ``rho`` and ``sup_rho [E - rho R]`` is
    infinite for every rate below this slope.
    """
    finite = np.isfinite(dm.d)
    p = q.probs
    if kind == kernels.GALLAGER:
        mass = float(np.sum(np.outer(p, p) * finite))
        return -math.log(mass)
    near = (finite * p[None, :]).sum(axis=1)
    active = p > 0
    return -math.fsum((p[active] * np.log(near[active])).tolist())
