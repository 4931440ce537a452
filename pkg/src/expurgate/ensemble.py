"""Type-enumerator moments and the quantized continuous-alphabet exponents.

Given the transmitted codeword, the number ``N`` of the other ``M - 1``
codewords landing in a fixed joint type is Binomial(M - 1, e^{-nI}).
Its fractional moment ``E[N^{1/rho}]`` has exponent ``R - I`` when
``R < I`` and ``(R - I) / rho`` otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from . import kernels
from .errors import DomainError, ModelError
from .gaussian import GaussianParams, gaussian_rate_array

EXACT = "exact_binomial"
MONTE_CARLO = "monte_carlo"
MAX_EXACT_M = 2**20
MIN_TRIALS = 10**4
UNDERFLOW = 1e-300
ZERO_RATE_TOL = 1e-9


@dataclass(frozen=True)
class EnumeratorModel:
    n: int
    R: float
    I: float
    rho: float

    def __post_init__(self):
        if self.n < 1:
            raise ModelError("blocklength must be at least 1")
        if self.rho < 1:
            raise ModelError("rho must be at least 1")
        if self.R < 0 or self.I < 0:
            raise ModelError("rate and type exponent must be nonnegative")
        if self.M < 2:
            raise ModelError(f"codebook size round(e^(nR)) = {self.M} is below 2")

    @property
    def M(self) -> int:
        return int(round(math.exp(self.n * self.R)))

    @property
    def competitors(self) -> int:
        return self.M - 1

    @property
    def effective_rate(self) -> float:
        """``ln(M - 1) / n``: the rate the competing codewords actually realize."""
        return math.log(self.competitors) / self.n

    @property
    def log_p(self) -> float:
        return -self.n * self.I

    def as_dict(self) -> dict:
        return {"n": self.n, "R": self.R, "I": self.I, "rho": self.rho, "M": self.M}


def moment_exponent_theory(m: EnumeratorModel, R: float | None = None) -> float:
    """Two-branch exponent; ``R`` defaults to the model's nominal rate."""
    R = m.R if R is None else R
    if R < m.I:
        return R - m.I
    return (R - m.I) / m.rho


@dataclass(frozen=True)
class MomentEstimate:
    exponent: float
    log_moment: float
    underflow: bool
    mode: str
    trials: int | None = None
    seed: int | None = None


def moment_exponent_empirical(
    m: EnumeratorModel,
    mode: str = EXACT,
    trials: int = MIN_TRIALS,
    seed: int | None = None,
) -> MomentEstimate:
    """``(1/n) ln E[N^{1/rho}]`` by exact binomial summation or by sampling."""
    if mode == EXACT:
        if m.M > MAX_EXACT_M:
            raise ModelError(f"M = {m.M} exceeds 2^20 for exact summation; use monte_carlo")
        log_mom = kernels.log_fractional_moment(m.competitors, m.log_p, 1.0 / m.rho)
        trials = None
    elif mode == MONTE_CARLO:
        if trials < MIN_TRIALS:
            raise ModelError(f"monte_carlo needs at least {MIN_TRIALS} trials")
        rng = np.random.default_rng(seed)
        counts = rng.binomial(m.competitors, math.exp(m.log_p), size=trials)
        mean = float(np.mean(counts ** (1.0 / m.rho)))
        log_mom = math.log(mean) if mean > 0 else -math.inf
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return MomentEstimate(log_mom / m.n, log_mom, log_mom < math.log(UNDERFLOW), mode, trials, seed)


def jensen_gap(m: EnumeratorModel) -> float:
    """``ln (E N)^{1/rho} - ln E[N^{1/rho}]``; nonnegative for ``rho >= 1``."""
    log_mean = math.log(m.competitors) + m.log_p
    return log_mean / m.rho - kernels.log_fractional_moment(m.competitors, m.log_p, 1.0 / m.rho)


def mc_report(m: EnumeratorModel, mode: str = EXACT, trials: int = MIN_TRIALS, seed: int | None = None) -> dict:
    """Theory versus empirical exponent; theory is taken at the realized rate ``ln(M-1)/n``."""
    est = moment_exponent_empirical(m, mode, trials, seed)
    theory = moment_exponent_theory(m, m.effective_rate)
    return {
        "model": m.as_dict(),
        "theory_exponent": theory,
        "empirical_exponent": est.exponent,
        "gap": abs(est.exponent - theory),
        "mode": mode,
        "seed": seed,
        "trials": est.trials,
        "underflow": est.underflow,
    }


@dataclass(frozen=True, eq=False)
class RateFunction:
    """Monotone convex rate function ``R(D)`` sampled on levels ``k * delta``.

    Below ``D_lo`` the rate is infinite (unreachable distances), above
    ``D_hi`` it is zero. ``evaluator`` receives arrays of distortions inside
    ``[D_lo, D_hi]``.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    D_lo: float
    D_hi: float
    delta: float
    D_max: float | None = None

    def __post_init__(self):
        if self.delta <= 0:
            raise DomainError("delta must be positive")
        if not self.D_hi >= self.D_lo:
            raise DomainError("need D_hi >= D_lo")

    def __call__(self, D) -> np.ndarray:
        D = np.atleast_1d(np.asarray(D, dtype=np.float64))
        out = np.zeros_like(D)
        out[D < self.D_lo] = np.inf
        inside = (D >= self.D_lo) & (D <= self.D_hi)
        if np.any(inside):
            out[inside] = np.asarray(self.evaluator(D[inside]), dtype=np.float64)
        return out

    @cached_property
    def cap(self) -> float:
        """``D_max``, or the first level with ``R <= 1e-9`` plus one step."""
        if self.D_max is not None:
            return self.D_max
        k = np.arange(0, int(math.ceil(self.D_hi / self.delta)) + 1)
        rates = self(k * self.delta)
        hit = np.nonzero(rates <= ZERO_RATE_TOL)[0]
        top = k[hit[0]] * self.delta if hit.size else self.D_hi
        return top + self.delta

    @cached_property
    def levels(self) -> tuple[np.ndarray, np.ndarray]:
        k = np.arange(0, int(math.ceil(self.cap / self.delta)) + 1)
        D = k * self.delta
        return D, self(D)

    def check_shape(self, samples: int = 257, tol: float = 1e-9) -> bool:
        """Nonincreasing and convex on its finite part, checked on a sample grid."""
        D = np.linspace(self.D_lo, self.D_hi, samples)
        r = self(D)
        fin = np.isfinite(r)
        r = r[fin]
        if r.size < 3:
            return True
        return bool(np.all(np.diff(r) <= tol) and np.all(np.diff(r, 2) >= -tol))

    @classmethod
    def gaussian(cls, p: GaussianParams, delta: float) -> "RateFunction":
        return cls(lambda D: gaussian_rate_array(p, D), 0.0, p.mean_distance, delta)

    @classmethod
    def constant_zero(cls, delta: float, D_hi: float = 1.0) -> "RateFunction":
        return cls(np.zeros_like, 0.0, D_hi, delta, D_max=D_hi)


def quantized_exponents(rf: RateFunction, R: float, rho: float) -> tuple[float, float]:
    """``(E1, E2)`` over quantized distance levels; an empty branch gives ``inf``.

    E1 minimizes ``k delta + rho R(k delta)`` over levels with ``R(k delta) >= R``,
    E2 minimizes ``k delta + R(k delta)`` over levels with ``R(k delta) <= R``.
    """
    if rho < 1:
        raise ValueError("rho must be at least 1")
    if R < 0:
        raise ValueError("rate must be nonnegative")
    D, rates = rf.levels
    up = np.isfinite(rates) & (rates >= R)
    e1 = float(np.min(D[up] + rho * rates[up])) - rho * R if np.any(up) else math.inf
    down = rates <= R
    e2 = float(np.min(D[down] + rates[down])) - R if np.any(down) else math.inf
    return e1, e2


def quantized_exponent(rf: RateFunction, R: float, rho: float = 1e4) -> float:
    """``min(E1, E2)`` clamped at zero."""
    return max(0.0, min(quantized_exponents(rf, R, rho)))
