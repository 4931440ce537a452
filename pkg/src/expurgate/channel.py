"""Channels, input distributions and Chernoff distance matrices."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import kernels
from .errors import InvalidDistribution, NegativeEntry, NonStochasticRow, SpecFormatError

ROW_TOL = 1e-12


def _readonly(a: NDArray[np.float64]) -> NDArray[np.float64]:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Channel:
    """Discrete memoryless channel, ``transition[x, y] = p(y|x)``."""

    transition: NDArray[np.float64]

    @property
    def input_size(self) -> int:
        return self.transition.shape[0]

    @property
    def output_size(self) -> int:
        return self.transition.shape[1]

    @property
    def log_transition(self) -> NDArray[np.float64]:
        with np.errstate(divide="ignore"):
            return np.log(self.transition)

    def __repr__(self) -> str:
        return f"Channel({self.transition.tolist()!r})"


@dataclass(frozen=True, eq=False)
class InputDistribution:
    probs: NDArray[np.float64]

    def __len__(self) -> int:
        return self.probs.shape[0]

    @property
    def log_probs(self) -> NDArray[np.float64]:
        with np.errstate(divide="ignore"):
            return np.log(self.probs)

    def __repr__(self) -> str:
        return f"InputDistribution({self.probs.tolist()!r})"


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Pairwise Chernoff distances ``d[x, x']`` in nats at parameter ``s``.

    Disjoint conditional supports are encoded as ``inf``.
    """

    s: float
    d: NDArray[np.float64]

    @property
    def size(self) -> int:
        return self.d.shape[0]


def validate_channel(transition: ArrayLike) -> Channel:
    """Check a raw matrix and return a :class:`Channel`.

    Rows whose sum is off by less than ``ROW_TOL`` are renormalized; larger
    deviations raise :class:`NonStochasticRow`.
    """
    p = np.array(transition, dtype=np.float64)
    if p.ndim != 2:
        raise ValueError("transition matrix must be two-dimensional")
    if p.shape[0] < 2 or p.shape[1] < 1:
        raise ValueError(f"need at least 2 inputs and 1 output, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("transition matrix has non-finite entries")
    if np.any(p < 0):
        x, y = np.argwhere(p < 0)[0]
        raise NegativeEntry(f"p(y={y}|x={x}) = {p[x, y]} is negative")
    if np.any(p > 1):
        raise NonStochasticRow("entries must not exceed 1")
    sums = p.sum(axis=1)
    bad = np.abs(sums - 1.0) >= ROW_TOL
    if np.any(bad):
        x = int(np.argmax(bad))
        raise NonStochasticRow(f"row {x} sums to {sums[x]!r}")
    p = p / sums[:, None]
    return Channel(_readonly(p))


def validate_input(probs: ArrayLike, channel: Channel | None = None) -> InputDistribution:
    q = np.array(probs, dtype=np.float64).ravel()
    if not np.all(np.isfinite(q)):
        raise InvalidDistribution("input distribution has non-finite entries")
    if np.any(q < 0):
        raise InvalidDistribution("input distribution has negative entries")
    total = q.sum()
    if abs(total - 1.0) >= ROW_TOL:
        raise InvalidDistribution(f"input distribution sums to {total!r}")
    if channel is not None and q.shape[0] != channel.input_size:
        raise InvalidDistribution(
            f"input distribution has {q.shape[0]} entries, channel has {channel.input_size} inputs"
        )
    return InputDistribution(_readonly(q / total))


def uniform_input(channel: Channel) -> InputDistribution:
    k = channel.input_size
    return InputDistribution(_readonly(np.full(k, 1.0 / k)))


def bsc(eps: float) -> Channel:
    return validate_channel([[1 - eps, eps], [eps, 1 - eps]])


def chernoff_distance_matrix(ch: Channel, s: float) -> DistanceMatrix:
    """``d_s(x, x') = -ln sum_y p(y|x)^(1-s) p(y|x')^s``, evaluated in the log domain.

    Terms where either probability is zero are dropped for every ``s``,
    including the endpoints; this is the ``s -> 0+`` / ``s -> 1-`` limit.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"Chernoff parameter must lie in [0, 1], got {s}")
    d = kernels.chernoff_matrix(np.ascontiguousarray(ch.log_transition), float(s))
    # identical rows are exactly indistinguishable; drop the rounding residue
    t = ch.transition
    d[np.all(t[:, None, :] == t[None, :, :], axis=-1)] = 0.0
    return DistanceMatrix(float(s), _readonly(d))


def bhattacharyya_matrix(ch: Channel) -> DistanceMatrix:
    return chernoff_distance_matrix(ch, 0.5)


def expected_distance(dm: DistanceMatrix, q: InputDistribution) -> float:
    """``sum_{x,x'} q(x) q(x') d(x, x')``; ``inf`` if an infinite entry carries weight."""
    if dm.size != len(q):
        raise ValueError("distance matrix and input distribution sizes differ")
    w = np.outer(q.probs, q.probs)
    support = w > 0
    if np.any(np.isinf(dm.d[support])):
        return math.inf
    return math.fsum((w[support] * dm.d[support]).tolist())


def load_channel_spec(path: str | Path) -> tuple[Channel, InputDistribution]:
    """Read ``{"transition": [[...]], "input": [...]}``; ``input`` defaults to uniform."""
    with open(path) as fh:
        spec = json.load(fh)
    if not isinstance(spec, dict) or "transition" not in spec:
        raise SpecFormatError(f"{path}: expected a JSON object with a 'transition' key")
    ch = validate_channel(spec["transition"])
    q = validate_input(spec["input"], ch) if "input" in spec else uniform_input(ch)
    return ch, q


def dump_channel_spec(ch: Channel, q: InputDistribution) -> str:
    return json.dumps({"transition": ch.transition.tolist(), "input": q.probs.tolist()})
