"""Pure-Python implementations of the numerical kernels.

Same signatures as the compiled ``_ckernels`` module; used when the
extension is not built or when ``EXPURGATE_PURE_PYTHON`` is set.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .optimize import maximize_on_grid

GALLAGER = 0
CKM = 1
FEAS_TOL = 1e-15
MI_TOL = 1e-13


def chernoff_matrix(logp: np.ndarray, s: float) -> np.ndarray:
    k = logp.shape[0]
    a = logp[:, None, :]
    b = logp[None, :, :]
    both = np.isfinite(a) & np.isfinite(b)
    with np.errstate(invalid="ignore"):
        terms = np.where(both, (1.0 - s) * a + s * b, -np.inf)
    with np.errstate(divide="ignore"):
        d = -logsumexp(terms, axis=2)
    d = np.where(np.isnan(d), np.inf, d)
    d = np.maximum(d, 0.0)
    d[np.arange(k), np.arange(k)] = 0.0
    return np.ascontiguousarray(d)


def _lse(x: np.ndarray, axis: int | None = None):
    """Log-sum-exp with ``-inf`` slices mapped to ``-inf``; lean enough for tiny arrays."""
    m = np.max(x, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(x - m), axis=axis, keepdims=True)) + m
    if axis is None:
        return float(out.reshape(()))
    return np.squeeze(out, axis=axis)


def log_partition(d: np.ndarray, logq: np.ndarray, beta: float, kind: int) -> float:
    """``ln sum q q' e^{-beta d}`` (Gallager) or ``sum_x q ln sum_x' q' e^{-beta d}`` (CKM)."""
    if beta == 0.0:
        return 0.0
    expo = logq[None, :] - beta * d
    if kind == GALLAGER:
        return _lse(logq[:, None] + expo)
    active = np.isfinite(logq)
    inner = _lse(expo[active], axis=1)
    return math.fsum((np.exp(logq[active]) * inner).tolist())


def e_value(d: np.ndarray, logq: np.ndarray, rho: float, kind: int) -> float:
    if rho == 0.0:
        return 0.0
    return -rho * log_partition(d, logq, 1.0 / rho, kind)


def e_values(d: np.ndarray, logq: np.ndarray, rhos: np.ndarray, kind: int) -> np.ndarray:
    """``e_value`` over a vector of ``rho`` in one pass."""
    rhos = np.asarray(rhos, dtype=np.float64)
    out = np.zeros_like(rhos)
    pos = rhos > 0
    beta = 1.0 / rhos[pos]
    expo = logq[None, None, :] - beta[:, None, None] * d[None, :, :]
    if kind == GALLAGER:
        lp = _lse((logq[None, :, None] + expo).reshape(beta.size, -1), axis=1)
    else:
        active = np.isfinite(logq)
        lp = _lse(expo[:, active, :], axis=2) @ np.exp(logq[active])
    out[pos] = -rhos[pos] * lp
    return out


def sup_rho(d: np.ndarray, logq: np.ndarray, R: float, kind: int, grid: np.ndarray, tol: float):
    vals = e_values(d, logq, grid, kind) - np.asarray(grid) * R
    res = maximize_on_grid(lambda r: e_value(d, logq, r, kind) - r * R, grid, tol, values=vals)
    return res.value, res.arg, res.at_boundary, res.diverged


def log_fractional_moment(m: int, logp: float, inv_rho: float) -> float:
    """``ln E[N^inv_rho]`` for ``N ~ Binomial(m, e^logp)``; ``-inf`` if ``m == 0``.

    Log-weights come from the pmf ratio recurrence run outward from the mode
    and are normalized by their total, which avoids the cancellation in
    ``lgamma(m + 1) - lgamma(k + 1) - lgamma(m - k + 1)`` at large ``m``.
    """
    if m <= 0:
        return -math.inf
    if logp >= 0:
        return inv_rho * math.log(m)
    log_odds = logp - math.log1p(-math.exp(logp))
    k = np.arange(m, dtype=np.float64)
    step = np.log((m - k) / (k + 1.0)) + log_odds
    mode = min(m, int((m + 1) * math.exp(logp)))
    u = np.empty(m + 1)
    u[mode] = 0.0
    u[mode + 1 :] = np.cumsum(step[mode:])
    u[:mode] = -np.cumsum(step[:mode][::-1])[::-1]
    kk = np.arange(1, m + 1, dtype=np.float64)
    return float(logsumexp(inv_rho * np.log(kk) + u[1:]) - logsumexp(u))


def _joint_from_free(q: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Rebuild joints with marginals ``q`` from free coordinates ``c[..., (K-1)**2]``."""
    k = q.shape[0]
    m = k - 1
    w = np.empty(c.shape[:-1] + (k, k))
    w[..., :m, :m] = c.reshape(c.shape[:-1] + (m, m))
    w[..., :m, m] = q[:m] - w[..., :m, :m].sum(axis=-1)
    w[..., m, :m] = q[:m] - w[..., :m, :m].sum(axis=-2)
    w[..., m, m] = q[m] - w[..., m, :m].sum(axis=-1)
    return w


def joint_objective(q: np.ndarray, d: np.ndarray, w: np.ndarray):
    """Return ``(I(X;X'), E d, feasible)`` for joints ``w[..., K, K]``."""
    feasible = np.all(w >= -FEAS_TOL, axis=(-2, -1))
    w = np.clip(w, 0.0, None)
    qq = np.outer(q, q)
    pos = w > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        mi = np.where(pos, w * np.log(w / qq), 0.0).sum(axis=(-2, -1))
        ed = np.where(pos, w * d, 0.0).sum(axis=(-2, -1))
    return mi, ed, feasible


def oracle_scan(q: np.ndarray, d: np.ndarray, R: float, grids: np.ndarray, lengths: np.ndarray):
    """Exhaustive scan over the free coordinates; returns ``(best, coords)``.

    ``best`` is ``inf`` when no grid point is feasible.
    """
    nfree = grids.shape[0]
    axes = [grids[j, : lengths[j]] for j in range(nfree)]
    best = math.inf
    best_c = np.full(nfree, np.nan)
    if nfree <= 2:
        batches = [np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, nfree)]
    else:
        # chunk over the first two axes to bound memory
        rest = np.stack(np.meshgrid(*axes[2:], indexing="ij"), axis=-1).reshape(-1, nfree - 2)
        batches = (
            np.concatenate([np.broadcast_to([a0, a1], (rest.shape[0], 2)), rest], axis=1)
            for a0 in axes[0]
            for a1 in axes[1]
        )
    for c in batches:
        w = _joint_from_free(q, c)
        mi, ed, ok = joint_objective(q, d, w)
        val = np.where(ok & (mi <= R + MI_TOL), mi + ed, np.inf)
        j = int(np.argmin(val))
        if val[j] < best:
            best = float(val[j])
            best_c = c[j].copy()
    return best, best_c
