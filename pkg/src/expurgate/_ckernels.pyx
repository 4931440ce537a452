# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, sqrt, INFINITY, isnan, isinf, isfinite

cnp.import_array()

cdef int GALLAGER = 0
cdef int CKM = 1
cdef double FEAS_TOL = 1e-15
cdef double MI_TOL = 1e-13
cdef int MAX_GOLDEN_ITER = 200
cdef double INV_PHI = (sqrt(5.0) - 1.0) / 2.0


cdef inline void kahan_add(double* s, double* c, double v) noexcept nogil:
    cdef double y = v - c[0]
    cdef double t = s[0] + y
    c[0] = (t - s[0]) - y
    s[0] = t


def chernoff_matrix(const double[:, ::1] logp, double s):
    cdef Py_ssize_t k = logp.shape[0], ny = logp.shape[1]
    cdef Py_ssize_t x, xp, y
    cdef double m, t, acc, comp
    out = np.empty((k, k), dtype=np.float64)
    cdef double[:, ::1] d = out
    cdef double[::1] terms = np.empty(ny, dtype=np.float64)
    with nogil:
        for x in range(k):
            for xp in range(k):
                if x == xp:
                    d[x, xp] = 0.0
                    continue
                m = -INFINITY
                for y in range(ny):
                    if isfinite(logp[x, y]) and isfinite(logp[xp, y]):
                        t = (1.0 - s) * logp[x, y] + s * logp[xp, y]
                    else:
                        t = -INFINITY
                    terms[y] = t
                    if t > m:
                        m = t
                if m == -INFINITY:
                    d[x, xp] = INFINITY
                    continue
                acc = 0.0
                comp = 0.0
                for y in range(ny):
                    if terms[y] > -INFINITY:
                        kahan_add(&acc, &comp, exp(terms[y] - m))
                t = -(m + log(acc))
                d[x, xp] = t if t > 0.0 else 0.0
    return out


cdef double _log_partition(const double[:, ::1] d, const double[::1] logq, double beta, int kind) noexcept nogil:
    cdef Py_ssize_t k = d.shape[0], x, xp
    cdef double m, t, acc, comp, outer, ocomp, inner
    if beta == 0.0:
        return 0.0
    if kind == GALLAGER:
        m = -INFINITY
        for x in range(k):
            for xp in range(k):
                if isfinite(logq[x]) and isfinite(logq[xp]) and isfinite(d[x, xp]):
                    t = logq[x] + logq[xp] - beta * d[x, xp]
                    if t > m:
                        m = t
        if m == -INFINITY:
            return -INFINITY
        acc = 0.0
        comp = 0.0
        for x in range(k):
            for xp in range(k):
                if isfinite(logq[x]) and isfinite(logq[xp]) and isfinite(d[x, xp]):
                    kahan_add(&acc, &comp, exp(logq[x] + logq[xp] - beta * d[x, xp] - m))
        return m + log(acc)
    outer = 0.0
    ocomp = 0.0
    for x in range(k):
        if not isfinite(logq[x]):
            continue
        m = -INFINITY
        for xp in range(k):
            if isfinite(logq[xp]) and isfinite(d[x, xp]):
                t = logq[xp] - beta * d[x, xp]
                if t > m:
                    m = t
        if m == -INFINITY:
            return -INFINITY
        acc = 0.0
        comp = 0.0
        for xp in range(k):
            if isfinite(logq[xp]) and isfinite(d[x, xp]):
                kahan_add(&acc, &comp, exp(logq[xp] - beta * d[x, xp] - m))
        inner = m + log(acc)
        kahan_add(&outer, &ocomp, exp(logq[x]) * inner)
    return outer


cdef inline double _e_value(const double[:, ::1] d, const double[::1] logq, double rho, int kind) noexcept nogil:
    if rho == 0.0:
        return 0.0
    return -rho * _log_partition(d, logq, 1.0 / rho, kind)


def log_partition(const double[:, ::1] d, const double[::1] logq, double beta, int kind):
    return _log_partition(d, logq, beta, kind)


def e_value(const double[:, ::1] d, const double[::1] logq, double rho, int kind):
    return _e_value(d, logq, rho, kind)


cdef inline double _g(const double[:, ::1] d, const double[::1] logq, double rho, double R, int kind, bint* bad) noexcept nogil:
    cdef double v = _e_value(d, logq, rho, kind) - rho * R
    if isnan(v):
        bad[0] = True
    return v


def sup_rho(const double[:, ::1] d, const double[::1] logq, double R, int kind, const double[::1] grid, double tol):
    """Grid scan plus golden section of ``E(rho) - rho R``; mirrors ``optimize.maximize_on_grid``."""
    cdef Py_ssize_t n = grid.shape[0], j, i = 0
    cdef double best, v, a, b, c, dd, fc, fd, x, fx, arg, val, prev = 0.0, last = 0.0
    cdef bint bad = False
    cdef int it
    with nogil:
        best = -INFINITY
        for j in range(n):
            v = _g(d, logq, grid[j], R, kind, &bad)
            if bad:
                break
            if j == 0 or v > best:
                best = v
                i = j
            if j == n - 2:
                prev = v
            if j == n - 1:
                last = v
    if bad:
        return float("nan"), float("nan"), False, False
    if n >= 2 and i == n - 1 and last > prev:
        return best, grid[n - 1], True, True
    if n == 1:
        return best, grid[0], True, False
    with nogil:
        a = grid[i - 1 if i > 0 else 0]
        b = grid[i + 1 if i + 1 < n else n - 1]
        c = b - INV_PHI * (b - a)
        dd = a + INV_PHI * (b - a)
        fc = _g(d, logq, c, R, kind, &bad)
        fd = _g(d, logq, dd, R, kind, &bad)
        for it in range(MAX_GOLDEN_ITER):
            if b - a <= tol:
                break
            if fc >= fd:
                b = dd
                dd = c
                fd = fc
                c = b - INV_PHI * (b - a)
                fc = _g(d, logq, c, R, kind, &bad)
            else:
                a = c
                c = dd
                fc = fd
                dd = a + INV_PHI * (b - a)
                fd = _g(d, logq, dd, R, kind, &bad)
        if fc >= fd:
            x = c
            fx = fc
        else:
            x = dd
            fx = fd
        if fx > best:
            arg = x
            val = fx
        else:
            arg = grid[i]
            val = best
    if bad:
        return float("nan"), float("nan"), False, False
    return val, arg, (arg - grid[0] <= tol or grid[n - 1] - arg <= tol), False


def log_fractional_moment(long m, double logp, double inv_rho):
    cdef long k, mode
    cdef double log_odds, mx, acc = 0.0, comp = 0.0, tot = 0.0, tcomp = 0.0
    cdef double[::1] u
    if m <= 0:
        return -INFINITY
    if logp >= 0:
        return inv_rho * log(<double>m)
    log_odds = logp - log1p(-exp(logp))
    mode = <long>((m + 1) * exp(logp))
    if mode > m:
        mode = m
    u = np.empty(m + 1, dtype=np.float64)
    with nogil:
        u[mode] = 0.0
        for k in range(mode, m):
            u[k + 1] = u[k] + log((m - k) / (k + 1.0)) + log_odds
        for k in range(mode - 1, -1, -1):
            u[k] = u[k + 1] - log((m - k) / (k + 1.0)) - log_odds
        mx = -INFINITY
        for k in range(1, m + 1):
            if inv_rho * log(<double>k) + u[k] > mx:
                mx = inv_rho * log(<double>k) + u[k]
        for k in range(1, m + 1):
            kahan_add(&acc, &comp, exp(inv_rho * log(<double>k) + u[k] - mx))
        # u peaks at 0, so the normalizer needs no shift
        for k in range(m + 1):
            kahan_add(&tot, &tcomp, exp(u[k]))
    return mx + log(acc) - log(tot)


def oracle_scan(const double[::1] q, const double[:, ::1] d, double R, const double[:, ::1] grids, const long[::1] lengths):
    """Odometer scan over the free coordinates of the marginal-fixed joint polytope."""
    cdef Py_ssize_t k = q.shape[0], mfree = k - 1, nfree = grids.shape[0]
    cdef Py_ssize_t i, j, pos
    cdef long[::1] idx = np.zeros(nfree, dtype=np.int64)
    cdef double[:, ::1] w = np.empty((k, k), dtype=np.float64)
    cdef double[::1] bestc_v
    cdef double best = INFINITY, mi, ed, s, wij
    cdef bint ok, done = False
    best_c = np.full(nfree, np.nan)
    bestc_v = best_c
    with nogil:
        while not done:
            for i in range(mfree):
                s = 0.0
                for j in range(mfree):
                    w[i, j] = grids[i * mfree + j, idx[i * mfree + j]]
                    s = s + w[i, j]
                w[i, mfree] = q[i] - s
            for j in range(mfree):
                s = 0.0
                for i in range(mfree):
                    s = s + w[i, j]
                w[mfree, j] = q[j] - s
            s = 0.0
            for j in range(mfree):
                s = s + w[mfree, j]
            w[mfree, mfree] = q[mfree] - s
            ok = True
            mi = 0.0
            ed = 0.0
            for i in range(k):
                for j in range(k):
                    wij = w[i, j]
                    if wij < -FEAS_TOL:
                        ok = False
                    elif wij > 0.0:
                        mi = mi + wij * log(wij / (q[i] * q[j]))
                        ed = ed + wij * d[i, j]
            if ok and mi <= R + MI_TOL and mi + ed < best:
                best = mi + ed
                for j in range(nfree):
                    bestc_v[j] = grids[j, idx[j]]
            # advance odometer, last coordinate fastest
            pos = nfree - 1
            while True:
                if pos < 0:
                    done = True
                    break
                idx[pos] += 1
                if idx[pos] < lengths[pos]:
                    break
                idx[pos] = 0
                pos -= 1
    return best, best_c
