"""Compiled coordinate-descent sweep kernels.

The sweeps are the only hot loops in the package; everything else is vectorized
numpy.  With numba available the kernels JIT-compile (cached across processes,
GIL released); without it the same code runs as plain Python, slowly but
identically.

Kind codes: 0 = l1, 1 = mcp, 2 = scad (see regularizers.KIND_CODES).  When the
curvature v is at or below the penalty's strong-convexity floor (always the
case for IRLS weights with the usual gammas), the exact 1-D minimizer is
undefined, so the update falls back to a majorize-minimize step: a soft
threshold at the penalty derivative evaluated at the current coefficient.
That surrogate touches the objective at the current point, so every sweep
still descends, and its fixed points are exactly the stationary points of the
penalized subproblem.  The public scalar_threshold raises on degenerate
curvature instead; this fallback lives here because kernels cannot raise.
"""

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(func):
            return func

        return deco


@njit(cache=True, nogil=True, inline="always")
def threshold(kind, u, v, lam, gamma, beta_old):
    if lam == 0.0:
        return u / v
    au = abs(u)
    if kind == 1:  # mcp
        if v > 1.0 / gamma:
            if au <= lam:
                return 0.0
            if au <= gamma * lam * v:
                t = (au - lam) / (v - 1.0 / gamma)
                return t if u > 0.0 else -t
            return u / v
        # degenerate curvature: majorize at the current point
        ab = beta_old if beta_old > 0.0 else -beta_old
        lam_eff = lam - ab / gamma
        if lam_eff < 0.0:
            lam_eff = 0.0
    elif kind == 2:  # scad
        if v > 1.0 / (gamma - 1.0):
            if au <= lam:
                return 0.0
            if au <= lam * (v + 1.0):
                t = (au - lam) / v
                return t if u > 0.0 else -t
            if au <= gamma * lam * v:
                t = (au - gamma * lam / (gamma - 1.0)) / (v - 1.0 / (gamma - 1.0))
                return t if u > 0.0 else -t
            return u / v
        ab = beta_old if beta_old > 0.0 else -beta_old
        if ab <= lam:
            lam_eff = lam
        else:
            lam_eff = (gamma * lam - ab) / (gamma - 1.0)
            if lam_eff < 0.0:
                lam_eff = 0.0
    else:  # l1
        lam_eff = lam
    if au <= lam_eff:
        return 0.0
    t = (au - lam_eff) / v
    return t if u > 0.0 else -t


@njit(cache=True, nogil=True, fastmath=True)
def cd_sweeps_naive_unit(x, r, beta, intercept, active, v, kind, gamma, lam, tol, max_sweeps,
                         fit_intercept):
    """Unit-weight cyclic sweeps; r = z - X beta - b is updated in place."""
    n = x.shape[0]
    b = intercept
    sweeps = 0
    max_move = np.inf
    while sweeps < max_sweeps:
        sweeps += 1
        max_move = 0.0
        for idx in range(active.shape[0]):
            j = active[idx]
            vj = v[j]
            s = 0.0
            for i in range(n):
                s += x[i, j] * r[i]
            u = s / n + vj * beta[j]
            t = threshold(kind, u, vj, lam, gamma, beta[j])
            if t != beta[j]:
                diff = beta[j] - t
                for i in range(n):
                    r[i] += x[i, j] * diff
                move = vj * (diff if diff > 0.0 else -diff)
                if move > max_move:
                    max_move = move
                beta[j] = t
        if fit_intercept:
            s = 0.0
            for i in range(n):
                s += r[i]
            db = s / n
            if db != 0.0:
                b += db
                for i in range(n):
                    r[i] -= db
                move = db if db > 0.0 else -db
                if move > max_move:
                    max_move = move
        if max_move < tol:
            break
    return sweeps, max_move, b


@njit(cache=True, nogil=True, fastmath=True)
def cd_sweeps_naive(x, w, r, beta, intercept, active, v, kind, gamma, lam, tol, max_sweeps,
                    fit_intercept):
    """Weighted cyclic sweeps for the IRLS subproblems; r = z - X beta - b."""
    n = x.shape[0]
    b = intercept
    wsum = 0.0
    for i in range(n):
        wsum += w[i]
    sweeps = 0
    max_move = np.inf
    while sweeps < max_sweeps:
        sweeps += 1
        max_move = 0.0
        for idx in range(active.shape[0]):
            j = active[idx]
            vj = v[j]
            s = 0.0
            for i in range(n):
                s += x[i, j] * w[i] * r[i]
            u = s / n + vj * beta[j]
            t = threshold(kind, u, vj, lam, gamma, beta[j])
            if t != beta[j]:
                diff = beta[j] - t
                for i in range(n):
                    r[i] += x[i, j] * diff
                move = vj * (diff if diff > 0.0 else -diff)
                if move > max_move:
                    max_move = move
                beta[j] = t
        if fit_intercept:
            s = 0.0
            for i in range(n):
                s += w[i] * r[i]
            db = s / wsum
            if db != 0.0:
                b += db
                for i in range(n):
                    r[i] -= db
                move = (wsum / n) * (db if db > 0.0 else -db)
                if move > max_move:
                    max_move = move
        if max_move < tol:
            break
    return sweeps, max_move, b


@njit(cache=True, nogil=True, fastmath=True)
def cd_sweeps_cov(gram, m, xty, beta_t, active_pos, v_t, kind, gamma, lam, tol, max_sweeps):
    """Covariance-rule sweeps in the tracked-feature index space.

    gram[:m, :m] holds (1/n) x_j^T x_k for tracked features; beta_t is the
    coefficient vector in tracked order and is updated in place.  The response
    is assumed centered so no intercept update is needed.
    """
    sweeps = 0
    max_move = np.inf
    while sweeps < max_sweeps:
        sweeps += 1
        max_move = 0.0
        for idx in range(active_pos.shape[0]):
            p = active_pos[idx]
            vp = v_t[p]
            s = 0.0
            for k in range(m):
                s += gram[p, k] * beta_t[k]
            u = xty[p] - s + vp * beta_t[p]
            t = threshold(kind, u, vp, lam, gamma, beta_t[p])
            if t != beta_t[p]:
                diff = t - beta_t[p]
                move = vp * (diff if diff > 0.0 else -diff)
                if move > max_move:
                    max_move = move
                beta_t[p] = t
        if max_move < tol:
            break
    return sweeps, max_move
