"""Numba kernels for the coordinate descent inner loops.

All kernels mutate ``beta`` and ``residual`` in place. ``X`` is expected in
Fortran (column-major) order so that ``X[:, j]`` is a contiguous slice.
"""

import numpy as np
from numba import njit

# reassociation lets LLVM vectorize the dot products; NaN/inf semantics kept
_FAST = {"reassoc", "contract"}


@njit(cache=True, fastmath=_FAST)
def soft_threshold_scalar(x, tau):
    if x > tau:
        return x - tau
    if x < -tau:
        return x + tau
    return 0.0


@njit(cache=True, fastmath=_FAST)
def cd_pass(X, beta, residual, col_norms_sq, active, n_active, tau_scale):
    """One cyclic pass over ``active[:n_active]`` in stored order.

    Coordinate ``j`` is soft-thresholded at ``tau_scale / ||X_j||^2``.
    """
    n = X.shape[0]
    for idx in range(n_active):
        j = active[idx]
        L = col_norms_sq[j]
        old = beta[j]
        dot = 0.0
        for i in range(n):
            dot += X[i, j] * residual[i]
        new = soft_threshold_scalar(old + dot / L, tau_scale / L)
        if new != old:
            diff = new - old
            for i in range(n):
                residual[i] -= diff * X[i, j]
            beta[j] = new


@njit(cache=True, fastmath=_FAST)
def concomitant_sweeps(X, beta, residual, col_norms_sq, active, n_active,
                       lam, sigma, sigma0, n_sweeps):
    """Run ``n_sweeps`` sweeps, each followed by the exact sigma update.

    Returns the final sigma.
    """
    n = X.shape[0]
    sqrt_n = np.sqrt(n)
    for _ in range(n_sweeps):
        cd_pass(X, beta, residual, col_norms_sq, active, n_active,
                n * sigma * lam)
        sq = 0.0
        for i in range(n):
            sq += residual[i] * residual[i]
        sigma = max(sigma0, np.sqrt(sq) / sqrt_n)
    return sigma


@njit(cache=True, fastmath=_FAST)
def lasso_sweeps(X, beta, residual, col_norms_sq, active, n_active, lam,
                 n_sweeps):
    n = X.shape[0]
    for _ in range(n_sweeps):
        cd_pass(X, beta, residual, col_norms_sq, active, n_active, n * lam)


@njit(cache=True, fastmath=_FAST)
def checkpoint(X, y, beta, residual, Xtr, lam, sigma0):
    """Recompute the residual and ``X^T r``; evaluate primal and dual values.

    Fills ``residual`` and ``Xtr`` in place and returns
    ``(sigma, inv_scale, primal, dual)`` where ``theta = residual * inv_scale``
    is the rescaled dual point.
    """
    n, p = X.shape
    for i in range(n):
        residual[i] = y[i]
    l1 = 0.0
    for j in range(p):
        b = beta[j]
        if b != 0.0:
            l1 += abs(b)
            for i in range(n):
                residual[i] -= b * X[i, j]
    r_sq = 0.0
    y_r = 0.0
    for i in range(n):
        r_sq += residual[i] * residual[i]
        y_r += y[i] * residual[i]
    xtr_max = 0.0
    for j in range(p):
        d = 0.0
        for i in range(n):
            d += X[i, j] * residual[i]
        Xtr[j] = d
        if abs(d) > xtr_max:
            xtr_max = abs(d)
    r_norm = np.sqrt(r_sq)
    sigma = max(sigma0, r_norm / np.sqrt(n))
    scale = max(lam * n * sigma0, max(xtr_max, lam * np.sqrt(n) * r_norm))
    inv = 1.0 / scale
    primal = r_sq / (2 * n * sigma) + sigma / 2 + lam * l1
    dual = (lam * y_r * inv
            + sigma0 * (0.5 - lam * lam * n * r_sq * inv * inv / 2))
    return sigma, inv, primal, dual


@njit(cache=True)
def drop_features(X, beta, residual, keep, discard):
    """Clear ``keep[j]`` for every j flagged in ``discard``.

    Nonzero coefficients of dropped features are zeroed and the residual is
    updated. Returns ``(n_dropped, n_moved)``.
    """
    n = X.shape[0]
    dropped = 0
    moved = 0
    for j in range(keep.shape[0]):
        if keep[j] and discard[j]:
            keep[j] = False
            dropped += 1
            b = beta[j]
            if b != 0.0:
                moved += 1
                for i in range(n):
                    residual[i] += b * X[i, j]
                beta[j] = 0.0
    return dropped, moved


@njit(cache=True)
def sphere_discard(Xtr, inv_scale, radius, col_norms):
    p = Xtr.shape[0]
    out = np.empty(p, dtype=np.bool_)
    for j in range(p):
        out[j] = (abs(Xtr[j]) * inv_scale + radius * col_norms[j] < 1.0
                  or col_norms[j] == 0.0)
    return out
