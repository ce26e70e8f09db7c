"""Safe feature elimination for the Smoothed Concomitant Lasso.

Both rules return the indices of features whose optimal coefficient is
certified to be zero. They never discard a feature in the support of the
solution, so the solver may drop discarded columns from its sweeps.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class SafeSphere:
    center: np.ndarray
    radius: float


@dataclass
class BoundPair:
    """Lower and upper bounds on the optimal value of the primal problem."""

    eta_lo: float
    eta_hi: float

    def __post_init__(self):
        if self.eta_lo > self.eta_hi:
            raise ValueError(
                f"eta_lo={self.eta_lo} exceeds eta_hi={self.eta_hi}")

    def gammas(self, ds, sigma0):
        """Clamped ``(gamma_lo, gamma_hi)`` with 0 <= lo <= hi <= 1.

        Loosening either bound only weakens the test, so clamping is safe.
        """
        scale = np.sqrt(ds.n) / ds.y_norm
        g_hi = min(1.0, self.eta_hi * scale)
        g_lo = max(0.0, min((self.eta_lo - sigma0 / 2) * scale, g_hi))
        return g_lo, max(g_hi, g_lo)


def gap_safe_radius(gap, lam, sigma0, n):
    gap = max(gap, 0.0)
    return np.sqrt(2 * gap / (lam ** 2 * sigma0 * n))


def gap_safe_screen(ds, sphere, Xt_theta=None):
    """Indices j with ``|X_j^T theta| + r ||X_j|| < 1``.

    Zero-norm columns are always returned. ``Xt_theta`` may be passed when
    ``X^T theta`` is already available.
    """
    if Xt_theta is None:
        Xt_theta = ds.X.T @ sphere.center
    score = np.abs(Xt_theta) + sphere.radius * ds.col_norms
    return np.flatnonzero((score < 1) | (ds.col_norms_sq == 0))


def _lemma4(c, g_lo, g_hi):
    a = np.abs(c)
    s = np.sqrt(np.maximum(1 - c * c, 0.0))
    out = np.ones_like(a)
    hi = a > g_hi
    lo = a < g_lo
    out[hi] = g_hi * a[hi] + np.sqrt(1 - g_hi ** 2) * s[hi]
    out[lo] = g_lo * a[lo] + np.sqrt(1 - g_lo ** 2) * s[lo]
    return out


def lemma4_max(c, gamma_lo, gamma_hi):
    """Maximum of ``|theta^T x|`` over the unit ball slice.

    Computes ``max |theta^T x|`` subject to ``||theta|| <= 1`` and
    ``gamma_lo <= theta^T y' <= gamma_hi`` for unit vectors ``x, y'`` with
    ``x^T y' = c``. Accepts scalar or array ``c``.
    """
    if not 0 <= gamma_lo <= gamma_hi <= 1:
        raise ValueError(
            "need 0 <= gamma_lo <= gamma_hi <= 1, got "
            f"gamma_lo={gamma_lo}, gamma_hi={gamma_hi}")
    c_arr = np.asarray(c, dtype=np.float64)
    if np.any(np.abs(c_arr) > 1 + 1e-12):
        raise ValueError("c must lie in [-1, 1]")
    c_arr = np.clip(c_arr, -1.0, 1.0)
    out = _lemma4(np.atleast_1d(c_arr), gamma_lo, gamma_hi)
    return float(out[0]) if c_arr.ndim == 0 else out


def bound_safe_screen(ds, bp, lam, sigma0):
    """Indices j discarded by the bound-based rule.

    Feature j goes when ``lemma4_max(x_j^T y', g_lo, g_hi) < lam sqrt(n) /
    ||X_j||``. Zero-norm columns are always returned.
    """
    g_lo, g_hi = bp.gammas(ds, sigma0)
    norms = ds.col_norms
    zero = norms == 0
    safe_norms = np.where(zero, 1.0, norms)
    c = ds.Xty / (safe_norms * ds.y_norm)
    c = np.clip(c, -1.0, 1.0)
    lhs = _lemma4(c, g_lo, g_hi)
    with np.errstate(divide="ignore"):
        rhs = lam * np.sqrt(ds.n) / norms
    return np.flatnonzero((lhs < rhs) | zero)
