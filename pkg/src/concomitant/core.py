"""Objectives, dual points, duality gaps and optimality checks.

Two problems are covered. The Smoothed Concomitant Lasso

    P(beta, sigma) = ||y - X beta||^2 / (2 n sigma) + sigma / 2 + lam ||beta||_1,
    sigma >= sigma0 > 0,

with dual

    D(theta) = <y, lam theta> + sigma0 (1/2 - lam^2 n ||theta||^2 / 2)

over {theta : ||X^T theta||_inf <= 1, ||theta|| <= 1 / (lam sqrt(n))}, and the
plain Lasso ``||y - X beta||^2 / (2n) + lam ||beta||_1`` used by the baselines.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

FEAS_TOL = 1e-10


class ContractError(ValueError):
    """Raised when a documented precondition is violated."""


class Screening(str, Enum):
    NONE = "none"
    GAP_SAFE = "gap"
    BOUND_SAFE = "bound"
    GAP_SAFE_PP = "gap++"


class Dataset:
    """Immutable dense regression data with cached column statistics.

    Parameters
    ----------
    X : array_like, shape (n, p)
        Design matrix. Stored as a read-only Fortran-ordered float64 copy.
    y : array_like, shape (n,)
        Response. Must be nonzero.
    """

    def __init__(self, X, y):
        X = np.array(X, dtype=np.float64, order="F", copy=True)
        y = np.array(y, dtype=np.float64, copy=True).ravel()
        if X.ndim != 2:
            raise ValueError("X must be a 2-d array")
        n, p = X.shape
        if n < 1 or p < 1:
            raise ValueError(f"X must have n >= 1 and p >= 1, got {X.shape}")
        if y.shape[0] != n:
            raise ValueError(f"y has length {y.shape[0]}, expected {n}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("X and y must be finite")
        y_norm = float(np.linalg.norm(y))
        if y_norm == 0.0:
            raise ValueError("y must be nonzero")
        self.X = X
        self.y = y
        self.col_norms_sq = np.einsum("ij,ij->j", X, X)
        self.col_norms = np.sqrt(self.col_norms_sq)
        self.y_norm = y_norm
        self.Xty = X.T @ y
        for arr in (self.X, self.y, self.col_norms_sq, self.col_norms,
                    self.Xty):
            arr.setflags(write=False)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def nonzero_columns(self):
        return np.flatnonzero(self.col_norms_sq > 0.0)

    def default_sigma0(self, alpha=2):
        """``||y|| / sqrt(n) * 10**-alpha``."""
        return self.y_norm / np.sqrt(self.n) * 10.0 ** (-alpha)

    def subset(self, rows=None, cols=None):
        X, y = self.X, self.y
        if rows is not None:
            X, y = X[rows], y[rows]
        if cols is not None:
            X = X[:, cols]
        return Dataset(X, y)

    def __repr__(self):
        return f"Dataset(n={self.n}, p={self.p})"


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of one Smoothed Concomitant Lasso solve.

    ``lam`` may be left as None when the config is used as a template for a
    path, where each grid value is substituted in turn.
    """

    lam: float | None
    sigma0: float
    eps: float = 1e-6
    max_sweeps: int = 5000
    gap_check_every: int = 10
    screening: Screening = Screening.NONE

    def __post_init__(self):
        object.__setattr__(self, "screening", Screening(self.screening))
        if self.lam is not None and not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not self.sigma0 > 0:
            raise ValueError(f"sigma0 must be positive, got {self.sigma0}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if int(self.max_sweeps) != self.max_sweeps or self.max_sweeps < 1:
            raise ValueError("max_sweeps must be a positive integer")
        if (int(self.gap_check_every) != self.gap_check_every
                or self.gap_check_every < 1):
            raise ValueError("gap_check_every must be a positive integer")


@dataclass
class PrimalState:
    beta: np.ndarray
    sigma: float
    residual: np.ndarray
    active: np.ndarray = field(default=None)

    @classmethod
    def from_beta(cls, ds, beta, sigma=None, sigma0=None, active=None):
        """Build a consistent state; sigma defaults to its exact minimizer."""
        beta = np.array(beta, dtype=np.float64, copy=True)
        residual = ds.y - ds.X @ beta
        if sigma is None:
            if sigma0 is None:
                raise ValueError("either sigma or sigma0 is required")
            sigma = max(sigma0, np.linalg.norm(residual) / np.sqrt(ds.n))
        if active is None:
            active = ds.nonzero_columns
        return cls(beta, float(sigma), residual,
                   np.asarray(active, dtype=np.int64))


@dataclass
class DualPoint:
    theta: np.ndarray
    feasible: bool


def soft_threshold(x, tau):
    """``sign(x) * max(|x| - tau, 0)``; works elementwise on arrays."""
    if np.any(np.asarray(tau) < 0):
        raise ValueError("tau must be nonnegative")
    return np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)


def _residual(ds, beta):
    return ds.y - ds.X @ beta


def primal_objective(ds, beta, sigma, lam, sigma0):
    if sigma < sigma0:
        raise ContractError(
            f"sigma={sigma} is below the floor sigma0={sigma0}")
    r = _residual(ds, beta)
    return (r @ r / (2 * ds.n * sigma) + sigma / 2
            + lam * np.abs(beta).sum())


def dual_objective(ds, theta, lam, sigma0):
    return (lam * (ds.y @ theta)
            + sigma0 * (0.5 - lam ** 2 * ds.n * (theta @ theta) / 2))


def is_dual_feasible(ds, theta, lam, tol=FEAS_TOL):
    return bool(np.max(np.abs(ds.X.T @ theta)) <= 1 + tol
                and lam * np.sqrt(ds.n) * np.linalg.norm(theta) <= 1 + tol)


def dual_scaling(ds, residual, lam, sigma0, Xtr=None):
    """Denominator that rescales a residual into the dual feasible set."""
    if Xtr is None:
        Xtr = ds.X.T @ residual
    return max(lam * ds.n * sigma0, np.max(np.abs(Xtr)),
               lam * np.sqrt(ds.n) * np.linalg.norm(residual))


def dual_feasible_point(ds, beta, lam, sigma0):
    r = _residual(ds, beta)
    theta = r / dual_scaling(ds, r, lam, sigma0)
    return DualPoint(theta, True)


def sigma_hat(ds, beta, sigma0):
    return max(sigma0, np.linalg.norm(_residual(ds, beta)) / np.sqrt(ds.n))


def duality_gap(ds, st, dp, cfg):
    """``P(beta, sigma) - D(theta)`` for a state and a feasible dual point.

    The state's residual is not trusted; the primal value is recomputed
    from ``st.beta``.
    """
    if not dp.feasible:
        raise ContractError("duality gap requires a feasible dual point")
    return (primal_objective(ds, st.beta, st.sigma, cfg.lam, cfg.sigma0)
            - dual_objective(ds, dp.theta, cfg.lam, cfg.sigma0))


def lambda_max(ds, sigma0):
    """Smallest lam for which beta = 0 solves the concomitant problem."""
    scale = max(sigma0, ds.y_norm / np.sqrt(ds.n))
    return float(np.max(np.abs(ds.Xty)) / (ds.n * scale))


def lasso_lambda_max(ds):
    return float(np.max(np.abs(ds.Xty)) / ds.n)


def kkt_violation(ds, st, lam):
    """Largest violation of ``X^T r in n lam sigma * d||beta||_1``.

    Evaluated with a freshly computed residual. With ``st.sigma = 1`` this is
    the plain Lasso optimality check at ``lam``.
    """
    g = ds.X.T @ _residual(ds, st.beta)
    bound = ds.n * lam * st.sigma
    nz = st.beta != 0
    viol = np.maximum(np.abs(g) - bound, 0.0)
    viol[nz] = np.abs(g[nz] - bound * np.sign(st.beta[nz]))
    return float(viol.max())


def lasso_primal(ds, beta, lam):
    r = _residual(ds, beta)
    return r @ r / (2 * ds.n) + lam * np.abs(beta).sum()


def lasso_dual(ds, theta, lam):
    d = ds.y - lam * ds.n * theta
    return (ds.y_norm ** 2 - d @ d) / (2 * ds.n)


def lasso_dual_point(ds, beta, lam):
    r = _residual(ds, beta)
    scale = max(lam * ds.n, np.max(np.abs(ds.X.T @ r)))
    return DualPoint(r / scale, True)


def lasso_gap(ds, beta, lam):
    if not lam > 0:
        raise ValueError("lam must be positive")
    dp = lasso_dual_point(ds, beta, lam)
    return lasso_primal(ds, beta, lam) - lasso_dual(ds, dp.theta, lam)
