"""Coordinate descent solvers with duality-gap stopping and safe screening."""

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .core import (
    PrimalState,
    Screening,
    lambda_max,
    lasso_dual,
)
from .screening import (
    BoundPair,
    bound_safe_screen,
    gap_safe_radius,
)


@dataclass
class FitResult:
    beta: np.ndarray
    sigma: float
    gap: float
    sweeps: int
    gap_checks: int
    converged: bool
    lam: float
    screened_fraction_trace: list = field(default_factory=list)
    gap_trace: list = field(default_factory=list)
    active: np.ndarray = None

    @property
    def support(self):
        return np.flatnonzero(np.abs(self.beta) > 1e-12)


@dataclass(frozen=True)
class PathSpec:
    """Geometric grid ``lam_t = lam_max * 10**(-delta (t-1)/(T-1))``.

    An explicit ``lambdas`` sequence overrides the generated grid.
    """

    T: int = 100
    delta: float = 2.0
    lambdas: tuple = None

    def __post_init__(self):
        if self.lambdas is not None:
            lams = np.asarray(self.lambdas, dtype=float)
            if lams.ndim != 1 or lams.size == 0 or np.any(lams <= 0):
                raise ValueError("lambdas must be a nonempty positive list")
            if np.any(np.diff(lams) >= 0):
                raise ValueError("lambdas must be strictly decreasing")
            object.__setattr__(self, "lambdas", tuple(lams.tolist()))
            object.__setattr__(self, "T", lams.size)
        if int(self.T) != self.T or self.T < 1:
            raise ValueError("T must be a positive integer")
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    def grid(self, lam_max):
        if self.lambdas is not None:
            return np.array(self.lambdas)
        if self.T == 1:
            return np.array([lam_max])
        t = np.arange(self.T)
        return lam_max * 10.0 ** (-self.delta * t / (self.T - 1))


@dataclass
class PathResult:
    lambdas: np.ndarray
    fits: list
    warm_start: list
    wall_time: float
    presolve_sweeps: list = field(default_factory=list)


def _bound_discard(ds, lam, sigma0, primal, dual):
    bp = BoundPair(min(dual, primal), primal)
    mask = np.zeros(ds.p, dtype=bool)
    mask[bound_safe_screen(ds, bp, lam, sigma0)] = True
    return mask


def _initial_state(ds, cfg, init):
    if init is None:
        return PrimalState.from_beta(ds, np.zeros(ds.p), sigma0=cfg.sigma0)
    if init.sigma < cfg.sigma0:
        raise ValueError("initial sigma is below sigma0")
    if init.beta.shape != (ds.p,):
        raise ValueError("initial beta has the wrong length")
    active = ds.nonzero_columns if init.active is None else init.active
    return PrimalState(init.beta.copy(), init.sigma, init.residual.copy(),
                       np.asarray(active, dtype=np.int64))


def cd_sweep(ds, st, lam, sigma0):
    """One coordinate pass over ``st.active`` followed by the sigma update.

    Returns a new state; ``st`` is left untouched.
    """
    beta = st.beta.astype(np.float64, copy=True)
    residual = st.residual.astype(np.float64, copy=True)
    active = np.sort(np.asarray(st.active, dtype=np.int64))
    active = active[ds.col_norms_sq[active] > 0]
    sigma = _kernels.concomitant_sweeps(
        ds.X, beta, residual, ds.col_norms_sq, active, active.size,
        float(lam), float(st.sigma), float(sigma0), 1)
    return PrimalState(beta, sigma, residual, active)


def fit(ds, cfg, init=None):
    """Solve the Smoothed Concomitant Lasso at ``cfg.lam`` to gap ``cfg.eps``.

    Parameters
    ----------
    ds : Dataset
    cfg : SolverConfig
        ``cfg.lam`` must be set.
    init : PrimalState, optional
        Warm start. Defaults to ``beta = 0`` with the optimal sigma.

    Returns
    -------
    FitResult
        ``gap`` is the duality gap certified at the returned point. Running
        out of sweeps is reported through ``converged=False``.
    """
    if cfg.lam is None:
        raise ValueError("SolverConfig.lam must be set for a single fit")
    lam, sigma0 = float(cfg.lam), float(cfg.sigma0)
    st = _initial_state(ds, cfg, init)
    beta = st.beta
    screening = cfg.screening is not Screening.NONE

    keep = np.zeros(ds.p, dtype=bool)
    keep[st.active] = True
    keep &= ds.col_norms_sq > 0
    beta[~keep & (beta != 0)] = 0.0
    active = np.flatnonzero(keep)

    n = ds.n
    residual = np.empty(n)
    Xtr = np.empty(ds.p)
    sweeps = 0
    checks = 0
    gap_trace = []
    frac_trace = []
    while True:
        sigma, inv_scale, primal, dual = _kernels.checkpoint(
            ds.X, ds.y, beta, residual, Xtr, lam, sigma0)
        gap = primal - dual
        checks += 1
        gap_trace.append((sweeps, gap))
        converged = gap <= cfg.eps
        if screening and (converged or sweeps < cfg.max_sweeps):
            if cfg.screening is Screening.BOUND_SAFE:
                discard = _bound_discard(ds, lam, sigma0, primal, dual)
            else:
                radius = gap_safe_radius(gap, lam, sigma0, n)
                discard = _kernels.sphere_discard(Xtr, inv_scale, radius,
                                                  ds.col_norms)
            dropped, moved = _kernels.drop_features(ds.X, beta, residual,
                                                    keep, discard)
            if dropped:
                active = np.flatnonzero(keep)
            if moved:
                if converged:
                    # certificate no longer matches beta; re-check
                    continue
                sigma = max(sigma0, np.linalg.norm(residual) / np.sqrt(n))
            frac_trace.append((sweeps, 1.0 - active.size / ds.p))
        if converged or sweeps >= cfg.max_sweeps:
            break
        n_sw = min(cfg.gap_check_every, cfg.max_sweeps - sweeps)
        _kernels.concomitant_sweeps(
            ds.X, beta, residual, ds.col_norms_sq, active, active.size,
            lam, sigma, sigma0, n_sw)
        sweeps += n_sw

    return FitResult(
        beta=beta, sigma=sigma, gap=gap, sweeps=sweeps,
        gap_checks=checks, converged=bool(converged), lam=lam,
        screened_fraction_trace=frac_trace, gap_trace=gap_trace,
        active=active)


def fit_path(ds, cfg, spec, k0=5000, eps0=None):
    """Warm-started solves over a decreasing grid of lam values.

    In ``gap++`` mode each lam after the first starts with a presolve
    restricted to the previous lam's safe active set (at most ``k0`` sweeps,
    tolerance ``eps0``, defaulting to ``cfg.eps``). That restricted solve is
    only a warm start; the following full fit is what certifies the result.
    """
    eps0 = cfg.eps if eps0 is None else eps0
    lambdas = spec.grid(lambda_max(ds, cfg.sigma0))
    presolve = cfg.screening is Screening.GAP_SAFE_PP and k0 > 0
    fits, tags, pre_sweeps = [], [], []
    beta = np.zeros(ds.p)
    prev_active = None
    start = time.perf_counter()
    for t, lam in enumerate(lambdas):
        lam_cfg = replace(cfg, lam=float(lam))
        if t == 0:
            tags.append("cold")
        elif presolve and prev_active.size < ds.nonzero_columns.size:
            # a restriction to every usable column is the full problem again
            cols = np.union1d(prev_active, np.flatnonzero(beta))
            n_pre = 0
            if cols.size:
                # an empty restriction has beta = 0 as its only point
                sub = ds.subset(cols=cols)
                sub_cfg = replace(lam_cfg, eps=eps0, max_sweeps=k0,
                                  screening=Screening.GAP_SAFE)
                sub_init = PrimalState.from_beta(sub, beta[cols],
                                                 sigma0=cfg.sigma0)
                res = fit(sub, sub_cfg, sub_init)
                beta = np.zeros(ds.p)
                beta[cols] = res.beta
                n_pre = res.sweeps
            pre_sweeps.append(n_pre)
            tags.append("active-set-presolve")
        else:
            tags.append("previous-beta")
        init = PrimalState.from_beta(ds, beta, sigma0=cfg.sigma0)
        res = fit(ds, lam_cfg, init)
        fits.append(res)
        beta = res.beta.copy()
        prev_active = res.active
    wall = time.perf_counter() - start
    return PathResult(lambdas, fits, tags, wall, pre_sweeps)


def lasso_fit(ds, lam, eps=1e-4, K=5000, init=None, gap_check_every=10):
    """Cyclic coordinate descent for the Lasso with a duality-gap stop.

    The dual point is the residual rescaled by ``max(lam n, ||X^T r||_inf)``.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    n = ds.n
    beta = np.zeros(ds.p) if init is None else np.array(init, dtype=float)
    active = ds.nonzero_columns
    beta[ds.col_norms_sq == 0] = 0.0
    sweeps = checks = 0
    gap_trace = []
    while True:
        nz = np.flatnonzero(beta)
        r = ds.y - ds.X[:, nz] @ beta[nz] if nz.size else ds.y.copy()
        Xtr = ds.X.T @ r
        theta = r / max(lam * n, np.max(np.abs(Xtr)))
        gap = (r @ r / (2 * n) + lam * np.abs(beta).sum()
               - lasso_dual(ds, theta, lam))
        checks += 1
        gap_trace.append((sweeps, gap))
        if gap <= eps or sweeps >= K:
            break
        n_sw = min(gap_check_every, K - sweeps)
        _kernels.lasso_sweeps(ds.X, beta, r, ds.col_norms_sq, active,
                              active.size, float(lam), n_sw)
        sweeps += n_sw
    return FitResult(
        beta=beta, sigma=float(np.linalg.norm(r) / np.sqrt(n)), gap=gap,
        sweeps=sweeps, gap_checks=checks, converged=bool(gap <= eps),
        lam=float(lam), gap_trace=gap_trace, active=active)


def lasso_path(ds, lambdas, eps=1e-4, K=5000):
    """Warm-started Lasso fits over ``lambdas`` (any order)."""
    fits = []
    beta = None
    for lam in lambdas:
        res = lasso_fit(ds, lam, eps=eps, K=K, init=beta)
        fits.append(res)
        beta = res.beta
    return fits

