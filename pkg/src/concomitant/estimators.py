"""Noise level estimators for high dimensional linear regression.

Every estimator returns a :class:`NoiseEstimate`. Estimators that divide by
``sqrt(n - |S|)`` raise :class:`DegreesOfFreedomError` when that count is not
positive, so benchmark drivers can record the failure and move on.
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple

import numpy as np

from .core import Screening, SolverConfig, lambda_max, lasso_lambda_max
from .solver import PathSpec, fit_path, lasso_fit, lasso_path

SUPPORT_TOL = 1e-12


class NumericalDegeneracy(ArithmeticError):
    """The estimator is undefined on this input."""


class DegreesOfFreedomError(NumericalDegeneracy):
    pass


class DegenerateDesignError(NumericalDegeneracy):
    pass


class CvMethod(str, Enum):
    LASSO = "lasso"
    SC = "sc"
    SZ = "sz"


@dataclass
class NoiseEstimate:
    method: str
    sigma: float
    support_size: int
    lambda_selected: float = None
    support: np.ndarray = None
    converged: bool = None
    gap: float = None
    flags: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CvConfig:
    folds: int = 5
    grid: PathSpec = PathSpec()
    seed: int = 0
    eps: float = 1e-4
    max_sweeps: int = 5000
    sigma0: float = None

    def __post_init__(self):
        if int(self.folds) != self.folds or self.folds < 2:
            raise ValueError("folds must be an integer >= 2")


def support_of(beta):
    return np.flatnonzero(np.abs(beta) > SUPPORT_TOL)


def _dof_sigma(resid_norm, n, k):
    if n - k <= 0:
        raise DegreesOfFreedomError(
            f"n - |S| = {n} - {k} <= 0; noise level is not identifiable")
    return resid_norm / np.sqrt(n - k)


def _projection_residual(X, y, S):
    S = np.asarray(S, dtype=np.int64)
    if S.size == 0:
        return float(np.linalg.norm(y))
    XS = X[:, S]
    rcond = max(XS.shape) * np.finfo(float).eps
    coef = np.linalg.lstsq(XS, y, rcond=rcond)[0]
    return float(np.linalg.norm(y - XS @ coef))


def projection_residual_norm(ds, S):
    """``||y - P_S y||`` for the orthogonal projector onto span(X_S)."""
    return _projection_residual(ds.X, ds.y, S)


def oracle_sigma(ds, S_star, method="OR"):
    S_star = np.asarray(S_star, dtype=np.int64)
    sigma = _dof_sigma(projection_residual_norm(ds, S_star), ds.n,
                       S_star.size)
    return NoiseEstimate(method, sigma, int(S_star.size), support=S_star)


def ls_refit_sigma(ds, S_hat, method="LS"):
    """Least-squares refit on an estimated support."""
    return oracle_sigma(ds, S_hat, method=method)


class ScaledLassoResult(NamedTuple):
    beta: np.ndarray
    sigma: float
    iters: int
    converged: bool
    interpolated: bool


def scaled_lasso(ds, lam, tol_sigma=1e-4, max_iters=100, lasso_eps=1e-4,
                 beta_init=None, sigma_init=None):
    """Alternate Lasso fits at ``lam * sigma`` with ``sigma = ||r|| / sqrt(n)``.

    Stops when sigma moves by at most ``tol_sigma`` between iterations.
    ``sigma_init`` defaults to ``||y|| / sqrt(n)``.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    sqrt_n = np.sqrt(ds.n)
    sigma = ds.y_norm / sqrt_n if sigma_init is None else float(sigma_init)
    beta = beta_init
    for it in range(1, max_iters + 1):
        beta = lasso_fit(ds, lam * sigma, eps=lasso_eps, init=beta).beta
        sigma_new = float(np.linalg.norm(ds.y - ds.X @ beta) / sqrt_n)
        if sigma_new == 0.0:
            return ScaledLassoResult(beta, 0.0, it, False, True)
        done = abs(sigma_new - sigma) <= tol_sigma
        sigma = sigma_new
        if done:
            return ScaledLassoResult(beta, sigma, it, True, False)
    return ScaledLassoResult(beta, sigma, max_iters, False, False)


def scaled_lasso_path(ds, lambdas, **kwargs):
    """Scaled-Lasso over decreasing ``lambdas``, warm-starting beta and sigma."""
    out = []
    beta = sigma = None
    for lam in lambdas:
        res = scaled_lasso(ds, lam, beta_init=beta, sigma_init=sigma, **kwargs)
        out.append(res)
        beta = res.beta
        sigma = res.sigma if res.sigma > 0 else None
    return out


def _resolve_sigma0(ds, cfg):
    return ds.default_sigma0() if cfg.sigma0 is None else cfg.sigma0


def method_grid(ds, cfg, method):
    method = CvMethod(method)
    if method is CvMethod.LASSO:
        lmax = lasso_lambda_max(ds)
    else:
        lmax = lambda_max(ds, _resolve_sigma0(ds, cfg))
    return cfg.grid.grid(lmax)


def _path_betas(ds, lambdas, cfg, method, sigma0):
    """Coefficient vectors (T, p) along ``lambdas`` plus convergence flags."""
    if method is CvMethod.LASSO:
        fits = lasso_path(ds, lambdas, eps=cfg.eps, K=cfg.max_sweeps)
        return (np.array([f.beta for f in fits]),
                [f.converged for f in fits], [f.gap for f in fits])
    if method is CvMethod.SC:
        sc_cfg = SolverConfig(None, sigma0, eps=cfg.eps,
                              max_sweeps=cfg.max_sweeps,
                              screening=Screening.GAP_SAFE)
        path = fit_path(ds, sc_cfg, PathSpec(lambdas=tuple(lambdas)))
        return (np.array([f.beta for f in path.fits]),
                [f.converged for f in path.fits], [f.gap for f in path.fits])
    fits = scaled_lasso_path(ds, lambdas)
    return (np.array([f.beta for f in fits]),
            [f.converged for f in fits], [None] * len(fits))


def fold_ids(n, folds, seed):
    """Random balanced fold labels in ``range(folds)``."""
    if n < folds:
        raise ValueError(f"need n >= folds, got n={n}, folds={folds}")
    perm = np.random.default_rng(seed).permutation(n)
    labels = np.empty(n, dtype=np.int64)
    for k, idx in enumerate(np.array_split(perm, folds)):
        labels[idx] = k
    return labels


@dataclass
class CvPath:
    lambdas: np.ndarray
    labels: np.ndarray
    fold_betas: np.ndarray
    fold_errors: np.ndarray
    scores: np.ndarray

    @property
    def best_index(self):
        # ties go to the largest lam, which comes first on a decreasing grid
        return int(np.flatnonzero(self.scores <= self.scores.min())[0])


def cv_path(ds, cfg, method):
    """Held-out mean squared prediction error over the method's grid."""
    method = CvMethod(method)
    sigma0 = _resolve_sigma0(ds, cfg)
    lambdas = method_grid(ds, cfg, method)
    labels = fold_ids(ds.n, cfg.folds, cfg.seed)
    betas = np.empty((cfg.folds, lambdas.size, ds.p))
    errors = np.empty((cfg.folds, lambdas.size))
    for k in range(cfg.folds):
        test = labels == k
        train = ds.subset(rows=~test)
        betas[k] = _path_betas(train, lambdas, cfg, method, sigma0)[0]
        pred = betas[k] @ ds.X[test].T
        errors[k] = np.mean((ds.y[test] - pred) ** 2, axis=1)
    return CvPath(lambdas, labels, betas, errors, errors.mean(axis=0))


def _cv_refit(ds, cfg, method):
    cvp = cv_path(ds, cfg, method)
    idx = cvp.best_index
    betas, conv, gaps = _path_betas(ds, cvp.lambdas[:idx + 1], cfg, method,
                                    _resolve_sigma0(ds, cfg))
    return cvp, idx, betas[-1], bool(conv[-1]), gaps[-1]


def cv_select(ds, cfg, method):
    """Pick lam by K-fold CV, refit on all data and estimate sigma.

    Returns ``(lambda_cv, NoiseEstimate)`` where the estimate is
    ``||y - X beta_cv|| / sqrt(n - |S_cv|)``. The full-data coefficients
    and support are attached to the estimate.
    """
    method = CvMethod(method)
    cvp, idx, beta, conv, gap = _cv_refit(ds, cfg, method)
    S = support_of(beta)
    resid = float(np.linalg.norm(ds.y - ds.X @ beta))
    label = {CvMethod.LASSO: "L_CV", CvMethod.SC: "SC_CV",
             CvMethod.SZ: "SZ_CV"}[method]
    lam_cv = float(cvp.lambdas[idx])
    est = NoiseEstimate(label, _dof_sigma(resid, ds.n, S.size), int(S.size),
                        lambda_selected=lam_cv, support=S, converged=conv,
                        gap=gap)
    est.flags["beta"] = beta
    est.flags["cv_scores"] = cvp.scores
    return lam_cv, est


def sz_sigma(ds, cfg):
    """Scaled-Lasso noise estimate at the cross-validated lam.

    The grid is the concomitant geometric grid; the reported sigma is the
    Scaled-Lasso's own joint estimate ``||y - X beta|| / sqrt(n)``, so no
    degrees-of-freedom correction is involved.
    """
    cvp, idx, beta, conv, _ = _cv_refit(ds, cfg, CvMethod.SZ)
    S = support_of(beta)
    sigma = float(np.linalg.norm(ds.y - ds.X @ beta) / np.sqrt(ds.n))
    est = NoiseEstimate("SZ", sigma, int(S.size),
                        lambda_selected=float(cvp.lambdas[idx]), support=S,
                        converged=conv)
    est.flags.update(beta=beta, cv_scores=cvp.scores, grid="geometric")
    return est


def rcv_sigma(ds, cfg, seed, method=CvMethod.LASSO):
    """Refitted cross-validation on two random halves.

    The support is selected by CV on one half and the noise level is
    estimated by least squares on the other; the two estimates are combined
    as a root mean square.
    """
    if ds.n < 2 * cfg.folds:
        raise ValueError(f"need n >= 2 * folds, got n={ds.n}")
    perm = np.random.default_rng(seed).permutation(ds.n)
    halves = np.sort(perm[: ds.n // 2]), np.sort(perm[ds.n // 2:])
    parts = [ds.subset(rows=h) for h in halves]
    sig_sq = []
    sizes = []
    for i in (0, 1):
        fit_part, eval_part = parts[i], parts[1 - i]
        sub_cfg = replace(cfg, sigma0=_resolve_sigma0(fit_part, cfg))
        _, est = cv_select(fit_part, sub_cfg, method)
        S = est.support
        resid = _projection_residual(eval_part.X, eval_part.y, S)
        sig_sq.append(_dof_sigma(resid, eval_part.n, S.size) ** 2)
        sizes.append(int(S.size))
    sigma = float(np.sqrt((sig_sq[0] + sig_sq[1]) / 2))
    return NoiseEstimate("RCV", sigma, max(sizes),
                         flags={"support_sizes": sizes})


def dicker_moments(X, y):
    """``(m1, m2, radicand)`` of the moment estimator on raw arrays."""
    n, p = X.shape
    tr1 = float(np.einsum("ij,ij->", X, X)) / n
    # tr(Sigma_hat^2) = ||X X^T||_F^2 / n^2, cheaper when p > n
    G = X @ X.T if p > n else X.T @ X
    tr2 = float(np.sum(G * G)) / n ** 2
    m1 = tr1 / p
    m2 = tr2 / p - tr1 ** 2 / (p * n)
    if abs(m2) <= 1e-12 * max(1.0, tr2 / p):
        raise DegenerateDesignError(
            "second moment estimate m2 is zero; design is degenerate")
    Xty = X.T @ y
    radicand = ((1 + p * m1 ** 2 / ((n + 1) * m2)) * float(y @ y) / n
                - m1 * float(Xty @ Xty) / (n * (n + 1) * m2))
    return m1, m2, radicand


def dicker_sigma(ds):
    """Moment-based estimator built from traces of the normalized Gram matrix.

    A negative radicand is clamped to zero and flagged in
    ``flags["clamped"]``.
    """
    _, _, radicand = dicker_moments(ds.X, ds.y)
    clamped = radicand < 0
    sigma = float(np.sqrt(max(radicand, 0.0)))
    return NoiseEstimate("D2", sigma, 0,
                         flags={"clamped": bool(clamped),
                                "radicand": radicand})


def universal_lambda(p, n):
    return float(np.sqrt(2 * np.log(p) / n))


def universal_lasso_sigma(ds, eps=1e-4):
    if ds.p < 2:
        raise ValueError("universal lam needs p >= 2")
    lam = universal_lambda(ds.p, ds.n)
    res = lasso_fit(ds, lam, eps=eps)
    S = support_of(res.beta)
    resid = float(np.linalg.norm(ds.y - ds.X @ res.beta))
    return NoiseEstimate("L_U", _dof_sigma(resid, ds.n, S.size), int(S.size),
                         lambda_selected=lam, support=S,
                         converged=res.converged, gap=res.gap)


__all__ = [
    "CvConfig", "CvMethod", "CvPath", "DegenerateDesignError",
    "DegreesOfFreedomError", "NoiseEstimate", "NumericalDegeneracy",
    "ScaledLassoResult", "cv_path", "cv_select", "dicker_moments",
    "dicker_sigma", "fold_ids",
    "ls_refit_sigma", "method_grid", "oracle_sigma",
    "projection_residual_norm", "rcv_sigma", "scaled_lasso",
    "scaled_lasso_path", "support_of", "sz_sigma", "universal_lambda",
    "universal_lasso_sigma",
]
