"""Benchmark drivers: noise-level estimator comparison and screening timings.

Both drivers return lists of plain dict records ready for JSON lines output.
"""

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .core import Screening, SolverConfig, lambda_max
from .data import generate
from .estimators import (
    CvConfig,
    CvMethod,
    NumericalDegeneracy,
    cv_select,
    dicker_sigma,
    ls_refit_sigma,
    oracle_sigma,
    rcv_sigma,
    sz_sigma,
    universal_lasso_sigma,
)
from .solver import PathSpec, fit_path

METHODS = ("OR", "SC_CV", "SC_LS", "L_CV", "L_LS", "L_U", "RCV", "D2", "SZ")


def rep_seed(seed, rep):
    """Seed for replication ``rep``; independent of how reps are scheduled."""
    return int(np.random.SeedSequence([seed, rep]).generate_state(1)[0])


def _record(spec, rep, method, est=None, wall=0.0, error=None):
    rec = {
        "method": method, "n": spec.n, "p": spec.p, "rho": spec.rho,
        "snr": spec.snr, "s": spec.s, "seed": spec.seed, "rep": rep,
        "sigma_hat": None, "sigma_star": spec.sigma_star,
        "support_size": None, "lambda": None,
        "wall_time_ms": 1e3 * wall, "converged": None, "gap": None,
    }
    if est is not None:
        rec.update(sigma_hat=float(est.sigma),
                   support_size=int(est.support_size),
                   converged=est.converged, gap=est.gap)
        if est.lambda_selected is not None:
            rec["lambda"] = float(est.lambda_selected)
        if "clamped" in est.flags:
            rec["clamped"] = est.flags["clamped"]
    if error is not None:
        rec["error"] = f"{type(error).__name__}: {error}"
    return rec


def _timed(fn):
    start = time.perf_counter()
    try:
        out, err = fn(), None
    except NumericalDegeneracy as exc:
        out, err = None, exc
    return out, err, time.perf_counter() - start


def run_replication(base, rep, methods=METHODS, cv=None):
    """All requested estimators on one seeded synthetic draw.

    A degrees-of-freedom or degenerate-design failure of one estimator is
    recorded in that estimator's record and does not stop the others.
    """
    seed = rep_seed(base.seed, rep)
    spec = replace(base, seed=seed)
    ds, _, S_star = generate(spec)
    cv = CvConfig(seed=seed) if cv is None else replace(cv, seed=seed)
    cv = replace(cv, sigma0=ds.default_sigma0())
    methods = set(methods)
    out = []

    def emit(method, fn):
        est, err, wall = _timed(fn)
        out.append(_record(base, rep, method, est, wall, err))
        return est

    if "OR" in methods:
        emit("OR", lambda: oracle_sigma(ds, S_star))
    for fam, cv_name, ls_name in ((CvMethod.SC, "SC_CV", "SC_LS"),
                                  (CvMethod.LASSO, "L_CV", "L_LS")):
        if not methods & {cv_name, ls_name}:
            continue
        start = time.perf_counter()
        try:
            lam, est = cv_select(ds, cv, fam)
        except NumericalDegeneracy as exc:
            # the CV fit itself is fine; only its sigma formula failed
            est, err = None, exc
        else:
            err = None
        cv_wall = time.perf_counter() - start
        if cv_name in methods:
            out.append(_record(base, rep, cv_name, est, cv_wall, err))
        if ls_name in methods:
            if est is None:
                out.append(_record(base, rep, ls_name, None, cv_wall, err))
            else:
                ls, ls_err, ls_wall = _timed(
                    lambda: ls_refit_sigma(ds, est.support, method=ls_name))
                if ls is not None:
                    ls.lambda_selected = est.lambda_selected
                    ls.converged, ls.gap = est.converged, est.gap
                out.append(_record(base, rep, ls_name, ls, cv_wall + ls_wall,
                                   ls_err))
    if "L_U" in methods:
        emit("L_U", lambda: universal_lasso_sigma(ds, eps=cv.eps))
    if "RCV" in methods:
        emit("RCV", lambda: rcv_sigma(ds, cv, seed))
    if "D2" in methods:
        emit("D2", lambda: dicker_sigma(ds))
    if "SZ" in methods:
        emit("SZ", lambda: sz_sigma(ds, cv))
    order = {m: i for i, m in enumerate(METHODS)}
    return sorted(out, key=lambda r: order[r["method"]])


def _run_one(args):
    return run_replication(*args)


def sigma_bench(base, reps=50, methods=METHODS, jobs=None, cv=None):
    """Run ``reps`` replications, in parallel when ``jobs > 1``.

    Records come back ordered by (rep, method) whatever the job count.
    """
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown methods: {sorted(unknown)}")
    if jobs is None:
        jobs = os.cpu_count() or 1
    tasks = [(base, rep, tuple(methods), cv) for rep in range(reps)]
    if jobs <= 1 or reps <= 1:
        results = map(_run_one, tasks)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, tasks))
    return [rec for batch in results for rec in batch]


def screen_bench(ds, eps_list=(1e-4, 1e-6, 1e-8), modes=tuple(Screening),
                 sigma0=None, spec=PathSpec()):
    """Full-path wall time for each screening mode and tolerance.

    Each record carries per-lam sweeps, convergence flags and the final
    fraction of discarded features.
    """
    sigma0 = ds.default_sigma0() if sigma0 is None else sigma0
    records = []
    for eps in eps_list:
        for mode in modes:
            mode = Screening(mode)
            cfg = SolverConfig(None, sigma0, eps=eps, screening=mode)
            path = fit_path(ds, cfg, spec)
            records.append({
                "mode": mode.value, "eps": eps, "wall_time": path.wall_time,
                "n_lambdas": len(path.fits),
                "n_converged": sum(f.converged for f in path.fits),
                "sweeps": [f.sweeps for f in path.fits],
                "presolve_sweeps": path.presolve_sweeps,
                "converged": [f.converged for f in path.fits],
                "screened_fraction": [
                    f.screened_fraction_trace[-1][1]
                    if f.screened_fraction_trace else 0.0
                    for f in path.fits],
            })
    return records


def default_grid(ds, sigma0=None, spec=PathSpec()):
    sigma0 = ds.default_sigma0() if sigma0 is None else sigma0
    return spec.grid(lambda_max(ds, sigma0))


__all__ = ["METHODS", "default_grid", "rep_seed", "run_replication",
           "screen_bench", "sigma_bench"]
