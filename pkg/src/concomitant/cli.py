"""Command-line interface.

Every subcommand except ``gen`` writes JSON lines: a metadata record with
the fully resolved configuration first, then one record per result. Exit
status is 0 on success, 1 on bad input and 2 on numerical degeneracy; in the
last two cases an error record is still written.
"""

import argparse
import os
import sys
from contextlib import contextmanager
from dataclasses import asdict

import numpy as np

from . import __version__
from .bench import METHODS, screen_bench, sigma_bench
from .core import ContractError, Screening, SolverConfig, lambda_max
from .data import DataFormatError, SyntheticSpec, dumps, generate, load_csv, \
    save_csv
from .estimators import CvConfig, NumericalDegeneracy, cv_select, \
    ls_refit_sigma
from .solver import PathSpec, fit, fit_path

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value
    return parse


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None
    if not values or any(not v > 0 for v in values):
        raise argparse.ArgumentTypeError("need positive numbers")
    return values


def _name_list(choices):
    def parse(text):
        names = [v.strip() for v in text.split(",") if v.strip()]
        bad = [v for v in names if v not in choices]
        if bad or not names:
            raise argparse.ArgumentTypeError(
                f"unknown {bad}; choose from {','.join(choices)}")
        return names
    return parse


def build_parser():
    p = _Parser(prog="concomitant",
                description="Smoothed Concomitant Lasso solver and benchmarks")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="draw a synthetic dataset")
    _add_synthetic(g)
    g.add_argument("--out", required=True,
                   help="directory for data.csv and truth.json")

    s = sub.add_parser("solve", help="fit at a single lambda")
    _add_solve(s)
    s.add_argument("--lambda", dest="lam", type=_positive(float),
                   required=True)

    pa = sub.add_parser("path", help="fit a warm-started lambda path")
    _add_solve(pa)
    _add_grid(pa)

    c = sub.add_parser("cv", help="cross-validated noise estimate")
    c.add_argument("--data", required=True)
    c.add_argument("--method", choices=["sc", "lasso"], default="sc")
    c.add_argument("--folds", type=int, default=5)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--sigma0", type=_positive(float))
    c.add_argument("--eps", type=_positive(float), default=1e-4)
    _add_grid(c)
    c.add_argument("--out", default="-")

    b = sub.add_parser("sigma-bench", help="noise estimator comparison")
    _add_synthetic(b)
    b.add_argument("--reps", type=_positive(int), default=50)
    b.add_argument("--methods", type=_name_list(METHODS),
                   default=list(METHODS))
    b.add_argument("--jobs", type=_positive(int), default=os.cpu_count() or 1)
    b.add_argument("--out", default="-")

    sb = sub.add_parser("screen-bench", help="screening wall-time comparison")
    sb.add_argument("--data", required=True)
    sb.add_argument("--eps-list", type=_float_list, default=[1e-4, 1e-6, 1e-8])
    sb.add_argument("--modes", type=_name_list([m.value for m in Screening]),
                    default=[m.value for m in Screening])
    sb.add_argument("--sigma0", type=_positive(float))
    _add_grid(sb)
    sb.add_argument("--out", default="-")
    return p


def _add_synthetic(p):
    p.add_argument("--n", type=_positive(int), default=100)
    p.add_argument("--p", type=_positive(int), default=500)
    p.add_argument("--rho", type=float, default=0.6)
    p.add_argument("--snr", type=_positive(float), default=5.0)
    p.add_argument("--s", type=float, default=0.9)
    p.add_argument("--sigma-star", type=_positive(float), default=1.0)
    p.add_argument("--seed", type=int, default=0)


def _add_solve(p):
    p.add_argument("--data", required=True)
    p.add_argument("--sigma0", type=_positive(float),
                   help="noise floor (default ||y||/sqrt(n) * 1e-2)")
    p.add_argument("--eps", type=_positive(float), default=1e-6)
    p.add_argument("--max-sweeps", type=_positive(int), default=5000)
    p.add_argument("--screening", choices=[m.value for m in Screening],
                   default=Screening.NONE.value)
    p.add_argument("--out", default="-")


def _add_grid(p):
    p.add_argument("--T", type=_positive(int), default=100)
    p.add_argument("--delta", type=_positive(float), default=2.0)


@contextmanager
def _sink(path):
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    with open(path, "w") as fh:
        yield fh


def _emit(fh, record):
    fh.write(dumps(record) + "\n")


def _metadata(args, **resolved):
    # the output path does not affect results
    config = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    config.update(resolved)
    return {"record": "metadata", "command": args.command,
            "version": __version__, "seed": config.get("seed"),
            "config": config}


def _load(path):
    try:
        return load_csv(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _finite(x):
    # JSON has no NaN / inf
    return float(x) if np.isfinite(x) else None


def _fit_record(res, **extra):
    rec = {"record": "fit", "lambda": res.lam, "sigma": res.sigma,
           "gap": _finite(res.gap), "converged": res.converged,
           "sweeps": res.sweeps, "gap_checks": res.gap_checks,
           "support_size": int(res.support.size),
           "support": res.support, "beta": res.beta}
    rec.update(extra)
    return rec


def cmd_gen(args):
    spec = SyntheticSpec(args.n, args.p, args.rho, args.snr, args.s,
                         args.sigma_star, args.seed)
    ds, beta_star, S_star = generate(spec)
    os.makedirs(args.out, exist_ok=True)
    save_csv(ds, os.path.join(args.out, "data.csv"))
    truth = {"spec": asdict(spec), "version": __version__,
             "beta_star": beta_star, "S_star": S_star,
             "sigma_star": spec.sigma_star}
    with open(os.path.join(args.out, "truth.json"), "w") as fh:
        fh.write(dumps(truth) + "\n")


def _solver_config(args, ds, lam=None):
    sigma0 = ds.default_sigma0() if args.sigma0 is None else args.sigma0
    return SolverConfig(lam, sigma0, eps=args.eps,
                        max_sweeps=args.max_sweeps,
                        screening=Screening(args.screening))


def cmd_solve(args, fh):
    ds = _load(args.data)
    cfg = _solver_config(args, ds, args.lam)
    _emit(fh, _metadata(args, sigma0=cfg.sigma0,
                        lambda_max=lambda_max(ds, cfg.sigma0)))
    _emit(fh, _fit_record(fit(ds, cfg)))


def cmd_path(args, fh):
    ds = _load(args.data)
    cfg = _solver_config(args, ds)
    spec = PathSpec(T=args.T, delta=args.delta)
    grid = spec.grid(lambda_max(ds, cfg.sigma0))
    meta = _metadata(args, sigma0=cfg.sigma0)
    meta["grid"] = grid
    _emit(fh, meta)
    path = fit_path(ds, cfg, spec)
    for t, (res, tag) in enumerate(zip(path.fits, path.warm_start)):
        frac = (res.screened_fraction_trace[-1][1]
                if res.screened_fraction_trace else 0.0)
        _emit(fh, _fit_record(res, index=t, warm_start=tag,
                              screened_fraction=frac))
    _emit(fh, {"record": "summary", "wall_time": path.wall_time})


def cmd_cv(args, fh):
    ds = _load(args.data)
    if args.folds < 2 or args.folds > ds.n:
        raise InputError(f"--folds must lie in [2, n={ds.n}]")
    sigma0 = ds.default_sigma0() if args.sigma0 is None else args.sigma0
    cfg = CvConfig(folds=args.folds, grid=PathSpec(T=args.T, delta=args.delta),
                   seed=args.seed, eps=args.eps, sigma0=sigma0)
    _emit(fh, _metadata(args, sigma0=sigma0))
    lam, est = cv_select(ds, cfg, args.method)
    ls = ls_refit_sigma(ds, est.support,
                        method=est.method.replace("_CV", "_LS"))
    _emit(fh, {"record": "cv", "method": est.method, "lambda": lam,
               "sigma_hat": est.sigma, "sigma_ls": ls.sigma,
               "support_size": est.support_size, "support": est.support,
               "converged": est.converged, "gap": est.gap,
               "cv_scores": est.flags["cv_scores"]})


def cmd_sigma_bench(args, fh):
    base = SyntheticSpec(args.n, args.p, args.rho, args.snr, args.s,
                         args.sigma_star, args.seed)
    # jobs changes scheduling only, never the records
    meta = _metadata(args, sz_grid="geometric")
    meta["config"].pop("jobs")
    _emit(fh, meta)
    for rec in sigma_bench(base, args.reps, args.methods, args.jobs):
        _emit(fh, rec)


def cmd_screen_bench(args, fh):
    ds = _load(args.data)
    sigma0 = ds.default_sigma0() if args.sigma0 is None else args.sigma0
    spec = PathSpec(T=args.T, delta=args.delta)
    meta = _metadata(args, sigma0=sigma0)
    meta["grid"] = spec.grid(lambda_max(ds, sigma0))
    _emit(fh, meta)
    for rec in screen_bench(ds, args.eps_list, args.modes, sigma0, spec):
        _emit(fh, rec)


COMMANDS = {"solve": cmd_solve, "path": cmd_path, "cv": cmd_cv,
            "sigma-bench": cmd_sigma_bench,
            "screen-bench": cmd_screen_bench}


def _error_record(kind, exc):
    return {"record": "error", "kind": kind,
            "type": type(exc).__name__, "message": str(exc)}


def _run(args, fh):
    try:
        COMMANDS[args.command](args, fh)
    except NumericalDegeneracy as exc:
        _emit(fh, _error_record("degeneracy", exc))
        return EXIT_DEGENERATE
    except (InputError, DataFormatError, ContractError, ValueError) as exc:
        _emit(fh, _error_record("input", exc))
        return EXIT_INPUT
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            cmd_gen(args)
            return EXIT_OK
        with _sink(args.out) as fh:
            return _run(args, fh)
    except (ValueError, OSError) as exc:
        print(dumps(_error_record("input", exc)))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
