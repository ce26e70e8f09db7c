"""Synthetic regression data and CSV / JSON serialization."""

import csv
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import toeplitz

from .core import Dataset


class DataFormatError(ValueError):
    """Malformed input file; the message names the offending location."""


@dataclass(frozen=True)
class SyntheticSpec:
    """Gaussian AR(1) design with a sparse Laplace signal.

    ``s`` is the fraction of coefficients set to zero and ``snr`` the ratio
    ``beta*^T Sigma beta* / sigma_star**2``.
    """

    n: int = 100
    p: int = 500
    rho: float = 0.6
    snr: float = 5.0
    s: float = 0.9
    sigma_star: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ValueError("n and p must be positive")
        if not 0 <= self.rho < 1:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if not self.snr > 0:
            raise ValueError("snr must be positive")
        if not 0 <= self.s <= 1:
            raise ValueError(f"s must lie in [0, 1], got {self.s}")
        if not self.sigma_star > 0:
            raise ValueError("sigma_star must be positive")

    @property
    def n_zero(self):
        return math.floor(self.s * self.p)


def ar1_covariance(p, rho):
    return toeplitz(rho ** np.arange(p))


def _streams(seed):
    # independent streams for X, beta, zero mask and noise
    children = np.random.SeedSequence(seed).spawn(4)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def ar1_rows(rng, n, p, rho):
    """Rows ~ N(0, Sigma) with ``Sigma_ij = rho**|i-j|`` via AR(1) recursion."""
    Z = rng.standard_normal((n, p))
    X = np.empty((n, p), order="F")
    X[:, 0] = Z[:, 0]
    c = np.sqrt(1 - rho ** 2)
    for j in range(1, p):
        X[:, j] = rho * X[:, j - 1] + c * Z[:, j]
    return X


def generate(spec):
    """Draw ``(Dataset, beta_star, S_star)`` from ``spec``.

    Deterministic for a fixed ``spec.seed``.
    """
    rng_x, rng_beta, rng_mask, rng_noise = _streams(spec.seed)
    X = ar1_rows(rng_x, spec.n, spec.p, spec.rho)
    beta = rng_beta.laplace(0.0, 1.0, spec.p)
    zeroed = rng_mask.choice(spec.p, spec.n_zero, replace=False)
    beta[zeroed] = 0.0
    quad = beta @ ar1_covariance(spec.p, spec.rho) @ beta
    if not quad > 0:
        raise ValueError(
            "signal is identically zero (s too large); cannot reach the snr")
    alpha = np.sqrt(spec.snr * spec.sigma_star ** 2 / quad)
    beta_star = alpha * beta
    eps = rng_noise.standard_normal(spec.n)
    y = X @ beta_star + spec.sigma_star * eps
    return Dataset(X, y), beta_star, np.flatnonzero(beta_star)


def _parse_float(cell, row, col):
    try:
        return float(cell)
    except ValueError:
        raise DataFormatError(
            f"non-numeric cell {cell!r} at row {row}, column {col}") from None


def load_csv(path):
    """Read a CSV whose first column is y and remaining columns are X.

    A header row is detected by a non-numeric first row and skipped.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if rows:
        try:
            [float(c) for c in rows[0]]
        except ValueError:
            rows = rows[1:]
    if not rows:
        raise DataFormatError(f"{path}: no data rows (n = 0)")
    width = len(rows[0])
    if width < 2:
        raise DataFormatError(
            f"{path}: need at least 2 columns (y and one feature)")
    values = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataFormatError(
                f"{path}: row {i} has {len(row)} columns, expected {width}")
        for j, cell in enumerate(row):
            values[i, j] = _parse_float(cell.strip(), i, j)
    return Dataset(values[:, 1:], values[:, 0])


def save_csv(ds, path):
    data = np.column_stack([ds.y, ds.X])
    np.savetxt(path, data, delimiter=",", fmt="%.17g")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if hasattr(obj, "__dataclass_fields__"):
        return asdict(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(record):
    return json.dumps(record, default=_jsonable, allow_nan=False)


def save_results_json(results, path):
    """Write records as JSON lines, one object per line."""
    with open(path, "w") as fh:
        for rec in results:
            fh.write(dumps(rec) + "\n")


def load_results_json(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
