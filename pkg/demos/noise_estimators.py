"""
Comparing noise level estimators
================================

Run the estimator benchmark for a handful of replications and summarize
each method's estimate of sigma* = 1. The command line tool
``concomitant sigma-bench`` runs the same comparison at full scale.
"""

import numpy as np

from concomitant import SyntheticSpec
from concomitant.bench import METHODS, sigma_bench

# %%
# Five replications of a smaller design keep this quick. Each replication
# draws a fresh dataset from a seed derived from (seed, rep).
base = SyntheticSpec(n=60, p=150, rho=0.6, snr=5.0, s=0.9, seed=1)
records = sigma_bench(base, reps=5, jobs=1)

# %%
# OR uses the true support and is the reference. The CV variants read the
# residual of the penalized fit, the LS variants refit least squares on the
# selected support, and SZ reports the scaled Lasso's own estimate.
print(f"{'method':>7} {'median':>8} {'min':>8} {'max':>8}")
for method in METHODS:
    vals = np.array([r["sigma_hat"] for r in records
                     if r["method"] == method and r["sigma_hat"] is not None])
    if vals.size:
        print(f"{method:>7} {np.median(vals):8.3f} {vals.min():8.3f} "
              f"{vals.max():8.3f}")

# %%
# Failures are part of the output rather than exceptions: a refit whose
# support is as large as n has no degrees of freedom left.
for r in records:
    if "error" in r:
        print(r["rep"], r["method"], r["error"])
