"""
Coefficients and noise level along a lambda path
================================================

Fit the smoothed concomitant Lasso on a synthetic AR(1) design over a
geometric grid of lambdas and watch the noise estimate, the support size
and the duality gap certificate as lambda decreases.
"""

import numpy as np

from concomitant import (PathSpec, Screening, SolverConfig, SyntheticSpec,
                         fit_path, generate, lambda_max)

# %%
# A small instance of the benchmark design: 100 samples, 300 features,
# correlation 0.6 between neighbouring features and 30 true nonzeros.
ds, beta_star, S_star = generate(SyntheticSpec(n=100, p=300, seed=0))
sigma0 = ds.default_sigma0()
print(f"true support {S_star.size}, sigma0 = {sigma0:.4f}")
print(f"lambda_max = {lambda_max(ds, sigma0):.4f}")

# %%
# Solve along 30 lambdas from lambda_max down to lambda_max / 100, warm
# started, with Gap Safe screening.
cfg = SolverConfig(None, sigma0, eps=1e-6, screening=Screening.GAP_SAFE)
path = fit_path(ds, cfg, PathSpec(T=30, delta=2))

print(f"{'lambda':>9} {'sigma':>8} {'|S|':>4} {'gap':>9} {'screened':>9} "
      f"converged")
for res in path.fits[::3]:
    frac = res.screened_fraction_trace[-1][1]
    print(f"{res.lam:9.4f} {res.sigma:8.4f} {res.support.size:4d} "
          f"{res.gap:9.1e} {frac:9.2f} {res.converged}")

# %%
# At large lambda the noise estimate is the response scale. It shrinks as
# features enter, and once the model starts to interpolate it sits on the
# floor sigma0. The concomitant solution is a Lasso solution at
# lambda * sigma_hat, so the path traces out a reparametrized Lasso path.
sigmas = np.array([r.sigma for r in path.fits])
on_floor = np.isclose(sigmas, sigma0)
print(f"sigma at the floor for {on_floor.sum()} of {len(sigmas)} lambdas")

# %%
# Where sigma sits on the floor the problem is a badly conditioned,
# nearly interpolating Lasso and 5000 sweeps may not reach eps.
print(f"{sum(not r.converged for r in path.fits)} lambdas hit the sweep "
      f"budget; path wall time {path.wall_time:.2f}s")
