"""Smoothed Concomitant Lasso: joint sparse regression and noise level.

Coordinate descent with duality-gap certificates, safe feature screening
and a suite of baseline noise-level estimators.
"""

__version__ = "0.1.0"

from .core import (
    ContractError,
    Dataset,
    DualPoint,
    PrimalState,
    Screening,
    SolverConfig,
    dual_feasible_point,
    dual_objective,
    duality_gap,
    is_dual_feasible,
    kkt_violation,
    lambda_max,
    lasso_dual,
    lasso_dual_point,
    lasso_gap,
    lasso_lambda_max,
    lasso_primal,
    primal_objective,
    sigma_hat,
    soft_threshold,
)
from .data import (
    DataFormatError,
    SyntheticSpec,
    generate,
    load_csv,
    load_results_json,
    save_csv,
    save_results_json,
)
from .screening import (
    BoundPair,
    SafeSphere,
    bound_safe_screen,
    gap_safe_radius,
    gap_safe_screen,
    lemma4_max,
)
from .solver import (
    FitResult,
    PathResult,
    PathSpec,
    cd_sweep,
    fit,
    fit_path,
    lasso_fit,
    lasso_path,
)
from .estimators import *  # noqa: F401,F403
