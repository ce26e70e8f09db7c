import numpy as np
import pytest

from concomitant import (
    Dataset,
    PathSpec,
    PrimalState,
    Screening,
    SolverConfig,
    SyntheticSpec,
    cd_sweep,
    fit,
    fit_path,
    generate,
    kkt_violation,
    lambda_max,
    lasso_fit,
    lasso_lambda_max,
    primal_objective,
)
import oracles

MODES = list(Screening)


def _setup(n=30, p=60, seed=3, frac=0.3):
    ds, _, _ = generate(SyntheticSpec(n=n, p=p, seed=seed))
    sigma0 = ds.default_sigma0()
    return ds, frac * lambda_max(ds, sigma0), sigma0


def test_cd_sweep_single_coordinate():
    ds = Dataset(np.array([[1.0], [0.0]]), np.array([2.0, 0.0]))
    st = PrimalState(np.zeros(1), 1.0, np.array([2.0, 0.0]), np.array([0]))
    out = cd_sweep(ds, st, lam=0.25, sigma0=1e-3)  # n sigma lam = 0.5
    assert out.beta[0] == 1.5
    np.testing.assert_array_equal(out.residual, [0.5, 0.0])
    assert out.sigma == pytest.approx(0.5 / np.sqrt(2))
    assert st.beta[0] == 0.0  # input untouched


def test_cd_sweep_threshold_dominates():
    ds = Dataset(np.array([[1.0], [0.0]]), np.array([2.0, 0.0]))
    st = PrimalState(np.zeros(1), 1.0, np.array([2.0, 0.0]), np.array([0]))
    out = cd_sweep(ds, st, lam=1.5, sigma0=1e-3)  # threshold 3 > 2
    assert out.beta[0] == 0.0


def test_cd_sweep_objective_nonincreasing():
    ds, lam, sigma0 = _setup()
    st = PrimalState.from_beta(ds, np.zeros(ds.p), sigma0=sigma0)
    prev = primal_objective(ds, st.beta, st.sigma, lam, sigma0)
    for _ in range(50):
        st = cd_sweep(ds, st, lam, sigma0)
        cur = primal_objective(ds, st.beta, st.sigma, lam, sigma0)
        assert cur <= prev + 1e-12
        prev = cur
    np.testing.assert_allclose(st.residual, ds.y - ds.X @ st.beta,
                               atol=1e-10)


@pytest.mark.parametrize("mode", MODES)
def test_fit_above_lambda_max(mode):
    ds, _, sigma0 = _setup()
    res = fit(ds, SolverConfig(lambda_max(ds, sigma0), sigma0,
                               screening=mode))
    assert np.all(res.beta == 0)
    assert res.sigma == pytest.approx(max(sigma0, ds.y_norm / np.sqrt(ds.n)))
    assert res.gap <= 1e-12 and res.gap_checks <= 1 and res.converged


def test_fit_matches_brute_force_tiny():
    rng = np.random.default_rng(17)
    X, y = rng.standard_normal((5, 2)), rng.standard_normal(5)
    ds = Dataset(X, y)
    sigma0 = ds.default_sigma0()
    lam = 0.4 * lambda_max(ds, sigma0)
    b, _, obj = oracles.brute_force_sc(X, y, lam, sigma0)
    res = fit(ds, SolverConfig(lam, sigma0, eps=1e-10, max_sweeps=100000))
    np.testing.assert_allclose(res.beta, b, atol=1e-4)
    val = primal_objective(ds, res.beta, res.sigma, lam, sigma0)
    assert abs(val - obj) <= 1e-8


def test_fit_benchmark_scale_converges():
    # floor is active here; the default sweep budget of 5000 is too small
    ds, lam, sigma0 = _setup(100, 500, 0, 0.1)
    res = fit(ds, SolverConfig(lam, sigma0, eps=1e-6, max_sweeps=500000))
    assert res.converged and res.gap <= 1e-6


@pytest.mark.parametrize("mode", MODES)
def test_fit_certificate_recomputed(mode):
    ds, lam, sigma0 = _setup()
    res = fit(ds, SolverConfig(lam, sigma0, eps=1e-8, screening=mode))
    assert res.converged and res.sigma >= sigma0
    fresh = oracles.gap_from_scratch(ds.X, ds.y, res.beta, lam, sigma0)
    assert fresh <= 1e-8 + 1e-12


def test_fit_reports_nonconvergence():
    ds, lam, sigma0 = _setup(frac=0.05)
    res = fit(ds, SolverConfig(lam, sigma0, eps=1e-14, max_sweeps=20))
    assert not res.converged and res.sweeps == 20 and res.gap > 1e-14


def test_fit_checks_gap_on_schedule():
    ds, lam, sigma0 = _setup()
    res = fit(ds, SolverConfig(lam, sigma0, eps=1e-14, max_sweeps=35,
                               gap_check_every=10))
    assert [s for s, _ in res.gap_trace] == [0, 10, 20, 30, 35]


@pytest.mark.parametrize("mode", [Screening.GAP_SAFE, Screening.GAP_SAFE_PP,
                                  Screening.BOUND_SAFE])
def test_screened_fraction_nondecreasing(mode):
    ds, lam, sigma0 = _setup(frac=0.5)
    res = fit(ds, SolverConfig(lam, sigma0, eps=1e-10, screening=mode))
    fracs = [f for _, f in res.screened_fraction_trace]
    assert fracs and fracs == sorted(fracs)


@pytest.mark.parametrize("mode", [Screening.GAP_SAFE, Screening.BOUND_SAFE])
@pytest.mark.parametrize("frac", [0.8, 0.5, 0.2])
def test_fit_screening_is_safe(mode, frac):
    ds, lam, sigma0 = _setup(frac=frac)
    ref = fit(ds, SolverConfig(lam, sigma0, eps=1e-10, max_sweeps=500000))
    assert ref.converged
    res = fit(ds, SolverConfig(lam, sigma0, eps=1e-10, max_sweeps=500000,
                               screening=mode))
    dropped = np.setdiff1d(np.arange(ds.p), res.active)
    assert np.all(np.abs(ref.beta[dropped]) <= 1e-8)
    np.testing.assert_allclose(res.beta, ref.beta, atol=1e-4)


def test_gap_reaches_each_tolerance_and_kkt_shrinks():
    ds, lam, sigma0 = _setup(20, 50, 1, 0.4)
    violations = []
    for eps in (1e-4, 1e-6, 1e-8):
        res = fit(ds, SolverConfig(lam, sigma0, eps=eps))
        assert res.converged and min(g for _, g in res.gap_trace) <= eps
        st = PrimalState.from_beta(ds, res.beta, sigma0=sigma0)
        violations.append(kkt_violation(ds, st, lam))
    assert violations == sorted(violations, reverse=True)


def test_path_spec_grid():
    grid = PathSpec(T=5, delta=2).grid(3.0)
    assert grid[0] == 3.0 and grid[-1] == pytest.approx(0.03)
    assert np.all(np.diff(grid) < 0)
    assert PathSpec(T=1).grid(2.0).tolist() == [2.0]
    assert PathSpec(lambdas=(3, 2, 1)).T == 3
    for bad in ({"T": 0}, {"delta": 0}, {"lambdas": (1, 2)}):
        with pytest.raises(ValueError):
            PathSpec(**bad)


def test_path_single_point_is_zero():
    ds, _, sigma0 = _setup()
    path = fit_path(ds, SolverConfig(None, sigma0), PathSpec(T=1))
    assert len(path.fits) == 1 and np.all(path.fits[0].beta == 0)
    assert path.warm_start == ["cold"]


def _objective(ds, res, sigma0):
    return primal_objective(ds, res.beta, res.sigma, res.lam, sigma0)


def test_path_modes_agree_and_are_certified():
    ds, _, sigma0 = _setup(20, 50, 2)
    eps = 1e-7
    spec = PathSpec(T=15, delta=1.0)
    paths = {m: fit_path(ds, SolverConfig(None, sigma0, eps=eps,
                                          screening=m), spec)
             for m in MODES}
    base = paths[Screening.NONE]
    for mode, path in paths.items():
        assert len(path.fits) == 15
        assert np.all(np.diff(path.lambdas) < 0)
        for res, ref in zip(path.fits, base.fits):
            assert res.converged
            fresh = oracles.gap_from_scratch(ds.X, ds.y, res.beta, res.lam,
                                             sigma0)
            assert fresh <= eps + 1e-12
            assert abs(_objective(ds, res, sigma0)
                       - _objective(ds, ref, sigma0)) <= 2 * eps
    tags = paths[Screening.GAP_SAFE_PP].warm_start
    assert tags[0] == "cold" and "active-set-presolve" in tags
    assert set(paths[Screening.GAP_SAFE].warm_start[1:]) == {"previous-beta"}


def test_lasso_fit_zero_above_lambda_max():
    ds, _, _ = _setup()
    res = lasso_fit(ds, lasso_lambda_max(ds))
    assert np.all(res.beta == 0) and res.converged


def test_lasso_fit_matches_quasi_newton():
    rng = np.random.default_rng(9)
    X, y = rng.standard_normal((8, 3)), rng.standard_normal(8)
    ds = Dataset(X, y)
    lam = 0.3 * lasso_lambda_max(ds)
    ref = oracles.lasso_split_lbfgs(X, y, lam)
    res = lasso_fit(ds, lam, eps=1e-12, K=100000)
    np.testing.assert_allclose(res.beta, ref, atol=1e-4)


def test_lasso_fit_rejects_bad_lambda():
    ds, _, _ = _setup()
    with pytest.raises(ValueError):
        lasso_fit(ds, 0.0)


def test_concomitant_solution_solves_rescaled_lasso():
    ds, lam, sigma0 = _setup(frac=0.4)
    res = fit(ds, SolverConfig(lam, sigma0, eps=1e-10, max_sweeps=100000))
    assert res.converged and res.sigma > sigma0
    # Lasso optimality at lam * sigma_hat, in the Lasso's own scaling
    st = PrimalState.from_beta(ds, res.beta, sigma=1.0)
    assert kkt_violation(ds, st, lam * res.sigma) / ds.n <= 1e-4
    lasso = lasso_fit(ds, lam * res.sigma, eps=1e-12, K=100000)
    np.testing.assert_allclose(lasso.beta, res.beta, atol=1e-4)
