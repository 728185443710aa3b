import numpy as np
import pytest

from src.components.coeff_search import coefficient_fitness
from src.components.design_system import build_regression_system
from src.components import ols_estimator
from src.components.ols_estimator import fit, residual_covariance, solve_least_squares, unflatten_coefficients
from src.components.synthesis import generate, random_stable_coefficients
from src.exception.exception import DimensionMismatchError, EstimationError, RankDeficientError
from src.models.search_types import CoefficientGenome
from src.models.var_types import CriterionKind, GeneratorSpec, ModelConfig, RegressionSystem, TimeSeriesDataset


def _system(X, Y) -> RegressionSystem:
    return RegressionSystem(Y=np.asarray(Y, float), X=np.asarray(X, float), config=ModelConfig(1, 0, (True,)),
                            row_start=0)


def test_consistent_system_is_solved_exactly():
    theta = solve_least_squares(_system([[1, 1], [2, 1], [3, 1]], [[2], [3], [4]]))
    np.testing.assert_allclose(theta, [[1], [1]], atol=1e-14)


def test_duplicated_column_is_rank_deficient():
    rng = np.random.default_rng(0)
    y = rng.standard_normal(30)
    ds = TimeSeriesDataset.from_columns({"y": y, "z": y}, independent=("z",))
    system = build_regression_system(ds, ModelConfig(1, 1, (True, False)))
    with pytest.raises(RankDeficientError) as info:
        solve_least_squares(system)
    assert info.value.rank == 2
    assert info.value.n_columns == 3


def test_random_design_recovers_coefficients():
    rng = np.random.default_rng(42)
    X = rng.standard_normal((50, 5))
    theta_true = rng.standard_normal((5, 2))
    theta = solve_least_squares(_system(X, X @ theta_true))
    np.testing.assert_allclose(theta, theta_true, rtol=1e-10, atol=1e-10)


def test_unflatten_examples(ramp_dataset):
    coeffs = unflatten_coefficients(np.array([[1.0], [1.0]]), ModelConfig(1, 0, (True,)), ramp_dataset)
    assert coeffs.A[0].tolist() == [[1.0]]
    assert coeffs.C.tolist() == [[1.0]]

    ds = TimeSeriesDataset.from_columns({"y": [1, 2, 3, 4, 5], "z": [0, 1, 0, 1, 0]}, independent=("z",))
    coeffs = unflatten_coefficients(np.array([[0.1], [0.2], [0.3]]), ModelConfig(1, 1, (True, False)), ds)
    assert coeffs.A[0][0, 0] == 0.1
    assert coeffs.B[0][0, 0] == 0.2
    assert coeffs.C[0, 0] == 0.3


def test_unflatten_round_trip_and_mismatch():
    rng = np.random.default_rng(1)
    ds = TimeSeriesDataset.from_columns({"a": rng.random(30), "b": rng.random(30), "c": rng.random(30)},
                                        independent=("c",))
    cfg = ModelConfig(2, 2, ds.default_mask)
    theta = rng.standard_normal((cfg.n_regressors, cfg.n))
    np.testing.assert_array_equal(unflatten_coefficients(theta, cfg, ds).flatten(), theta)
    with pytest.raises(DimensionMismatchError):
        unflatten_coefficients(theta[:-1], cfg, ds)


def test_residual_covariance_arithmetic():
    residuals, sigma = residual_covariance(_system([[1], [1]], [[1], [-1]]), np.array([[0.0]]))
    np.testing.assert_array_equal(residuals, [[1], [-1]])
    np.testing.assert_array_equal(sigma, [[1.0]])


def test_exact_fit_has_zero_covariance(ramp_dataset):
    result = fit(ramp_dataset, ModelConfig(1, 0, (True,)))
    assert result.coefficients.A[0][0, 0] == pytest.approx(1.0, abs=1e-12)
    assert result.coefficients.C[0, 0] == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(result.residuals, 0.0, atol=1e-12)
    assert result.degenerate
    assert result.value(CriterionKind.AIC) == -np.inf


def test_sigma_is_symmetric_psd(make_var2_dataset):
    result = fit(make_var2_dataset(0, T=200), ModelConfig(3, 0, (True, True)))
    np.testing.assert_array_equal(result.sigma, result.sigma.T)
    assert np.all(np.linalg.eigvalsh(result.sigma) >= 0)
    assert result.n_params == 2 * (2 * 3 + 1)
    assert result.effective_T == 197


def test_fit_is_deterministic(make_exog_dataset):
    ds = make_exog_dataset(5)
    cfg = ModelConfig(2, 1, ds.default_mask)
    a, b = fit(ds, cfg), fit(ds, cfg)
    np.testing.assert_array_equal(a.coefficients.flatten(), b.coefficients.flatten())
    np.testing.assert_array_equal(a.sigma, b.sigma)
    assert a.criterion_values == b.criterion_values


@pytest.mark.parametrize("seed", range(20))
def test_noiseless_recovery(seed):
    rng = np.random.default_rng(1000 + seed)
    n = 1 + seed % 3
    p = 1 + (seed // 3) % 3
    q = 1 + seed % 2
    coeffs = random_stable_coefficients(rng, n, p, d=n, q=q, target_radius=0.6)
    ds = generate(GeneratorSpec(coeffs, noise_scale=0.0, exogenous="random_walk", T=500, burn_in=50, seed=seed))
    result = fit(ds, ModelConfig(p, q, ds.default_mask))
    truth = coeffs.flatten()
    error = np.linalg.norm(result.coefficients.flatten() - truth) / np.linalg.norm(truth)
    assert error <= 1e-8


@pytest.mark.parametrize("seed", range(10))
def test_ols_minimizes_log_det(make_var2_dataset, seed):
    ds = make_var2_dataset(seed, T=300)
    cfg = ModelConfig(2, 0, (True, True))
    theta = fit(ds, cfg).coefficients.flatten()
    ols_value = coefficient_fitness(ds, CoefficientGenome(cfg, theta), CriterionKind.AIC)
    rng = np.random.default_rng(seed)
    for _ in range(100):
        perturbed = theta + rng.standard_normal(theta.shape) * 10.0 ** rng.uniform(-6, 0)
        value = coefficient_fitness(ds, CoefficientGenome(cfg, perturbed), CriterionKind.AIC)
        assert value >= ols_value - 1e-9


def test_residual_orthogonality(make_var2_dataset, make_exog_dataset):
    corpus = []
    for seed in range(3):
        ds = make_var2_dataset(seed, T=300)
        corpus += [(ds, ModelConfig(p, 0, (True, True), c)) for p in (1, 2, 4) for c in (True, False)]
        ds = make_exog_dataset(seed)
        corpus += [(ds, ModelConfig(p, q, ds.default_mask)) for p in (1, 3) for q in (1, 2)]
        corpus += [(ds, ModelConfig(2, 1, (True, False, False)))]
    for ds, cfg in corpus:
        system = build_regression_system(ds, cfg)
        result = fit(ds, cfg)
        lhs = np.max(np.abs(system.X.T @ result.residuals))
        assert lhs <= 1e-8 * np.linalg.norm(system.X) * np.linalg.norm(system.Y)


def test_unexpected_factorization_failure_is_wrapped(monkeypatch, ramp_dataset):
    def broken(system):
        raise np.linalg.LinAlgError("factorization failed")

    monkeypatch.setattr(ols_estimator, "solve_least_squares", broken)
    with pytest.raises(EstimationError):
        fit(ramp_dataset, ModelConfig(1, 0, (True,)))
