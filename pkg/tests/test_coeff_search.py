import math
import statistics

import numpy as np
import pytest

from src.components import coeff_search
from src.components.coeff_search import (
    CoefficientProblem,
    coefficient_fitness,
    compare_with_ols,
    run_coefficient_search,
    search_coefficients,
)
from src.components.design_system import build_regression_system
from src.components.ols_estimator import fit, residual_covariance
from src.components.synthesis import generate
from src.exception.exception import DimensionMismatchError, OptimalityGapError, SearchError
from src.models.search_types import (
    CoefficientGenome,
    CoefficientSearchParams,
    EngineResult,
    SearchBudget,
    SearchMethod,
)
from src.models.var_types import CoefficientSet, CriterionKind, GeneratorSpec, ModelConfig

AR1 = ModelConfig(1, 0, (True,))


def _ar1(seed: int, T: int = 200):
    coeffs = CoefficientSet(A=(np.array([[0.6]]),), C=np.array([[1.0]]))
    return generate(GeneratorSpec(coeffs, noise_scale=1.0, T=T, burn_in=100, seed=seed))


def test_ga_approaches_ols_on_ar1():
    gaps = []
    for seed in range(10):
        budget = SearchBudget(max_evaluations=5000, stagnation_limit=10 ** 6, master_seed=seed)
        report = compare_with_ols(_ar1(seed), AR1, CriterionKind.AIC, SearchMethod.GA, budget)
        assert report.gap >= -1e-9
        assert not report.degenerate
        gaps.append(report.gap)
    assert statistics.median(gaps) <= 0.05


@pytest.mark.parametrize("method", [m for m in SearchMethod if m is not SearchMethod.EXHAUSTIVE])
def test_search_never_beats_ols(method):
    ds = _ar1(3)
    budget = SearchBudget(max_evaluations=300, stagnation_limit=10 ** 6, master_seed=1)
    report = compare_with_ols(ds, AR1, CriterionKind.BIC, method, budget)
    assert report.gap >= -1e-9
    assert report.evaluations_used <= 300
    assert set(report.per_criterion) == {"AIC", "BIC", "HQC"}
    for entry in report.per_criterion.values():
        assert entry["gap"] >= -1e-9
    assert report.coefficient_distance == pytest.approx(
        np.linalg.norm(report.search_coefficients.flatten() - report.ols_coefficients.flatten()))


def test_warm_start_matches_ols_exactly():
    ds = _ar1(4)
    budget = SearchBudget(max_evaluations=200, master_seed=0)
    report = compare_with_ols(ds, AR1, CriterionKind.AIC, SearchMethod.GA, budget,
                              coeff_params=CoefficientSearchParams(include_ols=True))
    assert report.gap == pytest.approx(0.0, abs=1e-9)


def test_noiseless_data_is_degenerate(ramp_dataset):
    budget = SearchBudget(max_evaluations=100, master_seed=0)
    report = compare_with_ols(ramp_dataset, AR1, CriterionKind.AIC, SearchMethod.GA, budget,
                              coeff_params=CoefficientSearchParams(include_ols=True))
    assert report.ols_value == -math.inf
    assert report.search_value == -math.inf
    assert report.gap == 0.0
    assert report.degenerate


def test_beating_ols_raises(monkeypatch):
    ds = _ar1(5)
    theta = fit(ds, AR1).coefficients.flatten().ravel()

    def fake_search(*args, **kwargs):
        engine = EngineResult(best_solution=theta, best_value=-1e6, best_payload=None, evaluations_used=1,
                              trajectory=[(1, -1e6)], candidate_log=[], stop_reason="budget")
        return engine, None

    monkeypatch.setattr(coeff_search, "run_coefficient_search", fake_search)
    with pytest.raises(OptimalityGapError) as info:
        compare_with_ols(ds, AR1, CriterionKind.AIC, SearchMethod.GA, SearchBudget(max_evaluations=10))
    assert info.value.gap < 0


def test_fitness_rejects_wrong_length():
    ds = _ar1(6)
    with pytest.raises(DimensionMismatchError):
        coefficient_fitness(ds, CoefficientGenome(AR1, np.zeros(3)), CriterionKind.AIC)


def test_fitness_of_non_finite_coefficients_is_infinite():
    ds = _ar1(6)
    assert coefficient_fitness(ds, CoefficientGenome(AR1, np.array([np.nan, 1.0])), CriterionKind.AIC) == math.inf
    assert coefficient_fitness(ds, CoefficientGenome(AR1, np.array([1e300, 1e300])), CriterionKind.AIC) == math.inf


def test_fitness_equals_ols_criterion():
    ds = _ar1(7)
    result = fit(ds, AR1)
    value = coefficient_fitness(ds, CoefficientGenome(AR1, result.coefficients.flatten()), CriterionKind.HQC)
    assert value == pytest.approx(result.value(CriterionKind.HQC), rel=1e-9)


def test_coefficient_search_is_deterministic():
    ds = _ar1(8)
    budget = SearchBudget(max_evaluations=400, stagnation_limit=10 ** 6, master_seed=42)
    a, _ = run_coefficient_search(ds, AR1, CriterionKind.BIC, SearchMethod.SCATTER, budget)
    b, _ = run_coefficient_search(ds, AR1, CriterionKind.BIC, SearchMethod.SCATTER, budget, workers=4)
    np.testing.assert_array_equal(a.best_solution, b.best_solution)
    assert a.trajectory == b.trajectory
    assert a.evaluations_used == b.evaluations_used


def test_search_coefficients_returns_coefficient_set():
    ds = _ar1(9)
    coeffs, value = search_coefficients(ds, AR1, CriterionKind.AIC, SearchMethod.TABU,
                                        SearchBudget(max_evaluations=200, master_seed=0))
    assert coeffs.p == 1
    assert coeffs.C.shape == (1, 1)
    assert math.isfinite(value)


def test_exhaustive_is_not_a_coefficient_method():
    with pytest.raises(ValueError):
        run_coefficient_search(_ar1(0), AR1, CriterionKind.AIC, SearchMethod.EXHAUSTIVE,
                               SearchBudget(max_evaluations=10))


def test_problem_operators():
    problem = CoefficientProblem(_ar1(1), AR1, CriterionKind.AIC)
    rng = np.random.default_rng(0)
    a = problem.random_solution(rng)
    assert a.shape == (2,)
    assert np.all(np.abs(a) <= problem.radius)
    np.testing.assert_array_equal(problem.combine(a, a, rng), a)
    assert len(problem.neighbors(a)) == 4
    mutated = problem.mutate(a, rng, rate=0.0)
    assert np.count_nonzero(mutated != a) == 1
    assert [s.tolist() for s in problem.initial_solutions()] == [[0.0, 0.0]]


@pytest.mark.parametrize("seed", range(3))
def test_hybrid_spends_remaining_budget_on_tabu_search(seed):
    budget = SearchBudget(max_evaluations=300, master_seed=seed)
    result, _ = run_coefficient_search(_ar1(seed), AR1, CriterionKind.AIC, SearchMethod.HYBRID, budget)
    assert result.extras["phase_budget"] == 90
    assert result.extras["tabu_iterations"] > 0
    assert result.evaluations_used > 90


def test_zero_coefficients_on_ramp(ramp_dataset):
    system = build_regression_system(ramp_dataset, AR1)
    residuals, sigma = residual_covariance(system, np.zeros((2, 1)))
    np.testing.assert_allclose(residuals.ravel(), [2.0, 3.0, 4.0])
    np.testing.assert_allclose(sigma, [[29 / 3]])
    value = coefficient_fitness(ramp_dataset, CoefficientGenome(AR1, np.zeros(2)), CriterionKind.AIC)
    assert value == pytest.approx(math.log(29 / 3) + 2 * 2 / 3, rel=1e-10)


@pytest.mark.parametrize("method", [SearchMethod.GA, SearchMethod.TABU])
def test_budget_of_one_returns_zero_vector_fitness(method):
    ds = _ar1(2)
    zero = coefficient_fitness(ds, CoefficientGenome(AR1, np.zeros(2)), CriterionKind.BIC)
    coeffs, value = search_coefficients(ds, AR1, CriterionKind.BIC, method, SearchBudget(max_evaluations=1))
    assert value == zero
    np.testing.assert_array_equal(coeffs.flatten(), np.zeros((2, 1)))


def test_larger_budget_never_widens_median_gap():
    gaps = {1000: [], 10000: []}
    for seed in range(5):
        ds = _ar1(seed)
        for max_evaluations in gaps:
            budget = SearchBudget(max_evaluations=max_evaluations, stagnation_limit=10 ** 6, master_seed=seed)
            gaps[max_evaluations].append(compare_with_ols(ds, AR1, CriterionKind.AIC, SearchMethod.GA, budget).gap)
        assert gaps[10000][-1] <= gaps[1000][-1]
    assert statistics.median(gaps[10000]) <= statistics.median(gaps[1000])


def test_unexpected_fitness_failure_becomes_search_error(monkeypatch):
    def broken(*args, **kwargs):
        raise RuntimeError("fitness crashed")

    monkeypatch.setattr(coeff_search, "_system_fitness", broken)
    budget = SearchBudget(max_evaluations=10)
    with pytest.raises(SearchError):
        run_coefficient_search(_ar1(0), AR1, CriterionKind.AIC, SearchMethod.GA, budget)
    with pytest.raises(SearchError):
        compare_with_ols(_ar1(0), AR1, CriterionKind.AIC, SearchMethod.GA, budget)
