"""
Direct metaheuristic minimization of an information criterion over coefficient
space for a fixed configuration, and its comparison against OLS.

For a fixed configuration the penalty is constant, so every criterion ranks
coefficient vectors by ln det(Sigma) and OLS is the global minimizer: the search
can only match it, never beat it.
"""

import math
import sys
import weakref
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from src.components.candidate_evaluation import DEFAULT_PREFER
from src.components.criteria import evaluate_criterion
from src.components.design_system import build_regression_system
from src.components.metaheuristics import (
    GRASP,
    GeneticAlgorithm,
    HybridSearch,
    Move,
    Outcome,
    ScatterSearch,
    SearchProblem,
    SearchTracker,
    TabuSearch,
)
from src.components.ols_estimator import fit, residual_covariance, unflatten_coefficients
from src.exception.exception import CustomException, DimensionMismatchError, OptimalityGapError, SearchError
from src.logging.logger import logger
from src.models.search_types import (
    CoefficientGenome,
    CoefficientSearchParams,
    ComparisonReport,
    EngineResult,
    GAParams,
    GraspParams,
    HybridParams,
    ScatterParams,
    SearchBudget,
    SearchMethod,
    TabuParams,
)
from src.models.var_types import CoefficientSet, CriterionKind, ModelConfig, RegressionSystem, TimeSeriesDataset

GAP_TOLERANCE = 1e-9

_SYSTEMS: "weakref.WeakKeyDictionary[TimeSeriesDataset, Dict[Tuple[ModelConfig, int], RegressionSystem]]" = (
    weakref.WeakKeyDictionary()
)


def cached_system(ds: TimeSeriesDataset, cfg: ModelConfig, row_start: Optional[int] = None) -> RegressionSystem:
    """Regression system built once per (dataset, config, sample start)."""
    start = max(cfg.lag_span, row_start or 0)
    per_dataset = _SYSTEMS.setdefault(ds, {})
    system = per_dataset.get((cfg, start))
    if system is None:
        system = build_regression_system(ds, cfg, start)
        per_dataset[(cfg, start)] = system
    return system


def _system_fitness(system: RegressionSystem, theta: np.ndarray, kind: CriterionKind) -> float:
    if not np.all(np.isfinite(theta)):
        return math.inf
    n = system.Y.shape[1]
    try:
        with np.errstate(over="ignore", invalid="ignore"):
            _, sigma = residual_covariance(system, theta.reshape(system.n_regressors, n))
        return evaluate_criterion(kind, sigma, theta.size, system.effective_T, scale=system.target_scale)
    except CustomException:
        return math.inf


def coefficient_fitness(ds: TimeSeriesDataset, genome: CoefficientGenome, kind: CriterionKind,
                        common_row_start: Optional[int] = None) -> float:
    """
    Criterion value of the residuals Y - X Theta for the genome's coefficients,
    with n_params equal to the genome length. Non-finite coefficients score +inf.

    Raises:
        DimensionMismatchError: If the genome length does not match the configuration.
    """
    system = cached_system(ds, genome.config, common_row_start)
    theta = np.asarray(genome.theta, dtype=float).ravel()
    expected = system.n_regressors * system.Y.shape[1]
    if theta.size != expected:
        raise DimensionMismatchError(f"genome has {theta.size} coefficients, config needs {expected}")
    return _system_fitness(system, theta, CriterionKind(kind))


class CoefficientProblem(SearchProblem[np.ndarray]):
    """
    Real-vector encoding of the K x n coefficient matrix (row-major).

    Row k of Theta mutates with scale ``mutation_scale * rms(Y) / rms(X[:, k])``,
    shrunk per mutation by a random factor 10**(-u), u ~ U(0, scale_decades), so the
    same operator both explores and refines.
    """

    def __init__(self, ds: TimeSeriesDataset, cfg: ModelConfig, kind: CriterionKind,
                 params: CoefficientSearchParams = CoefficientSearchParams(),
                 row_start: Optional[int] = None, workers: int = 1, prefer: str = DEFAULT_PREFER):
        self.ds = ds
        self.cfg = cfg
        self.kind = CriterionKind(kind)
        self.params = params
        self.workers = workers
        self.prefer = prefer
        self.system = cached_system(ds, cfg, row_start)
        self.refine_levels = params.refine_levels

        X, Y = self.system.X, self.system.Y
        self.K, self.n = X.shape[1], Y.shape[1]
        rms_x = np.sqrt(np.mean(X ** 2, axis=0))
        rms_x[rms_x == 0] = 1.0
        rms_y = float(np.max(np.sqrt(np.mean(Y ** 2, axis=0)))) or 1.0
        row_scale = params.mutation_scale * rms_y / rms_x
        self.scales = np.repeat(row_scale, self.n)

        norm_x = float(np.max(np.linalg.norm(X, axis=0))) or 1.0
        norm_y = float(np.max(np.linalg.norm(Y, axis=0))) or 1.0
        self.radius = params.init_radius_factor * norm_y / norm_x
        self._ols: Optional[np.ndarray] = None

    @property
    def genome_length(self) -> int:
        return self.K * self.n

    def key(self, sol: np.ndarray) -> bytes:
        return np.ascontiguousarray(sol, dtype=float).tobytes()

    def describe(self, sol: np.ndarray):
        return None

    def ols_theta(self) -> np.ndarray:
        if self._ols is None:
            self._ols = fit(self.ds, self.cfg, self.system.row_start).coefficients.flatten().ravel()
        return self._ols

    def initial_solutions(self) -> List[np.ndarray]:
        seeds = [np.zeros(self.genome_length)]
        if self.params.include_ols:
            seeds.append(self.ols_theta().copy())
        return seeds

    def random_solution(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-self.radius, self.radius, self.genome_length)

    def mutate(self, sol: np.ndarray, rng: np.random.Generator, rate: float) -> np.ndarray:
        chosen = rng.random(self.genome_length) < rate
        if not chosen.any():
            chosen[int(rng.integers(self.genome_length))] = True
        shrink = 10.0 ** (-rng.uniform(0.0, self.params.scale_decades))
        noise = rng.standard_normal(self.genome_length) * self.scales * shrink
        return sol + np.where(chosen, noise, 0.0)

    def crossover(self, a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        w = rng.random()
        return w * a + (1.0 - w) * b

    def combine(self, a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if np.array_equal(a, b):
            return a.copy()
        return self.crossover(a, b, rng)

    def distance(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.linalg.norm(a - b))

    def neighbors(self, sol: np.ndarray, step: float = 1.0) -> List[Tuple[Move, np.ndarray]]:
        moves = []
        for j in range(self.genome_length):
            for sign in (1.0, -1.0):
                neighbor = sol.copy()
                neighbor[j] += sign * self.scales[j] * step
                moves.append((Move(("coord", j), ("coord", j)), neighbor))
        return moves

    def construct(self, rng: np.random.Generator, alpha: float,
                  evaluate: Callable[[List[np.ndarray]], List[float]]) -> np.ndarray:
        """Place coordinates one at a time on a grid over [-r, r], sampling from the RCL."""
        current = np.zeros(self.genome_length)
        grid = np.linspace(-self.radius, self.radius, self.params.construction_trials)
        for j in range(self.genome_length):
            options = []
            for v in grid:
                option = current.copy()
                option[j] = v
                options.append(option)
            values = evaluate(options)
            ranked = sorted(range(len(options)), key=values.__getitem__)
            rcl_size = max(1, math.ceil(alpha * len(ranked)))
            current = options[ranked[int(rng.integers(rcl_size))]]
        return current

    def _fitness(self, theta: np.ndarray) -> float:
        return _system_fitness(self.system, theta, self.kind)

    def evaluate_batch(self, sols: Sequence[np.ndarray]) -> List[Outcome]:
        if self.workers > 1 and len(sols) > 1:
            values = Parallel(n_jobs=min(self.workers, len(sols)), prefer=self.prefer)(
                delayed(self._fitness)(s) for s in sols
            )
        else:
            values = [self._fitness(s) for s in sols]
        return [Outcome(v, None, "degenerate" if v == -math.inf else "ok") for v in values]


def run_coefficient_search(ds: TimeSeriesDataset, cfg: ModelConfig, kind: CriterionKind, method: SearchMethod,
                           budget: SearchBudget, params=None,
                           coeff_params: CoefficientSearchParams = CoefficientSearchParams(),
                           workers: int = 1, prefer: str = DEFAULT_PREFER,
                           row_start: Optional[int] = None) -> Tuple[EngineResult, CoefficientProblem]:
    """Run one engine over the coefficient encoding; returns the raw engine result."""
    try:
        method = SearchMethod(method)
        problem = CoefficientProblem(ds, cfg, kind, coeff_params, row_start, workers, prefer)
        tracker = SearchTracker(problem, budget, f"{method.value}-coefficients")
        logger.info(
            f"coefficient search ({method.value}) for {cfg.describe(ds.names)}: "
            f"{problem.genome_length} coefficients, budget {budget.max_evaluations}, seed {budget.master_seed}"
        )
        if method is SearchMethod.GA:
            engine = GeneticAlgorithm(problem, tracker, params or GAParams()).run()
        elif method is SearchMethod.TABU:
            params = params or TabuParams()
            start = params.start if params.start is not None else problem.initial_solutions()[-1]
            engine = TabuSearch(problem, tracker, params.tenure).run(np.asarray(start, dtype=float))
        elif method is SearchMethod.GRASP:
            engine = GRASP(problem, tracker, params or GraspParams()).run()
        elif method is SearchMethod.SCATTER:
            engine = ScatterSearch(problem, tracker, params or ScatterParams()).run()
        elif method is SearchMethod.HYBRID:
            engine = HybridSearch(problem, tracker, params or HybridParams()).run()
        else:
            raise ValueError(f"coefficient search does not support method {method.value!r}")
        return engine, problem
    except CustomException:
        raise
    except np.linalg.LinAlgError as e:
        raise SearchError(e, sys) from e
    except ValueError:
        raise
    except Exception as e:
        raise SearchError(e, sys) from e


def search_coefficients(ds: TimeSeriesDataset, cfg: ModelConfig, kind: CriterionKind, method: SearchMethod,
                        budget: SearchBudget, params=None,
                        coeff_params: CoefficientSearchParams = CoefficientSearchParams(),
                        workers: int = 1, prefer: str = DEFAULT_PREFER) -> Tuple[CoefficientSet, float]:
    """
    Coefficients minimizing the criterion found by ``method`` and their value.
    The OLS solution is left out of the initial solutions unless
    ``coeff_params.include_ols`` is set.
    """
    engine, _ = run_coefficient_search(ds, cfg, kind, method, budget, params, coeff_params, workers, prefer)
    return unflatten_coefficients(engine.best_solution, cfg, ds), engine.best_value


def _criteria_for(system: RegressionSystem, theta: np.ndarray) -> Dict[str, float]:
    _, sigma = residual_covariance(system, theta.reshape(system.n_regressors, -1))
    values = {}
    for kind in CriterionKind:
        try:
            values[kind.label] = evaluate_criterion(kind, sigma, theta.size, system.effective_T,
                                                    scale=system.target_scale)
        except CustomException:
            continue
    return values


def _gap(search_value: float, ols_value: float) -> Tuple[float, bool]:
    if ols_value == -math.inf:
        return (0.0 if search_value == -math.inf else math.inf), True
    return search_value - ols_value, False


def compare_with_ols(ds: TimeSeriesDataset, cfg: ModelConfig, kind: CriterionKind, method: SearchMethod,
                     budget: SearchBudget, params=None,
                     coeff_params: CoefficientSearchParams = CoefficientSearchParams(),
                     workers: int = 1, prefer: str = DEFAULT_PREFER,
                     row_start: Optional[int] = None) -> ComparisonReport:
    """
    Fit by OLS and by coefficient search on the same sample and report the
    criterion gap and the coefficient distance.

    Raises:
        OptimalityGapError: If the search beats OLS by more than 1e-9.
        SearchError: On an unexpected failure of the fit or the search.
    """
    try:
        kind = CriterionKind(kind)
        method = SearchMethod(method)
        system = cached_system(ds, cfg, row_start)
        ols = fit(ds, cfg, system.row_start)
        ols_theta = ols.coefficients.flatten().ravel()
        ols_value = _system_fitness(system, ols_theta, kind)

        engine, _ = run_coefficient_search(ds, cfg, kind, method, budget, params, coeff_params,
                                           workers, prefer, system.row_start)
        search_theta = np.asarray(engine.best_solution, dtype=float)
        search_value = engine.best_value
        gap, degenerate = _gap(search_value, ols_value)
        if gap < -GAP_TOLERANCE:
            raise OptimalityGapError(gap)

        ols_criteria = _criteria_for(system, ols_theta)
        search_criteria = _criteria_for(system, search_theta)
        per_criterion = {}
        for label in ols_criteria:
            if label in search_criteria:
                entry_gap, _ = _gap(search_criteria[label], ols_criteria[label])
                per_criterion[label] = {
                    "ols": ols_criteria[label],
                    "search": search_criteria[label],
                    "gap": entry_gap,
                }

        logger.info(f"coefficient search gap vs OLS: {gap} ({engine.evaluations_used} evaluations)")
        return ComparisonReport(
            config=cfg,
            criterion=kind,
            method=method,
            ols_value=ols_value,
            search_value=search_value,
            gap=gap,
            coefficient_distance=float(np.linalg.norm(search_theta - ols_theta)),
            evaluations_used=engine.evaluations_used,
            per_criterion=per_criterion,
            ols_coefficients=ols.coefficients,
            search_coefficients=unflatten_coefficients(search_theta, cfg, ds),
            degenerate=degenerate,
            trajectory=tuple(engine.trajectory),
        )
    except CustomException:
        raise
    except np.linalg.LinAlgError as e:
        raise SearchError(e, sys) from e
    except ValueError:
        raise
    except Exception as e:
        raise SearchError(e, sys) from e
