"""
Search over model configurations (lag orders and variable partition) for the
criterion minimizer: exhaustive enumeration plus GA, tabu search, GRASP, scatter
search and a GRASP/tabu hybrid, all scored on a common effective sample.
"""

import math
import sys
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.components.candidate_evaluation import DEFAULT_PREFER, parallel_evaluate
from src.components.metaheuristics import (
    GRASP,
    GeneticAlgorithm,
    HybridSearch,
    Move,
    Outcome,
    ScatterSearch,
    SearchProblem,
    SearchStopped,
    SearchTracker,
    TabuSearch,
)
from src.components.model_validation import validate_config
from src.exception.exception import (
    CustomException,
    EmptySpaceError,
    NoFeasibleCandidateError,
    SearchError,
    TooLargeError,
)
from src.logging.logger import logger
from src.models.search_types import (
    EngineResult,
    GAParams,
    GraspParams,
    HybridParams,
    PartitionMode,
    ScatterParams,
    SearchBudget,
    SearchMethod,
    SearchResult,
    SearchSpace,
    TabuParams,
)
from src.models.var_types import CriterionKind, ModelConfig, TimeSeriesDataset


def switchable_columns(space: SearchSpace, ds: TimeSeriesDataset) -> Tuple[int, ...]:
    if space.partition_mode is PartitionMode.FIXED:
        return ()
    columns = tuple(range(ds.m)) if space.switchable is None else space.switchable
    for i in columns:
        if not 0 <= i < ds.m:
            raise ValueError(f"switchable column {i} outside dataset with {ds.m} columns")
    return columns


def _masks(space: SearchSpace, ds: TimeSeriesDataset) -> List[Tuple[bool, ...]]:
    base = ds.default_mask
    columns = switchable_columns(space, ds)
    masks = set()
    for bits in product((False, True), repeat=len(columns)):
        mask = list(base)
        for column, bit in zip(columns, bits):
            mask[column] = bit
        masks.add(tuple(mask))
    return sorted(masks, key=lambda m: ModelConfig(1, 0, m).mask_int)


def enumerate_with_skips(space: SearchSpace, ds: TimeSeriesDataset) -> Tuple[List[ModelConfig], int]:
    """Valid configs in (p, q, mask-integer) order and the number of invalid ones skipped."""
    valid: List[ModelConfig] = []
    skipped = 0
    masks = _masks(space, ds)
    for p in range(1, space.p_max + 1):
        for q in range(0, space.q_max + 1):
            for mask in masks:
                cfg = ModelConfig(p, q, mask, space.include_constant)
                if validate_config(cfg, ds, space.common_row_start).ok:
                    valid.append(cfg)
                else:
                    skipped += 1
    return valid, skipped


def enumerate_space(space: SearchSpace, ds: TimeSeriesDataset) -> List[ModelConfig]:
    """
    All valid configurations of the space, ordered by p, then q, then the mask read
    as a binary integer.

    Raises:
        EmptySpaceError: If no configuration survives validation.
    """
    valid, skipped = enumerate_with_skips(space, ds)
    if skipped:
        logger.info(f"skipped {skipped} invalid configurations while enumerating the search space")
    if not valid:
        raise EmptySpaceError(f"no valid configuration in search space {space.to_dict()}")
    return valid


class ConfigSearchProblem(SearchProblem[ModelConfig]):
    """
    Genome (p, q, switchable mask bits) over the enumerated valid configurations.
    Ties are broken by parameter count, then enumeration order.
    """

    def __init__(self, ds: TimeSeriesDataset, space: SearchSpace, kind: CriterionKind,
                 workers: int = 1, prefer: str = DEFAULT_PREFER):
        self.ds = ds
        self.space = space
        self.kind = CriterionKind(kind)
        self.workers = workers
        self.prefer = prefer
        self.valid, self.skipped = enumerate_with_skips(space, ds)
        if not self.valid:
            raise EmptySpaceError(f"no valid configuration in search space {space.to_dict()}")
        if self.skipped:
            logger.info(f"skipped {self.skipped} invalid configurations while enumerating the search space")
        self.order: Dict[ModelConfig, int] = {cfg: i for i, cfg in enumerate(self.valid)}
        self.size = len(self.valid)
        self.columns = switchable_columns(space, ds)
        self.common_row_start = space.common_row_start

    @property
    def genome_length(self) -> int:
        return 2 + len(self.columns)

    def key(self, sol: ModelConfig) -> ModelConfig:
        return sol

    def is_feasible(self, sol: ModelConfig) -> bool:
        return sol in self.order

    def tie_key(self, sol: ModelConfig) -> Tuple:
        return (sol.n * sol.n_regressors, self.order.get(sol, self.size))

    def describe(self, sol: ModelConfig) -> dict:
        return sol.to_dict()

    def random_solution(self, rng: np.random.Generator) -> ModelConfig:
        return self.valid[int(rng.integers(self.size))]

    def sample_distinct(self, rng: np.random.Generator, k: int) -> List[ModelConfig]:
        picks = rng.choice(self.size, size=min(k, self.size), replace=False)
        sample = [self.valid[int(i)] for i in picks]
        sample.extend(self.random_solution(rng) for _ in range(k - len(sample)))
        return sample

    def _with(self, cfg: ModelConfig, p: Optional[int] = None, q: Optional[int] = None,
              flips: Sequence[int] = ()) -> ModelConfig:
        mask = list(cfg.dependent_mask)
        for column in flips:
            mask[column] = not mask[column]
        return ModelConfig(cfg.p if p is None else p, cfg.q if q is None else q, tuple(mask), cfg.include_constant)

    def _step(self, value: int, low: int, high: int, rng: np.random.Generator) -> int:
        return min(max(value + (1 if rng.random() < 0.5 else -1), low), high)

    def mutate(self, sol: ModelConfig, rng: np.random.Generator, rate: float) -> ModelConfig:
        p, q = sol.p, sol.q
        if rng.random() < rate:
            p = self._step(p, 1, self.space.p_max, rng)
        if rng.random() < rate:
            q = self._step(q, 0, self.space.q_max, rng)
        flips = [c for c in self.columns if rng.random() < rate]
        child = self._with(sol, p, q, flips)
        return child if self.is_feasible(child) else sol

    def crossover(self, a: ModelConfig, b: ModelConfig, rng: np.random.Generator) -> ModelConfig:
        p = a.p if rng.random() < 0.5 else b.p
        q = a.q if rng.random() < 0.5 else b.q
        mask = list(a.dependent_mask)
        for column in self.columns:
            mask[column] = a.dependent_mask[column] if rng.random() < 0.5 else b.dependent_mask[column]
        child = ModelConfig(p, q, tuple(mask), a.include_constant)
        return child if self.is_feasible(child) else a

    def neighbors(self, sol: ModelConfig, step: float = 1.0) -> List[Tuple[Move, ModelConfig]]:
        moves: List[Tuple[Move, ModelConfig]] = []
        for p in (sol.p - 1, sol.p + 1):
            moves.append((Move(("p", p), ("p", sol.p)), self._with(sol, p=p)))
        for q in (sol.q - 1, sol.q + 1):
            moves.append((Move(("q", q), ("q", sol.q)), self._with(sol, q=q)))
        for column in self.columns:
            moves.append((Move(("bit", column), ("bit", column)), self._with(sol, flips=(column,))))
        return [(m, cfg) for m, cfg in moves if self.is_feasible(cfg)]

    def _dimension_options(self, cfg: ModelConfig, dimension) -> List[ModelConfig]:
        if dimension == "p":
            options = [self._with(cfg, p=p) for p in range(1, self.space.p_max + 1)]
        elif dimension == "q":
            options = [self._with(cfg, q=q) for q in range(0, self.space.q_max + 1)]
        else:
            options = [cfg, self._with(cfg, flips=(dimension,))]
        unique = list(dict.fromkeys(options))
        return sorted((o for o in unique if self.is_feasible(o)), key=self.order.__getitem__)

    def construct(self, rng: np.random.Generator, alpha: float,
                  evaluate: Callable[[List[ModelConfig]], List[float]]) -> ModelConfig:
        """
        Fix one dimension at a time (p, q, then each switchable bit): score every
        feasible value of that dimension with the others held, keep the best
        ceil(alpha * count) as the restricted candidate list and pick uniformly from it.
        """
        current = ModelConfig(1, 0, self.ds.default_mask, self.space.include_constant)
        dimensions = ["p"] + (["q"] if self.space.q_max > 0 else []) + list(self.columns)
        for dimension in dimensions:
            options = self._dimension_options(current, dimension)
            if not options:
                continue
            values = evaluate(options)
            ranked = sorted(zip(options, values), key=lambda ov: (ov[1],) + self.tie_key(ov[0]))
            rcl_size = max(1, math.ceil(alpha * len(ranked)))
            current = ranked[int(rng.integers(rcl_size))][0]
        if not self.is_feasible(current):
            current = self.random_solution(rng)
        return current

    def combine(self, a: ModelConfig, b: ModelConfig, rng: np.random.Generator) -> ModelConfig:
        mask = list(a.dependent_mask)
        for column in self.columns:
            if a.dependent_mask[column] != b.dependent_mask[column]:
                mask[column] = bool(rng.random() < 0.5)
        child = ModelConfig((a.p + b.p) // 2, (a.q + b.q) // 2, tuple(mask), a.include_constant)
        return child if self.is_feasible(child) else a

    def distance(self, a: ModelConfig, b: ModelConfig) -> float:
        return float((a.p != b.p) + (a.q != b.q)
                     + sum(a.dependent_mask[c] != b.dependent_mask[c] for c in self.columns))

    def evaluate_batch(self, sols: Sequence[ModelConfig]) -> List[Outcome]:
        results = parallel_evaluate(sols, self.ds, self.kind, self.workers, self.common_row_start, self.prefer)
        return [Outcome(r.value, r, r.flag) for r in results]


def _to_search_result(engine: EngineResult, problem: ConfigSearchProblem, method: SearchMethod,
                      budget: SearchBudget) -> SearchResult:
    evaluation = engine.best_payload
    if evaluation is None or evaluation.fit is None:
        raise NoFeasibleCandidateError(
            f"{method.value}: no candidate could be fitted in {engine.evaluations_used} evaluations"
        )
    extras = dict(engine.extras)
    degenerate = [e for e in engine.candidate_log if e["flag"] == "degenerate"]
    if degenerate:
        extras["degenerate_candidates"] = len(degenerate)
    return SearchResult(
        method=method,
        criterion=problem.kind,
        best_config=engine.best_solution,
        best_fit=evaluation.fit,
        best_value=engine.best_value,
        evaluations_used=engine.evaluations_used,
        trajectory=tuple(engine.trajectory),
        candidate_log=tuple(engine.candidate_log),
        space=problem.space,
        budget=budget,
        skipped_invalid=problem.skipped,
        stop_reason=engine.stop_reason,
        extras=extras,
    )


def _evaluate_all(problem: ConfigSearchProblem, tracker: SearchTracker) -> EngineResult:
    try:
        tracker.evaluate(problem.valid)
        reason = "exhausted"
    except SearchStopped as stop:
        reason = stop.reason
    return tracker.result(reason)


def _start(method: SearchMethod, ds, space, kind, budget, workers, prefer):
    problem = ConfigSearchProblem(ds, space, kind, workers, prefer)
    tracker = SearchTracker(problem, budget, method.value)
    logger.info(
        f"{method.value} search over {problem.size} configurations with {CriterionKind(kind).label}, "
        f"budget {budget.max_evaluations}, seed {budget.master_seed}"
    )
    return problem, tracker


def exhaustive_search(ds: TimeSeriesDataset, space: SearchSpace, kind: CriterionKind,
                      budget: SearchBudget, workers: int = 1, prefer: str = DEFAULT_PREFER) -> SearchResult:
    """
    Global minimum over the enumerated space.

    Raises:
        EmptySpaceError: If no configuration is valid.
        TooLargeError: If the space exceeds ``budget.max_evaluations``.
    """
    problem, tracker = _start(SearchMethod.EXHAUSTIVE, ds, space, kind, budget, workers, prefer)
    if problem.size > budget.max_evaluations:
        raise TooLargeError(problem.size, budget.max_evaluations)
    return _to_search_result(_evaluate_all(problem, tracker), problem, SearchMethod.EXHAUSTIVE, budget)


def ga_search(ds: TimeSeriesDataset, space: SearchSpace, kind: CriterionKind, budget: SearchBudget,
              params: GAParams = GAParams(), workers: int = 1, prefer: str = DEFAULT_PREFER) -> SearchResult:
    """Genetic algorithm; a population at least as large as the space degenerates to enumeration."""
    problem, tracker = _start(SearchMethod.GA, ds, space, kind, budget, workers, prefer)
    if params.population_size >= problem.size:
        logger.info("population covers the space; evaluating every configuration")
        engine = _evaluate_all(problem, tracker)
        engine.extras["degenerate"] = "exhaustive"
    else:
        engine = GeneticAlgorithm(problem, tracker, params).run()
    return _to_search_result(engine, problem, SearchMethod.GA, budget)


def tabu_search(ds: TimeSeriesDataset, space: SearchSpace, kind: CriterionKind, budget: SearchBudget,
                params: TabuParams = TabuParams(), workers: int = 1, prefer: str = DEFAULT_PREFER) -> SearchResult:
    """Tabu search over {p +- 1, q +- 1, flip one switchable bit}; ``params.start`` fixes the start."""
    problem, tracker = _start(SearchMethod.TABU, ds, space, kind, budget, workers, prefer)
    engine = TabuSearch(problem, tracker, params.tenure).run(params.start)
    return _to_search_result(engine, problem, SearchMethod.TABU, budget)


def grasp_search(ds: TimeSeriesDataset, space: SearchSpace, kind: CriterionKind, budget: SearchBudget,
                 params: GraspParams = GraspParams(), workers: int = 1,
                 prefer: str = DEFAULT_PREFER) -> SearchResult:
    problem, tracker = _start(SearchMethod.GRASP, ds, space, kind, budget, workers, prefer)
    engine = GRASP(problem, tracker, params).run()
    return _to_search_result(engine, problem, SearchMethod.GRASP, budget)


def scatter_search(ds: TimeSeriesDataset, space: SearchSpace, kind: CriterionKind, budget: SearchBudget,
                   params: ScatterParams = ScatterParams(), workers: int = 1,
                   prefer: str = DEFAULT_PREFER) -> SearchResult:
    """Scatter search; a space smaller than the reference set degenerates to enumeration."""
    problem, tracker = _start(SearchMethod.SCATTER, ds, space, kind, budget, workers, prefer)
    if problem.size < params.ref_set_size:
        logger.info("space is smaller than the reference set; evaluating every configuration")
        engine = _evaluate_all(problem, tracker)
        engine.extras["degenerate"] = "exhaustive"
    else:
        engine = ScatterSearch(problem, tracker, params).run()
    return _to_search_result(engine, problem, SearchMethod.SCATTER, budget)


def hybrid_search(ds: TimeSeriesDataset, space: SearchSpace, kind: CriterionKind, budget: SearchBudget,
                  params: HybridParams = HybridParams(), workers: int = 1,
                  prefer: str = DEFAULT_PREFER) -> SearchResult:
    problem, tracker = _start(SearchMethod.HYBRID, ds, space, kind, budget, workers, prefer)
    engine = HybridSearch(problem, tracker, params).run()
    return _to_search_result(engine, problem, SearchMethod.HYBRID, budget)


def run_search(method: SearchMethod, ds: TimeSeriesDataset, space: SearchSpace, kind: CriterionKind,
               budget: SearchBudget, params=None, workers: int = 1,
               prefer: str = DEFAULT_PREFER) -> SearchResult:
    """
    Dispatch to the search named by ``method``; ``params`` defaults per method.

    Raises:
        ValueError: If the method or its parameters are invalid.
        SearchError: On an unexpected failure during the run.
    """
    try:
        method = SearchMethod(method)
        if method is SearchMethod.EXHAUSTIVE:
            return exhaustive_search(ds, space, kind, budget, workers, prefer)
        drivers = {
            SearchMethod.GA: (ga_search, GAParams),
            SearchMethod.TABU: (tabu_search, TabuParams),
            SearchMethod.GRASP: (grasp_search, GraspParams),
            SearchMethod.SCATTER: (scatter_search, ScatterParams),
            SearchMethod.HYBRID: (hybrid_search, HybridParams),
        }
        driver, params_type = drivers[method]
        return driver(ds, space, kind, budget, params or params_type(), workers, prefer)
    except CustomException:
        raise
    except np.linalg.LinAlgError as e:
        raise SearchError(e, sys) from e
    except ValueError:
        raise
    except Exception as e:
        raise SearchError(e, sys) from e
