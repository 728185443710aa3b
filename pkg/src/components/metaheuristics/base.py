"""
Problem interface and bookkeeping shared by all metaheuristic engines.

Engines only talk to a :class:`SearchProblem` (how solutions are sampled, varied and
scored) and a :class:`SearchTracker` (budget, cache, best-so-far, trajectory). The
same engines therefore drive both the discrete configuration search and the
continuous coefficient search.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Dict, Generic, Hashable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from src.logging.logger import logger
from src.models.search_types import EngineResult, SearchBudget
from src.utils.seeding import stream_rng

S = TypeVar("S")

# Upper bound on proposals (cached or new) per allowed evaluation.
PROPOSAL_FACTOR = 50


@dataclass(frozen=True)
class Move:
    """A neighbourhood move: ``attribute`` is checked against the tabu list,
    ``reverse`` is made tabu once the move is taken."""
    attribute: Hashable
    reverse: Hashable


@dataclass(frozen=True)
class Outcome:
    value: float
    payload: Any = None
    flag: str = "ok"


class SearchStopped(Exception):
    """Raised by the tracker when the run must end."""
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class SearchProblem(ABC, Generic[S]):
    #: number of distinct feasible solutions, None when unbounded
    size: Optional[int] = None
    #: how many times continuous local search may halve its step
    refine_levels: int = 0

    @property
    @abstractmethod
    def genome_length(self) -> int: ...

    @abstractmethod
    def key(self, sol: S) -> Hashable: ...

    @abstractmethod
    def random_solution(self, rng: np.random.Generator) -> S: ...

    def sample_distinct(self, rng: np.random.Generator, k: int) -> List[S]:
        return [self.random_solution(rng) for _ in range(k)]

    def initial_solutions(self) -> List[S]:
        return []

    def is_feasible(self, sol: S) -> bool:
        return True

    @abstractmethod
    def mutate(self, sol: S, rng: np.random.Generator, rate: float) -> S: ...

    @abstractmethod
    def crossover(self, a: S, b: S, rng: np.random.Generator) -> S: ...

    @abstractmethod
    def neighbors(self, sol: S, step: float = 1.0) -> List[Tuple[Move, S]]: ...

    @abstractmethod
    def construct(self, rng: np.random.Generator, alpha: float,
                  evaluate: Callable[[List[S]], List[float]]) -> S: ...

    @abstractmethod
    def combine(self, a: S, b: S, rng: np.random.Generator) -> S: ...

    @abstractmethod
    def distance(self, a: S, b: S) -> float: ...

    def tie_key(self, sol: S) -> Tuple:
        return ()

    @abstractmethod
    def evaluate_batch(self, sols: Sequence[S]) -> List[Outcome]: ...

    def describe(self, sol: S) -> Any:
        return str(sol)


class SearchTracker(Generic[S]):
    """
    Evaluation gateway for one run: enforces the budget, serves revisits from a
    cache, keeps the best-so-far under the (value, tie key) order and records the
    trajectory and the per-candidate log.
    """

    def __init__(self, problem: SearchProblem[S], budget: SearchBudget, method: str):
        self.problem = problem
        self.budget = budget
        self.method = method
        self.cache: Dict[Hashable, Outcome] = {}
        self.evaluations = 0
        self.proposals = 0
        self.feasible_seen = 0
        self.since_improvement = 0
        self.phase_limit: Optional[int] = None
        self.max_proposals = budget.max_evaluations * PROPOSAL_FACTOR
        self.best_solution: Optional[S] = None
        self.best_outcome: Optional[Outcome] = None
        self.best_rank: Tuple = (math.inf,)
        self.trajectory: List[Tuple[int, float]] = []
        self.candidate_log: List[Dict[str, Any]] = []

    def rng(self, stream_id: int) -> np.random.Generator:
        return stream_rng(self.budget.master_seed, stream_id)

    def rank(self, sol: S, value: float) -> Tuple:
        return (value,) + tuple(self.problem.tie_key(sol))

    @property
    def remaining(self) -> int:
        limit = self.budget.max_evaluations
        if self.phase_limit is not None:
            limit = min(limit, self.phase_limit)
        return max(limit - self.evaluations, 0)

    def check(self) -> None:
        """Raise SearchStopped when no further evaluation may happen."""
        if self.evaluations >= self.budget.max_evaluations:
            raise SearchStopped("budget")
        if self.phase_limit is not None and self.evaluations >= self.phase_limit:
            raise SearchStopped("phase")
        if self.since_improvement >= self.budget.stagnation_limit:
            raise SearchStopped("stagnation")
        if self.proposals >= self.max_proposals:
            raise SearchStopped("proposals")
        if self.problem.size is not None and self.feasible_seen >= self.problem.size:
            raise SearchStopped("exhausted")

    def reset_progress(self) -> None:
        """Clear the stagnation and proposal counters at the start of a new phase."""
        self.since_improvement = 0
        self.proposals = 0

    def evaluate(self, sols: Sequence[S]) -> List[float]:
        """
        Values of ``sols`` in order. New feasible solutions consume budget and
        count toward stagnation unless they improve the best; a batch
        that does not fit the remaining budget is evaluated up to the limit and the
        run is then stopped.
        """
        self.check()
        sols = list(sols)
        pending: List[S] = []
        pending_keys = set()
        for sol in sols:
            k = self.problem.key(sol)
            if k in self.cache or k in pending_keys:
                continue
            if not self.problem.is_feasible(sol):
                self.cache[k] = Outcome(math.inf, None, "invalid")
                continue
            pending.append(sol)
            pending_keys.add(k)

        truncated = len(pending) > self.remaining
        if truncated:
            pending = pending[:self.remaining]

        if pending:
            outcomes = self.problem.evaluate_batch(pending)
            for sol, outcome in zip(pending, outcomes):
                self._record(sol, outcome)

        values: List[float] = []
        for sol in sols:
            outcome = self.cache.get(self.problem.key(sol))
            if outcome is None:
                break
            values.append(outcome.value)
        self.proposals += len(values)

        if truncated:
            raise SearchStopped("budget" if self.phase_limit is None else "phase")
        return values

    def _record(self, sol: S, outcome: Outcome) -> None:
        value = outcome.value
        if value != value:
            value = math.inf
            outcome = Outcome(value, outcome.payload, "nan")
        self.evaluations += 1
        self.feasible_seen += 1
        self.cache[self.problem.key(sol)] = outcome
        self.candidate_log.append({
            "evaluation": self.evaluations,
            "candidate": self.problem.describe(sol),
            "value": value,
            "flag": outcome.flag,
        })
        rank = self.rank(sol, value)
        if self.best_outcome is None or rank < self.best_rank:
            self.best_solution = sol
            self.best_outcome = outcome
            self.best_rank = rank
            self.trajectory.append((self.evaluations, value))
            self.since_improvement = 0
        else:
            self.since_improvement += 1

    def value_of(self, sol: S) -> float:
        return self.cache[self.problem.key(sol)].value

    def result(self, stop_reason: str, extras: Optional[Dict[str, Any]] = None) -> EngineResult:
        logger.info(
            f"{self.method}: stopped ({stop_reason}) after {self.evaluations} evaluations, "
            f"best value {self.best_rank[0]}"
        )
        return EngineResult(
            best_solution=self.best_solution,
            best_value=self.best_outcome.value if self.best_outcome else math.inf,
            best_payload=self.best_outcome.payload if self.best_outcome else None,
            evaluations_used=self.evaluations,
            trajectory=list(self.trajectory),
            candidate_log=list(self.candidate_log),
            stop_reason=stop_reason,
            extras=dict(extras or {}),
        )


def best_of(tracker: SearchTracker, sols: Sequence, values: Sequence[float]) -> int:
    """Index of the best solution under the tracker's order (first wins on full ties)."""
    ranks = [tracker.rank(s, v) for s, v in zip(sols, values)]
    return min(range(len(ranks)), key=ranks.__getitem__)


def steepest_descent(problem: SearchProblem, tracker: SearchTracker, sol, value: float):
    """
    Move to the best neighbour while it improves. Continuous problems halve their
    step up to ``refine_levels`` times before giving up.
    """
    step = 1.0
    refinements = 0
    current, current_value = sol, value
    while True:
        moves = problem.neighbors(current, step)
        if not moves:
            return current, current_value
        candidates = [s for _, s in moves]
        values = tracker.evaluate(candidates)
        i = best_of(tracker, candidates, values)
        if tracker.rank(candidates[i], values[i]) < tracker.rank(current, current_value):
            current, current_value = candidates[i], values[i]
            continue
        if refinements >= problem.refine_levels:
            return current, current_value
        refinements += 1
        step *= 0.5
