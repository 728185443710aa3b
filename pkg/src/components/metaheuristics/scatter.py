from itertools import combinations
from typing import Dict, Hashable, List, Set, Tuple

from src.components.metaheuristics.base import SearchProblem, SearchStopped, SearchTracker, steepest_descent
from src.models.search_types import EngineResult, ScatterParams


class ScatterSearch:
    """
    Scatter search with a two-tier reference set: the ``ref_set_size -
    diverse_size`` best solutions plus the ``diverse_size`` solutions farthest
    (max-min distance) from them. Every untried pair is combined and the
    combination improved by steepest descent. When an iteration leaves the
    reference set unchanged, the diverse tier is rebuilt from fresh samples.
    """

    def __init__(self, problem: SearchProblem, tracker: SearchTracker, params: ScatterParams):
        if params.ref_set_size < 4:
            raise ValueError("reference set size must be >= 4")
        if not 0 < params.diverse_size < params.ref_set_size:
            raise ValueError("diverse_size must lie strictly between 0 and ref_set_size")
        self.problem = problem
        self.tracker = tracker
        self.params = params
        self.iterations = 0
        self.rebuilds = 0

    def _improve(self, sols: List) -> List[Tuple[object, float]]:
        values = self.tracker.evaluate(sols)
        return [steepest_descent(self.problem, self.tracker, s, v) for s, v in zip(sols, values)]

    def _unique(self, entries: List[Tuple[object, float]]) -> List[Tuple[object, float]]:
        seen: Set[Hashable] = set()
        unique = []
        for sol, value in entries:
            k = self.problem.key(sol)
            if k not in seen:
                seen.add(k)
                unique.append((sol, value))
        return unique

    def _reference_set(self, entries: List[Tuple[object, float]]) -> List[Tuple[object, float]]:
        entries = sorted(self._unique(entries), key=lambda e: self.tracker.rank(e[0], e[1]))
        n_best = self.params.ref_set_size - self.params.diverse_size
        ref = entries[:n_best]
        rest = entries[n_best:]
        while rest and len(ref) < self.params.ref_set_size:
            spread = [min(self.problem.distance(sol, r) for r, _ in ref) for sol, _ in rest]
            pick = max(range(len(rest)), key=lambda i: (spread[i], -i))
            ref.append(rest.pop(pick))
        return ref

    def run(self) -> EngineResult:
        ref: List[Tuple[object, float]] = []
        try:
            seeded = self.problem.initial_solutions()
            pool = seeded + self.problem.sample_distinct(
                self.tracker.rng(0), max(self.params.pool_size - len(seeded), 0))
            ref = self._reference_set(self._improve(pool))
            tried: Set[Tuple[Hashable, Hashable]] = set()
            while True:
                self.iterations += 1
                rng = self.tracker.rng(self.iterations)
                keys = [self.problem.key(s) for s, _ in ref]
                pairs = [(i, j) for i, j in combinations(range(len(ref)), 2)
                         if (keys[i], keys[j]) not in tried]
                children = []
                for i, j in pairs:
                    tried.add((keys[i], keys[j]))
                    children.append(self.problem.combine(ref[i][0], ref[j][0], rng))
                new_ref = self._reference_set(ref + self._improve(children)) if children else ref
                if [self.problem.key(s) for s, _ in new_ref] == keys:
                    self.rebuilds += 1
                    n_best = self.params.ref_set_size - self.params.diverse_size
                    fresh = self.problem.sample_distinct(rng, self.params.pool_size)
                    new_ref = self._reference_set(ref[:n_best] + self._improve(fresh))
                ref = new_ref
        except SearchStopped as stop:
            reason = stop.reason
        return self.tracker.result(reason, {"iterations": self.iterations, "rebuilds": self.rebuilds})
