import math
from typing import List, Tuple

from src.components.metaheuristics.base import SearchProblem, SearchStopped, SearchTracker, best_of
from src.components.metaheuristics.grasp import GRASP
from src.components.metaheuristics.tabu import TabuSearch
from src.models.search_types import EngineResult, GraspParams, HybridParams


# Stop reasons that end the construction phase but leave budget for tabu search.
PHASE_END_REASONS = ("phase", "stagnation", "proposals")


class HybridSearch:
    """
    GRASP construction feeding tabu search. Constructions run until
    ``construction_share`` of the budget is spent, or until a round adds no new
    evaluation; tabu search then continues from the best construction with the
    remaining evaluations and fresh stagnation and proposal counters.
    """

    def __init__(self, problem: SearchProblem, tracker: SearchTracker, params: HybridParams):
        if not 0.0 < params.construction_share < 1.0:
            raise ValueError("construction_share must lie in (0, 1)")
        self.problem = problem
        self.tracker = tracker
        self.params = params
        self.grasp = GRASP(problem, tracker, GraspParams(alpha=params.alpha))
        self.tabu = TabuSearch(problem, tracker, params.tenure)

    def run(self) -> EngineResult:
        constructions: List[Tuple[object, float]] = []
        phase_budget = max(1, math.ceil(self.params.construction_share * self.tracker.budget.max_evaluations))
        self.tracker.phase_limit = phase_budget
        reason = "budget"
        try:
            try:
                round_index = 0
                while True:
                    before = self.tracker.evaluations
                    constructions.append(self.grasp.construct(round_index))
                    round_index += 1
                    if self.tracker.evaluations == before:
                        break
            except SearchStopped as stop:
                if stop.reason not in PHASE_END_REASONS:
                    raise
            self.tracker.phase_limit = None
            self.tracker.reset_progress()
            if constructions:
                sols = [s for s, _ in constructions]
                i = best_of(self.tracker, sols, [v for _, v in constructions])
                start, start_value = constructions[i]
            else:
                start = self.tracker.best_solution
                start_value = self.tracker.best_rank[0]
            if start is None:
                start = self.problem.random_solution(self.tracker.rng(1))
                start_value = self.tracker.evaluate([start])[0]
            self.tabu.search(start, start_value)
            reason = "no_moves"
        except SearchStopped as stop:
            reason = stop.reason
        self.tracker.phase_limit = None
        return self.tracker.result(reason, {
            "construction_values": list(self.grasp.construction_values),
            "phase_budget": phase_budget,
            "tabu_iterations": self.tabu.iterations,
        })
