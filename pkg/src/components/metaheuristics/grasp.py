from typing import List

from src.components.metaheuristics.base import SearchProblem, SearchStopped, SearchTracker, steepest_descent
from src.models.search_types import EngineResult, GraspParams


def construction_stream(round_index: int) -> int:
    """Seed stream of round r's construction; shared with the hybrid search."""
    return 2 * round_index


class GRASP:
    """
    Greedy randomized adaptive search: each round builds a solution by sampling
    from a restricted candidate list of greedy extensions, then improves it by
    steepest descent. The best solution over all rounds is returned.
    """

    def __init__(self, problem: SearchProblem, tracker: SearchTracker, params: GraspParams):
        if not 0.0 < params.alpha <= 1.0:
            raise ValueError("GRASP alpha must lie in (0, 1]")
        self.problem = problem
        self.tracker = tracker
        self.params = params
        self.construction_values: List[float] = []

    def construct(self, round_index: int):
        rng = self.tracker.rng(construction_stream(round_index))
        sol = self.problem.construct(rng, self.params.alpha, self.tracker.evaluate)
        value = self.tracker.evaluate([sol])[0]
        self.construction_values.append(value)
        return sol, value

    def run(self) -> EngineResult:
        round_index = 0
        try:
            while self.params.max_rounds is None or round_index < self.params.max_rounds:
                sol, value = self.construct(round_index)
                steepest_descent(self.problem, self.tracker, sol, value)
                round_index += 1
            reason = "rounds"
        except SearchStopped as stop:
            reason = stop.reason
        return self.tracker.result(reason, {
            "rounds": round_index,
            "construction_values": list(self.construction_values),
        })
