from typing import Dict, Hashable, Optional, Tuple

from src.components.metaheuristics.base import SearchProblem, SearchStopped, SearchTracker
from src.models.search_types import EngineResult


class TabuSearch:
    """
    Short-term memory tabu search over the problem's neighbourhood.

    Each step moves to the best admissible neighbour, even when it is worse than the
    current solution. A neighbour is admissible when its move attribute is not tabu,
    or when it beats the best-so-far (aspiration). When every move is tabu and none
    aspires, the move whose tabu status expires first is taken.
    """

    def __init__(self, problem: SearchProblem, tracker: SearchTracker, tenure: int = 7):
        if tenure < 1:
            raise ValueError("tabu tenure must be >= 1")
        self.problem = problem
        self.tracker = tracker
        self.tenure = tenure
        self.iterations = 0

    def search(self, start, start_value: float) -> Tuple[object, float]:
        """Run from ``start`` until the tracker stops the run (SearchStopped propagates)."""
        tabu: Dict[Hashable, int] = {}
        current = start
        while True:
            self.iterations += 1
            it = self.iterations
            moves = self.problem.neighbors(current)
            if not moves:
                return current, start_value
            best_rank_before = self.tracker.best_rank
            candidates = [s for _, s in moves]
            values = self.tracker.evaluate(candidates)

            chosen: Optional[int] = None
            chosen_rank = None
            fallback: Optional[int] = None
            fallback_expiry = None
            for i, ((move, sol), value) in enumerate(zip(moves, values)):
                rank = self.tracker.rank(sol, value)
                expiry = tabu.get(move.attribute, 0)
                is_tabu = expiry > it
                if is_tabu and not rank < best_rank_before:
                    if fallback is None or expiry < fallback_expiry:
                        fallback, fallback_expiry = i, expiry
                    continue
                if chosen is None or rank < chosen_rank:
                    chosen, chosen_rank = i, rank
            if chosen is None:
                chosen = fallback

            move, current = moves[chosen]
            tabu[move.reverse] = it + self.tenure + 1

    def run(self, start=None) -> EngineResult:
        try:
            if start is None:
                start = self.problem.random_solution(self.tracker.rng(0))
            start_value = self.tracker.evaluate([start])[0]
            self.search(start, start_value)
            reason = "no_moves"
        except SearchStopped as stop:
            reason = stop.reason
        return self.tracker.result(reason, {"iterations": self.iterations})
