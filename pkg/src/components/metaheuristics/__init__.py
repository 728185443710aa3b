from src.components.metaheuristics.base import Move, Outcome, SearchProblem, SearchStopped, SearchTracker
from src.components.metaheuristics.genetic import GeneticAlgorithm
from src.components.metaheuristics.grasp import GRASP
from src.components.metaheuristics.hybrid import HybridSearch
from src.components.metaheuristics.scatter import ScatterSearch
from src.components.metaheuristics.tabu import TabuSearch

__all__ = [
    "GRASP",
    "GeneticAlgorithm",
    "HybridSearch",
    "Move",
    "Outcome",
    "ScatterSearch",
    "SearchProblem",
    "SearchStopped",
    "SearchTracker",
    "TabuSearch",
]
