from typing import List

from src.components.metaheuristics.base import SearchProblem, SearchStopped, SearchTracker, best_of
from src.logging.logger import logger
from src.models.search_types import EngineResult, GAParams


class GeneticAlgorithm:
    """
    Generational GA: tournament selection, crossover with probability
    ``crossover_rate``, per-gene mutation and elitism.

    Attributes
        - problem: encoding and operators
        - tracker: evaluation gateway (budget, cache, best-so-far)
        - params: GA parameters
    """

    def __init__(self, problem: SearchProblem, tracker: SearchTracker, params: GAParams):
        if params.population_size < 2:
            raise ValueError("population_size must be >= 2")
        self.problem = problem
        self.tracker = tracker
        self.params = params
        self.mutation_rate = params.mutation_rate or 1.0 / max(problem.genome_length, 1)

    def _tournament(self, population: List, values: List[float], rng) -> object:
        size = min(self.params.tournament_size, len(population))
        picks = rng.choice(len(population), size=size, replace=False)
        contenders = [population[i] for i in picks]
        return contenders[best_of(self.tracker, contenders, [values[i] for i in picks])]

    def _initial_population(self) -> List:
        size = self.params.population_size
        seeded = self.problem.initial_solutions()[:size]
        return seeded + self.problem.sample_distinct(self.tracker.rng(0), size - len(seeded))

    def run(self) -> EngineResult:
        population: List = []
        generation = 0
        try:
            population = self._initial_population()
            values = self.tracker.evaluate(population)
            while True:
                generation += 1
                rng = self.tracker.rng(generation)
                order = sorted(range(len(population)),
                               key=lambda i: self.tracker.rank(population[i], values[i]))
                elite = [population[i] for i in order[:self.params.elitism]]
                elite_values = [values[i] for i in order[:self.params.elitism]]

                children = []
                while len(elite) + len(children) < self.params.population_size:
                    a = self._tournament(population, values, rng)
                    b = self._tournament(population, values, rng)
                    if rng.random() < self.params.crossover_rate:
                        child = self.problem.crossover(a, b, rng)
                    else:
                        child = a
                    children.append(self.problem.mutate(child, rng, self.mutation_rate))

                child_values = self.tracker.evaluate(children)
                population = elite + children
                values = elite_values + child_values
        except SearchStopped as stop:
            logger.debug(f"GA finished at generation {generation}")
            return self.tracker.result(stop.reason, {"generations": generation})
