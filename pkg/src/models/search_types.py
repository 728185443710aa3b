"""Types describing searches: spaces, budgets, operator parameters and results."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.models.var_types import CoefficientSet, CriterionKind, FitResult, ModelConfig


class PartitionMode(str, Enum):
    FIXED = "fixed"
    SEARCH = "search"


class SearchMethod(str, Enum):
    EXHAUSTIVE = "exhaustive"
    GA = "ga"
    TABU = "tabu"
    GRASP = "grasp"
    SCATTER = "scatter"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class SearchSpace:
    """
    Lag ranges p in [1, p_max], q in [0, q_max] and the partition choice. In search
    mode only ``switchable`` columns (all columns when None) change role.
    """
    p_max: int
    q_max: int = 0
    partition_mode: PartitionMode = PartitionMode.FIXED
    include_constant: bool = True
    switchable: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "partition_mode", PartitionMode(self.partition_mode))
        if self.switchable is not None:
            object.__setattr__(self, "switchable", tuple(sorted(int(i) for i in self.switchable)))

    @property
    def common_row_start(self) -> int:
        """Every candidate is scored on rows max(p_max, q_max) .. T-1."""
        return max(self.p_max, self.q_max)

    def to_dict(self) -> dict:
        return {
            "p_max": self.p_max,
            "q_max": self.q_max,
            "partition_mode": self.partition_mode.value,
            "include_constant": self.include_constant,
            "switchable": None if self.switchable is None else list(self.switchable),
        }


@dataclass(frozen=True)
class SearchBudget:
    max_evaluations: int = 1000
    stagnation_limit: int = 200
    master_seed: int = 0

    def __post_init__(self):
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be >= 1")
        if self.stagnation_limit < 1:
            raise ValueError("stagnation_limit must be >= 1")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GAParams:
    population_size: int = 20
    tournament_size: int = 2
    crossover_rate: float = 0.9
    mutation_rate: Optional[float] = None  # None -> 1 / genome_length
    elitism: int = 1


@dataclass(frozen=True)
class TabuParams:
    tenure: int = 7
    start: Optional[Any] = None


@dataclass(frozen=True)
class GraspParams:
    alpha: float = 0.3
    max_rounds: Optional[int] = None


@dataclass(frozen=True)
class ScatterParams:
    ref_set_size: int = 10
    diverse_size: int = 5
    pool_size: int = 20


@dataclass(frozen=True)
class HybridParams:
    construction_share: float = 0.3
    alpha: float = 0.3
    tenure: int = 7


@dataclass(frozen=True)
class CoefficientSearchParams:
    mutation_scale: float = 0.1
    scale_decades: float = 4.0
    init_radius_factor: float = 3.0
    construction_trials: int = 9
    refine_levels: int = 12
    include_ols: bool = False


@dataclass
class EngineResult:
    """Problem-agnostic outcome of a metaheuristic run."""
    best_solution: Any
    best_value: float
    best_payload: Any
    evaluations_used: int
    trajectory: List[Tuple[int, float]]
    candidate_log: List[Dict[str, Any]]
    stop_reason: str
    extras: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class SearchResult:
    method: SearchMethod
    criterion: CriterionKind
    best_config: ModelConfig
    best_fit: FitResult
    best_value: float
    evaluations_used: int
    trajectory: Tuple[Tuple[int, float], ...]
    candidate_log: Tuple[Dict[str, Any], ...] = ()
    space: Optional[SearchSpace] = None
    budget: Optional[SearchBudget] = None
    skipped_invalid: int = 0
    stop_reason: str = ""
    extras: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class CoefficientGenome:
    """Candidate coefficients, flattened row-major from the K x n block matrix."""
    config: ModelConfig
    theta: np.ndarray


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    config: ModelConfig
    criterion: CriterionKind
    method: SearchMethod
    ols_value: float
    search_value: float
    gap: float
    coefficient_distance: float
    evaluations_used: int
    per_criterion: Dict[str, Dict[str, float]]
    ols_coefficients: CoefficientSet
    search_coefficients: CoefficientSet
    degenerate: bool = False
    trajectory: Tuple[Tuple[int, float], ...] = ()


@dataclass(frozen=True, eq=False)
class CoefficientSearchResult:
    """Best coefficients found by a coefficient-space search for one configuration."""
    config: ModelConfig
    criterion: CriterionKind
    method: SearchMethod
    coefficients: CoefficientSet
    best_value: float
    evaluations_used: int
    trajectory: Tuple[Tuple[int, float], ...] = ()
    stop_reason: str = ""
