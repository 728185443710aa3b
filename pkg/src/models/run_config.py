from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Tuple

DEFAULT_SEED = 0

# Fields that change how a run executes or where it writes, never what it computes.
EXECUTION_FIELDS = ("workers", "out", "out_json")


@dataclass(frozen=True)
class RunConfig:
    """
    Everything needed to repeat a CLI run. ``method_params`` holds the operator
    parameters actually used (after config.yaml defaults were applied).
    """
    command: str
    input: Optional[str] = None
    dependent: Tuple[str, ...] = ()
    independent: Tuple[str, ...] = ()
    criterion: Optional[str] = None
    method: Optional[str] = None
    p_max: Optional[int] = None
    q_max: Optional[int] = None
    partition_mode: str = "fixed"
    p: Optional[int] = None
    q: int = 0
    include_constant: bool = True
    max_evaluations: Optional[int] = None
    stagnation_limit: Optional[int] = None
    seed: int = DEFAULT_SEED
    workers: int = 1
    horizon: Optional[int] = None
    future_z: Optional[str] = None
    warm_start: bool = False
    generator: Dict[str, Any] = field(default_factory=dict)
    method_params: Dict[str, Any] = field(default_factory=dict)
    out: Optional[str] = None
    out_json: Optional[str] = None

    def to_dict(self) -> dict:
        """Reproducibility record; execution-only fields are left out."""
        data = asdict(self)
        for name in EXECUTION_FIELDS:
            data.pop(name)
        data["dependent"] = list(self.dependent)
        data["independent"] = list(self.independent)
        return data
