"""
Domain types shared by every component.

Observations are row vectors and coefficients act on the right:

    y(j) = y(j-1) A_1 + ... + y(j-p) A_p + z(j-1) B_1 + ... + z(j-q) B_q + C

so ``A_t`` is n x n, ``B_t`` is d x n and ``C`` is 1 x n. All types are immutable
after construction and safe to share across workers.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from src.exception.exception import DatasetError, DimensionMismatchError

NAME_PATTERN = re.compile(r"^[A-Za-z0-9_]+$")


def _frozen_array(values, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class Role(str, Enum):
    DEPENDENT = "dependent"
    INDEPENDENT = "independent"


class CriterionKind(str, Enum):
    """Information criteria; lower is better."""
    AIC = "aic"
    BIC = "bic"
    HQC = "hqc"

    @property
    def label(self) -> str:
        return self.name


@dataclass(frozen=True, eq=False)
class TimeSeriesDataset:
    """
    Observed multivariate series: T rows in increasing time order, m named columns,
    each with a default role.
    """
    observations: np.ndarray
    names: Tuple[str, ...]
    roles: Tuple[Role, ...]

    def __post_init__(self):
        obs = np.array(self.observations, dtype=float, copy=True)
        if obs.ndim == 1:
            obs = obs.reshape(-1, 1)
        if obs.ndim != 2 or obs.shape[0] < 1 or obs.shape[1] < 1:
            raise DatasetError(f"observations must be a non-empty T x m matrix, got shape {obs.shape}")
        if not np.all(np.isfinite(obs)):
            raise DatasetError("observations contain NaN or infinite values")
        names = tuple(str(n) for n in self.names)
        roles = tuple(Role(r) for r in self.roles)
        if len(names) != obs.shape[1] or len(roles) != obs.shape[1]:
            raise DatasetError(
                f"expected {obs.shape[1]} names and roles, got {len(names)} names and {len(roles)} roles"
            )
        if any(not n for n in names):
            raise DatasetError("column names must be nonempty")
        if len(set(names)) != len(names):
            raise DatasetError(f"column names must be unique: {names}")
        if Role.DEPENDENT not in roles:
            raise DatasetError("at least one column must have role dependent")
        obs.setflags(write=False)
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "roles", roles)

    @property
    def T(self) -> int:
        return int(self.observations.shape[0])

    @property
    def m(self) -> int:
        return int(self.observations.shape[1])

    @property
    def default_mask(self) -> Tuple[bool, ...]:
        return tuple(r is Role.DEPENDENT for r in self.roles)

    def column_index(self, name: str) -> int:
        return self.names.index(name)

    @classmethod
    def from_columns(cls, columns: Dict[str, Sequence[float]],
                     independent: Sequence[str] = ()) -> "TimeSeriesDataset":
        """Build a dataset from named columns; unnamed-role columns are dependent."""
        names = tuple(columns)
        obs = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
        roles = tuple(Role.INDEPENDENT if n in independent else Role.DEPENDENT for n in names)
        return cls(obs, names, roles)


@dataclass(frozen=True)
class ModelConfig:
    """
    A point of the search space. ``dependent_mask[i]`` is True when column i is
    modelled (dependent); False columns are exogenous regressors.
    """
    p: int
    q: int
    dependent_mask: Tuple[bool, ...]
    include_constant: bool = True

    def __post_init__(self):
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "dependent_mask", tuple(bool(b) for b in self.dependent_mask))
        object.__setattr__(self, "include_constant", bool(self.include_constant))

    @property
    def dependent_indices(self) -> Tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.dependent_mask) if b)

    @property
    def independent_indices(self) -> Tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.dependent_mask) if not b)

    @property
    def n(self) -> int:
        return len(self.dependent_indices)

    @property
    def d(self) -> int:
        return len(self.independent_indices)

    @property
    def d_used(self) -> int:
        return self.d if self.q > 0 else 0

    @property
    def c(self) -> int:
        return 1 if self.include_constant else 0

    @property
    def lag_span(self) -> int:
        return max(self.p, self.q)

    @property
    def n_regressors(self) -> int:
        """K, the number of design-matrix columns."""
        return self.n * self.p + self.d_used * self.q + self.c

    @property
    def mask_int(self) -> int:
        """Mask read as a binary integer, column 0 most significant."""
        value = 0
        for bit in self.dependent_mask:
            value = (value << 1) | int(bit)
        return value

    def describe(self, names: Optional[Sequence[str]] = None) -> str:
        if names is None:
            names = [f"x{i}" for i in range(len(self.dependent_mask))]
        dep = ",".join(names[i] for i in self.dependent_indices)
        ind = ",".join(names[i] for i in self.independent_indices)
        const = "yes" if self.include_constant else "no"
        return f"p={self.p} q={self.q} constant={const} dependent=[{dep}] independent=[{ind}]"

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "dependent_mask": list(self.dependent_mask),
            "include_constant": self.include_constant,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        return cls(data["p"], data["q"], tuple(data["dependent_mask"]), data.get("include_constant", True))


@dataclass(frozen=True)
class ValidationVerdict:
    violations: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True, eq=False)
class CoefficientSet:
    """A_1..A_p (n x n), B_1..B_q (d x n) and the optional 1 x n constant C."""
    A: Tuple[np.ndarray, ...]
    B: Tuple[np.ndarray, ...] = ()
    C: Optional[np.ndarray] = None

    def __post_init__(self):
        A = tuple(_frozen_array(a) for a in self.A)
        B = tuple(_frozen_array(b) for b in self.B)
        C = None if self.C is None else _frozen_array(np.reshape(self.C, (1, -1)))
        if not A:
            raise DimensionMismatchError("a coefficient set needs at least one A matrix")
        n = A[0].shape[1]
        for a in A:
            if a.shape != (n, n):
                raise DimensionMismatchError(f"A matrices must be {n}x{n}, got {a.shape}")
        if B:
            d = B[0].shape[0]
            for b in B:
                if b.ndim != 2 or b.shape != (d, n):
                    raise DimensionMismatchError(f"B matrices must be {d}x{n}, got {b.shape}")
        if C is not None and C.shape != (1, n):
            raise DimensionMismatchError(f"C must be 1x{n}, got {C.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def p(self) -> int:
        return len(self.A)

    @property
    def q(self) -> int:
        return len(self.B)

    @property
    def n(self) -> int:
        return int(self.A[0].shape[0])

    @property
    def d(self) -> int:
        return int(self.B[0].shape[0]) if self.B else 0

    @property
    def include_constant(self) -> bool:
        return self.C is not None

    def flatten(self) -> np.ndarray:
        """Stack blocks in design order [A_1..A_p, B_1..B_q, C] into a K x n matrix."""
        blocks = list(self.A) + list(self.B) + ([self.C] if self.C is not None else [])
        return np.vstack(blocks)

    def n_values(self) -> int:
        return int(self.flatten().size)

    def to_dict(self) -> dict:
        return {
            "A": [a.tolist() for a in self.A],
            "B": [b.tolist() for b in self.B],
            "C": None if self.C is None else self.C.tolist(),
        }


@dataclass(frozen=True, eq=False)
class RegressionSystem:
    """Stacked target Y (T' x n) and design X (T' x K) with blocks [y-lags | z-lags | 1]."""
    Y: np.ndarray
    X: np.ndarray
    config: ModelConfig
    row_start: int

    def __post_init__(self):
        object.__setattr__(self, "Y", _frozen_array(self.Y))
        object.__setattr__(self, "X", _frozen_array(self.X))
        if self.Y.shape[0] != self.X.shape[0]:
            raise DimensionMismatchError(f"Y has {self.Y.shape[0]} rows but X has {self.X.shape[0]}")

    @property
    def effective_T(self) -> int:
        return int(self.Y.shape[0])

    @property
    def n_regressors(self) -> int:
        return int(self.X.shape[1])

    @property
    def target_scale(self) -> float:
        """Largest per-equation mean square of Y; reference for singular covariances."""
        return float(np.max(np.mean(self.Y ** 2, axis=0)))


@dataclass(frozen=True, eq=False)
class FitResult:
    config: ModelConfig
    coefficients: CoefficientSet
    residuals: np.ndarray
    sigma: np.ndarray
    criterion_values: Dict[CriterionKind, float]
    n_params: int
    effective_T: int
    row_start: int = 0
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "residuals", _frozen_array(self.residuals))
        object.__setattr__(self, "sigma", _frozen_array(self.sigma))
        object.__setattr__(self, "criterion_values", dict(self.criterion_values))

    def value(self, kind: CriterionKind) -> float:
        return self.criterion_values.get(kind, math.nan)


@dataclass(frozen=True)
class CandidateEvaluation:
    """Outcome of scoring one configuration; failures are captured, never raised."""
    value: float
    fit: Optional[FitResult] = None
    flag: str = "ok"
    message: str = ""

    @property
    def failed(self) -> bool:
        return self.fit is None


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """
    Synthetic VAR process. ``exogenous`` is "none", "random_walk" or "supplied";
    ``exogenous_series`` (burn_in + T rows) is required for "supplied".
    """
    true_coefficients: CoefficientSet
    noise_scale: float = 0.0
    exogenous: str = "none"
    T: int = 500
    burn_in: int = 100
    seed: int = 0
    n_exogenous: int = 0
    exogenous_series: Optional[np.ndarray] = None
    initial_values: Optional[np.ndarray] = None
    dependent_names: Optional[Tuple[str, ...]] = None
    independent_names: Optional[Tuple[str, ...]] = None


@dataclass(frozen=True, eq=False)
class SimulationResult:
    dataset: TimeSeriesDataset
    spec: GeneratorSpec
    spectral_radius: float
    csv_path: Optional[str] = None


@dataclass(frozen=True, eq=False)
class ForecastResult:
    fit: FitResult
    horizon: int
    predictions: np.ndarray
    names: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "predictions", _frozen_array(self.predictions))
