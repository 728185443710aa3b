from typing import List, Optional

from src.exception.exception import InvalidConfigError
from src.models.var_types import ModelConfig, TimeSeriesDataset, ValidationVerdict


def effective_row_start(cfg: ModelConfig, row_start: Optional[int] = None) -> int:
    """First usable target row: max(p, q), pushed later by a common sample start."""
    return max(cfg.p, cfg.q, row_start or 0)


def validate_config(cfg: ModelConfig, ds: TimeSeriesDataset,
                    row_start: Optional[int] = None) -> ValidationVerdict:
    """
    Check a configuration against a dataset. Never raises.

    Args:
        cfg (ModelConfig): Candidate configuration.
        ds (TimeSeriesDataset): Dataset the configuration is applied to.
        row_start (int, optional): Common sample start; T' = T - max(p, q, row_start).

    Returns:
        ValidationVerdict: Empty violation list when the config is usable.
    """
    violations: List[str] = []

    if cfg.p < 1:
        violations.append("p must be >= 1")
    if cfg.q < 0:
        violations.append("q must be >= 0")
    if len(cfg.dependent_mask) != ds.m:
        violations.append(f"dependent_mask has {len(cfg.dependent_mask)} flags but dataset has {ds.m} columns")
        return ValidationVerdict(tuple(violations))
    if cfg.n < 1:
        violations.append("dependent_mask must select at least one column")
    if cfg.q > 0 and cfg.d == 0:
        violations.append("q > 0 requires at least one independent column")
    if row_start is not None and row_start < 0:
        violations.append("row_start must be >= 0")

    if not violations:
        start = effective_row_start(cfg, row_start)
        effective_T = ds.T - start
        n_columns = cfg.n_regressors
        if effective_T < n_columns + 1:
            violations.append(
                f"insufficient effective sample: T'={effective_T} rows for {n_columns} design columns"
            )

    return ValidationVerdict(tuple(violations))


def require_valid(cfg: ModelConfig, ds: TimeSeriesDataset, row_start: Optional[int] = None) -> None:
    verdict = validate_config(cfg, ds, row_start)
    if not verdict.ok:
        raise InvalidConfigError(verdict.violations)


def count_parameters(cfg: ModelConfig, ds: TimeSeriesDataset) -> int:
    """
    Number of scalar coefficients, n * (n*p + d*q + c).

    Raises:
        InvalidConfigError: If the configuration is not valid for the dataset.
    """
    require_valid(cfg, ds)
    return cfg.n * cfg.n_regressors
