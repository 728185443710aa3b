"""Construction of the stacked regression system Y ~ X Theta."""

from typing import Optional

import numpy as np

from src.components.model_validation import effective_row_start, require_valid
from src.models.var_types import ModelConfig, RegressionSystem, TimeSeriesDataset


def build_regression_system(ds: TimeSeriesDataset, cfg: ModelConfig,
                            row_start: Optional[int] = None) -> RegressionSystem:
    """
    Build the target and design matrices for a configuration.

    Rows j = r0 .. T-1 with r0 = max(p, q, row_start). Design column blocks are
    y-lags 1..p, then z-lags 1..q, then the constant column; inside a block columns
    follow dataset order restricted by the mask. Rows are copied, not views.

    Raises:
        InvalidConfigError: If the configuration is not valid for the dataset.
    """
    require_valid(cfg, ds, row_start)

    r0 = effective_row_start(cfg, row_start)
    T = ds.T
    dep = ds.observations[:, list(cfg.dependent_indices)]
    ind = ds.observations[:, list(cfg.independent_indices)]

    Y = dep[r0:T].copy()
    blocks = [dep[r0 - lag:T - lag] for lag in range(1, cfg.p + 1)]
    if cfg.d_used:
        blocks.extend(ind[r0 - lag:T - lag] for lag in range(1, cfg.q + 1))
    if cfg.include_constant:
        blocks.append(np.ones((T - r0, 1)))

    X = np.concatenate(blocks, axis=1)
    return RegressionSystem(Y=Y, X=X, config=cfg, row_start=r0)


def design_row(history_y: np.ndarray, history_z: Optional[np.ndarray], cfg: ModelConfig) -> np.ndarray:
    """
    One design row from trailing histories (last row = most recent observation).
    Used by forecasting to extend the system past the sample.
    """
    parts = [history_y[-lag] for lag in range(1, cfg.p + 1)]
    if cfg.d_used:
        parts.extend(history_z[-lag] for lag in range(1, cfg.q + 1))
    if cfg.include_constant:
        parts.append(np.ones(1))
    return np.concatenate(parts)
