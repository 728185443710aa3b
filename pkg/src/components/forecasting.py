from typing import Optional

import numpy as np

from src.components.design_system import design_row
from src.exception.exception import DimensionMismatchError, MissingExogenousError
from src.models.var_types import CoefficientSet, FitResult, TimeSeriesDataset


def forecast(ds: TimeSeriesDataset, fit: FitResult, horizon: int,
             future_z: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Iterate the fitted recurrence past the end of the sample, feeding predictions
    back as lagged values.

    Step h (1-based) needs z up to time T+h-2, so exogenous values beyond the sample
    are required when the config uses exogenous lags and ``horizon`` >= 2; only the
    first ``horizon - 1`` rows of ``future_z`` are read.

    Returns:
        np.ndarray: horizon x n matrix of predictions.

    Raises:
        MissingExogenousError: If future exogenous values are needed but absent.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    cfg = fit.config
    theta = fit.coefficients.flatten()
    y = ds.observations[:, list(cfg.dependent_indices)]
    z = ds.observations[:, list(cfg.independent_indices)] if cfg.d_used else None

    if z is not None and horizon >= 2:
        if future_z is None:
            raise MissingExogenousError(
                f"forecasting {horizon} steps with exogenous lags needs {horizon - 1} future rows of z"
            )
        future_z = np.asarray(future_z, dtype=float).reshape(-1, cfg.d)
        if future_z.shape[0] < horizon - 1:
            raise DimensionMismatchError(f"future_z has {future_z.shape[0]} rows, need {horizon - 1}")
        z = np.vstack([z, future_z[:horizon - 1]])

    predictions = np.zeros((horizon, cfg.n))
    history = y.copy()
    for h in range(horizon):
        z_history = None if z is None else z[:ds.T + h]
        row = design_row(history, z_history, cfg)
        predictions[h] = row @ theta
        history = np.vstack([history, predictions[h]])
    return predictions


def fixed_point(coeffs: CoefficientSet) -> np.ndarray:
    """Mean of a stable model without exogenous input: C (I - sum A_t)^{-1}."""
    n = coeffs.n
    C = coeffs.C if coeffs.C is not None else np.zeros((1, n))
    return np.linalg.solve((np.eye(n) - sum(coeffs.A)).T, C.ravel())
