"""
Information criteria for VAR selection, in their multivariate form:

    criterion = ln det(Sigma) + penalty * n_params / T'

with penalty 2 (AIC), ln T' (BIC) and 2 ln ln T' (HQC), Sigma the ML residual
covariance. Lower is better; a singular Sigma gives -inf.
"""

import math
from typing import Dict, Optional

import numpy as np
from scipy.linalg import LinAlgError, cholesky

from src.exception.exception import DimensionMismatchError, HQCUndefinedError
from src.logging.logger import logger
from src.models.var_types import CriterionKind

SYMMETRY_RTOL = 1e-12
SINGULAR_SCALE_RTOL = 1e-20
SINGULAR_PIVOT_RTOL = 1e-14


def log_det_cov(sigma: np.ndarray, scale: Optional[float] = None) -> float:
    """
    ln det(sigma) via a Cholesky factorization.

    Args:
        sigma (np.ndarray): Symmetric positive semidefinite n x n matrix.
        scale (float, optional): Reference variance of the targets. When given, sigma is
            singular once its smallest squared pivot falls below 1e-20 * scale;
            otherwise the test is relative to the largest squared pivot.

    Returns:
        float: The log-determinant, or -inf for a singular matrix.

    Raises:
        DimensionMismatchError: If sigma is not square, not finite or not symmetric.
    """
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] == 0:
        raise DimensionMismatchError(f"sigma must be a square matrix, got shape {sigma.shape}")
    if not np.all(np.isfinite(sigma)):
        raise DimensionMismatchError("sigma contains non-finite entries")
    magnitude = float(np.max(np.abs(sigma)))
    if np.max(np.abs(sigma - sigma.T)) > SYMMETRY_RTOL * max(magnitude, np.finfo(float).tiny):
        raise DimensionMismatchError("sigma is not symmetric")

    try:
        factor = cholesky(sigma, lower=True, check_finite=False)
    except LinAlgError:
        return -math.inf

    pivots = np.diag(factor) ** 2
    if scale is not None:
        threshold = SINGULAR_SCALE_RTOL * scale
    else:
        threshold = SINGULAR_PIVOT_RTOL * float(np.max(pivots))
    if float(np.min(pivots)) <= threshold:
        return -math.inf
    return float(np.sum(np.log(pivots)))


def penalty(kind: CriterionKind, effective_T: int) -> float:
    """Per-parameter penalty factor before division by T'."""
    kind = CriterionKind(kind)
    if effective_T < 1:
        raise DimensionMismatchError(f"effective_T must be >= 1, got {effective_T}")
    if kind is CriterionKind.AIC:
        return 2.0
    if kind is CriterionKind.BIC:
        return math.log(effective_T)
    if effective_T <= math.e:
        raise HQCUndefinedError(effective_T)
    return 2.0 * math.log(math.log(effective_T))


def evaluate_criterion(kind: CriterionKind, sigma: np.ndarray, n_params: int, effective_T: int,
                       scale: Optional[float] = None, log_det: Optional[float] = None) -> float:
    """
    Criterion value ln det(sigma) + penalty(kind) * n_params / effective_T.

    ``log_det`` may be passed when already computed for the same sigma.
    """
    factor = penalty(kind, effective_T)
    if log_det is None:
        log_det = log_det_cov(sigma, scale)
    if math.isinf(log_det):
        return log_det
    return log_det + factor * n_params / effective_T


def evaluate_all(sigma: np.ndarray, n_params: int, effective_T: int,
                 scale: Optional[float] = None) -> Dict[CriterionKind, float]:
    """All criteria for one covariance; HQC is left out when undefined for a tiny sample."""
    log_det = log_det_cov(sigma, scale)
    values = {}
    for kind in CriterionKind:
        try:
            values[kind] = evaluate_criterion(kind, sigma, n_params, effective_T, log_det=log_det)
        except HQCUndefinedError as e:
            logger.warning(str(e))
    return values
