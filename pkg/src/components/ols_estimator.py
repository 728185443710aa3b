"""Least squares estimation of the VAR system via a column-pivoted QR factorization."""

import sys
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import qr, solve_triangular

from src.components.criteria import evaluate_all
from src.components.design_system import build_regression_system
from src.exception.exception import CustomException, DimensionMismatchError, EstimationError, RankDeficientError
from src.logging.logger import logger
from src.models.var_types import (
    CoefficientSet,
    FitResult,
    ModelConfig,
    RegressionSystem,
    TimeSeriesDataset,
)

RANK_RTOL = 1e-10


def solve_least_squares(system: RegressionSystem) -> np.ndarray:
    """
    argmin_Theta ||X Theta - Y||_F for all equations at once.

    Every equation shares X, so a single factorization X P = Q R serves all columns
    of Y.

    Returns:
        np.ndarray: K x n coefficient matrix.

    Raises:
        RankDeficientError: If a pivoted R diagonal ratio falls below 1e-10.
    """
    X, Y = system.X, system.Y
    rows, K = X.shape
    if rows <= K:
        raise DimensionMismatchError(f"need more rows than columns, got {rows} x {K}")

    Q, R, perm = qr(X, mode="economic", pivoting=True, check_finite=False)
    diag = np.abs(np.diag(R))
    if diag[0] == 0.0:
        raise RankDeficientError(0, K)
    rank = int(np.sum(diag / diag[0] >= RANK_RTOL))
    if rank < K:
        raise RankDeficientError(rank, K)

    z = solve_triangular(R, Q.T @ Y, lower=False, check_finite=False)
    theta = np.empty_like(z)
    theta[perm] = z
    return theta


def unflatten_coefficients(theta: np.ndarray, cfg: ModelConfig, ds: TimeSeriesDataset) -> CoefficientSet:
    """
    Split a K x n matrix (or its row-major flattening) into A_1..A_p, B_1..B_q, C.

    Raises:
        DimensionMismatchError: If the shape does not match the configuration.
    """
    if len(cfg.dependent_mask) != ds.m:
        raise DimensionMismatchError(f"config has {len(cfg.dependent_mask)} flags, dataset has {ds.m} columns")
    n, d, K = cfg.n, cfg.d_used, cfg.n_regressors
    theta = np.asarray(theta, dtype=float)
    if theta.ndim == 1:
        if theta.size != K * n:
            raise DimensionMismatchError(f"flat theta has {theta.size} entries, expected {K * n}")
        theta = theta.reshape(K, n)
    if theta.shape != (K, n):
        raise DimensionMismatchError(f"theta has shape {theta.shape}, expected {(K, n)}")

    A = tuple(theta[(lag - 1) * n:lag * n] for lag in range(1, cfg.p + 1))
    offset = n * cfg.p
    B = tuple(theta[offset + (lag - 1) * d:offset + lag * d] for lag in range(1, cfg.q + 1)) if d else ()
    C = theta[K - 1:K] if cfg.include_constant else None
    return CoefficientSet(A=A, B=B, C=C)


def residual_covariance(system: RegressionSystem, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Residuals E = Y - X Theta and the ML covariance E'E / T'.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.ndim == 1:
        theta = theta.reshape(system.n_regressors, -1)
    if theta.shape != (system.n_regressors, system.Y.shape[1]):
        raise DimensionMismatchError(
            f"theta has shape {theta.shape}, expected {(system.n_regressors, system.Y.shape[1])}"
        )
    residuals = system.Y - system.X @ theta
    sigma = residuals.T @ residuals / system.effective_T
    sigma = 0.5 * (sigma + sigma.T)
    return residuals, sigma


def fit_system(system: RegressionSystem, ds: TimeSeriesDataset) -> FitResult:
    """Fit an already built system."""
    cfg = system.config
    theta = solve_least_squares(system)
    residuals, sigma = residual_covariance(system, theta)
    n_params = cfg.n * cfg.n_regressors
    values = evaluate_all(sigma, n_params, system.effective_T, scale=system.target_scale)
    degenerate = any(np.isneginf(v) for v in values.values())
    if degenerate:
        logger.warning(f"degenerate fit (singular residual covariance) for {cfg.describe(ds.names)}")
    return FitResult(
        config=cfg,
        coefficients=unflatten_coefficients(theta, cfg, ds),
        residuals=residuals,
        sigma=sigma,
        criterion_values=values,
        n_params=n_params,
        effective_T=system.effective_T,
        row_start=system.row_start,
        degenerate=degenerate,
    )


def fit(ds: TimeSeriesDataset, cfg: ModelConfig, row_start: Optional[int] = None) -> FitResult:
    """
    OLS fit of a configuration with all three criteria evaluated.

    Args:
        ds (TimeSeriesDataset): Observed series.
        cfg (ModelConfig): Configuration to fit.
        row_start (int, optional): Common sample start used when comparing configs.

    Raises:
        InvalidConfigError: If the configuration is not valid.
        RankDeficientError: If the design matrix is numerically singular.
        EstimationError: On any other failure of the factorization.
    """
    try:
        system = build_regression_system(ds, cfg, row_start)
        result = fit_system(system, ds)
        logger.debug(f"fitted {cfg.describe(ds.names)}: {({k.label: v for k, v in result.criterion_values.items()})}")
        return result
    except CustomException:
        raise
    except Exception as e:
        raise EstimationError(e, sys) from e
