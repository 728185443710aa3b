"""Synthetic VAR processes with known coefficients, used as ground truth."""

from typing import Optional

import numpy as np

from src.exception.exception import (
    DimensionMismatchError,
    SpectralRadiusConvergenceError,
    UnstableProcessError,
)
from src.logging.logger import logger
from src.models.var_types import CoefficientSet, GeneratorSpec, Role, TimeSeriesDataset
from src.utils.seeding import stream_rng

STABILITY_MARGIN = 0.999
POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000

NOISE_STREAM = 0
EXOGENOUS_STREAM = 1
COEFFICIENT_STREAM = 2


def companion_matrix(coeffs: CoefficientSet) -> np.ndarray:
    """
    (n*p) x (n*p) companion matrix F for row-vector states
    s_j = [y_j, y_{j-1}, ..., y_{j-p+1}], s_j = s_{j-1} F.
    """
    n, p = coeffs.n, coeffs.p
    F = np.zeros((n * p, n * p))
    for lag, A in enumerate(coeffs.A):
        F[lag * n:(lag + 1) * n, :n] = A
    for lag in range(1, p):
        F[(lag - 1) * n:lag * n, lag * n:(lag + 1) * n] = np.eye(n)
    return F


def companion_spectral_radius(coeffs: CoefficientSet, tol: float = POWER_TOL,
                              max_iter: int = POWER_MAX_ITER) -> float:
    """
    Spectral radius of the companion matrix by power iteration.

    Converged when successive growth-ratio estimates differ by less than ``tol``.

    Raises:
        SpectralRadiusConvergenceError: After ``max_iter`` iterations, carrying the last estimate.
    """
    F = companion_matrix(coeffs)
    size = F.shape[0]
    x = 1.0 + np.arange(size, dtype=float) / (size + 1.0)
    x /= np.linalg.norm(x)
    estimate = 0.0
    for iteration in range(1, max_iter + 1):
        y = x @ F
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return 0.0
        if iteration > 1 and abs(norm - estimate) < tol * max(1.0, norm):
            return norm
        estimate = norm
        x = y / norm
    raise SpectralRadiusConvergenceError(estimate, max_iter)


def spectral_radius(coeffs: CoefficientSet) -> float:
    """Power iteration with a dense-eigenvalue fallback for non-convergent cases."""
    try:
        return companion_spectral_radius(coeffs)
    except SpectralRadiusConvergenceError as e:
        logger.warning(f"{e}; falling back to dense eigenvalues")
        return float(np.max(np.abs(np.linalg.eigvals(companion_matrix(coeffs)))))


def random_stable_coefficients(rng: np.random.Generator, n: int, p: int, d: int = 0, q: int = 0,
                               include_constant: bool = True, target_radius: float = 0.8) -> CoefficientSet:
    """
    Random coefficients whose companion spectral radius is at most ``target_radius``.

    Scaling A_t by s**t scales every companion eigenvalue by s, so an oversized draw is
    rescaled exactly rather than redrawn.
    """
    A = [rng.normal(0.0, 0.5 / (n * p) ** 0.5, size=(n, n)) for _ in range(p)]
    radius = spectral_radius(CoefficientSet(A=tuple(A)))
    if radius > target_radius:
        s = target_radius / radius
        A = [a * s ** (lag + 1) for lag, a in enumerate(A)]
    B = tuple(rng.normal(0.0, 0.5, size=(d, n)) for _ in range(q)) if d else ()
    C = rng.normal(0.0, 1.0, size=(1, n)) if include_constant else None
    return CoefficientSet(A=tuple(A), B=B, C=C)


def _exogenous(spec: GeneratorSpec, total: int) -> np.ndarray:
    coeffs = spec.true_coefficients
    if spec.exogenous == "none":
        if coeffs.q:
            raise DimensionMismatchError("coefficients have B blocks but no exogenous process is configured")
        return np.zeros((total, 0))
    if spec.exogenous == "random_walk":
        d = coeffs.d if coeffs.q else spec.n_exogenous
        if coeffs.q and spec.n_exogenous not in (0, d):
            raise DimensionMismatchError(f"n_exogenous={spec.n_exogenous} but B blocks have {d} rows")
        steps = stream_rng(spec.seed, EXOGENOUS_STREAM).standard_normal((total, d))
        return np.cumsum(steps, axis=0)
    if spec.exogenous == "supplied":
        z = np.asarray(spec.exogenous_series, dtype=float)
        if z.ndim == 1:
            z = z.reshape(-1, 1)
        if z.shape[0] != total:
            raise DimensionMismatchError(f"supplied exogenous series needs {total} rows, got {z.shape[0]}")
        if coeffs.q and z.shape[1] != coeffs.d:
            raise DimensionMismatchError(f"supplied exogenous series has {z.shape[1]} columns, B needs {coeffs.d}")
        return z
    raise ValueError(f"unknown exogenous process {spec.exogenous!r}")


def generate(spec: GeneratorSpec, stability_margin: float = STABILITY_MARGIN) -> TimeSeriesDataset:
    """
    Simulate y(j) = sum y(j-t) A_t + sum z(j-t) B_t + C + e_j with i.i.d. Gaussian
    innovations of standard deviation ``noise_scale``.

    The first max(p, q) rows are initial values (zeros unless given); ``burn_in`` rows
    are simulated and discarded before the T returned rows. Innovations and the
    exogenous random walk come from separate seed streams, so changing the noise
    scale leaves the exogenous path untouched.

    Raises:
        UnstableProcessError: If noise is present and the spectral radius reaches the margin.
    """
    coeffs = spec.true_coefficients
    if spec.T < 1:
        raise ValueError("T must be >= 1")
    if spec.noise_scale < 0:
        raise ValueError("noise_scale must be >= 0")
    if spec.noise_scale > 0:
        radius = spectral_radius(coeffs)
        if radius >= stability_margin:
            raise UnstableProcessError(radius, stability_margin)

    n, p, q = coeffs.n, coeffs.p, coeffs.q
    start = max(p, q)
    total = spec.burn_in + spec.T
    if total < start:
        raise ValueError(f"burn_in + T must cover the {start} initial rows")

    z = _exogenous(spec, total)
    y = np.zeros((total, n))
    if spec.initial_values is not None:
        init = np.asarray(spec.initial_values, dtype=float).reshape(-1, n)
        if init.shape[0] != start:
            raise DimensionMismatchError(f"initial_values needs {start} rows, got {init.shape[0]}")
        y[:start] = init
    eps = stream_rng(spec.seed, NOISE_STREAM).standard_normal((total, n)) * spec.noise_scale
    C = coeffs.C[0] if coeffs.C is not None else np.zeros(n)

    for j in range(start, total):
        value = C + eps[j]
        for lag, A in enumerate(coeffs.A, start=1):
            value = value + y[j - lag] @ A
        for lag, B in enumerate(coeffs.B, start=1):
            value = value + z[j - lag] @ B
        y[j] = value

    y_names = spec.dependent_names or tuple(f"y{i + 1}" for i in range(n))
    z_names = spec.independent_names or tuple(f"z{i + 1}" for i in range(z.shape[1]))
    observations = np.hstack([y, z])[spec.burn_in:]
    roles = (Role.DEPENDENT,) * n + (Role.INDEPENDENT,) * z.shape[1]
    logger.debug(f"generated {spec.T} x {observations.shape[1]} series (seed {spec.seed})")
    return TimeSeriesDataset(observations, tuple(y_names) + tuple(z_names), roles)
