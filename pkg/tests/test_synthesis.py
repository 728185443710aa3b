import math

import numpy as np
import pytest

from src.components.ols_estimator import fit
from src.components.synthesis import (
    companion_matrix,
    companion_spectral_radius,
    generate,
    random_stable_coefficients,
    spectral_radius,
)
from src.exception.exception import DimensionMismatchError, SpectralRadiusConvergenceError, UnstableProcessError
from src.models.var_types import CoefficientSet, GeneratorSpec, ModelConfig, Role


def test_companion_radius_of_scalar_ar2():
    coeffs = CoefficientSet(A=(np.array([[0.5]]), np.array([[0.3]])))
    expected = (0.5 + math.sqrt(0.25 + 1.2)) / 2
    assert companion_spectral_radius(coeffs) == pytest.approx(expected, abs=1e-8)
    np.testing.assert_array_equal(companion_matrix(coeffs), [[0.5, 1.0], [0.3, 0.0]])


def test_companion_radius_matches_eigenvalues(var2_coefficients):
    dense = np.max(np.abs(np.linalg.eigvals(companion_matrix(var2_coefficients))))
    assert spectral_radius(var2_coefficients) == pytest.approx(dense, rel=1e-7)


def test_power_iteration_reports_non_convergence():
    rotation = CoefficientSet(A=(np.array([[0.0, -0.5], [0.5, 0.0]]),))
    with pytest.raises(SpectralRadiusConvergenceError):
        companion_spectral_radius(rotation, tol=0.0, max_iter=50)
    assert spectral_radius(rotation) == pytest.approx(0.5, rel=1e-9)


def test_unstable_process_is_rejected():
    coeffs = CoefficientSet(A=(np.array([[1.0]]),))
    with pytest.raises(UnstableProcessError) as info:
        generate(GeneratorSpec(coeffs, noise_scale=1.0, T=50))
    assert info.value.radius == pytest.approx(1.0)


def test_noiseless_unit_root_is_allowed():
    coeffs = CoefficientSet(A=(np.array([[1.0]]),), C=np.array([[1.0]]))
    ds = generate(GeneratorSpec(coeffs, T=5, burn_in=0))
    np.testing.assert_array_equal(ds.observations[:, 0], [0.0, 1.0, 2.0, 3.0, 4.0])


def test_shape_names_and_roles(var2_coefficients):
    ds = generate(GeneratorSpec(var2_coefficients, noise_scale=1.0, T=300, burn_in=20, seed=1))
    assert ds.observations.shape == (300, 2)
    assert ds.names == ("y1", "y2")
    assert ds.roles == (Role.DEPENDENT, Role.DEPENDENT)

    coeffs = CoefficientSet(A=(np.array([[0.5]]),), B=(np.array([[1.0], [2.0]]),))
    ds = generate(GeneratorSpec(coeffs, noise_scale=0.5, exogenous="random_walk", T=40, seed=2,
                                dependent_names=("sales",), independent_names=("price", "ads")))
    assert ds.names == ("sales", "price", "ads")
    assert ds.roles == (Role.DEPENDENT, Role.INDEPENDENT, Role.INDEPENDENT)


def test_burn_in_is_discarded(var2_coefficients):
    full = generate(GeneratorSpec(var2_coefficients, noise_scale=1.0, T=150, burn_in=0, seed=4))
    tail = generate(GeneratorSpec(var2_coefficients, noise_scale=1.0, T=100, burn_in=50, seed=4))
    np.testing.assert_array_equal(full.observations[50:], tail.observations)


def test_exogenous_path_is_independent_of_noise():
    coeffs = CoefficientSet(A=(np.array([[0.3]]),), B=(np.array([[0.8]]),))
    quiet = generate(GeneratorSpec(coeffs, noise_scale=0.1, exogenous="random_walk", T=100, seed=9))
    loud = generate(GeneratorSpec(coeffs, noise_scale=5.0, exogenous="random_walk", T=100, seed=9))
    np.testing.assert_array_equal(quiet.observations[:, 1], loud.observations[:, 1])
    assert not np.array_equal(quiet.observations[:, 0], loud.observations[:, 0])


def test_generation_is_reproducible(var2_coefficients):
    spec = GeneratorSpec(var2_coefficients, noise_scale=1.0, T=200, seed=21)
    np.testing.assert_array_equal(generate(spec).observations, generate(spec).observations)
    other = GeneratorSpec(var2_coefficients, noise_scale=1.0, T=200, seed=22)
    assert not np.array_equal(generate(spec).observations, generate(other).observations)


def test_supplied_exogenous_series():
    coeffs = CoefficientSet(A=(np.array([[0.0]]),), B=(np.array([[2.0]]),))
    z = np.arange(10, dtype=float)
    ds = generate(GeneratorSpec(coeffs, exogenous="supplied", exogenous_series=z, T=10, burn_in=0))
    np.testing.assert_array_equal(ds.observations[1:, 0], 2.0 * z[:-1])
    with pytest.raises(DimensionMismatchError):
        generate(GeneratorSpec(coeffs, exogenous="supplied", exogenous_series=z[:5], T=10, burn_in=0))


def test_exogenous_lags_need_an_exogenous_process():
    coeffs = CoefficientSet(A=(np.array([[0.2]]),), B=(np.array([[1.0]]),))
    with pytest.raises(DimensionMismatchError):
        generate(GeneratorSpec(coeffs, T=10))


def test_bad_spec_values(var2_coefficients):
    with pytest.raises(ValueError):
        generate(GeneratorSpec(var2_coefficients, T=0))
    with pytest.raises(ValueError):
        generate(GeneratorSpec(var2_coefficients, noise_scale=-1.0))
    with pytest.raises(ValueError):
        generate(GeneratorSpec(var2_coefficients, exogenous="brownian"))


@pytest.mark.parametrize("seed", range(10))
def test_random_coefficients_respect_target_radius(seed):
    rng = np.random.default_rng(seed)
    coeffs = random_stable_coefficients(rng, n=3, p=2, d=1, q=2, target_radius=0.7)
    assert spectral_radius(coeffs) <= 0.7 + 1e-6
    assert (coeffs.n, coeffs.p, coeffs.q, coeffs.d) == (3, 2, 2, 1)
    assert coeffs.include_constant


@pytest.mark.parametrize("scale", [0.5, 1.0])
def test_companion_radius_of_scaled_identity(scale):
    coeffs = CoefficientSet(A=(scale * np.eye(2),))
    assert companion_spectral_radius(coeffs) == pytest.approx(scale, abs=1e-8)


def test_forced_initial_values_decay_geometrically():
    coeffs = CoefficientSet(A=(0.5 * np.eye(2),), C=np.zeros((1, 2)))
    ds = generate(GeneratorSpec(coeffs, T=3, burn_in=0, initial_values=np.array([[1.0, 1.0]])))
    np.testing.assert_allclose(ds.observations, [[1.0, 1.0], [0.5, 0.5], [0.25, 0.25]])
    with pytest.raises(DimensionMismatchError):
        generate(GeneratorSpec(coeffs, T=3, burn_in=0, initial_values=np.ones((2, 2))))


def test_coefficient_error_shrinks_with_noise():
    truth = CoefficientSet(
        A=(np.array([[0.4, 0.1], [0.2, 0.3]]), np.array([[-0.2, 0.0], [0.0, 0.15]])),
        B=(np.array([[0.5, -0.4]]),),
        C=np.array([[1.0, 0.5]]),
    )
    cfg = ModelConfig(2, 1, (True, True, False))
    errors = []
    for noise in (0.1, 0.01, 0.001):
        ds = generate(GeneratorSpec(truth, noise_scale=noise, exogenous="random_walk", T=300, burn_in=50, seed=4))
        estimate = fit(ds, cfg).coefficients
        errors.append(float(np.max(np.abs(estimate.flatten() - truth.flatten()))))
    assert errors[0] > errors[1] > errors[2]
