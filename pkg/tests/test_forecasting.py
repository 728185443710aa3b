import numpy as np
import pytest

from src.components.forecasting import fixed_point, forecast
from src.components.ols_estimator import fit
from src.exception.exception import DimensionMismatchError, MissingExogenousError
from src.models.var_types import ModelConfig


def test_ramp_continues(ramp_dataset):
    result = fit(ramp_dataset, ModelConfig(1, 0, (True,)))
    predictions = forecast(ramp_dataset, result, horizon=3)
    np.testing.assert_allclose(predictions[:, 0], [5.0, 6.0, 7.0], atol=1e-10)


def test_recurrence_with_exogenous_input(make_exog_dataset):
    ds = make_exog_dataset(0)
    cfg = ModelConfig(1, 1, ds.default_mask)
    result = fit(ds, cfg)
    future_z = np.array([[2.0], [-1.0]])
    predictions = forecast(ds, result, horizon=3, future_z=future_z)

    A, B, C = result.coefficients.A[0], result.coefficients.B[0], result.coefficients.C[0]
    y_last, z_last = ds.observations[-1, :2], ds.observations[-1, 2:]
    step1 = y_last @ A + z_last @ B + C
    step2 = step1 @ A + future_z[0] @ B + C
    step3 = step2 @ A + future_z[1] @ B + C
    np.testing.assert_allclose(predictions, [step1, step2, step3], rtol=1e-12, atol=1e-12)


def test_future_exogenous_values_are_required(make_exog_dataset):
    ds = make_exog_dataset(1)
    result = fit(ds, ModelConfig(2, 1, ds.default_mask))
    assert forecast(ds, result, horizon=1).shape == (1, 2)
    with pytest.raises(MissingExogenousError):
        forecast(ds, result, horizon=2)
    with pytest.raises(DimensionMismatchError):
        forecast(ds, result, horizon=4, future_z=np.zeros((2, 1)))


def test_long_horizon_converges_to_mean(make_var2_dataset):
    ds = make_var2_dataset(3, T=500)
    result = fit(ds, ModelConfig(2, 0, (True, True)))
    predictions = forecast(ds, result, horizon=400)
    np.testing.assert_allclose(predictions[-1], fixed_point(result.coefficients), atol=1e-8)


def test_fixed_point_of_known_process(var2_coefficients):
    mu = fixed_point(var2_coefficients)
    A = sum(var2_coefficients.A)
    np.testing.assert_allclose(mu @ A + var2_coefficients.C[0], mu, atol=1e-14)


def test_horizon_must_be_positive(ramp_dataset):
    result = fit(ramp_dataset, ModelConfig(1, 0, (True,)))
    with pytest.raises(ValueError):
        forecast(ramp_dataset, result, horizon=0)
