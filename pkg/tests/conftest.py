import numpy as np
import pytest

from src.components.synthesis import generate
from src.models.var_types import CoefficientSet, GeneratorSpec, TimeSeriesDataset

VAR2_A1 = np.array([[0.5, 0.1], [0.0, 0.4]])
VAR2_A2 = np.array([[-0.3, 0.0], [0.1, 0.25]])


@pytest.fixture
def ramp_dataset() -> TimeSeriesDataset:
    """y = 1, 2, 3, 4: fitted exactly by y(j) = y(j-1) + 1."""
    return TimeSeriesDataset.from_columns({"y": [1.0, 2.0, 3.0, 4.0]})


@pytest.fixture
def var2_coefficients() -> CoefficientSet:
    return CoefficientSet(A=(VAR2_A1, VAR2_A2), C=np.array([[0.2, -0.1]]))


@pytest.fixture
def make_var2_dataset(var2_coefficients):
    """Factory of bivariate VAR(2) samples without exogenous input."""
    def _make(seed: int, T: int = 1000, noise: float = 0.5) -> TimeSeriesDataset:
        spec = GeneratorSpec(var2_coefficients, noise_scale=noise, T=T, burn_in=100, seed=seed)
        return generate(spec)
    return _make


@pytest.fixture
def make_exog_dataset():
    """
    Factory of (y1, y2, z1) samples: VAR(2) in y driven by one random-walk input at lag 1.
    """
    coeffs = CoefficientSet(
        A=(np.array([[0.4, 0.1], [0.2, 0.3]]), np.array([[-0.2, 0.0], [0.0, 0.15]])),
        B=(np.array([[0.5, -0.4]]),),
        C=np.array([[1.0, 0.5]]),
    )

    def _make(seed: int, T: int = 200, noise: float = 1.0) -> TimeSeriesDataset:
        spec = GeneratorSpec(coeffs, noise_scale=noise, exogenous="random_walk", T=T, burn_in=50, seed=seed)
        return generate(spec)
    return _make


@pytest.fixture
def write_text(tmp_path):
    """Write text to a file under tmp_path and return its path."""
    def _write(name: str, content: str) -> str:
        path = tmp_path / name
        path.write_text(content)
        return str(path)
    return _write
