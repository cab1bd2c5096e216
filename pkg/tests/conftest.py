"""Shared fixtures for the Hilbert Embedding Lab test suite."""

import numpy as np
import pytest

from core.schemas import GridSpec


@pytest.fixture
def line_grid() -> GridSpec:
    return GridSpec.line(-10.0, 10.0, 2001)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def random_hermitian(rng):
    """Factory for random dense Hermitian matrices."""
    def build(size: int = 4) -> np.ndarray:
        z = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        return 0.5 * (z + z.conj().T)
    return build


@pytest.fixture
def random_unit(rng):
    """Factory for random unit vectors in ℂⁿ."""
    def build(size: int = 4) -> np.ndarray:
        z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        return z / np.linalg.norm(z)
    return build


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("HE_OUT_DIR", "HE_DB_PATH", "HE_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
