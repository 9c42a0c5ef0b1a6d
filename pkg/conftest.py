import numpy as np
import pytest

from circumradiusfem.Base.Auxiliary import DEFAULT_SEED


@pytest.fixture
def rng() -> np.random.Generator:
    """Generator seeded with the package master seed"""
    return np.random.default_rng(DEFAULT_SEED)
