import numpy as np
import pytest

from weighted_hardy import ProblemParams


@pytest.fixture
def iso1():
    return ProblemParams.isotropic(1, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
