import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("invlab", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("invlab")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
