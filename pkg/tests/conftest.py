from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def cnormal(rng, size, scale=1.0):
    return scale * (rng.normal(size=size) + 1j * rng.normal(size=size))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
