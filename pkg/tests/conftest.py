import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def random_params(rng, lo=0.5, hi=2.0):
    """Well-conditioned random parameter triple (magnitudes in [lo, hi])."""
    from mbtop.core import make_params

    mags = rng.uniform(lo, hi, size=3)
    signs = rng.choice([-1.0, 1.0], size=3)
    return make_params(*(mags * signs))
