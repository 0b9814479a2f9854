import numpy as np
import pytest

from fluidpricing import MatchingInstance


def random_instance(rng, n, theta=None, hi=10.0):
    """A valid random instance: pooled costs dominate solo costs."""
    solo = rng.uniform(0.5, 2.0, n)
    bump = rng.uniform(0.0, 1.0, (n, n))
    bump = 0.5 * (bump + bump.T)
    pair = np.maximum.outer(solo, solo) + bump
    np.fill_diagonal(pair, solo)
    if theta is None:
        theta = rng.uniform(0.05, 3.0, n)
    return MatchingInstance(
        theta=theta,
        solo_cost=solo,
        pair_cost=pair,
        lambda_lower=np.full(n, 1e-3),
        lambda_upper=np.full(n, hi),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
