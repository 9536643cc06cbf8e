import numpy as np
import pytest

from snipe.linalg import orthonormalize


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_basis(rng, n, r):
    return orthonormalize(rng.standard_normal((n, r)))


def two_hot_coefficients(b, r, rng, collide=False):
    """Coefficient block whose columns each hold two adjacent ones.

    Column ``j`` is nonzero at rows ``2i`` and ``2i + 1`` for a random pair
    index ``i``. With ``collide=True`` the first two columns share a pair, so
    the block is rank deficient.
    """
    pairs = rng.choice(b // 2, size=r, replace=False)
    if collide:
        pairs[1] = pairs[0]
    Q = np.zeros((b, r))
    for j, i in enumerate(pairs):
        Q[2 * i, j] = Q[2 * i + 1, j] = 1.0
    return Q
