import numpy as np
import pytest
from hypothesis import strategies as st

from mmeadapt.sft import is_irreducible


def random_irreducible(rng, size, density=0.4):
    """Random 0-1 matrix made irreducible by adding a Hamiltonian cycle."""
    A = (rng.random((size, size)) < density).astype(int)
    perm = rng.permutation(size)
    for a, b in zip(perm, np.roll(perm, -1)):
        A[a, b] = 1
    assert is_irreducible(A)
    return A


@st.composite
def irreducible_matrices(draw, max_size=6):
    size = draw(st.integers(1, max_size))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_irreducible(np.random.default_rng(seed), size)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
