import numpy as np
import pytest
from hypothesis import strategies as st

from superqubits.grassmann import AlgebraContext, Supernumber, parity_table


def gaussian_ints(n, lo=-3, hi=3):
    return st.lists(st.tuples(st.integers(lo, hi), st.integers(lo, hi)), min_size=n, max_size=n)


@st.composite
def supernumbers(draw, ctx, grade=None):
    """Random supernumber with Gaussian-integer coefficients, optionally homogeneous."""
    coeffs = draw(gaussian_ints(ctx.size))
    arr = np.array([complex(a, b) for a, b in coeffs])
    if grade is not None:
        arr[parity_table(ctx.num_pairs) != grade] = 0
    return Supernumber.from_array(ctx, arr)


@pytest.fixture
def ctx2():
    return AlgebraContext(2)


def random_homogeneous(rng, ctx, rows, cols, grade, lo=-3, hi=3):
    """Supermatrix of definite grade with Gaussian-integer coefficients (exact products)."""
    from superqubits.supermatrix import Supermatrix

    par = parity_table(ctx.num_pairs)
    data = np.zeros((len(rows), len(cols), ctx.size), dtype=complex)
    for i, r in enumerate(rows):
        for j, c in enumerate(cols):
            mask = par == (r + c + grade) % 2
            k = int(mask.sum())
            data[i, j, mask] = rng.integers(lo, hi + 1, k) + 1j * rng.integers(lo, hi + 1, k)
    return Supermatrix(ctx, rows, cols, data, grade)


def random_parities(rng, max_each=2):
    p, q = (int(x) for x in rng.integers(0, max_each + 1, 2))
    if p + q == 0:
        p = 1
    return [0] * p + [1] * q
