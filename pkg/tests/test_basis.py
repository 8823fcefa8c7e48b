import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from xxzbands.basis import (
    EmptyBasisError,
    TensorBasis,
    enumerate_window_basis,
    from_relative,
    project_antisymmetric,
    to_relative,
)


@st.composite
def ordered_tuples(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    anchor = draw(st.integers(min_value=-50, max_value=50))
    gaps = draw(st.lists(st.integers(min_value=1, max_value=9),
                         min_size=n - 1, max_size=n - 1))
    return from_relative(anchor, tuple(gaps))


@given(ordered_tuples())
def test_relative_round_trip(config):
    anchor, gaps = to_relative(config)
    assert from_relative(anchor, gaps) == config
    assert anchor == config[0]
    assert all(g >= 1 for g in gaps)


def test_to_relative_rejects_unordered():
    with pytest.raises(ValueError):
        to_relative((3, 3))
    with pytest.raises(ValueError):
        to_relative((5, 2))


def test_from_relative_rejects_bad_gaps():
    with pytest.raises(ValueError):
        from_relative(0, (1, 0))


@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=12))
def test_basis_size_is_binomial(n, extra):
    length = n + extra
    basis = enumerate_window_basis(n, (1, length))
    assert basis.size == math.comb(length, n)


def test_basis_is_lexicographic_and_indexed():
    basis = enumerate_window_basis(2, (1, 4))
    assert basis.configs == (
        (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4),
    )
    for i, c in enumerate(basis.configs):
        assert basis.index[c] == i
        assert c in basis


def test_window_too_small():
    with pytest.raises(EmptyBasisError):
        enumerate_window_basis(4, (1, 3))


def test_tensor_basis_round_trip():
    tb = TensorBasis(n=3, window=(2, 5))
    assert tb.size == 4**3
    for i in range(tb.size):
        assert tb.index(tb.config(i)) == i


def test_antisymmetrizer_is_projection():
    tb = TensorBasis(n=3, window=(1, 4))
    rng = np.random.default_rng(7)
    v = rng.standard_normal(tb.size)
    pv = project_antisymmetric(v, tb)
    ppv = project_antisymmetric(pv, tb)
    assert np.allclose(pv, ppv, atol=1e-13)


def test_antisymmetrizer_kills_coincidences():
    tb = TensorBasis(n=2, window=(1, 3))
    v = np.ones(tb.size)
    pv = project_antisymmetric(v, tb)
    for i in range(tb.size):
        c = tb.config(i)
        if len(set(c)) < len(c):
            assert pv[i] == 0.0


def test_antisymmetrizer_rank_matches_ordered_basis():
    # the antisymmetric subspace of window^n has dimension C(sites, n)
    tb = TensorBasis(n=2, window=(1, 4))
    mat = np.empty((tb.size, tb.size))
    for i in range(tb.size):
        e = np.zeros(tb.size)
        e[i] = 1.0
        mat[:, i] = project_antisymmetric(e, tb)
    rank = np.linalg.matrix_rank(mat, tol=1e-10)
    assert rank == math.comb(4, 2)
