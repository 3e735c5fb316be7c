import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from echkit.f2 import (
    SparseF2Matrix,
    bits_of,
    bitset,
    block_matrix,
    f2_is_invertible,
    f2_nullspace,
    f2_rank,
    f2_solve,
)

from oracles import gf2_rank


def dense_matrices(max_side=7):
    return st.tuples(st.integers(1, max_side), st.integers(1, max_side), st.integers(0, 2**32 - 1)).map(
        lambda t: np.random.default_rng(t[2]).integers(0, 2, size=(t[0], t[1]), dtype=np.uint8)
    )


def test_bits_roundtrip():
    assert list(bits_of(bitset([0, 3, 5]))) == [0, 3, 5]
    assert bitset([]) == 0


def test_identity_and_zero():
    eye = SparseF2Matrix.identity(4)
    assert eye.rank() == 4
    assert SparseF2Matrix.zeros(3, 4).is_zero()
    assert (eye @ eye) == eye
    assert (eye + eye).is_zero()


@given(dense_matrices())
def test_dense_roundtrip_and_rank(a):
    m = SparseF2Matrix.from_dense(a)
    assert np.array_equal(m.to_dense(), a)
    assert m.rank() == gf2_rank(a) == f2_rank(a)


@given(dense_matrices(5), st.integers(0, 2**32 - 1))
def test_matmul_matches_numpy(a, seed):
    b = np.random.default_rng(seed).integers(0, 2, size=(a.shape[1], 3), dtype=np.uint8)
    got = (SparseF2Matrix.from_dense(a) @ SparseF2Matrix.from_dense(b)).to_dense()
    assert np.array_equal(got, (a.astype(int) @ b.astype(int)) % 2)


@given(dense_matrices(4), dense_matrices(3))
@settings(max_examples=40)
def test_kron_matches_numpy(a, b):
    got = SparseF2Matrix.from_dense(a).kron(SparseF2Matrix.from_dense(b)).to_dense()
    assert np.array_equal(got, np.kron(a, b) % 2)


def test_transpose_submatrix_block():
    a = SparseF2Matrix(2, 3, [(0, 2), (1, 0)])
    assert a.T.shape == (3, 2) and a.T[2, 0] == 1
    assert a.submatrix([1], [0, 1]).to_dense().tolist() == [[1, 0]]
    z = SparseF2Matrix.zeros(2, 2)
    full = block_matrix([[a, z], [SparseF2Matrix.zeros(1, 3), SparseF2Matrix.identity(1).embed(1, 2)]])
    assert full.shape == (3, 5)
    assert full[2, 3] == 1 and full[0, 2] == 1


@given(dense_matrices(6))
def test_nullspace_is_kernel(a):
    ns = f2_nullspace(a)
    assert ns.shape[0] == a.shape[1] - gf2_rank(a)
    if len(ns):
        assert not ((a.astype(int) @ ns.T.astype(int)) % 2).any()
        assert gf2_rank(ns) == ns.shape[0]


@given(dense_matrices(6), st.integers(0, 2**32 - 1))
def test_solve_consistent_systems(a, seed):
    x0 = np.random.default_rng(seed).integers(0, 2, size=a.shape[1], dtype=np.uint8)
    b = (a.astype(int) @ x0) % 2
    x = f2_solve(a, b)
    assert x is not None
    assert np.array_equal((a.astype(int) @ x.astype(int)) % 2, b)


def test_solve_inconsistent():
    assert f2_solve(np.array([[1, 1], [1, 1]]), np.array([1, 0])) is None


def test_invertible():
    assert f2_is_invertible(np.array([[1, 1], [0, 1]]))
    assert not f2_is_invertible(np.array([[1, 1], [1, 1]]))
    assert not f2_is_invertible(np.ones((2, 3)))


def test_shape_mismatch():
    with pytest.raises(ValueError):
        SparseF2Matrix.identity(2) @ SparseF2Matrix.identity(3)
