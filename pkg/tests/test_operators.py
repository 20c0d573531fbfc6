import threading

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from hamkrylov.errors import DimensionError, SingularMatrixError, StructureError
from hamkrylov.generators import gen_jk_spd
from hamkrylov.jform import hamiltonian_residual, jmatrix
from hamkrylov.operators import (DenseHamiltonian, HamiltonianOperator,
                                 OpCounters, as_operator, solve_hamiltonian)

from conftest import random_hamiltonian


def test_dense_hamiltonian_blocks():
    E = np.array([[1., 2.], [3., 4.]])
    B = np.array([[1., 0.5], [0.5, 2.]])
    C = np.eye(2)
    H = DenseHamiltonian(E, B, C)
    np.testing.assert_array_equal(H.matrix[:2, :2], E)
    np.testing.assert_array_equal(H.matrix[2:, 2:], -E.T)
    assert hamiltonian_residual(H.matrix) == 0.0
    assert H.n == 2 and H.dim == 4


def test_dense_hamiltonian_rejects_asymmetric_block():
    with pytest.raises(StructureError):
        DenseHamiltonian(np.eye(2), np.array([[0., 1.], [0., 0.]]), np.eye(2))


def test_dense_hamiltonian_is_read_only():
    H = gen_jk_spd(3, 0)
    with pytest.raises(ValueError):
        H.matrix[0, 0] = 1.0


def test_from_matrix_round_trip(rng):
    M = random_hamiltonian(4, rng)
    H = DenseHamiltonian.from_matrix(M)
    np.testing.assert_allclose(H.matrix, M, atol=1e-14)
    with pytest.raises(StructureError):
        DenseHamiltonian.from_matrix(np.eye(4))
    with pytest.raises(DimensionError):
        DenseHamiltonian.from_matrix(np.eye(3))


def test_solve_with_j():
    H = DenseHamiltonian.from_matrix(jmatrix(1))
    x = solve_hamiltonian(H, np.array([1., 0.]))
    np.testing.assert_allclose(x, [0., 1.], atol=1e-15)


@given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_solve_round_trip(n, seed):
    r = np.random.default_rng(seed)
    H = DenseHamiltonian.from_matrix(random_hamiltonian(n, r))
    if np.linalg.cond(H.matrix) > 1e8:
        return
    v = r.standard_normal(2 * n)
    x = solve_hamiltonian(H, H.matrix @ v)
    assert np.linalg.norm(x - v) <= 1e-10 * np.linalg.cond(H.matrix) * \
        np.linalg.norm(v)


def test_solve_several_columns_counts_each(rng):
    H = gen_jk_spd(4, 1)
    c = OpCounters()
    V = rng.standard_normal((8, 3))
    X = solve_hamiltonian(H, H.matrix @ V, counters=c)
    np.testing.assert_allclose(X, V, atol=1e-12)
    assert c.snapshot() == (0, 3, 0)


def test_singular_rejected():
    zero = np.zeros((1, 1))
    H = DenseHamiltonian(zero, zero, zero)
    with pytest.raises(SingularMatrixError):
        solve_hamiltonian(H, np.ones(2))
    with pytest.raises(SingularMatrixError):
        HamiltonianOperator.from_dense(H)


def test_operator_counts_and_raw_paths(rng):
    op = HamiltonianOperator.from_dense(gen_jk_spd(3, 2))
    v = rng.standard_normal(6)
    w = op.apply(v)
    np.testing.assert_allclose(op.apply_inverse(w), v, atol=1e-12)
    assert op.counters.snapshot() == (1, 1, 0)
    op.apply_raw(v)
    op.apply_inverse_raw(v)
    assert op.counters.snapshot() == (1, 1, 0)
    fresh = op.with_counters()
    fresh.apply(v)
    assert fresh.counters.snapshot() == (1, 0, 0)
    assert op.counters.snapshot() == (1, 1, 0)


def test_sparse_operator_matches_dense(rng):
    H = gen_jk_spd(5, 3)
    sop = HamiltonianOperator.from_sparse(sp.csr_matrix(H.matrix))
    dop = as_operator(H)
    v = rng.standard_normal(10)
    np.testing.assert_allclose(sop.apply(v), dop.apply(v), atol=1e-12)
    np.testing.assert_allclose(sop.apply_inverse(v), dop.apply_inverse(v),
                               rtol=1e-10)
    assert sop.fro_norm() == pytest.approx(np.linalg.norm(H.matrix))
    with pytest.raises(StructureError):
        HamiltonianOperator.from_sparse(sp.eye(4))


def test_as_operator_passthrough():
    op = as_operator(gen_jk_spd(2, 0))
    assert as_operator(op) is op
    assert isinstance(as_operator(jmatrix(2)), HamiltonianOperator)


def test_counters_thread_safe():
    c = OpCounters()

    def work():
        for _ in range(1000):
            c.add(dots=1)

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert c.snapshot() == (0, 0, 4000)
    c.reset()
    assert c.snapshot() == (0, 0, 0)
