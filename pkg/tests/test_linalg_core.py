import numpy as np
import pytest
from hypothesis import given, strategies as st

from jbstar.errors import NotHermitian, NotNormal
from jbstar.linalg_core import (
    eig_hermitian,
    eig_normal,
    operator_norm,
    random_hermitian,
    random_unitary_matrix,
)


def test_eig_hermitian_known_spectrum():
    res = eig_hermitian(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(res.eigenvalues, [1.0, 3.0], atol=1e-14)
    assert res.residual < 1e-14


def test_eig_hermitian_pauli_y():
    res = eig_hermitian(np.array([[0, -1j], [1j, 0]]))
    np.testing.assert_allclose(res.eigenvalues, [-1.0, 1.0], atol=1e-14)


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_normal_rotation():
    res = eig_normal(np.array([[0.0, -1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(sorted(res.eigenvalues, key=lambda z: z.imag), [-1j, 1j], atol=1e-14)


def test_eig_normal_rejects_jordan_block():
    with pytest.raises(NotNormal):
        eig_normal(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_operator_norm_diagonal():
    assert operator_norm(np.diag([1.0, -4.0, 2.0])) == pytest.approx(4.0)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_random_unitary_is_unitary(n, seed):
    V = random_unitary_matrix(n, np.random.default_rng(seed))
    np.testing.assert_allclose(V.conj().T @ V, np.eye(n), atol=1e-12)


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_hermitian_decomposition_reconstructs(n, seed):
    A = random_hermitian(n, np.random.default_rng(seed))
    res = eig_hermitian(A)
    vecs = res.eigenvectors
    rebuilt = vecs @ np.diag(res.eigenvalues) @ vecs.conj().T
    np.testing.assert_allclose(rebuilt, A, atol=1e-12)
