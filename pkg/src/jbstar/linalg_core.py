"""Dense complex linear algebra used underneath the algebra models.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  The
eigensolvers wrap LAPACK (through numpy/scipy) and attach a residual so
callers can check the contract instead of trusting the method.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotHermitian, NotNormal, NoConvergence

__all__ = [
    "EigenResult",
    "as_cmatrix",
    "eig_hermitian",
    "eig_normal",
    "operator_norm",
    "random_hermitian",
    "random_unitary_matrix",
    "random_complex",
]


@dataclass(frozen=True)
class EigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float


def as_cmatrix(A):
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise ValueError("expected a 2-d array, got shape %r" % (A.shape,))
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def _residual(A, V, lam):
    n = A.shape[0]
    r1 = np.linalg.norm(A @ V - V * lam, "fro")
    r2 = np.linalg.norm(V.conj().T @ V - np.eye(n), "fro")
    return float(max(r1, r2))


def eig_hermitian(A):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    A = as_cmatrix(A)
    fro = np.linalg.norm(A, "fro")
    if np.linalg.norm(A - A.conj().T, "fro") > 1e-12 * max(fro, 1e-300) and fro > 0:
        raise NotHermitian("matrix is not Hermitian")
    try:
        lam, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    res = _residual(A, V, lam)
    if res > 1e-10 * max(1.0, fro):
        raise NoConvergence("Hermitian eigensolver residual %.3e too large" % res)
    return EigenResult(lam, V, res)


def eig_normal(A):
    """Eigendecomposition ``A = V diag(lam) V*`` of a normal matrix.

    Uses the complex Schur form: for a normal matrix the triangular factor
    is diagonal, so the Schur vectors are the (orthonormal) eigenvectors.
    """
    A = as_cmatrix(A)
    fro = np.linalg.norm(A, "fro")
    comm = np.linalg.norm(A @ A.conj().T - A.conj().T @ A, "fro")
    if comm > 1e-10 * max(fro**2, 1e-300) and fro > 0:
        raise NotNormal("matrix is not normal (commutator %.3e)" % comm)
    try:
        T, V = scipy.linalg.schur(A, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:  # pragma: no cover
        raise NoConvergence(str(exc)) from exc
    lam = np.diag(T).copy()
    res = _residual(A, V, lam)
    if res > 1e-9 * max(1.0, fro):
        raise NoConvergence("normal eigensolver residual %.3e too large" % res)
    return EigenResult(lam, V, res)


def operator_norm(A):
    """Largest singular value."""
    A = np.asarray(A, dtype=np.complex128)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(n, rng):
    G = random_complex(rng, (n, n))
    return (G + G.conj().T) / 2


def random_unitary_matrix(n, rng):
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    Q, R = np.linalg.qr(random_complex(rng, (n, n)))
    d = np.diag(R)
    return Q * (d / np.abs(d))
