"""Operator layer: U- and box operators, Peirce projections, predicates,
centre detection, exponentials and the spectral calculus of normal elements.

All functions take the model first; elements are coordinate vectors.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import (
    BranchCut,
    LinearityError,
    ModelMismatch,
    NotInvertible,
    NotNormal,
    NotTripotent,
)

__all__ = [
    "LinearOperator",
    "SpectralData",
    "jordan_product",
    "involution",
    "norm",
    "triple_product",
    "U",
    "U_op",
    "L_op",
    "Q_op",
    "is_invertible",
    "inverse",
    "is_unitary",
    "unitary_defect",
    "is_tripotent",
    "peirce_projections",
    "operator_commute",
    "is_central",
    "central_defect",
    "center_basis",
    "central_projections",
    "exp_element",
    "spectral_decompose",
    "functional_calculus",
    "log_unitary",
    "sqrt_unitary",
    "triple_derivation_check",
]

COMPLEX, CONJUGATE, REAL = "complex", "conjugate", "real"


def realify(x):
    x = np.asarray(x)
    return np.concatenate([x.real, x.imag], axis=-1)


def complexify(r):
    d = r.shape[-1] // 2
    return r[..., :d] + 1j * r[..., d:]


@dataclass(frozen=True)
class LinearOperator:
    """A map between models stored as a matrix over the coordinate bases.

    ``complex`` operators keep a complex ``(d_out, d_in)`` matrix; the other
    flags (``conjugate``, ``real``) keep the real ``(2 d_out, 2 d_in)``
    matrix acting on ``[Re x, Im x]``.
    """

    matrix: np.ndarray
    linearity: str = COMPLEX
    source: object = None
    target: object = None

    def __call__(self, x):
        x = np.asarray(x, dtype=np.complex128)
        if self.linearity == COMPLEX:
            return x @ self.matrix.T
        return complexify(realify(x) @ self.matrix.T)

    def real_matrix(self):
        if self.linearity != COMPLEX:
            return self.matrix
        A = self.matrix
        return np.block([[A.real, -A.imag], [A.imag, A.real]])

    def __matmul__(self, other):
        if self.linearity == COMPLEX and other.linearity == COMPLEX:
            return LinearOperator(self.matrix @ other.matrix, COMPLEX, other.source, self.target)
        R = self.real_matrix() @ other.real_matrix()
        flags = {self.linearity, other.linearity} - {COMPLEX}
        lin = REAL
        if flags == {CONJUGATE}:
            n_conj = (self.linearity == CONJUGATE) + (other.linearity == CONJUGATE)
            lin = CONJUGATE if n_conj == 1 else REAL
        return LinearOperator(R, lin, other.source, self.target)

    def __add__(self, other):
        if self.linearity == other.linearity == COMPLEX:
            return LinearOperator(self.matrix + other.matrix, COMPLEX, self.source, self.target)
        lin = self.linearity if self.linearity == other.linearity else REAL
        return LinearOperator(self.real_matrix() + other.real_matrix(), lin, self.source, self.target)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def scaled(self, c):
        return LinearOperator(c * self.matrix, self.linearity, self.source, self.target)

    @classmethod
    def from_function(cls, fn, source, target=None, linearity=COMPLEX):
        """Tabulate ``fn`` on the coordinate basis of ``source``."""
        target = source if target is None else target
        d = source.dim
        eye = np.eye(d, dtype=np.complex128)
        if linearity == COMPLEX:
            return cls(np.asarray(fn(eye)).T.copy(), COMPLEX, source, target)
        cols = np.concatenate([realify(fn(eye)), realify(fn(1j * eye))]).T
        return cls(cols, linearity, source, target)

    def is_complex_linear(self, tol=1e-12):
        """Whether the stored action commutes with multiplication by ``i``."""
        if self.linearity == COMPLEX:
            return True
        R = self.matrix
        n, m = R.shape[0] // 2, R.shape[1] // 2
        Jin = np.block([[np.zeros((m, m)), -np.eye(m)], [np.eye(m), np.zeros((m, m))]])
        Jout = np.block([[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]])
        return np.linalg.norm(R @ Jin - Jout @ R) <= tol * max(1.0, np.linalg.norm(R))


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray
    projections: np.ndarray
    generator: np.ndarray
    subalgebra_dim: int
    min_gap: float
    degenerate: bool = False
    notes: list = field(default_factory=list)

    def reconstruct(self):
        return self.eigenvalues @ self.projections


# -- thin wrappers matching the model methods -------------------------------

def _same_model(M, *xs):
    for x in xs:
        M.check(x)


def jordan_product(M, a, b):
    _same_model(M, a, b)
    return M.product(a, b)


def involution(M, a):
    return M.star(a)


def norm(M, a):
    return M.norm(a)


def triple_product(M, x, y, z):
    _same_model(M, x, y, z)
    return M.triple(x, y, z)


# -- operators --------------------------------------------------------------

def U(M, a, x, b=None):
    """Apply ``U_{a,b}`` to ``x`` without forming a matrix (``b`` defaults to ``a``)."""
    p = M.product
    if b is None:
        return 2 * p(p(a, x), a) - p(p(a, a), x)
    return p(p(a, x), b) + p(p(b, x), a) - p(p(a, b), x)


def U_op(M, a, b=None):
    """``U_{a,b}(x) = (a o x) o b + (b o x) o a - (a o b) o x`` as an operator."""
    a = M.check(a)
    b = a if b is None else M.check(b)
    Ma, Mb = M.mult_op(a), M.mult_op(b)
    mat = Ma @ Mb + Mb @ Ma - M.mult_op(M.product(a, b))
    return LinearOperator(mat, COMPLEX, M, M)


def L_op(M, a, b):
    return LinearOperator(M.box_op(M.check(a), M.check(b)), COMPLEX, M, M)


def Q_op(M, e):
    """Conjugate-linear ``Q(e): x -> {e,x,e}``."""
    e = M.check(e)
    return LinearOperator.from_function(lambda x: M.triple(e, x, e), M, linearity=CONJUGATE)


def is_invertible(M, a, rtol=1e-8):
    s = np.linalg.svd(U_op(M, a).matrix, compute_uv=False)
    return bool(s[0] > 0 and s[-1] > rtol * s[0])


def inverse(M, a):
    """Jordan inverse: the unique ``b`` with ``a o b = 1`` and ``a^2 o b = a``.

    Computed as ``U_a^{-1}(a)``.
    """
    a = M.check(a)
    if not is_invertible(M, a):
        raise NotInvertible("U_a is not bijective")
    return np.linalg.solve(U_op(M, a).matrix, a)


def unitary_defect(M, u):
    """``max(||u o u* - 1||, ||u^2 o u* - u||)``: zero exactly for unitaries."""
    us = M.star(u)
    r1 = M.norm(M.product(u, us) - M.unit)
    r2 = M.norm(M.product(M.product(u, u), us) - u)
    return np.maximum(r1, r2)


def is_unitary(M, u, tol=1e-8):
    """``u`` is invertible with ``u^{-1} = u*``."""
    u = M.check(u)
    return bool(unitary_defect(M, u) <= tol * max(1.0, M.norm(u)))


def is_tripotent(M, e, tol=1e-9):
    e = M.check(e)
    return bool(M.norm(M.triple(e, e, e) - e) <= tol * max(1.0, M.norm(e)))


def peirce_projections(M, e):
    """``(P2, P1, P0)`` for a tripotent ``e``.

    ``P2 = Q(e)^2``, ``P1 = 2(L(e,e) - Q(e)^2)``, ``P0 = Id - 2 L(e,e) + Q(e)^2``.
    """
    e = M.check(e)
    if not is_tripotent(M, e):
        raise NotTripotent("{e,e,e} != e")
    B = U_op(M, e).matrix @ M.star_matrix()  # Q(e) x = B conj(x)
    Q2 = B @ np.conj(B)
    L = M.box_op(e, e)
    eye = np.eye(M.dim)
    mk = lambda A: LinearOperator(A, COMPLEX, M, M)
    return mk(Q2), mk(2 * (L - Q2)), mk(eye - 2 * L + Q2)


def operator_commute(M, a, b, rtol=1e-9):
    """``(a o c) o b == a o (c o b)`` for every basis vector ``c``."""
    a, b = M.check(a), M.check(b)
    na, nb = M.norm(a), M.norm(b)
    if na == 0 or nb == 0:
        return True
    Ma, Mb = M.mult_op(a), M.mult_op(b)
    C = Mb @ Ma - Ma @ Mb
    worst = np.max(M.norm(C.T))
    return bool(worst <= rtol * na * nb)


@lru_cache(maxsize=64)
def _basis_operators(M):
    Mx = M.mult_op(np.eye(M.dim, dtype=np.complex128))  # one operator per basis vector
    return Mx, np.linalg.norm(Mx, 2, axis=(1, 2))


def central_defect(M, a):
    """Upper bound on ``max_x ||[M_a, M_x]|| / (||M_a|| ||M_x||)`` over the
    coordinate basis (Frobenius norm of the commutator, operator norms
    below); zero exactly for central elements."""
    a = M.check(a)
    Ma = M.mult_op(a)
    na = np.linalg.norm(Ma, 2)
    if na == 0:
        return 0.0
    Mx, nx = _basis_operators(M)
    comm = Mx @ Ma - Ma @ Mx
    ratio = np.linalg.norm(comm, axis=(1, 2)) / nx
    return float(ratio.max() / na)


def is_central(M, a, rtol=1e-9):
    return central_defect(M, a) <= rtol


@lru_cache(maxsize=64)
def center_basis(M, tol=1e-9):
    """Orthonormal (coordinate) basis of the centre ``Z(M)``, as rows."""
    d = M.dim
    eye = np.eye(d, dtype=np.complex128)
    Mx = M.mult_op(eye)  # Mx[i] = M_{e_i}
    gram = np.zeros((d, d), dtype=np.complex128)
    for j in range(d):
        # column i of the stacked system: vec([M_{e_i}, M_{e_j}])
        comm = Mx @ Mx[j] - Mx[j] @ Mx
        A = comm.reshape(d, -1).T
        gram += A.conj().T @ A
    w, V = np.linalg.eigh(gram)
    null = V[:, w <= tol * max(1.0, w[-1])]
    return null.T.copy()


def central_projections(M):
    """All central projections, built from the minimal ones.

    A generic self-adjoint central element has distinct values on the
    minimal central projections; its spectral projections are those.
    """
    return list(_central_projections(M))


@lru_cache(maxsize=64)
def _central_projections(M):
    Z = center_basis(M)
    if Z.shape[0] == 1:
        return (M.zero(), np.array(M.unit))
    rng = np.random.default_rng(12345)
    z = rng.standard_normal(Z.shape[0]) @ Z
    z = (z + M.star(z)) / 2
    z = z + 3.0 * M.norm(z) * M.unit  # keep values well separated from 0
    minimal = spectral_decompose(M, z).projections
    minimal = (minimal + M.star(minimal)) / 2
    out = []
    r = len(minimal)
    for size in range(r + 1):
        for idx in combinations(range(r), size):
            out.append(np.sum(minimal[list(idx)], axis=0) if idx else M.zero())
    return tuple(out)


def exp_element(M, a, tol=1e-16):
    """``sum a^n / n!`` with scaling and squaring; broadcasts over leading axes."""
    a = M.check(a)
    nrm = np.max(np.atleast_1d(M.norm(a))) if a.size else 0.0
    s = int(max(0, np.ceil(np.log2(nrm)) + 1)) if nrm > 0.5 else 0
    x = a / 2**s
    result = np.broadcast_to(M.unit, a.shape).copy()
    term = result.copy()
    for n in range(1, 60):
        term = M.product(x, term) / n
        result = result + term
        if np.max(np.linalg.norm(term, axis=-1)) < tol * np.min(np.linalg.norm(result, axis=-1)):
            break
    for _ in range(s):
        result = M.product(result, result)
    return result


def _subalgebra(M, gens, rtol=1e-10):
    """Coordinate-orthonormal basis (columns) of the unital subalgebra
    generated by ``gens``."""
    ops = [M.mult_op(g) for g in gens]
    V = np.column_stack([M.unit] + list(gens))
    Q = _orth(V, rtol)
    while True:
        V = np.column_stack([Q] + [op @ Q for op in ops])
        Q2 = _orth(V, rtol)
        if Q2.shape[1] == Q.shape[1]:
            return Q2
        Q = Q2


def _orth(V, rtol):
    U_, s, _ = np.linalg.svd(V, full_matrices=False)
    r = int(np.sum(s > rtol * s[0]))
    return U_[:, :r]


def _cluster(values, tol):
    reps = []
    for lam in sorted(values, key=lambda z: (z.real, z.imag)):
        for group in reps:
            if abs(group[0] - lam) <= tol:
                group.append(lam)
                break
        else:
            reps.append([lam])
    return np.array([np.mean(g) for g in reps])


def spectral_decompose(M, a, cluster_tol=1e-8, gap_warn=1e-6):
    """Eigenvalues and spectral projections of a normal element.

    The unital subalgebra generated by ``a`` and ``a*`` is associative and
    commutative; multiplication by ``a`` restricted to it is diagonalisable
    and its eigenvalues are the spectrum of ``a``.  Projections come from
    Lagrange interpolation ``p_i = prod_{j != i} (a - l_j) / (l_i - l_j)``
    evaluated with Jordan multiplication by ``a``.
    """
    a = M.check(a)
    if not operator_commute(M, a, M.star(a)):
        raise NotNormal("element does not operator commute with its adjoint")
    Q = _subalgebra(M, [a, M.star(a)])
    Ma = M.mult_op(a)
    A_sub = Q.conj().T @ Ma @ Q
    scale = max(1.0, M.norm(a))
    lam = _cluster(np.linalg.eigvals(A_sub), cluster_tol * scale)
    notes = []
    projections = []
    for i, li in enumerate(lam):
        p = np.array(M.unit)
        for j, lj in enumerate(lam):
            if j != i:
                p = (Ma @ p - lj * p) / (li - lj)
        projections.append(p)
    projections = np.array(projections)
    if len(lam) > 1:
        gaps = np.abs(lam[:, None] - lam[None, :])[~np.eye(len(lam), dtype=bool)]
        min_gap = float(gaps.min())
    else:
        min_gap = float("inf")
    degenerate = min_gap < gap_warn * scale
    if degenerate:
        notes.append("eigenvalue clusters closer than %.1e; projections may be inaccurate" % gap_warn)
    if Q.shape[1] != len(lam):
        notes.append("subalgebra dimension %d != number of clusters %d" % (Q.shape[1], len(lam)))
    return SpectralData(lam, projections, a, Q.shape[1], min_gap, degenerate, notes)


def functional_calculus(M, a, f, spectral=None):
    """``f(a) = sum f(l_i) p_i`` for a normal element ``a``."""
    sd = spectral_decompose(M, a) if spectral is None else spectral
    vals = np.array([f(l) for l in sd.eigenvalues], dtype=np.complex128)
    return vals @ sd.projections


def _check_cut(lam, cut, tol):
    """Raise if an eigenvalue lies on the ray at angle ``cut``."""
    for l in lam:
        if abs(np.angle(l * np.exp(-1j * cut))) < tol:
            raise BranchCut("eigenvalue %r lies on the branch cut at angle %.6f" % (l, cut))


def _arg_with_cut(l, cut):
    """Argument of ``l`` in ``(cut - 2 pi, cut]``."""
    return cut - np.mod(cut - np.angle(l), 2 * np.pi)


def log_unitary(M, u, cut=None, spectral=None, tol=1e-8):
    """Self-adjoint ``h`` with ``exp(i h) = u`` (principal branch by default).

    With ``cut`` the branch cut is moved to the ray at that angle and the
    eigenvalues of ``h`` lie in ``(cut - 2 pi, cut]``.
    """
    sd = spectral_decompose(M, u) if spectral is None else spectral
    if cut is None:
        _check_cut(sd.eigenvalues, np.pi, tol)
        angles = np.angle(sd.eigenvalues)
    else:
        angles = np.array([_arg_with_cut(l, cut) for l in sd.eigenvalues])
    h = angles.astype(np.complex128) @ sd.projections
    return (h + M.star(h)) / 2


def sqrt_unitary(M, u, spectral=None, tol=1e-8):
    """Principal square root of a unitary."""
    sd = spectral_decompose(M, u) if spectral is None else spectral
    _check_cut(sd.eigenvalues, np.pi, tol)
    return functional_calculus(M, u, np.sqrt, spectral=sd)


@dataclass(frozen=True)
class DerivationCheck:
    leibniz: float
    unit_skew: float


def triple_derivation_check(M, D, samples=40, seed=0):
    """Leibniz residual of ``D`` on the triple product.

    Returns the worst ``||D{a,b,c} - {Da,b,c} - {a,Db,c} - {a,b,Dc}||`` over
    random basis triples and random elements, and ``||D(1)* + D(1)||``.
    """
    if D.linearity != COMPLEX:
        raise LinearityError("triple derivations are complex-linear; got %s" % D.linearity)
    if D.matrix.shape != (M.dim, M.dim):
        raise ModelMismatch("operator shape does not match the model")
    rng = np.random.default_rng(seed)
    eye = np.eye(M.dim, dtype=np.complex128)
    idx = rng.integers(0, M.dim, size=(samples, 3))
    rand = np.array([[M.random_element(rng) for _ in range(3)] for _ in range(samples)])
    a = np.concatenate([eye[idx[:, 0]], rand[:, 0]])
    b = np.concatenate([eye[idx[:, 1]], rand[:, 1]])
    c = np.concatenate([eye[idx[:, 2]], rand[:, 2]])
    T = M.triple
    res = D(T(a, b, c)) - T(D(a), b, c) - T(a, D(b), c) - T(a, b, D(c))
    d1 = D(M.unit)
    return DerivationCheck(float(np.max(M.norm(res))), float(M.norm(d1 + M.star(d1))))
