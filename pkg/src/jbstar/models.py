"""Finite-dimensional JB*-algebra models.

An element is a plain complex coordinate vector (``numpy`` array whose last
axis has length ``model.dim``); every model operation broadcasts over
leading axes, so a stack of elements is just a 2-d array.

Models
------
``MatrixJordanModel(n)``
    ``M_n(C)`` with ``a o b = (ab + ba)/2``; coordinates are the matrix
    entries in row-major order.
``SpinFactorModel(k)``
    ``span{1, s_1, ..., s_k}`` inside ``M_{2^m}(C)`` where the ``s_j`` are
    anticommuting Hermitian unitaries built from Pauli tensor products.
``AlbertModel()``
    Complexified ``3x3`` Hermitian bioctonion matrices (27 complex
    coordinates, see :class:`AlbertModel` for the layout).
``DirectSumModel(parts)``
    l-infinity direct sum; coordinates are concatenated.
"""

from functools import cached_property

import numpy as np

from .errors import InvalidParameter, ModelMismatch
from .octonion import oct_conj, oct_mul, oct_norm_form, oct_trace

__all__ = [
    "AlgebraModel",
    "MatrixJordanModel",
    "SpinFactorModel",
    "AlbertModel",
    "DirectSumModel",
    "build_matrix_model",
    "build_spin_model",
    "build_albert_model",
    "build_direct_sum",
    "parse_model",
    "albert_cubic_invariants",
]

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


class AlgebraModel:
    """Common interface of a unital JB*-algebra on ``C^dim``.

    Subclasses provide ``dim``, ``unit``, ``product``, ``star`` and ``norm``;
    everything else (triple product, multiplication operators, the
    self-adjoint basis) is derived here.
    """

    kind = "abstract"
    norm_strategy = "EmbeddedOperatorNorm"
    dim = 0

    # -- contract --------------------------------------------------------
    def product(self, a, b):
        raise NotImplementedError

    def star(self, a):
        raise NotImplementedError

    def norm(self, a):
        raise NotImplementedError

    @property
    def unit(self):
        raise NotImplementedError

    def signature(self):
        """Hashable kind tree used for structural comparisons."""
        return (self.kind,)

    def descriptor(self):
        raise NotImplementedError

    # -- helpers ---------------------------------------------------------
    def check(self, x):
        x = np.asarray(x, dtype=np.complex128)
        if x.ndim == 0 or x.shape[-1] != self.dim:
            raise ModelMismatch(
                "element of length %s does not belong to %r (dim %d)"
                % (x.shape[-1] if x.ndim else "scalar", self, self.dim)
            )
        return x

    def zero(self):
        return np.zeros(self.dim, dtype=np.complex128)

    def scalar(self, lam):
        return lam * self.unit

    def triple(self, x, y, z):
        """``{x,y,z} = (x o y*) o z + (z o y*) o x - (x o z) o y*``."""
        ys = self.star(y)
        p = self.product
        return p(p(x, ys), z) + p(p(z, ys), x) - p(p(x, z), ys)

    def power(self, a, n):
        if n == 0:
            return np.broadcast_to(self.unit, np.shape(a)).copy()
        out = a
        for _ in range(n - 1):
            out = self.product(a, out)
        return out

    def mult_op(self, a):
        """Matrix of ``x -> a o x``; batched ``a`` gives a stack of matrices."""
        a = self.check(a)
        eye = np.eye(self.dim, dtype=np.complex128)
        cols = self.product(a[..., None, :], eye)
        return np.swapaxes(cols, -1, -2)

    def star_matrix(self):
        """``J`` with ``x* = J conj(x)``."""
        return np.swapaxes(self.star(np.eye(self.dim, dtype=np.complex128)), -1, -2)

    def box_op(self, a, b):
        """Matrix of ``L(a,b): x -> {a,b,x}`` (complex-linear in ``x``)."""
        bs = self.star(b)
        Ma, Mb = self.mult_op(a), self.mult_op(bs)
        return self.mult_op(self.product(a, bs)) + Ma @ Mb - Mb @ Ma

    def spectral_norm(self, a):
        """``sqrt`` of the top of the spectrum of ``L(a,a)``.

        Model-independent; used as a cross-check on :meth:`norm`.
        """
        L = self.box_op(a, a)
        ev = np.linalg.eigvals(L)
        return np.sqrt(np.maximum(ev.real.max(axis=-1), 0.0))

    def distance(self, a, b):
        return self.norm(np.asarray(a) - np.asarray(b))

    def random_element(self, rng, scale=1.0):
        z = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return scale * z / np.sqrt(2 * self.dim)

    @cached_property
    def sa_basis(self):
        """Real basis of the self-adjoint part, shape ``(dim, dim)``.

        Candidates are the real and imaginary parts of the coordinate basis
        vectors; they are kept unnormalised so that structured spectra (for
        example ``{1, 0}`` for matrix units) survive.
        """
        eye = np.eye(self.dim, dtype=np.complex128)
        cands = np.concatenate([(eye + self.star(eye)) / 2, (1j * eye + self.star(1j * eye)) / 2])
        kept, ortho = [], []
        for c in cands:
            r = np.concatenate([c.real, c.imag])
            nrm = np.linalg.norm(r)
            if nrm < 1e-12:
                continue
            res = r.copy()
            for q in ortho:
                res -= (q @ res) * q
            rn = np.linalg.norm(res)
            if rn > 1e-8 * nrm:
                kept.append(c)
                ortho.append(res / rn)
            if len(kept) == self.dim:
                break
        basis = np.array(kept)
        if basis.shape[0] != self.dim:  # pragma: no cover - structural bug guard
            raise RuntimeError("self-adjoint part has wrong real dimension")
        basis.setflags(write=False)
        return basis

    def random_self_adjoint(self, rng, scale=1.0):
        r = rng.standard_normal(self.dim)
        h = r @ self.sa_basis
        h = (h + self.star(h)) / 2
        return scale * h / self.norm(h)

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__, self.spec_string())

    def spec_string(self):
        return self.kind


class _EmbeddedModel(AlgebraModel):
    """Models realised inside ``M_n(C)`` (norm = operator norm of the image)."""

    norm_strategy = "EmbeddedOperatorNorm"

    def embed(self, a):
        raise NotImplementedError

    def extract(self, X):
        raise NotImplementedError

    def product(self, a, b):
        A, B = self.embed(self.check(a)), self.embed(self.check(b))
        return self.extract((A @ B + B @ A) / 2)

    def norm(self, a):
        A = self.embed(self.check(a))
        out = np.linalg.norm(A, 2, axis=(-2, -1))
        return float(out) if out.ndim == 0 else out


class MatrixJordanModel(_EmbeddedModel):
    kind = "matrix"

    def __init__(self, n):
        if int(n) != n or n < 1:
            raise InvalidParameter("matrix size must be a positive integer, got %r" % (n,))
        self.n = int(n)
        self.dim = self.n * self.n

    @cached_property
    def unit(self):
        u = np.eye(self.n, dtype=np.complex128).reshape(-1)
        u.setflags(write=False)
        return u

    def embed(self, a):
        a = np.asarray(a, dtype=np.complex128)
        return a.reshape(a.shape[:-1] + (self.n, self.n))

    def extract(self, X):
        return X.reshape(X.shape[:-2] + (self.dim,))

    def star(self, a):
        A = self.embed(self.check(a))
        return self.extract(np.conj(np.swapaxes(A, -1, -2)))

    def from_matrix(self, X):
        return np.asarray(X, dtype=np.complex128).reshape(-1)

    def signature(self):
        return ("matrix", self.n)

    def descriptor(self):
        return {"kind": "matrix", "n": self.n}

    def spec_string(self):
        return "matrix:%d" % self.n


def clifford_generators(k):
    """``k`` pairwise anticommuting Hermitian unitaries (Jordan-Wigner)."""
    m = 1
    while 2 * m + 1 < k:
        m += 1
    gens = []
    for q in range(m):
        for p in ("X", "Y"):
            ops = ["Z"] * q + [p] + ["I"] * (m - q - 1)
            gens.append(_kron_all(ops))
    gens.append(_kron_all(["Z"] * m))
    return gens[:k]


def _kron_all(labels):
    out = np.ones((1, 1), dtype=np.complex128)
    for lab in labels:
        out = np.kron(out, PAULI[lab])
    return out


class SpinFactorModel(_EmbeddedModel):
    """Spin factor ``span{1, s_1..s_k}``; coordinates are Clifford coefficients."""

    kind = "spin"

    def __init__(self, k):
        if int(k) != k or k < 2:
            raise InvalidParameter("spin factor needs k >= 2 generators, got %r" % (k,))
        self.k = int(k)
        self.dim = self.k + 1
        gens = clifford_generators(self.k)
        self.size = gens[0].shape[0]
        basis = np.array([np.eye(self.size, dtype=np.complex128)] + gens)
        basis.setflags(write=False)
        self.basis_matrices = basis

    @cached_property
    def unit(self):
        u = np.zeros(self.dim, dtype=np.complex128)
        u[0] = 1
        u.setflags(write=False)
        return u

    def embed(self, a):
        return np.einsum("...i,iab->...ab", np.asarray(a, dtype=np.complex128), self.basis_matrices)

    def extract(self, X):
        # basis is Hermitian and trace-orthogonal with tr(B_i B_i) = size
        return np.einsum("iba,...ab->...i", self.basis_matrices, X) / self.size

    def star(self, a):
        return np.conj(self.check(a))

    def signature(self):
        return ("spin", self.k)

    def descriptor(self):
        return {"kind": "spin", "k": self.k}

    def spec_string(self):
        return "spin:%d" % self.k


# Albert layout: coords = [a1, a2, a3, c1(8), c2(8), c3(8)] for the matrix
#   [[ a1,      c3,      conj(c2)],
#    [ conj(c3), a2,     c1      ],
#    [ c2,      conj(c1), a3     ]]
_OFF = {(1, 2): 0, (2, 0): 1, (0, 1): 2}


def _albert_to_octmatrix(x):
    x = np.asarray(x, dtype=np.complex128)
    lead = x.shape[:-1]
    X = np.zeros(lead + (3, 3, 8), dtype=np.complex128)
    for i in range(3):
        X[..., i, i, 0] = x[..., i]
    for (i, j), s in _OFF.items():
        c = x[..., 3 + 8 * s: 11 + 8 * s]
        X[..., i, j, :] = c
        X[..., j, i, :] = oct_conj(c)
    return X


def _albert_from_octmatrix(X):
    lead = X.shape[:-3]
    x = np.zeros(lead + (27,), dtype=np.complex128)
    for i in range(3):
        x[..., i] = X[..., i, i, 0]
    for (i, j), s in _OFF.items():
        x[..., 3 + 8 * s: 11 + 8 * s] = X[..., i, j, :]
    return x


def _octmatrix_product(X, Y):
    out = np.zeros(np.broadcast_shapes(X.shape, Y.shape), dtype=np.complex128)
    for i in range(3):
        for j in range(3):
            for k in range(3):
                out[..., i, j, :] += oct_mul(X[..., i, k, :], Y[..., k, j, :])
    return out


def albert_jordan_direct(x, y):
    """Jordan product computed entrywise from octonion matrices.

    Slow reference path; :class:`AlbertModel` uses structure constants
    derived from it.
    """
    X, Y = _albert_to_octmatrix(x), _albert_to_octmatrix(y)
    Z = (_octmatrix_product(X, Y) + _octmatrix_product(Y, X)) / 2
    return _albert_from_octmatrix(Z)


class AlbertModel(AlgebraModel):
    """Exceptional 27-dimensional algebra of Hermitian bioctonion matrices.

    Coordinates ``[a1, a2, a3, c1, c2, c3]`` (``c_i`` bioctonions) describe::

        [[ a1,       c3,       conj(c2)],
         [ conj(c3), a2,       c1      ],
         [ c2,       conj(c1), a3      ]]

    The basis vectors are Hermitian octonion matrices, so the involution is
    plain complex conjugation of coordinates.  The norm is read off the
    spectrum of ``L(a,a)``, which is Hermitian for the trace form
    ``(x|y) = T(x o y*)`` (weights 1 on the diagonal, 2 off it).
    """

    kind = "albert"
    norm_strategy = "TripleSpectrum"
    dim = 27

    def __init__(self):
        eye = np.eye(27, dtype=np.complex128)
        C = albert_jordan_direct(eye[:, None, :], eye[None, :, :])
        C[np.abs(C) < 1e-15] = 0
        self.structure = C  # C[i, j, k]: coefficient of e_k in e_i o e_j
        self.structure.setflags(write=False)
        self._C2 = C.reshape(27, 27 * 27)
        w = np.ones(27)
        w[3:] = 2.0
        self.trace_weights = w

    @cached_property
    def unit(self):
        u = np.zeros(27, dtype=np.complex128)
        u[:3] = 1
        u.setflags(write=False)
        return u

    def product(self, a, b):
        a, b = self.check(a), self.check(b)
        tmp = (a @ self._C2).reshape(a.shape[:-1] + (27, 27))
        return (b[..., None, :] @ tmp)[..., 0, :]

    def mult_op(self, a):
        a = self.check(a)
        tmp = (a @ self._C2).reshape(a.shape[:-1] + (27, 27))
        return np.swapaxes(tmp, -1, -2)

    def star(self, a):
        return np.conj(self.check(a))

    def norm(self, a):
        """``sqrt`` of the top eigenvalue of ``L(a,a)``.

        Writing ``a = sum s_i e_i`` over orthogonal minimal tripotents,
        ``L(a,a) e_i = s_i^2 e_i``; the Albert algebra has rank 3, so the
        Krylov space spanned by ``a, L a, L^2 a`` already contains the top
        eigenvector and a small Rayleigh-Ritz problem gives it exactly.
        """
        a = self.check(a)
        Ma = self.mult_op(a)
        Mas = np.conj(Ma)  # real structure constants: M_{a*} = conj(M_a)
        L = self.mult_op(self.product(a, np.conj(a))) + Ma @ Mas - Mas @ Ma
        s = np.sqrt(self.trace_weights)
        H = s[:, None] * L / s[None, :]
        H = (H + np.conj(np.swapaxes(H, -1, -2))) / 2
        y = s * a
        cols = [y]
        for _ in range(3):  # one spare direction beyond the rank
            y = (H @ y[..., None])[..., 0]
            y = y / np.maximum(np.linalg.norm(y, axis=-1, keepdims=True), 1e-300)
            cols.append(y)
        Q, _ = np.linalg.qr(np.stack(cols, axis=-1))
        T = np.conj(np.swapaxes(Q, -1, -2)) @ H @ Q
        T = (T + np.conj(np.swapaxes(T, -1, -2))) / 2
        top = np.linalg.eigvalsh(T)[..., -1]
        out = np.sqrt(np.maximum(top, 0.0))
        return float(out) if out.ndim == 0 else out

    def triple_power_norm(self, a, max_iter=12, rtol=1e-8):
        """Norm as ``lim ||a^[3^k]||_2^(1/3^k)`` with ``a^[3] = {a,a,a}``.

        Independent (slowly converging) route; accuracy is roughly
        ``log(c)/3^k`` for the 2-norm equivalence constant ``c``.
        """
        a = self.check(a)
        nrm = np.linalg.norm(a)
        if nrm == 0:
            return 0.0
        x = a / nrm
        log_scale = np.log(nrm)
        est = nrm
        for k in range(1, max_iter + 1):
            x = self.triple(x, x, x)
            n = np.linalg.norm(x)
            if n == 0:
                return 0.0
            # a^[3^k] = exp(log_scale) * x_k
            log_scale = 3 * log_scale + np.log(n)
            x = x / n
            new = np.exp(log_scale / 3**k)
            if abs(new - est) < rtol * new:
                est = new
                break
            est = new
        return float(est)

    def to_octonion_matrix(self, a):
        return _albert_to_octmatrix(self.check(a))

    def descriptor(self):
        return {"kind": "albert"}


def albert_cubic_invariants(a):
    """Trace, quadratic trace and determinant ``(T, S, N)`` of an Albert element.

    For the layout of :class:`AlbertModel`::

        T = a1 + a2 + a3
        S = a1 a2 + a2 a3 + a3 a1 - n(c1) - n(c2) - n(c3)
        N = a1 a2 a3 - a1 n(c1) - a2 n(c2) - a3 n(c3) + t((c1 c2) c3)

    with ``n`` the octonion norm form and ``t`` the octonion trace.  The
    element then satisfies ``a^3 - T a^2 + S a - N 1 = 0``.
    """
    a = np.asarray(a, dtype=np.complex128)
    a1, a2, a3 = a[..., 0], a[..., 1], a[..., 2]
    c1, c2, c3 = a[..., 3:11], a[..., 11:19], a[..., 19:27]
    n1, n2, n3 = oct_norm_form(c1), oct_norm_form(c2), oct_norm_form(c3)
    T = a1 + a2 + a3
    S = a1 * a2 + a2 * a3 + a3 * a1 - n1 - n2 - n3
    N = a1 * a2 * a3 - a1 * n1 - a2 * n2 - a3 * n3 + oct_trace(oct_mul(oct_mul(c1, c2), c3))
    return T, S, N


class DirectSumModel(AlgebraModel):
    kind = "direct_sum"

    def __init__(self, parts):
        parts = list(parts)
        if len(parts) < 1:
            raise InvalidParameter("direct sum needs at least one summand")
        self.parts = tuple(parts)
        self.offsets = np.cumsum([0] + [p.dim for p in parts])
        self.dim = int(self.offsets[-1])
        strategies = {p.norm_strategy for p in parts}
        self.norm_strategy = strategies.pop() if len(strategies) == 1 else "Max"

    def split(self, a):
        a = np.asarray(a)
        return [a[..., self.offsets[i]: self.offsets[i + 1]] for i in range(len(self.parts))]

    def join(self, pieces):
        return np.concatenate(pieces, axis=-1)

    @cached_property
    def unit(self):
        u = self.join([p.unit for p in self.parts])
        u.setflags(write=False)
        return u

    def block_unit(self, i):
        """Unit of the ``i``-th summand, zero elsewhere (a central projection)."""
        pieces = [p.unit if j == i else p.zero() for j, p in enumerate(self.parts)]
        return self.join(pieces)

    def product(self, a, b):
        a, b = self.check(a), self.check(b)
        return self.join([p.product(x, y) for p, x, y in zip(self.parts, self.split(a), self.split(b))])

    def star(self, a):
        a = self.check(a)
        return self.join([p.star(x) for p, x in zip(self.parts, self.split(a))])

    def norm(self, a):
        a = self.check(a)
        norms = [p.norm(x) for p, x in zip(self.parts, self.split(a))]
        out = np.max(np.array(norms), axis=0)
        return float(out) if np.ndim(out) == 0 else out

    def random_element(self, rng, scale=1.0):
        return self.join([p.random_element(rng, scale) for p in self.parts])

    def signature(self):
        return ("direct_sum",) + tuple(p.signature() for p in self.parts)

    def descriptor(self):
        return {"kind": "direct_sum", "parts": [p.descriptor() for p in self.parts]}

    def spec_string(self):
        return "+".join(p.spec_string() for p in self.parts)


def build_matrix_model(n):
    return MatrixJordanModel(n)


def build_spin_model(k):
    return SpinFactorModel(k)


_ALBERT = None


def build_albert_model():
    """The Albert model (structure constants are built once and shared)."""
    global _ALBERT
    if _ALBERT is None:
        _ALBERT = AlbertModel()
    return _ALBERT


def build_direct_sum(models):
    return DirectSumModel(models)


def parse_model(spec):
    """Parse ``"matrix:3"``, ``"spin:4"``, ``"albert"`` and sums joined by
    ``+`` or ``⊕`` (e.g. ``"matrix:2+matrix:2"``)."""
    if not isinstance(spec, str) or not spec.strip():
        raise InvalidParameter("empty model spec")
    parts = [s.strip() for s in spec.replace("⊕", "+").split("+")]
    models = [_parse_leaf(s) for s in parts]
    return models[0] if len(models) == 1 else DirectSumModel(models)


def _parse_leaf(s):
    name, _, arg = s.partition(":")
    name = name.strip().lower()
    try:
        if name == "matrix":
            return MatrixJordanModel(int(arg))
        if name == "spin":
            return SpinFactorModel(int(arg))
    except ValueError as exc:
        raise InvalidParameter("bad size in model spec %r" % s) from exc
    if name == "albert" and not arg:
        return build_albert_model()
    raise InvalidParameter("unknown model spec %r" % s)


def model_from_descriptor(desc):
    kind = desc.get("kind")
    if kind == "matrix":
        return MatrixJordanModel(desc["n"])
    if kind == "spin":
        return SpinFactorModel(desc["k"])
    if kind == "albert":
        return build_albert_model()
    if kind == "direct_sum":
        return DirectSumModel([model_from_descriptor(p) for p in desc["parts"]])
    if kind == "isotope":
        from .isotope import isotope

        base = model_from_descriptor(desc["base"])
        u = np.array([complex(re, im) for re, im in desc["unit"]])
        return isotope(base, u)
    raise InvalidParameter("unknown model descriptor kind %r" % (kind,))
