"""Bioctonions: complexified octonions built by Cayley-Dickson doubling.

Doubling rule (applied three times starting from the reals)::

    (a, b)(c, d) = (ac - conj(d) b,  d a + b conj(c)),   conj(a, b) = (conj(a), -b)

Basis ``e0 = 1, e1 .. e7``.  The resulting real structure constants
``OCT_TABLE[i, j, k]`` (coefficient of ``e_k`` in ``e_i e_j``) are frozen
below; the bioctonion product is their complex-bilinear extension.  The
octonion conjugate is complex *linear* (it does not conjugate the complex
scalars).

Frozen table, row ``e_i`` times column ``e_j`` (``-3`` means ``-e3``)::

          e0   e1   e2   e3   e4   e5   e6   e7
    e0    e0   e1   e2   e3   e4   e5   e6   e7
    e1    e1  -e0   e3  -e2   e5  -e4  -e7   e6
    e2    e2  -e3  -e0   e1   e6   e7  -e4  -e5
    e3    e3   e2  -e1  -e0   e7  -e6   e5  -e4
    e4    e4  -e5  -e6  -e7  -e0   e1   e2   e3
    e5    e5   e4  -e7   e6  -e1  -e0  -e3   e2
    e6    e6   e7   e4  -e5  -e2   e3  -e0  -e1
    e7    e7  -e6   e5   e4  -e3  -e2   e1  -e0
"""

import numpy as np

__all__ = ["OCT_TABLE", "cd_multiply", "oct_mul", "oct_conj", "oct_norm_form", "oct_trace"]


def _cd_conj(x):
    n = x.shape[-1]
    if n == 1:
        return x.copy()
    h = n // 2
    return np.concatenate([_cd_conj(x[..., :h]), -x[..., h:]], axis=-1)


def cd_multiply(x, y):
    """Cayley-Dickson product of coefficient vectors of length ``2**k``."""
    n = x.shape[-1]
    if n == 1:
        return x * y
    h = n // 2
    a, b = x[..., :h], x[..., h:]
    c, d = y[..., :h], y[..., h:]
    first = cd_multiply(a, c) - cd_multiply(_cd_conj(d), b)
    second = cd_multiply(d, a) + cd_multiply(b, _cd_conj(c))
    return np.concatenate([first, second], axis=-1)


def _build_table():
    eye = np.eye(8)
    table = np.zeros((8, 8, 8))
    for i in range(8):
        for j in range(8):
            table[i, j] = cd_multiply(eye[i], eye[j])
    return table


OCT_TABLE = _build_table()
OCT_TABLE.setflags(write=False)


def oct_mul(x, y):
    """Bioctonion product; broadcasts over leading axes."""
    return np.einsum("...i,...j,ijk->...k", x, y, OCT_TABLE)


def oct_conj(x):
    x = np.array(x, dtype=np.complex128, copy=True)
    x[..., 1:] *= -1
    return x


def oct_norm_form(x):
    """Quadratic form ``n(x) = x conj(x)``: complex-bilinear sum of squares."""
    return np.sum(x * x, axis=-1)


def oct_trace(x):
    """``t(x) = x + conj(x)`` as a scalar."""
    return 2 * x[..., 0]
