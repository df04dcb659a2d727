"""JSON form of models, elements, operators and path specifications.

Schema (field names are fixed)::

    element   {"model": <descriptor>, "coords": [[re, im], ...]}
    batch     {"model": <descriptor>, "coords": [[[re, im], ...], ...]}
    operator  {"model": <descriptor>, "target": <descriptor>,
               "linearity": "complex" | "conjugate" | "real",
               "matrix": [[[re, im], ...], ...]}
    path      {"path": "planted", "model": <descriptor>, "h": [[re, im], ...], "T": 3.0}
              {"path": "structured", "model": <descriptor>, "h": [[re, im], ...],
               "T": 3.0, "seed": 0}

Descriptors are ``{"kind": "matrix", "n": 3}``, ``{"kind": "spin", "k": 4}``,
``{"kind": "albert"}``, ``{"kind": "direct_sum", "parts": [...]}`` and
``{"kind": "isotope", "base": ..., "unit": [[re, im], ...]}``.  Floats are
written with ``repr`` precision, so finite doubles round-trip bit for bit.
"""

import json

import numpy as np

from .calculus import COMPLEX, CONJUGATE, REAL, U, LinearOperator
from .errors import InvalidParameter
from .models import model_from_descriptor

__all__ = [
    "encode_complex",
    "decode_complex",
    "element_to_dict",
    "element_from_dict",
    "operator_to_dict",
    "operator_from_dict",
    "path_from_dict",
    "dumps",
    "loads",
]


def encode_complex(a):
    """Nested ``[re, im]`` pairs for a complex array of any shape."""
    a = np.asarray(a, dtype=np.complex128)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_complex(data):
    arr = np.asarray(data, dtype=np.float64)
    if arr.shape[-1:] != (2,):
        raise InvalidParameter("complex data must be [re, im] pairs")
    out = np.empty(arr.shape[:-1], dtype=np.complex128)
    out.real, out.imag = arr[..., 0], arr[..., 1]  # keeps signed zeros
    return out


def element_to_dict(M, x):
    x = M.check(x)
    return {"model": M.descriptor(), "coords": encode_complex(x)}


def element_from_dict(obj):
    """``(model, coords)``."""
    M = model_from_descriptor(obj["model"])
    return M, M.check(decode_complex(obj["coords"]))


def operator_to_dict(op):
    if op.linearity == COMPLEX:
        matrix = encode_complex(op.matrix)
    else:
        matrix = np.asarray(op.matrix, dtype=np.float64).tolist()
    target = op.target if op.target is not None else op.source
    return {
        "model": op.source.descriptor(),
        "target": target.descriptor(),
        "linearity": op.linearity,
        "matrix": matrix,
    }


def operator_from_dict(obj):
    lin = obj["linearity"]
    if lin not in (COMPLEX, CONJUGATE, REAL):
        raise InvalidParameter("unknown linearity %r" % (lin,))
    M = model_from_descriptor(obj["model"])
    N = model_from_descriptor(obj.get("target", obj["model"]))
    if lin == COMPLEX:
        mat = decode_complex(obj["matrix"])
    else:
        mat = np.asarray(obj["matrix"], dtype=np.float64)
    return LinearOperator(mat, lin, M, N)


def path_from_dict(obj):
    """Build a :class:`~jbstar.stone.UnitaryPath` from a job-file entry."""
    from .isometry import random_structured_isometry
    from .stone import planted_path, structured_path

    kind = obj.get("path")
    M = model_from_descriptor(obj["model"])
    h = M.check(decode_complex(obj["h"]))
    T = float(obj.get("T", 3.0))
    if kind == "planted":
        return planted_path(M, h, T)
    if kind == "structured":
        sigma = random_structured_isometry(M, M, int(obj.get("seed", 0)))
        omega = sigma.omega

        def delta0(X):
            return U(M, omega, sigma(X))

        delta0.batched = True
        return structured_path(delta0, M, M, h, T)
    raise InvalidParameter("unknown path kind %r" % (kind,))


def dumps(obj):
    return json.dumps(obj, sort_keys=True, allow_nan=False)


def loads(text):
    return json.loads(text)
