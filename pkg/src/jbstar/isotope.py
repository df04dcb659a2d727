"""Isotopes ``M(u)``, unitary logarithms and the short-distance constructions.

The ``u``-isotope keeps the Banach space of ``M`` and uses

    x o_u y = {x, u, y},      x^{*_u} = {u, x, u},

with unit ``u``.  Both are evaluated through the base triple product, which
is the same in ``M`` and in every isotope, so no structure constants are
re-derived.
"""

from dataclasses import dataclass

import numpy as np

from .calculus import U, exp_element, is_unitary, log_unitary, spectral_decompose
from .errors import BranchCut, HypothesisNotMet, NoSpectralGap, NotUnitary, TooFar
from .models import AlgebraModel

__all__ = [
    "IsotopeModel",
    "isotope",
    "unitary_log",
    "short_distance_log",
    "midpoint_witness",
    "rigidity_residual",
    "RigidityResult",
    "DISTANCE_MARGIN",
]

DISTANCE_MARGIN = 1e-9


class IsotopeModel(AlgebraModel):
    kind = "isotope"

    def __init__(self, base, u):
        self.base = base
        self._u = np.array(base.check(u), dtype=np.complex128)
        self._u.setflags(write=False)
        self.dim = base.dim
        self.norm_strategy = base.norm_strategy

    @property
    def unit(self):
        return self._u

    def product(self, a, b):
        return self.base.triple(self.check(a), self._u, self.check(b))

    def mult_op(self, a):
        return self.base.box_op(self.check(a), self._u)

    def star(self, a):
        return self.base.triple(self._u, self.check(a), self._u)

    def norm(self, a):
        return self.base.norm(a)

    def random_element(self, rng, scale=1.0):
        return self.base.random_element(rng, scale)

    def signature(self):
        return ("isotope",) + self.base.signature()

    def descriptor(self):
        return {
            "kind": "isotope",
            "base": self.base.descriptor(),
            "unit": [[float(z.real), float(z.imag)] for z in self._u],
        }

    def spec_string(self):
        return "isotope(%s)" % self.base.spec_string()


def isotope(M, u):
    """The ``u``-isotope of ``M``; ``isotope(M, 1)`` is ``M`` itself."""
    u = M.check(u)
    if np.array_equal(u, M.unit):
        return M
    if not is_unitary(M, u):
        raise NotUnitary("isotopes are only formed at unitaries")
    return IsotopeModel(M, u)


def _largest_gap_cut(lam):
    """Angle in the middle of the widest gap between eigenvalue arguments."""
    ang = np.sort(np.angle(lam))
    if len(ang) == 1:
        return float(ang[0] + np.pi)
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    i = int(np.argmax(gaps))
    if gaps[i] < 1e-6:
        raise NoSpectralGap("spectrum leaves no usable gap on the circle")
    return float(ang[i] + gaps[i] / 2)


def unitary_log(M, u):
    """Self-adjoint ``h`` with ``exp(i h) = u``.

    The principal branch is used unless an eigenvalue sits within ``1e-8``
    of ``-1``; then the cut is moved to the widest spectral gap (and the
    eigenvalues of ``h`` are no longer confined to ``(-pi, pi]``).
    """
    u = M.check(u)
    if not is_unitary(M, u):
        raise NotUnitary("unitary_log needs a unitary argument")
    sd = spectral_decompose(M, u)
    try:
        return log_unitary(M, u, spectral=sd)
    except BranchCut:
        return log_unitary(M, u, cut=_largest_gap_cut(sd.eigenvalues), spectral=sd)


def _check_distance(M, u, v):
    eta = M.norm(u - v)
    if eta >= 2 - DISTANCE_MARGIN:
        raise TooFar("||u - v|| = %.12f is not below 2" % eta)
    return eta


def short_distance_log(M, u, v):
    """``h`` self-adjoint in ``M(u)`` with ``v = exp_u(i h)``."""
    u, v = M.check(u), M.check(v)
    _check_distance(M, u, v)
    Mu = isotope(M, u)
    return log_unitary(Mu, v)


def midpoint_witness(M, u, v):
    """Unitary ``w = exp_u(i h / 2)`` with ``U_w(u*) = v``."""
    u, v = M.check(u), M.check(v)
    h = short_distance_log(M, u, v)
    Mu = isotope(M, u)
    return exp_element(Mu, 0.5j * h)


@dataclass(frozen=True)
class RigidityResult:
    residual: float  # ||w - u||
    fixed_point_residual: float  # ||U_w(u*) - u||
    distance: float
    hypothesis_met: bool


def rigidity_residual(M, u, w, tol=1e-8, strict=False):
    """``||w - u||`` for unitaries with ``U_w(u*) = u`` and ``||u - w|| < 2``.

    Inputs violating the hypothesis are reported through
    ``hypothesis_met=False``, or raised as ``HypothesisNotMet`` when
    ``strict``.
    """
    u, w = M.check(u), M.check(w)
    fixed = M.norm(U(M, w, M.star(u)) - u)
    dist = M.norm(u - w)
    ok = bool(fixed <= tol and dist < 2 - DISTANCE_MARGIN)
    if strict and not ok:
        raise HypothesisNotMet(
            "need U_w(u*) = u (residual %.2e) and ||u - w|| < 2 (got %.12f)" % (fixed, dist)
        )
    return RigidityResult(float(dist), float(fixed), float(dist), ok)
