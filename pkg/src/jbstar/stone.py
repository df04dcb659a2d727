"""One-parameter unitary families: group-law verification and recovery of
the self-adjoint generator and of the induced triple derivation.

A family ``t -> u(t)`` with ``u(0) = 1`` and ``U_{u(t)}(u(s)) = u(2t + s)``
is of the form ``u(t) = exp(i t h)``.  The generator is read off from a
logarithm at a small positive time rather than from finite differences.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import logm

from .calculus import (
    COMPLEX,
    LinearOperator,
    U,
    U_op,
    exp_element,
    log_unitary,
    triple_derivation_check,
    unitary_defect,
)
from .errors import BranchCut, BranchCutExhausted, DomainExceeded, GroupLawViolated, InvalidParameter
from .isometry import as_rng, call_oracle

__all__ = [
    "UnitaryPath",
    "planted_path",
    "structured_path",
    "faulty_path",
    "verify_group_law",
    "GeneratorRecovery",
    "recover_generator",
    "recover_generator_details",
    "DerivationResult",
    "derivation_from_path",
    "power_law_residual",
]

GROUP_LAW_TOL = 1e-7


@dataclass(frozen=True)
class UnitaryPath:
    """``t -> u(t)`` on ``[-T, T]``.

    ``func`` takes a real ``t`` (or an array of them when ``batched``) and
    returns coordinates in ``model``.
    """

    func: object
    T: float
    model: object
    batched: bool = False
    modulus: object = None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(np.abs(t) > self.T * (1 + 1e-12)):
            raise DomainExceeded("time outside [-%g, %g]" % (self.T, self.T))
        if t.ndim == 0 or self.batched:
            return np.asarray(self.func(t if t.ndim else float(t)))
        return np.array([self.func(float(s)) for s in t])

    def validate(self, samples=20, seed=0):
        """``(||u(0) - 1||, max unitary defect)`` on sampled times."""
        M = self.model
        ts = as_rng(seed).uniform(-self.T, self.T, samples)
        return float(M.norm(self(0.0) - M.unit)), float(np.max(unitary_defect(M, self(ts))))


def planted_path(M, h, T=3.0):
    """``u(t) = exp(i t h)``."""
    h = M.check(h)

    def func(t):
        return exp_element(M, 1j * np.multiply.outer(t, h))

    return UnitaryPath(func, float(T), M, batched=True)


def structured_path(delta0, M, N, h, T=3.0):
    """``t -> Delta0(exp(i t h))``: a one-parameter family in the target."""
    inner = planted_path(M, h, T)

    def func(t):
        return call_oracle(delta0, inner(t))

    return UnitaryPath(func, float(T), N, batched=True)


def faulty_path(M, h, T=3.0):
    """``exp(i t h)`` for ``t >= 0`` and ``1`` otherwise: breaks the group law."""
    good = planted_path(M, h, T)

    def func(t):
        t = np.asarray(t, dtype=float)
        out = good(np.maximum(t, 0.0))
        return np.where((t < 0)[..., None], M.unit, out)

    return UnitaryPath(func, float(T), M, batched=True)


def verify_group_law(path, samples=50, seed=0, pairs=None):
    """``max ||U_{u(t)}(u(s)) - u(2t + s)||`` over sampled ``(t, s)``.

    Random pairs are drawn from ``[-T/3, T/3]^2`` together with the corner
    pairs; explicit ``pairs`` must keep ``t``, ``s`` and ``2t + s`` in the
    domain.
    """
    M, T = path.model, path.T
    if pairs is None:
        c = T / 3
        corners = np.array([[c, -c], [-c, c], [c, c], [-c, -c], [c / 2, -c], [-c / 2, c]])
        pairs = np.concatenate([corners, as_rng(seed).uniform(-c, c, (samples, 2))])
    pairs = np.atleast_2d(np.asarray(pairs, dtype=float))
    t, s = pairs[:, 0], pairs[:, 1]
    if np.any(np.abs(np.concatenate([t, s, 2 * t + s])) > T * (1 + 1e-12)):
        raise DomainExceeded("sampled times leave [-T, T]")
    lhs = U(M, path(t), path(s))
    return float(np.max(np.atleast_1d(M.norm(lhs - path(2 * t + s)))))


@dataclass(frozen=True)
class GeneratorRecovery:
    h: np.ndarray
    t0: float
    validation: float  # sup over sampled t of ||u(t) - exp(i t h)||
    group_law: float
    self_adjointness: float
    finite_difference: float  # ||h - (u(eps) - u(-eps)) / (2 i eps)||, cross-check only


def recover_generator_details(path, t0=0.1, max_halvings=10, samples=20, seed=0, tol=1e-7):
    M = path.model
    if not 0 < t0 <= path.T:
        raise InvalidParameter("t0 must lie in (0, T]")
    law = verify_group_law(path, seed=seed)
    if law > GROUP_LAW_TOL:
        raise GroupLawViolated("group law residual %.3e" % law)
    ts = as_rng(seed).uniform(-path.T, path.T, samples)
    U_ts = path(ts)
    for _ in range(max_halvings + 1):
        try:
            h = log_unitary(M, path(t0)) / t0
        except BranchCut:
            t0 /= 2
            continue
        val = float(np.max(np.atleast_1d(M.norm(U_ts - exp_element(M, 1j * np.multiply.outer(ts, h))))))
        if val <= tol * max(1.0, M.norm(h)):
            eps = min(1e-5, t0)
            fd = (path(eps) - path(-eps)) / (2j * eps)
            return GeneratorRecovery(
                h, t0, val, law, float(M.norm(h - M.star(h))), float(M.norm(fd - h))
            )
        t0 /= 2
    raise BranchCutExhausted("no branch-safe step found after %d halvings" % max_halvings)


def recover_generator(path, t0=0.1, max_halvings=10, samples=20, seed=0, tol=1e-7):
    """Self-adjoint ``h`` with ``u(t) = exp(i t h)`` on the whole domain."""
    return recover_generator_details(path, t0, max_halvings, samples, seed, tol).h


@dataclass(frozen=True)
class DerivationResult:
    delta: LinearOperator
    leibniz: float
    unit_residual: float  # ||delta(1) - 2 i h||
    unit_skew: float  # ||delta(1)* + delta(1)||
    t0: float


def derivation_from_path(path, t0=0.1, seed=0, recovery=None):
    """``delta = log(U_{u(t0)}) / t0``: the generator of ``t -> U_{u(t)}``.

    ``U_{u(t)}`` has eigenvalues ``exp(i t (l_j + l_k))``, so ``t0`` is
    halved until ``2 t0 ||h|| < pi`` and the principal matrix logarithm is
    the right one.  A previous :func:`recover_generator_details` result
    may be passed as ``recovery``.
    """
    M = path.model
    rec = recovery if recovery is not None else recover_generator_details(path, t0=t0, seed=seed)
    t1 = rec.t0
    while 2 * t1 * M.norm(rec.h) >= np.pi - 1e-3:
        t1 /= 2
    A = U_op(M, path(t1)).matrix
    D = LinearOperator(logm(A) / t1, COMPLEX, M, M)
    chk = triple_derivation_check(M, D, seed=seed)
    d1 = D(M.unit)
    return DerivationResult(D, chk.leibniz, float(M.norm(d1 - 2j * rec.h)), chk.unit_skew, t1)


def power_law_residual(path, n_max=6, samples=10, seed=0):
    """``max ||u(t)^n - u(n t)||`` for ``n <= n_max`` and ``|n t| <= T``."""
    M = path.model
    ts = as_rng(seed).uniform(-path.T / n_max, path.T / n_max, samples)
    base = path(ts)
    worst = 0.0
    for n in range(1, n_max + 1):
        worst = max(worst, float(np.max(np.atleast_1d(M.norm(M.power(base, n) - path(n * ts))))))
    return worst
