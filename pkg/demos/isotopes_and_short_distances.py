"""Isotopes and the midpoint of two close unitaries.

Two unitaries at distance below 2 are joined by a one-parameter group of the
isotope at the first one; halfway along sits a unitary w that carries u* to v.
"""

import numpy as np

from jbstar.calculus import U, exp_element
from jbstar.isometry import random_unitary
from jbstar.isotope import isotope, midpoint_witness, rigidity_residual, short_distance_log
from jbstar.errors import HypothesisNotMet, TooFar
from jbstar.models import parse_model

M = parse_model("matrix:3")
rng = np.random.default_rng(1)
u = random_unitary(M, rng)
Mu = isotope(M, u)
print("isotope unit is u:", np.allclose(Mu.unit, u))

for t0 in (0.3, 1.5, 3.0):
    h = Mu.random_self_adjoint(rng, t0)
    v = exp_element(Mu, 1j * h)
    w = midpoint_witness(M, u, v)
    print("t0 = %.1f   ||u - v|| = %.4f   ||U_w(u*) - v|| = %.1e   ||w - u|| = %.4f (bound %.4f)"
          % (t0, M.norm(u - v), M.norm(U(M, w, M.star(u)) - v), M.norm(w - u),
             np.sqrt(2 - 2 * np.cos(t0 / 2))))

try:
    short_distance_log(M, u, -u)
except TooFar as exc:
    print("antipodal pair refused:", exc)

res = rigidity_residual(M, u, u)
print("rigidity at w = u: residual %.1e, hypothesis met %s" % (res.residual, res.hypothesis_met))
try:
    rigidity_residual(M, u, -u, strict=True)
except HypothesisNotMet as exc:
    print("w = -u refused:", exc)
