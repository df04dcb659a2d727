"""Doubling chains and the distance inequality near a pair of unitaries."""

import numpy as np

from jbstar.calculus import exp_element
from jbstar.isometry import (
    chain_subdivide,
    check_condition_B,
    doubling_check,
    random_structured_isometry,
    random_unitary,
    scalar_condition_B_enumeration,
)
from jbstar.isotope import isotope
from jbstar.models import parse_model

M = parse_model("matrix:3")
rng = np.random.default_rng(11)
h = M.random_self_adjoint(rng, 2.5)
sigma = random_structured_isometry(M, M, rng)
for m in (None, 4, 6):
    chain = chain_subdivide(M, h, 1.0, -1.0, m=m)
    res = doubling_check(sigma, M, M, chain)
    print("m = %d  points %3d  max step %.3f  endpoint residual %.1e"
          % (chain.m, len(chain.points), chain.max_step, res.endpoint_residual))

u = random_unitary(M, rng)
Mu = isotope(M, u)
v = exp_element(Mu, 0.3j * Mu.random_self_adjoint(rng))
rep = check_condition_B(M, u, v, samples=200, seed=2)
print("\ncondition B on matrix:3: K = %.3f, %d members (%d nontrivial), worst margin %.2e, %s"
      % (rep.K, rep.member_count, rep.nontrivial_count, rep.worst_margin, rep.verdict))

_, scalar = scalar_condition_B_enumeration()
print("scalar enumeration in C^3: %d members, worst margin %.2e, %s"
      % (scalar.member_count, scalar.worst_margin, scalar.verdict))
