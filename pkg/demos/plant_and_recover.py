"""Plant a surjective isometry between unitary sets and recover its structure.

The planted map is u -> U_{omega*}(p o Phi(u) + (1 - p) o Phi(u*)) with a
random unitary omega, a random central projection p and a random Jordan
*-isomorphism Phi.  Reconstruction only sees the map as a black box.
"""

import numpy as np

from jbstar.isometry import random_structured_isometry, random_unitaries
from jbstar.models import parse_model
from jbstar.reconstruct import reconstruct

M = parse_model("matrix:2+spin:3+matrix:2")
sigma = random_structured_isometry(M, M, seed=6)
print("planted Phi:", ", ".join(sigma.phi.recipe))
print("planted p on the summands:", [round(float(P.norm(x)), 3) for P, x in zip(M.parts, M.split(sigma.p))])

rep = reconstruct(sigma, M, M, seed=3)
print("\nverdict:", rep.verdict, "  p snapped:", rep.p_snapped, "  p matches:", np.array_equal(rep.p, sigma.p))
for stage, value in rep.residuals.items():
    print("  %-18s %.2e  (tol %.0e)" % (stage, value, rep.tolerances[stage]))

probe = random_unitaries(M, 99, 200)
print("\nsup over 200 fresh unitaries of ||Psi(u) - Delta(u)||: %.2e"
      % np.max(M.norm(rep.psi(probe) - sigma(probe))))
print("omega recovered up to the ambiguity of the triple:",
      np.allclose(rep.psi(M.unit), sigma(M.unit)))
