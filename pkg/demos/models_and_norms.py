"""Tour of the concrete models: products, norms, cubic invariants.

Run:  python demos/models_and_norms.py
"""

import numpy as np

from jbstar.calculus import U, spectral_decompose
from jbstar.models import albert_cubic_invariants, parse_model

rng = np.random.default_rng(0)

for spec in ["matrix:3", "spin:4", "matrix:2+spin:3", "albert"]:
    M = parse_model(spec)
    a, b = M.random_element(rng), M.random_element(rng)
    axiom = abs(M.norm(M.triple(a, a, a)) - M.norm(a) ** 3) / M.norm(a) ** 3
    fund = M.norm(U(M, U(M, a, b), a) - U(M, a, U(M, b, U(M, a, a))))
    print("%-16s dim %2d   ||a|| = %.4f   JB*-axiom defect %.1e   fundamental identity %.1e"
          % (spec, M.dim, M.norm(a), axiom, fund))

# the Albert norm of a self-adjoint element is its largest eigenvalue in modulus
A = parse_model("albert")
h = A.random_self_adjoint(rng, 2.0)
T, S, N = albert_cubic_invariants(h)
roots = np.sort(np.roots([1, -T, S, -N]).real)
print("\nalbert: eigenvalues from the cubic  ", np.round(roots, 6))
print("albert: eigenvalues from the algebra", np.round(np.sort(spectral_decompose(A, h).eigenvalues.real), 6))
print("albert: norm %.6f, triple-power estimate %.6f" % (A.norm(h), A.triple_power_norm(h)))
