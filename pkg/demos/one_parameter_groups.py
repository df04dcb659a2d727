"""Generators of one-parameter unitary families, and a broken family.

A family with U_{u(t)}(u(s)) = u(2t + s) is exp(i t h); the generator is read
from a logarithm, and t -> U_{u(t)} yields a triple derivation.
"""

import numpy as np

from jbstar.errors import GroupLawViolated
from jbstar.models import parse_model
from jbstar.stone import (
    derivation_from_path,
    faulty_path,
    planted_path,
    recover_generator_details,
    verify_group_law,
)

M = parse_model("spin:4")
h = M.random_self_adjoint(np.random.default_rng(5), 4.0)
path = planted_path(M, h, T=3.0)
rec = recover_generator_details(path)
print("||h|| = %.3f, recovered at t0 = %.4f" % (M.norm(h), rec.t0))
print("generator error %.1e, group law residual %.1e, finite-difference cross-check %.1e"
      % (M.norm(rec.h - h), rec.group_law, rec.finite_difference))

der = derivation_from_path(path, recovery=rec)
print("triple derivation: Leibniz residual %.1e, ||delta(1) - 2ih|| = %.1e" % (der.leibniz, der.unit_residual))

bad = faulty_path(M, h)
print("\nfrozen-for-negative-times family: group law residual %.3f" % verify_group_law(bad))
try:
    recover_generator_details(bad)
except GroupLawViolated as exc:
    print("refused:", exc)
