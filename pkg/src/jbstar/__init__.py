"""Finite-dimensional JB*-algebras: models, operator calculus, isotopes,
isometries between unitary sets and one-parameter unitary groups."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .models import (  # noqa: F401
    AlgebraModel,
    build_albert_model,
    build_direct_sum,
    build_matrix_model,
    build_spin_model,
    model_from_descriptor,
    parse_model,
)
