import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jbstar.calculus import U
from jbstar.errors import BranchCutExhausted, DomainExceeded, GroupLawViolated, InvalidParameter
from jbstar.isometry import random_structured_isometry
from jbstar.models import build_matrix_model, parse_model
from jbstar.stone import (
    UnitaryPath,
    derivation_from_path,
    faulty_path,
    planted_path,
    power_law_residual,
    recover_generator,
    recover_generator_details,
    structured_path,
    verify_group_law,
)


def test_scalar_generator_and_derivation_frozen():
    M = build_matrix_model(1)
    path = planted_path(M, np.array([3.0 + 0j]))
    assert path.validate() == (0.0, pytest.approx(0.0, abs=1e-14))
    h = recover_generator(path)
    assert h[0] == pytest.approx(3.0, abs=1e-12)
    der = derivation_from_path(path)
    # U_{u(t)} x = e^{6it} x, so the derivation is multiplication by 6i
    assert der.delta.matrix[0, 0] == pytest.approx(6j, abs=1e-9)
    assert der.unit_residual < 1e-9


def test_planted_generator_recovered(model):
    h = model.random_self_adjoint(np.random.default_rng(51), 2.0)
    path = planted_path(model, h)
    assert verify_group_law(path) < 1e-10
    rec = recover_generator_details(path)
    np.testing.assert_allclose(rec.h, h, atol=1e-8)
    assert rec.validation < 1e-9
    assert rec.self_adjointness < 1e-12
    assert rec.finite_difference < 1e-6
    der = derivation_from_path(path, recovery=rec)
    assert der.leibniz < 1e-8
    assert der.unit_residual < 1e-8
    assert der.unit_skew < 1e-8


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1))
def test_structured_path_is_a_one_parameter_group(seed):
    M = parse_model("matrix:2")
    sigma = random_structured_isometry(M, M, seed)
    omega = sigma.omega

    def delta0(X):
        return U(M, omega, sigma(X))

    delta0.batched = True
    h = M.random_self_adjoint(np.random.default_rng(seed), 1.0)
    path = structured_path(delta0, M, M, h)
    assert verify_group_law(path) < 1e-9
    k = recover_generator(path)
    np.testing.assert_allclose(M.star(k), k, atol=1e-12)


def test_large_generator_forces_halving():
    M = build_matrix_model(2)
    h = M.from_matrix(np.diag([40.0, -25.0]))
    path = planted_path(M, h, T=0.5)
    rec = recover_generator_details(path, t0=0.5)
    assert rec.t0 < 0.5
    np.testing.assert_allclose(rec.h, h, atol=1e-7)


def test_fault_injection_breaks_group_law():
    M = build_matrix_model(2)
    h = M.from_matrix(np.diag([1.0, -0.5]))
    path = faulty_path(M, h)
    assert verify_group_law(path) >= 0.1
    with pytest.raises(GroupLawViolated):
        recover_generator(path)


def test_branch_cut_exhaustion():
    M = build_matrix_model(1)
    # u(t) = e^{i pi t / t0} lands on -1 at every probed step; no valid log at t0
    path = planted_path(M, np.array([np.pi / 0.1 + 0j]), T=3.0)
    with pytest.raises(BranchCutExhausted):
        recover_generator(path, max_halvings=0)


def test_domain_is_enforced():
    M = build_matrix_model(1)
    path = planted_path(M, np.array([1.0 + 0j]), T=1.0)
    with pytest.raises(DomainExceeded):
        path(1.5)
    with pytest.raises(DomainExceeded):
        verify_group_law(path, pairs=[(0.9, 0.9)])
    with pytest.raises(InvalidParameter):
        recover_generator(path, t0=2.0)


def test_unbatched_path_and_power_law():
    M = build_matrix_model(1)
    path = UnitaryPath(lambda t: np.array([np.exp(2j * t)]), 3.0, M)
    assert path(np.array([0.0, 0.5])).shape == (2, 1)
    assert power_law_residual(path) < 1e-12
