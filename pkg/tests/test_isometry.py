import numpy as np
import pytest
from hypothesis import given, strategies as st

from jbstar.calculus import U, exp_element, is_unitary
from jbstar.errors import HypothesisNotMet, NotUnitary, StructureMismatch
from jbstar.isometry import (
    StructuredIsometry,
    apply_structured,
    chain_subdivide,
    check_condition_B,
    doubling_check,
    identity_isomorphism,
    minimal_chain_depth,
    random_jordan_star_isomorphism,
    random_self_adjoints,
    random_structured_isometry,
    random_symmetry,
    random_unitaries,
    random_unitary,
    scalar_condition_B_enumeration,
    verify_inverted_triple_preservation,
)
from jbstar.models import build_matrix_model, build_spin_model, parse_model

seeds = st.integers(0, 2**32 - 1)


def test_random_isomorphism_preserves_structure(model):
    phi = random_jordan_star_isomorphism(model, model, 31)
    res = phi.invariant_residuals(seed=1)
    assert max(res.values()) < 1e-10, res
    back = phi.compose(phi.inverse())
    np.testing.assert_allclose(back.matrix, np.eye(model.dim), atol=1e-10)


def test_isomorphism_requires_matching_structure():
    with pytest.raises(StructureMismatch):
        random_jordan_star_isomorphism(build_matrix_model(2), build_spin_model(3), 0)


def test_direct_sum_isomorphism_can_swap_equal_summands():
    M = parse_model("matrix:2+matrix:2")
    recipes = {random_jordan_star_isomorphism(M, M, s).recipe[-1] for s in range(20)}
    assert any("permutation" in r for r in recipes)


def test_random_samplers(model):
    H = random_self_adjoints(model, 2, 5)
    np.testing.assert_allclose(model.star(H), H, atol=1e-14)
    assert np.all(model.norm(H) <= 0.9 * np.pi + 1e-12)
    for u in random_unitaries(model, 3, 4):
        assert is_unitary(model, u)
    s = random_symmetry(model, 4)
    np.testing.assert_allclose(model.product(s, s), model.unit, atol=1e-10)
    np.testing.assert_allclose(model.star(s), s, atol=1e-10)


def test_apply_structured_frozen_cases():
    M = build_matrix_model(2)
    idm = identity_isomorphism(M)
    u = M.from_matrix(np.array([[0, 1j], [1, 0]]))
    one = StructuredIsometry(M.unit, M.unit, idm)
    star = StructuredIsometry(M.unit, M.zero(), idm)
    np.testing.assert_allclose(apply_structured(one, u), u)
    np.testing.assert_allclose(apply_structured(star, u), M.star(u))
    # omega = i: U_{omega*}(x) = -x
    rot = StructuredIsometry(1j * M.unit, M.unit, idm)
    np.testing.assert_allclose(apply_structured(rot, u), -u, atol=1e-15)
    with pytest.raises(NotUnitary):
        apply_structured(one, 2 * u)


@given(seeds, st.sampled_from(["matrix:2", "spin:3", "matrix:1+matrix:2"]))
def test_structured_isometry_is_isometric_on_unitaries(seed, spec):
    M = parse_model(spec)
    sigma = random_structured_isometry(M, M, seed)
    U1, U2 = random_unitaries(M, seed, 2)
    d_src = M.norm(U1 - U2)
    d_tgt = M.norm(sigma(U1) - sigma(U2))
    assert d_tgt == pytest.approx(d_src, rel=1e-10, abs=1e-12)
    assert is_unitary(M, sigma(U1))


def test_inverted_triple_preservation(model):
    sigma = random_structured_isometry(model, model, 5)
    u = random_unitary(model, 6)
    v = U(model, exp_element(model, 0.05j * model.random_self_adjoint(np.random.default_rng(7))), u)
    assert verify_inverted_triple_preservation(sigma, model, model, u, v) < 1e-10
    with pytest.raises(HypothesisNotMet):
        verify_inverted_triple_preservation(sigma, model, model, u, -u)


def test_scalar_chain_frozen():
    M = build_matrix_model(1)
    chain = chain_subdivide(M, np.array([1.0 + 0j]), 3.0, 0.0)
    assert chain.m == 3
    assert len(chain.points) == 17
    assert chain.max_step == pytest.approx(2 * np.sin(3 / 16))
    np.testing.assert_allclose(chain.points[-1], np.exp(6j), atol=1e-13)
    assert chain.link_residual < 1e-14


@pytest.mark.parametrize("x, m", [(0.0, 0), (0.4, 0), (0.5, 1), (3.0, 3), (10.0, 5)])
def test_minimal_chain_depth(x, m):
    assert minimal_chain_depth(x) == m


def test_doubling_for_structured_isometry(model):
    sigma = random_structured_isometry(model, model, 8)
    h = model.random_self_adjoint(np.random.default_rng(9))
    chain = chain_subdivide(model, h, 1.3, -0.4, m=2)
    res = doubling_check(sigma, model, model, chain)
    assert res.endpoint_residual < 1e-10
    assert res.link_residual < 1e-10
    assert res.endpoint_identity < 1e-10


def test_doubling_rejects_bad_chains():
    M = build_matrix_model(1)
    idm = identity_isomorphism(M)
    with pytest.raises(HypothesisNotMet):
        doubling_check(idm, M, M, np.ones((4, 1), dtype=complex))
    with pytest.raises(HypothesisNotMet):
        doubling_check(idm, M, M, np.exp(1j * np.array([[0.0], [0.1], [0.5]])))


def test_scalar_condition_B_enumeration_frozen():
    M, rep = scalar_condition_B_enumeration()
    assert M.dim == 3
    assert rep.member_count == 15
    assert rep.nontrivial_count == 14
    assert rep.verdict == "pass"
    assert rep.worst_margin >= -1e-12


def test_condition_B_sampled(model):
    rng = np.random.default_rng(10)
    u = random_unitary(model, rng)
    v = U(model, exp_element(model, 0.1j * model.random_self_adjoint(rng)), u)
    rep = check_condition_B(model, u, v, samples=50, seed=1)
    assert rep.verdict in ("pass", "warn")
    assert rep.member_count >= 1
    assert rep.worst_margin >= -1e-7


def test_condition_B_hypothesis():
    M = build_matrix_model(2)
    with pytest.raises(HypothesisNotMet):
        check_condition_B(M, M.unit, -M.unit)
