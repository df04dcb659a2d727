import numpy as np
import pytest
from hypothesis import given, strategies as st

from jbstar.calculus import U, exp_element, is_unitary
from jbstar.errors import HypothesisNotMet, NotUnitary, TooFar
from jbstar.isometry import random_unitary
from jbstar.isotope import (
    isotope,
    midpoint_witness,
    rigidity_residual,
    short_distance_log,
    unitary_log,
)
from jbstar.models import build_matrix_model, build_spin_model

seeds = st.integers(0, 2**32 - 1)


def test_isotope_at_unit_is_the_model(model):
    assert isotope(model, model.unit) is model


def test_isotope_unit_and_axioms(model):
    rng = np.random.default_rng(21)
    u = random_unitary(model, rng)
    Mu = isotope(model, u)
    np.testing.assert_allclose(Mu.unit, u, atol=1e-15)
    a, b = model.random_element(rng), model.random_element(rng)
    np.testing.assert_allclose(Mu.product(Mu.unit, a), a, atol=1e-11)
    # same norm, JB*-axiom for the new triple product
    assert Mu.norm(a) == pytest.approx(model.norm(a), rel=1e-12)
    assert Mu.norm(Mu.triple(a, a, a)) == pytest.approx(Mu.norm(a) ** 3, rel=1e-9)
    # the involution of the isotope is an isometric conjugate-linear involution
    np.testing.assert_allclose(Mu.star(Mu.star(b)), b, atol=1e-11)


def test_isotope_rejects_non_unitary():
    M = build_matrix_model(2)
    with pytest.raises(NotUnitary):
        isotope(M, 2 * M.unit)


def test_isotope_matrix_product_formula():
    # in M_n the u-isotope product is (a u* b + b u* a) / 2
    M = build_matrix_model(2)
    rng = np.random.default_rng(22)
    u = random_unitary(M, rng)
    a, b = M.random_element(rng), M.random_element(rng)
    A, B, Uu = M.embed(a), M.embed(b), M.embed(u)
    want = (A @ Uu.conj().T @ B + B @ Uu.conj().T @ A) / 2
    np.testing.assert_allclose(M.embed(isotope(M, u).product(a, b)), want, atol=1e-12)


def test_scalar_midpoint_frozen():
    M = build_matrix_model(1)
    u, v = np.array([1.0 + 0j]), np.array([1j])
    h = short_distance_log(M, u, v)
    assert h[0].real == pytest.approx(np.pi / 2)
    w = midpoint_witness(M, u, v)
    np.testing.assert_allclose(U(M, w, M.star(u)), v, atol=1e-14)
    assert M.norm(w - u) == pytest.approx(2 * np.sin(np.pi / 8), abs=1e-12)  # 0.76537...


@given(seeds, st.sampled_from(["matrix:2", "spin:3"]))
def test_short_distance_log(seed, spec):
    from jbstar.models import parse_model

    M = parse_model(spec)
    rng = np.random.default_rng(seed)
    u = random_unitary(M, rng)
    v = U(M, exp_element(M, 0.4j * M.random_self_adjoint(rng)), u)  # stays near u
    if M.norm(u - v) >= 1.99:
        return
    h = short_distance_log(M, u, v)
    Mu = isotope(M, u)
    np.testing.assert_allclose(Mu.star(h), h, atol=1e-9)
    np.testing.assert_allclose(exp_element(Mu, 1j * h), v, atol=1e-9)
    w = midpoint_witness(M, u, v)
    assert is_unitary(M, w)
    np.testing.assert_allclose(U(M, w, M.star(u)), v, atol=1e-9)


def test_too_far():
    M = build_spin_model(3)
    with pytest.raises(TooFar):
        short_distance_log(M, M.unit, -M.unit)


def test_unitary_log_rotates_cut_past_minus_one():
    M = build_matrix_model(2)
    u = M.from_matrix(np.diag([-1.0, 1j]))
    h = unitary_log(M, u)
    np.testing.assert_allclose(exp_element(M, 1j * h), u, atol=1e-12)
    np.testing.assert_allclose(M.star(h), h, atol=1e-14)


def test_rigidity_on_fixed_point():
    M = build_matrix_model(2)
    rng = np.random.default_rng(23)
    u = random_unitary(M, rng)
    res = rigidity_residual(M, u, u)
    assert res.hypothesis_met
    assert res.residual == 0.0


def test_rigidity_strict_rejects_antipode():
    M = build_matrix_model(2)
    u = M.unit
    w = -u  # U_w(u*) = u but ||u - w|| = 2
    assert not rigidity_residual(M, u, w).hypothesis_met
    with pytest.raises(HypothesisNotMet):
        rigidity_residual(M, u, w, strict=True)
