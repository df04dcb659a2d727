import json

import numpy as np
import pytest

from jbstar.calculus import exp_element
from jbstar.errors import (
    CentralSymmetryFailure,
    ExtensionMismatch,
    InvalidParameter,
    StructureMismatch,
)
from jbstar.isometry import (
    StructuredIsometry,
    identity_isomorphism,
    random_jordan_star_isomorphism,
    random_structured_isometry,
    random_unitaries,
)
from jbstar.models import build_matrix_model, build_spin_model, parse_model
from jbstar.reconstruct import equivalence_witness, log_near_unit, reconstruct, triple_decomposition


def _star(M):
    def delta(X):
        return M.star(X)

    delta.batched = True
    return delta


def test_log_near_unit_matches_exp():
    M = build_spin_model(3)
    rng = np.random.default_rng(41)
    H = np.array([M.random_self_adjoint(rng, s) for s in (0.05, 0.3, 2.5)])
    np.testing.assert_allclose(log_near_unit(M, exp_element(M, 1j * H)), H, atol=1e-12)


def test_identity_is_recovered(model):
    rep = reconstruct(lambda x: x, model, model, probes=20, spot_pairs=10)
    assert rep.verdict == "pass"
    np.testing.assert_allclose(rep.omega, model.unit, atol=1e-9)
    np.testing.assert_allclose(rep.p, model.unit, atol=1e-12)
    np.testing.assert_allclose(rep.phi.matrix, np.eye(model.dim), atol=1e-8)


def test_star_on_matrices_gives_p_zero():
    M = build_matrix_model(2)
    rep = reconstruct(_star(M), M, M, probes=20, spot_pairs=10)
    assert rep.verdict == "pass"
    np.testing.assert_allclose(rep.p, 0, atol=1e-12)
    np.testing.assert_allclose(rep.omega, M.unit, atol=1e-9)
    np.testing.assert_allclose(rep.phi.matrix, np.eye(M.dim), atol=1e-8)


def test_planted_structure_is_recovered(model):
    sigma = random_structured_isometry(model, model, 42)
    rep = reconstruct(sigma, model, model, seed=1, probes=30, spot_pairs=10)
    assert rep.verdict in ("pass", "warn"), rep.residuals
    assert rep.p_snapped
    assert max(rep.residuals.values()) < 1e-6
    probe = random_unitaries(model, 7, 10)
    np.testing.assert_allclose(rep.psi(probe), sigma(probe), atol=1e-7)
    # the recovered Phi is a Jordan *-isomorphism
    assert max(rep.phi.invariant_residuals().values()) < 1e-8


def test_mixed_central_projection_on_direct_sum():
    M = parse_model("matrix:2+matrix:2")
    phi = random_jordan_star_isomorphism(M, M, 3)
    p = np.zeros(M.dim, dtype=complex)
    p[:4] = M.parts[0].unit
    sigma = StructuredIsometry(np.array(M.unit), p, phi)
    rep = reconstruct(sigma, M, M, probes=20, spot_pairs=10)
    assert rep.verdict == "pass"
    probe = random_unitaries(M, 8, 5)
    np.testing.assert_allclose(rep.psi(probe), sigma(probe), atol=1e-7)


def test_squaring_is_not_an_isometry():
    M = build_matrix_model(2)

    def square(X):
        return M.product(X, X)

    square.batched = True
    with pytest.raises(CentralSymmetryFailure):
        reconstruct(square, M, M, probes=10, spot_pairs=5)


def test_non_isometry_fails_or_raises():
    # a unit-preserving rotation that is not Jordan: conjugation on one coordinate only
    M = build_spin_model(3)

    def bad(X):
        X = np.array(X, dtype=complex)
        X[..., 1] = np.conj(X[..., 1])
        return X

    bad.batched = True
    try:
        rep = reconstruct(bad, M, M, probes=10, spot_pairs=5)
    except (CentralSymmetryFailure, ExtensionMismatch):
        return
    assert rep.verdict == "fail"
    with pytest.raises(ExtensionMismatch):
        reconstruct(bad, M, M, probes=10, spot_pairs=5, strict=True)


def test_reconstruct_argument_checks():
    with pytest.raises(StructureMismatch):
        reconstruct(lambda x: x, build_matrix_model(2), build_matrix_model(3))
    with pytest.raises(InvalidParameter):
        M = build_matrix_model(1)
        reconstruct(lambda x: x, M, M, t_start=2.0)


def test_report_json_keys():
    M = build_matrix_model(2)
    rep = reconstruct(random_structured_isometry(M, M, 4), M, M, seed=5, probes=10, spot_pairs=5)
    d = json.loads(rep.to_json())
    assert set(d) == {
        "stages", "tolerances", "verdict", "seed", "model", "p_snapped",
        "hypothesis1_held", "notes", "timing",
    }
    assert set(d["stages"]) == set(d["tolerances"])
    assert d["model"]["source"] == {"kind": "matrix", "n": 2}


def test_triple_decomposition(model):
    sigma = random_structured_isometry(model, model, 43)
    td = triple_decomposition(sigma, seed=2)
    assert max(td.residuals.values()) < 1e-9, td.residuals


def test_equivalence_both_directions(model):
    a = equivalence_witness(model, model, "a->c", seed=3, samples=10)
    assert a.ok, a.residuals
    c = equivalence_witness(model, model, "c->a", seed=3)
    assert c.ok, c.residuals


def test_equivalence_argument_checks():
    M = build_matrix_model(2)
    with pytest.raises(InvalidParameter):
        equivalence_witness(M, M, "b->a")
    with pytest.raises(StructureMismatch):
        equivalence_witness(M, build_spin_model(3), "a->c")


def test_identity_isomorphism_recovered_exactly_for_trivial_omega():
    M = build_spin_model(2)
    sigma = StructuredIsometry(np.array(M.unit), np.array(M.unit), identity_isomorphism(M))
    rep = reconstruct(sigma, M, M, probes=10, spot_pairs=5)
    assert rep.hypothesis1_held
    np.testing.assert_allclose(rep.phi.matrix, np.eye(M.dim), atol=1e-8)
