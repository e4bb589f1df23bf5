import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loclab import linalg as la
from loclab.errors import TheoryMismatch
from loclab.latrans import (
    SamplingConfig,
    compose_families,
    identity_family,
    lift_channel,
    lift_isometry,
    lift_unitary,
    zoo,
)
from loclab.reconstruct import (
    CHANNEL,
    ISOMETRY,
    NON_ISOMETRIC,
    NOT_CPTP,
    UNITARY,
    apply_choi,
    apply_choi_sandwich,
    certify,
    check_swap_compatibility,
    choi_from_kraus,
    choi_from_matrix,
    classify_operator,
    compose_choi,
    extract_choi,
    extract_pure_operator,
    teleport_apply,
    verify_equivalence,
)
from loclab.smt import Theory

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
seeds = st.integers(min_value=0, max_value=2**32 - 1)
CFG = SamplingConfig(trials=60, env_dims=(1, 2, 3))


def choi_loop(kraus):
    """Choi matrix by its defining sum over input basis pairs, J = Σ_ij E(|i><j|) ⊗ |i><j|."""
    d_out, d_in = kraus[0].shape
    j = np.zeros((d_out * d_in, d_out * d_in), dtype=complex)
    for i in range(d_in):
        for k in range(d_in):
            eik = np.zeros((d_in, d_in))
            eik[i, k] = 1.0
            j += np.kron(sum(K @ eik @ K.conj().T for K in kraus), eik)
    return j


# pure extraction

def test_identity_extracts_to_identity():
    op = extract_pure_operator(identity_family(2))
    assert np.allclose(op.matrix, np.eye(2)) and op.classification == UNITARY


@settings(max_examples=40, deadline=None)
@given(d_in=st.integers(1, 5), extra=st.integers(0, 1), seed=seeds)
def test_pure_round_trip(d_in, extra, seed):
    d_out = min(6, d_in + extra)
    v = la.haar_isometry(d_out, d_in, seed)
    op = extract_pure_operator(lift_isometry(v))
    assert np.linalg.norm(op.matrix - v) <= 1e-9
    assert op.classification == (UNITARY if d_in == d_out else ISOMETRY)
    assert op.isometry_defect <= 1e-8


def test_extraction_agrees_with_teleport_route():
    rng = np.random.default_rng(1)
    v = la.haar_isometry(4, 3, rng)
    chi = lift_isometry(v).apply(la.bell_state(3), 3)
    op = extract_pure_operator(lift_isometry(v))
    for _ in range(20):
        psi = la.random_pure(3, rng)
        assert np.linalg.norm(teleport_apply(chi, psi, 3) - op.matrix @ psi) <= 1e-12


def test_classify_non_isometry():
    defect, cls = classify_operator(np.array([[1, 1], [0, 1]], dtype=complex))
    assert cls == NON_ISOMETRIC and defect > 0.5


def test_extract_wrong_theory():
    with pytest.raises(TheoryMismatch):
        extract_pure_operator(identity_family(2, Theory.MIXED))
    with pytest.raises(TheoryMismatch):
        extract_choi(identity_family(2))


# Choi extraction

def test_identity_channel_choi():
    c = extract_choi(identity_family(2, Theory.MIXED))
    assert np.allclose(c.matrix, 2 * la.bell_projector(2))
    assert c.cp_defect == pytest.approx(0, abs=1e-15) and c.tp_defect == pytest.approx(0, abs=1e-15)


def test_depolarizing_choi():
    paulis = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    c = extract_choi(lift_channel([p / 2 for p in paulis]))
    assert np.allclose(c.matrix, np.eye(4) / 2, atol=1e-14)


def test_kraus_oracles_agree():
    ks = la.random_kraus_channel(2, 3, 4, 2)
    assert np.allclose(choi_from_kraus(ks).matrix, choi_loop(ks), atol=1e-13)


@pytest.mark.parametrize("d_in,d_out,rank", [(3, 3, 1), (3, 3, 5), (2, 4, 2), (4, 2, 8)])
def test_choi_round_trip(d_in, d_out, rank):
    rng = np.random.default_rng(d_in * 10 + rank)
    ks = la.random_kraus_channel(d_in, d_out, rank, rng)
    c = extract_choi(lift_channel(ks))
    assert np.linalg.norm(c.matrix - choi_loop(ks)) <= 1e-9
    assert c.cp_defect <= 1e-8 and c.tp_defect <= 1e-8 and c.is_channel()
    for _ in range(20):
        rho = la.random_density(d_in, rng)
        direct = sum(k @ rho @ k.conj().T for k in ks)
        assert np.linalg.norm(apply_choi(c, rho) - direct) <= 1e-9


def test_apply_choi_identity_and_sandwich():
    rng = np.random.default_rng(3)
    ident = extract_choi(identity_family(3, Theory.MIXED))
    c = extract_choi(lift_channel(la.random_kraus_channel(3, 3, 3, rng)))
    for _ in range(100):
        rho = la.random_density(3, rng)
        assert np.allclose(apply_choi(ident, rho), rho, atol=1e-13)
        assert np.linalg.norm(apply_choi(c, rho) - apply_choi_sandwich(c, rho)) <= 1e-10


def test_apply_choi_with_environment():
    rng = np.random.default_rng(4)
    ks = la.random_kraus_channel(2, 3, 2, rng)
    c = choi_from_kraus(ks)
    rho = la.random_density(2 * 3, rng)
    direct = sum(np.kron(k, np.eye(3)) @ rho @ np.kron(k, np.eye(3)).conj().T for k in ks)
    assert np.allclose(apply_choi(c, rho, env_dim=3), direct, atol=1e-12)


def test_transpose_choi_is_not_cp():
    c = extract_choi(zoo("transpose_mixed"), validate=False)
    assert np.allclose(c.matrix, la.swap(2, 2))
    assert c.cp_defect == pytest.approx(1.0, abs=1e-12)
    assert c.tp_defect <= 1e-12
    assert not c.is_completely_positive()


def test_cp_threshold_is_scale_relative():
    j = choi_from_matrix(np.diag([10.0, 10.0, 10.0, -5e-8]).astype(complex), 2, 2)
    assert j.is_completely_positive(1e-8)
    j = choi_from_matrix(np.diag([1.0, 0, 0, -5e-8]).astype(complex), 2, 2)
    assert not j.is_completely_positive(1e-8)


# composition

def test_pure_composition_preserved():
    rng = np.random.default_rng(5)
    for _ in range(20):
        v1, v2 = la.haar_isometry(3, 2, rng), la.haar_isometry(4, 3, rng)
        composed = compose_families(lift_isometry(v2), lift_isometry(v1))
        op = extract_pure_operator(composed)
        assert np.linalg.norm(op.matrix - v2 @ v1) <= 1e-9
        assert op.classification == ISOMETRY


def test_mixed_composition_preserved():
    rng = np.random.default_rng(6)
    for _ in range(20):
        k1, k2 = la.random_kraus_channel(2, 3, 2, rng), la.random_kraus_channel(3, 2, 3, rng)
        composed = extract_choi(compose_families(lift_channel(k2), lift_channel(k1)))
        expected = compose_choi(extract_choi(lift_channel(k2)), extract_choi(lift_channel(k1)))
        assert np.linalg.norm(composed.matrix - expected.matrix) <= 1e-9
        sequential = choi_loop([b @ a for b in k2 for a in k1])
        assert np.linalg.norm(composed.matrix - sequential) <= 1e-9


# equivalence and swap

def test_equivalence_for_lifted_families():
    v = la.haar_isometry(3, 2, 7)
    fam = lift_isometry(v)
    assert verify_equivalence(fam, extract_pure_operator(fam), CFG).max_gap <= 1e-9
    ch = lift_channel(la.random_kraus_channel(2, 2, 3, 7))
    assert verify_equivalence(ch, extract_choi(ch), CFG).max_gap <= 1e-9


def test_equivalence_fails_for_nonlinear_phase():
    fam = zoo("nonlinear_phase", theta=0.7)
    rep = verify_equivalence(fam, extract_pure_operator(fam, validate=False), CFG)
    assert not rep.passed and rep.witness is not None and rep.witness.gap > 1e-3


def test_swap_compatibility():
    ident = check_swap_compatibility(identity_family(2, Theory.MIXED), CFG)
    assert ident.max_gap == 0.0
    for s in range(5):
        fam = lift_channel(la.random_kraus_channel(2, 2, 3, s))
        rep = check_swap_compatibility(fam, SamplingConfig(trials=100, env_dims=(2,), seed=s))
        assert rep.passed and rep.max_gap <= 1e-9


def test_swap_compatibility_needs_mixed():
    with pytest.raises(TheoryMismatch):
        check_swap_compatibility(identity_family(2), CFG)


# certify

def test_certify_hadamard():
    cert = certify(lift_unitary(H), CFG)
    assert cert.verdict == "LocallyApplicable" and cert.classification == UNITARY
    assert np.allclose(cert.extracted.matrix, H, atol=1e-12)


def test_certify_isometry_and_channel():
    cert = certify(lift_isometry(la.haar_isometry(3, 2, 8)), CFG)
    assert cert.locally_applicable and cert.classification == ISOMETRY
    cert = certify(lift_channel(la.random_kraus_channel(3, 3, 4, 8)), CFG)
    assert cert.locally_applicable and cert.classification == CHANNEL
    assert cert.cp_defect <= 1e-8 and cert.tp_defect <= 1e-8


def test_certify_constant_mixed_is_channel():
    cert = certify(zoo("constant_mixed"), CFG)
    assert cert.locally_applicable and cert.classification == CHANNEL


@pytest.mark.parametrize("name", ["constant_pure", "nonlinear_phase", "transpose_mixed"])
def test_certify_zoo_violators(name):
    cert = certify(zoo(name), SamplingConfig(trials=200, env_dims=(2,)))
    assert cert.verdict == "Violating" and cert.witnesses
    if name == "transpose_mixed":
        assert cert.classification == NOT_CPTP
        assert any(w.kind == "invalid_output" for w in cert.witnesses)


def test_certificate_json_shape():
    obj = certify(lift_unitary(H), CFG).to_json()
    for key in ("verdict", "classification", "isometry_defect", "cp_defect", "tp_defect",
                "equivalence_max_gap", "witnesses"):
        assert key in obj
    assert obj["cp_defect"] is None and obj["witnesses"] == []
