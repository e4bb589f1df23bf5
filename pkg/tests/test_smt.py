import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loclab import linalg as la
from loclab.errors import DimensionMismatch, TheoryMismatch, ZeroProbabilityUpdate
from loclab.smt import (
    MixedState,
    Outcome,
    PureState,
    SystemLabel,
    Theory,
    born,
    born_mixed,
    born_pure,
    compose_outcomes,
    compose_states,
    lift_pure,
    null_outcome,
    outcome_from_json,
    outcome_to_json,
    state_from_json,
    state_to_json,
    update,
    update_mixed,
    update_pure,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=1, max_value=6)

ZERO, ONE = la.basis(2, 0), la.basis(2, 1)
PLUS = la.ket(1, 1) / np.sqrt(2)


def proj_phase_equal(a, b, atol=1e-12):
    return np.allclose(la.projector(a), la.projector(b), atol=atol)


def test_system_label():
    ab = SystemLabel.of(2) @ SystemLabel.of(3, 4)
    assert ab.dims == (2, 3, 4) and ab.total_dim == 24
    with pytest.raises(ValueError):
        SystemLabel(())
    with pytest.raises(ValueError):
        SystemLabel((2, 0))


def test_state_validation():
    with pytest.raises(ValueError):
        PureState(2, la.ket(1, 1))
    with pytest.raises(DimensionMismatch):
        PureState(3, PLUS)
    with pytest.raises(ValueError):
        MixedState(2, np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        MixedState(2, np.eye(2))
    with pytest.raises(ValueError):
        Outcome(2, np.diag([0.5, 1.0]))


def test_null_outcome_is_identity():
    assert np.array_equal(null_outcome(2).projector, np.eye(2))
    assert null_outcome(SystemLabel.of(2, 3)).projector.shape == (6, 6)


def test_born_pure_examples():
    assert born_pure(ZERO, la.projector(ZERO)) == 1.0
    assert born_pure(PLUS, la.projector(ZERO)) == pytest.approx(0.5, abs=1e-15)
    psi_c = la.conjugate(la.random_pure(2, 0))
    assert born_pure(la.bell_state(2), la.tensor(np.eye(2), la.projector(psi_c))) == pytest.approx(0.5, abs=1e-12)


def test_update_pure_examples():
    assert proj_phase_equal(update_pure(PLUS, la.projector(ZERO)), ZERO)
    with pytest.raises(ZeroProbabilityUpdate):
        update_pure(ZERO, la.projector(ONE))


@pytest.mark.parametrize("d", range(2, 6))
def test_update_by_bell_effect_teleports(d):
    rng = np.random.default_rng(d)
    for _ in range(20):
        psi = la.random_pure(d, rng)
        psi_c = la.conjugate(psi)
        out = update_pure(la.bell_state(d), la.tensor(np.eye(d), la.projector(psi_c)))
        assert np.linalg.norm(out - la.tensor(psi, psi_c)) <= 1e-10


def test_born_and_update_mixed_examples():
    rng = np.random.default_rng(1)
    for d in range(1, 6):
        pi = la.random_projector(d, rng)
        rank = round(np.trace(pi).real)
        assert born_mixed(np.eye(d) / d, pi) == pytest.approx(rank / d, abs=1e-12)
        assert born_mixed(la.random_density(d, rng), np.eye(d)) == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(update_mixed(np.eye(2) / 2, la.projector(ZERO)), la.projector(ZERO))


def test_wrappers_round_trip_through_updates():
    s = PureState(2, PLUS)
    out = update(s, Outcome(2, la.projector(ZERO)))
    assert isinstance(out, PureState) and proj_phase_equal(out.ket, ZERO)
    m = MixedState(2, np.eye(2) / 2)
    out = update(m, Outcome(2, la.projector(ONE)))
    assert isinstance(out, MixedState) and np.allclose(out.rho, la.projector(ONE))
    assert born(m, null_outcome(2)) == 1.0


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        born_pure(ZERO, np.eye(3))
    with pytest.raises(DimensionMismatch):
        born_mixed(np.eye(2) / 2, np.eye(3))


@settings(max_examples=60, deadline=None)
@given(d=dims, seed=seeds)
def test_null_measurement_laws(d, seed):
    rng = np.random.default_rng(seed)
    psi, rho = la.random_pure(d, rng), la.random_density(d, rng)
    eye = null_outcome(d)
    assert born_pure(psi, eye) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(update_pure(psi, eye), psi, atol=1e-12)
    assert born_mixed(rho, eye) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(update_mixed(rho, eye), rho, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(d=dims, seed=seeds)
def test_probability_bounds_and_repeatability(d, seed):
    rng = np.random.default_rng(seed)
    psi, rho, pi = la.random_pure(d, rng), la.random_density(d, rng), la.random_projector(d, rng)
    p, q = born_pure(psi, pi), born_mixed(rho, pi)
    assert 0.0 <= p <= 1.0 and 0.0 <= q <= 1.0
    if p > 1e-6:
        once = update_pure(psi, pi)
        assert np.allclose(update_pure(once, pi), once, atol=1e-10)
    if q > 1e-6:
        once = update_mixed(rho, pi)
        assert np.allclose(update_mixed(once, pi), once, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(d=dims, seed=seeds)
def test_pure_and_mixed_rules_agree(d, seed):
    rng = np.random.default_rng(seed)
    psi, pi = la.random_pure(d, rng), la.random_projector(d, rng)
    rho = lift_pure(PureState(d, psi)).rho
    p = born_pure(psi, pi)
    assert abs(born_mixed(rho, pi) - p) <= 1e-10
    if p > 1e-6:
        assert np.allclose(la.projector(update_pure(psi, pi)), update_mixed(rho, pi), atol=1e-10)


def test_compose_states_and_outcomes():
    s = compose_states(PureState(2, ZERO), PureState(2, ONE))
    assert s.system.dims == (2, 2) and np.allclose(s.ket.ravel(), [0, 1, 0, 0])
    with pytest.raises(TheoryMismatch):
        compose_states(PureState(2, ZERO), MixedState(2, np.eye(2) / 2))
    rng = np.random.default_rng(3)
    m = compose_outcomes(Outcome(2, la.random_projector(2, rng)), Outcome(3, la.random_projector(3, rng)))
    assert np.linalg.norm(m.projector @ m.projector - m.projector) <= 1e-12


def test_compose_states_associative():
    rng = np.random.default_rng(4)
    a, b, c = (MixedState(d, la.random_density(d, rng)) for d in (2, 3, 2))
    left = compose_states(compose_states(a, b), c)
    right = compose_states(a, compose_states(b, c))
    assert left.system == right.system
    assert np.linalg.norm(left.rho - right.rho) <= 1e-12
    assert np.linalg.norm(left.rho - np.kron(np.kron(a.rho, b.rho), c.rho)) <= 1e-12


def test_json_round_trip():
    rng = np.random.default_rng(5)
    for s in (PureState((2, 3), la.random_pure(6, rng)), MixedState(3, la.random_density(3, rng))):
        back = state_from_json(state_to_json(s))
        assert type(back) is type(s) and back.system == s.system
        assert np.array_equal(back.ket if s.theory is Theory.PURE else back.rho,
                              s.ket if s.theory is Theory.PURE else s.rho)
    m = Outcome(2, la.projector(PLUS))
    assert np.array_equal(outcome_from_json(outcome_to_json(m)).projector, m.projector)
    with pytest.raises(ValueError):
        state_from_json({"theory": "pure"})
    with pytest.raises(ValueError):
        state_from_json({"theory": "classical", "dims": [1], "matrix": la.matrix_to_json(np.eye(1))})
