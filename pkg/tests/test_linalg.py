import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loclab import linalg as la
from loclab.errors import DimensionMismatch, NotHermitian

seeds = st.integers(min_value=0, max_value=2**32 - 1)
small_d = st.integers(min_value=1, max_value=5)


def kron_loop(a, b):
    """Index-arithmetic Kronecker product."""
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def ptrace_first_loop(m, da, dx):
    out = np.zeros((da, da), dtype=complex)
    for a in range(da):
        for b in range(da):
            out[a, b] = sum(m[a * dx + x, b * dx + x] for x in range(dx))
    return out


def random_complex(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


# tensor

def test_tensor_identities_and_basis():
    assert np.allclose(la.tensor(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(la.tensor(la.basis(2, 0), la.basis(2, 1)).ravel(), [0, 1, 0, 0])


def test_tensor_matches_index_oracle_and_is_associative():
    rng = np.random.default_rng(1)
    a, b, c = (random_complex(rng, 2, 2) for _ in range(3))
    assert np.allclose(la.tensor(a, b), kron_loop(a, b), atol=1e-14)
    left = la.tensor(la.tensor(a, b), c)
    assert np.allclose(left, la.tensor(a, la.tensor(b, c)), atol=1e-13)
    assert np.allclose(left, kron_loop(kron_loop(a, b), c), atol=1e-13)


# dagger / conjugate

def test_dagger_examples():
    assert np.array_equal(la.dagger(np.eye(3)), np.eye(3))
    assert la.dagger(np.array([[1j]]))[0, 0] == -1j
    a = random_complex(np.random.default_rng(2), 3, 4)
    assert np.array_equal(la.dagger(la.dagger(a)), a)


def test_conjugate_examples():
    assert np.array_equal(la.conjugate(la.basis(2, 0)), la.basis(2, 0))
    v = np.array([[1], [1j]]) / np.sqrt(2)
    assert np.allclose(la.conjugate(v), np.array([[1], [-1j]]) / np.sqrt(2))
    psi = la.random_pure(4, 3)
    assert np.array_equal(la.conjugate(la.conjugate(psi)), psi)


# Bell states, vec/unvec

def test_bell_state_examples():
    assert np.allclose(la.bell_state(1), [[1]])
    assert np.allclose(la.bell_state(2).ravel(), np.array([1, 0, 0, 1]) / np.sqrt(2))
    for d in range(2, 7):
        assert la.bell_state(d).shape == (d * d, 1)
        assert abs(np.linalg.norm(la.bell_state(d)) - 1) < 1e-14


def test_unvec_examples():
    assert np.allclose(la.unvec(np.array([1, 0, 0, 1]), 2, 2), np.eye(2))
    m = random_complex(np.random.default_rng(4), 3, 2)
    assert np.array_equal(la.unvec(la.vec(m), 3, 2), m)
    u = la.haar_unitary(2, 5)
    chi = la.tensor(u, np.eye(2)) @ la.bell_state(2)
    assert np.allclose(np.sqrt(2) * la.unvec(chi, 2, 2), u, atol=1e-12)


def test_unvec_index_convention():
    v = np.arange(6) + 0j
    m = la.unvec(v, 2, 3)
    for b in range(2):
        for i in range(3):
            assert m[b, i] == v[b * 3 + i]


def test_unvec_rejects_wrong_length():
    with pytest.raises(DimensionMismatch):
        la.unvec(np.ones(5), 2, 3)


# partial trace

def test_partial_trace_examples():
    rng = np.random.default_rng(6)
    rho = la.random_density(3, rng)
    sigma = random_complex(rng, 2, 2)
    out = la.partial_trace(la.tensor(rho, sigma), [3, 2], keep=[0])
    assert np.allclose(out, rho * np.trace(sigma), atol=1e-13)
    assert np.allclose(la.partial_trace(la.bell_projector(2), [2, 2], keep=[0]), np.eye(2) / 2)
    m = random_complex(rng, 4, 4)
    assert np.array_equal(la.partial_trace(m, [4], keep=[0]), m)


@settings(max_examples=40, deadline=None)
@given(da=small_d, dx=small_d, seed=seeds)
def test_partial_trace_matches_loop_oracle(da, dx, seed):
    m = random_complex(np.random.default_rng(seed), da * dx, da * dx)
    assert np.allclose(la.partial_trace(m, [da, dx], keep=[0]), ptrace_first_loop(m, da, dx), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(d1=st.integers(1, 3), d2=st.integers(1, 3), d3=st.integers(1, 3), seed=seeds)
def test_partial_trace_tensor_adjointness(d1, d2, d3, seed):
    rng = np.random.default_rng(seed)
    a, b, c = random_complex(rng, d1, d1), random_complex(rng, d2, d2), random_complex(rng, d3, d3)
    m = la.tensor(a, b, c)
    assert np.allclose(la.partial_trace(m, [d1, d2, d3], keep=[0]), a * np.trace(b) * np.trace(c), atol=1e-10)
    assert np.allclose(la.partial_trace(m, [d1, d2, d3], keep=[0, 2]), la.tensor(a, c) * np.trace(b), atol=1e-10)


def test_partial_trace_rejects_bad_dims():
    with pytest.raises(DimensionMismatch):
        la.partial_trace(np.eye(4), [3, 2], keep=[0])


# swap

def test_swap_exchanges_factors():
    rng = np.random.default_rng(7)
    a, b = la.random_pure(2, rng), la.random_pure(3, rng)
    assert np.allclose(la.swap(2, 3) @ la.tensor(a, b), la.tensor(b, a))


# random sampling

def test_haar_unitary_scalar_and_unitarity():
    u1 = la.haar_unitary(1, 0)
    assert u1.shape == (1, 1) and abs(abs(u1[0, 0]) - 1) < 1e-12
    for d in range(2, 9):
        for s in range(100):
            u = la.haar_unitary(d, s)
            assert np.linalg.norm(u.conj().T @ u - np.eye(d)) <= 1e-10


def test_haar_first_moment():
    # E|U00|^2 = 1/d
    rng = np.random.default_rng(8)
    mean = np.mean([abs(la.haar_unitary(2, rng)[0, 0]) ** 2 for _ in range(10_000)])
    assert abs(mean - 0.5) < 0.02


def test_haar_phase_distribution_is_uniform():
    # Without the R-diagonal phase fix, arg(U00) is biased toward 0.
    rng = np.random.default_rng(9)
    phases = np.array([np.angle(la.haar_unitary(2, rng)[0, 0]) for _ in range(4000)])
    assert abs(np.mean(np.cos(phases))) < 0.05


def test_random_states_and_channels():
    rng = np.random.default_rng(10)
    for d in range(1, 6):
        assert abs(np.linalg.norm(la.random_pure(d, rng)) - 1) < 1e-12
        rho = la.random_density(d, rng)
        assert np.linalg.eigvalsh(rho)[0] >= -1e-12
        assert abs(np.trace(rho) - 1) < 1e-12
    for d_in, d_out, rank in [(2, 2, 1), (2, 3, 4), (3, 2, 6), (4, 4, 16)]:
        ks = la.random_kraus_channel(d_in, d_out, rank, rng)
        assert len(ks) == rank and ks[0].shape == (d_out, d_in)
        assert np.linalg.norm(sum(k.conj().T @ k for k in ks) - np.eye(d_in)) <= 1e-10


def test_random_density_rank():
    rho = la.random_density(4, 0, rank=2)
    assert np.sum(np.linalg.eigvalsh(rho) > 1e-10) == 2


def test_kraus_rank_too_small_for_isometry():
    with pytest.raises(ValueError):
        la.random_kraus_channel(4, 1, 2, 0)


def test_sampling_is_deterministic():
    assert np.array_equal(la.haar_unitary(4, 123), la.haar_unitary(4, 123))
    r1, r2 = np.random.default_rng(5), np.random.default_rng(5)
    seq1 = [la.random_pure(3, r1), la.random_density(3, r1), *la.random_kraus_channel(2, 2, 3, r1)]
    seq2 = [la.random_pure(3, r2), la.random_density(3, r2), *la.random_kraus_channel(2, 2, 3, r2)]
    assert all(np.array_equal(a, b) for a, b in zip(seq1, seq2))


# trace distance and spectra

def test_trace_distance_examples():
    rho = la.random_density(3, 11)
    assert la.trace_distance(rho, rho) == pytest.approx(0, abs=1e-15)
    p0, p1 = la.projector(la.basis(2, 0)), la.projector(la.basis(2, 1))
    assert la.trace_distance(p0, p1) == pytest.approx(1, abs=1e-12)
    plus = la.projector(la.ket(1, 1) / np.sqrt(2))
    assert la.trace_distance(p0, plus) == pytest.approx(1 / np.sqrt(2), abs=1e-12)


def test_trace_distance_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        la.trace_distance(np.array([[0, 1], [0, 0]]), np.zeros((2, 2)))


def test_eigvals_examples():
    assert np.allclose(la.eigvals_hermitian(np.eye(3)), [1, 1, 1])
    assert np.allclose(la.eigvals_hermitian(np.diag([3.0, -1.0])), [-1, 3])
    rng = np.random.default_rng(12)
    for d in (2, 5, 8):
        u = la.haar_unitary(d, rng)
        diag = np.sort(rng.normal(size=d))
        a = u @ np.diag(diag) @ u.conj().T
        assert np.allclose(la.eigvals_hermitian(a), diag, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(d=st.integers(1, 8), seed=seeds)
def test_eigendecomposition_reconstructs(d, seed):
    g = random_complex(np.random.default_rng(seed), d, d)
    a = g + g.conj().T
    lam, vecs = np.linalg.eigh(a)
    assert np.all(np.diff(la.eigvals_hermitian(a)) >= 0)
    assert np.linalg.norm(vecs @ np.diag(lam) @ vecs.conj().T - a) <= 1e-8 * np.linalg.norm(a)


def test_eigvals_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        la.eigvals_hermitian(np.array([[1, 2], [0, 1]]))


# identities

@pytest.mark.parametrize("d", range(2, 7))
def test_snake_equation(d):
    cup = np.sqrt(d) * la.bell_state(d)  # sum_i |ii>
    cap = la.dagger(cup)
    assert np.linalg.norm(la.tensor(np.eye(d), cap) @ la.tensor(cup, np.eye(d)) - np.eye(d)) <= 1e-10
    assert np.linalg.norm(la.tensor(cap, np.eye(d)) @ la.tensor(np.eye(d), cup) - np.eye(d)) <= 1e-10


@pytest.mark.parametrize("d", range(2, 6))
def test_teleportation_identity(d):
    rng = np.random.default_rng(d)
    for _ in range(100):
        psi = la.random_pure(d, rng)
        psi_c = la.conjugate(psi)
        lhs = la.tensor(np.eye(d), np.sqrt(d) * la.projector(psi_c)) @ la.bell_state(d)
        assert np.linalg.norm(lhs - la.tensor(psi, psi_c)) <= 1e-10


@pytest.mark.parametrize("d", range(2, 5))
def test_choi_sandwich_identity(d):
    rng = np.random.default_rng(20 + d)
    phi = la.bell_projector(d)
    eye = np.eye(d)
    for _ in range(10):
        rho = la.random_density(d, rng)
        lhs = d ** 2 * la.tensor(eye, phi) @ la.tensor(phi, rho) @ la.tensor(eye, phi)
        assert np.linalg.norm(lhs - la.tensor(rho, phi)) <= 1e-9


# JSON

def test_matrix_json_round_trip():
    m = random_complex(np.random.default_rng(13), 3, 2)
    assert np.array_equal(la.matrix_from_json(la.matrix_to_json(m)), m)


@pytest.mark.parametrize("bad", [
    {"rows": 2, "cols": 2, "data": [[1, 0]] * 3},
    {"rows": 1, "cols": 1, "data": [[float("nan"), 0]]},
    {"rows": 0, "cols": 1, "data": []},
    {"cols": 1, "data": [[1, 0]]},
    [1, 2],
])
def test_matrix_json_rejects_malformed(bad):
    with pytest.raises((ValueError, DimensionMismatch)):
        la.matrix_from_json(bad)
