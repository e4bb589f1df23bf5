"""Convex linearity, remote steering and superposition linearity of pure-state maps.

A deterministic pure-state dynamics ``f`` that maps two ensembles with the same
density matrix to ensembles with different densities lets a distant party
signal: she steers the shared state into either ensemble by her choice of
measurement. This module builds such steering scenarios explicitly
(Hughston-Jozsa-Wootters construction), measures the resulting signaling gap,
and separately tests whether ``f`` is implemented by any linear operator at
all. The constant map ``|ψ⟩ ↦ |0⟩`` shows the two properties come apart: it
never signals, yet no operator implements it.

All comparisons between pure states go through projectors, so global phases
never matter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import null_space

from . import linalg as la
from .errors import DimensionMismatch, NotIndistinguishable, NotIsometry, UnknownZooEntry

WEIGHT_ATOL = 1e-10
RANK_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Weighted list of pure states ``{p_x, |ψ_x⟩}``."""

    dim: int
    weights: np.ndarray
    kets: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        kets = tuple(la.as_matrix(k) for k in self.kets)
        if len(w) != len(kets) or not kets:
            raise ValueError("weights and kets must be non-empty and of equal length")
        if np.any(w < -WEIGHT_ATOL) or abs(w.sum() - 1.0) > WEIGHT_ATOL:
            raise ValueError(f"weights must be a probability vector (sum {w.sum():.12f})")
        for k in kets:
            if k.shape != (self.dim, 1):
                raise DimensionMismatch(f"ket shape {k.shape} does not match dim {self.dim}")
            if abs(np.linalg.norm(k) - 1.0) > la.ATOL:
                raise ValueError("ensemble kets must be normalized")
        w = np.clip(w, 0.0, None)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "kets", kets)

    def __len__(self) -> int:
        return len(self.kets)

    def weighted_columns(self) -> np.ndarray:
        """``d x n`` matrix whose column ``x`` is ``sqrt(p_x) |ψ_x⟩``."""
        return np.hstack(self.kets) * np.sqrt(self.weights)[None, :]

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "weights": [float(w) for w in self.weights],
            "kets": [la.matrix_to_json(k) for k in self.kets],
        }

    @classmethod
    def from_json(cls, obj) -> "Ensemble":
        try:
            return cls(int(obj["dim"]), obj["weights"], [la.matrix_from_json(k) for k in obj["kets"]])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed ensemble JSON: {exc}") from None


def ensemble_density(e: Ensemble) -> np.ndarray:
    cols = e.weighted_columns()
    return cols @ cols.conj().T


def indistinguishable(e1: Ensemble, e2: Ensemble, tol: float = 1e-9) -> bool:
    if e1.dim != e2.dim:
        raise DimensionMismatch(f"ensembles live in dimensions {e1.dim} and {e2.dim}")
    return la.trace_distance(ensemble_density(e1), ensemble_density(e2)) <= tol


def _ensemble_from_columns(cols: np.ndarray) -> Ensemble:
    d, n = cols.shape
    weights = np.sum(np.abs(cols) ** 2, axis=0)
    kets = []
    for x in range(n):
        if weights[x] > RANK_ATOL:
            kets.append(cols[:, [x]] / np.sqrt(weights[x]))
        else:
            kets.append(la.basis(d, 0))
    weights = weights / weights.sum()
    return Ensemble(d, weights, kets)


def _spectral_columns(rho: np.ndarray) -> np.ndarray:
    lam, vecs = np.linalg.eigh((rho + rho.conj().T) / 2)
    keep = lam > RANK_ATOL
    return vecs[:, keep] * np.sqrt(lam[keep])[None, :]


def random_indistinguishable_pair(rho, sizes: Sequence[int], seed=None) -> tuple[Ensemble, Ensemble]:
    """Two ensembles averaging to ``rho``.

    The weighted eigenvectors of ``rho`` are mixed by a Haar-random isometry
    from ``rank`` into ``size`` dimensions. An ensemble whose size equals the
    rank is returned in the canonical eigen-decomposition instead.
    """
    rng = la.make_rng(seed)
    rho = la.as_matrix(rho)
    w = _spectral_columns(rho)
    rank = w.shape[1]
    out = []
    for i, n in enumerate(sizes):
        n = int(n)
        if n < rank:
            raise ValueError(f"ensemble size {n} is below rank {rank} of the density matrix")
        if i == 0 and n == rank:
            out.append(_ensemble_from_columns(w))
            continue
        u = la.haar_isometry(n, rank, rng)
        out.append(_ensemble_from_columns(w @ u.T))
    return out[0], out[1]


@dataclass(frozen=True, eq=False)
class PureStateMap:
    """Deterministic dynamics ``g`` on unit kets."""

    dim_in: int
    dim_out: int
    rule: Callable[[np.ndarray], np.ndarray]
    kind: str
    name: str = ""
    matrix: np.ndarray | None = None
    target: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    def __call__(self, psi) -> np.ndarray:
        psi = la.as_matrix(psi)
        if psi.shape != (self.dim_in, 1):
            raise DimensionMismatch(f"map expects a ket of dim {self.dim_in}, got {psi.shape}")
        out = la.as_matrix(self.rule(psi))
        if out.shape != (self.dim_out, 1) or abs(np.linalg.norm(out) - 1.0) > la.ATOL:
            raise ValueError(f"map {self.name or self.kind} produced a non-normalized output")
        return out


def linear_map(v, atol: float = la.ATOL) -> PureStateMap:
    v = la.as_matrix(v)
    d_out, d_in = v.shape
    if np.linalg.norm(v.conj().T @ v - np.eye(d_in)) > atol:
        raise NotIsometry("linear pure-state maps must be isometries")
    return PureStateMap(d_in, d_out, lambda psi: v @ psi, "linear", matrix=v)


def constant_map(dim: int = 2, target=None) -> PureStateMap:
    """``g(|ψ⟩⟨ψ|) = |0⟩⟨0|`` for every input."""
    t = la.basis(dim, 0) if target is None else la.as_matrix(target)
    t = t / np.linalg.norm(t)
    return PureStateMap(dim, t.shape[0], lambda psi: t, "constant", name="constant", target=t,
                        params={"dim": dim})


def renormalize_map(dim: int = 2) -> PureStateMap:
    """Square every amplitude, then renormalize."""

    def rule(psi):
        sq = psi ** 2
        return sq / np.linalg.norm(sq)

    return PureStateMap(dim, dim, rule, "custom", name="renormalize", params={"dim": dim})


def nonlinear_phase_map(dim: int = 2, theta: float = 0.7) -> PureStateMap:
    """``ψ ↦ exp(iθ⟨Z⟩ Z) ψ`` with ``Z = diag(1, -1, 1, ...)``."""
    z = np.array([(-1.0) ** k for k in range(dim)])

    def rule(psi):
        expect = float(np.sum(z * np.abs(psi.ravel()) ** 2))
        return (np.exp(1j * theta * expect * z) * psi.ravel()).reshape(-1, 1)

    return PureStateMap(dim, dim, rule, "custom", name="nonlinear_phase",
                        params={"dim": dim, "theta": float(theta)})


MAP_ZOO = {
    "constant": (constant_map, "constant map onto |0>; convex linear but not linear"),
    "renormalize": (renormalize_map, "entrywise square then renormalize; not convex linear"),
    "nonlinear_phase": (nonlinear_phase_map, "state-dependent phase exp(i theta <Z> Z)"),
}


def map_zoo(name: str, **params) -> PureStateMap:
    key = name.removeprefix("zoo:")
    try:
        factory = MAP_ZOO[key][0]
    except KeyError:
        raise UnknownZooEntry(f"unknown zoo map {name!r}; known: {sorted(MAP_ZOO)}") from None
    return factory(**params)


def pushforward(f: PureStateMap, e: Ensemble) -> np.ndarray:
    """``Σ_x p_x |f(ψ_x)⟩⟨f(ψ_x)|``."""
    out = np.zeros((f.dim_out, f.dim_out), dtype=complex)
    for p, k in zip(e.weights, e.kets):
        if p > 0:
            out += p * la.projector(f(k))
    return out


def fourier_basis(d: int) -> np.ndarray:
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return np.exp(2j * np.pi * j * k / d) / np.sqrt(d)


def canonical_pair(d: int) -> tuple[Ensemble, Ensemble]:
    """Uniform computational basis vs uniform Fourier basis; both average to ``I/d``."""
    w = np.full(d, 1.0 / d)
    e1 = Ensemble(d, w, [la.basis(d, i) for i in range(d)])
    f = fourier_basis(d)
    e2 = Ensemble(d, w, [f[:, [i]] for i in range(d)])
    return e1, e2


def indistinguishable_pairs(dim: int, pairs: int, seed=None, include_canonical: bool = True):
    """Yield ``pairs`` indistinguishable ensemble pairs; the canonical one first."""
    rng = la.make_rng(seed)
    count = 0
    if include_canonical and pairs > 0:
        yield canonical_pair(dim)
        count += 1
    while count < pairs:
        rank = int(rng.integers(1, dim + 1))
        rho = la.random_density(dim, rng, rank=rank)
        sizes = (rank + int(rng.integers(0, 3)), rank + int(rng.integers(0, 3)))
        yield random_indistinguishable_pair(rho, sizes, rng)
        count += 1


def convex_linearity_gap(f: PureStateMap, dim: int | None = None, pairs: int = 100, seed=None) -> float:
    """Largest trace distance between pushforwards of indistinguishable ensembles."""
    dim = f.dim_in if dim is None else dim
    if dim != f.dim_in:
        raise DimensionMismatch(f"map acts on dimension {f.dim_in}, not {dim}")
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    gap = 0.0
    for e1, e2 in indistinguishable_pairs(dim, pairs, seed):
        gap = max(gap, la.trace_distance(pushforward(f, e1), pushforward(f, e2)))
    return gap


@dataclass(frozen=True, eq=False)
class SteeringScenario:
    """Alice holds the first factor of ``shared_state``; Bob holds the second."""

    shared_state: np.ndarray
    alice_dim: int
    bob_dim: int
    measurements: tuple
    target_ensembles: tuple

    def conditioned(self, j: int):
        """``(probability, Bob's normalized ket or None)`` per outcome of measurement ``j``."""
        s = self.shared_state.reshape(self.alice_dim, self.bob_dim)
        out = []
        for proj in self.measurements[j]:
            # Outcomes are rank one; conditioning applies the bra <f| on Alice's side.
            lam, vecs = np.linalg.eigh(proj)
            f_vec = vecs[:, [-1]]
            bob = (f_vec.conj().T @ s).reshape(-1, 1)
            p = float(np.vdot(bob, bob).real)
            out.append((p, bob / np.sqrt(p) if p > RANK_ATOL else None))
        return out

    def to_json(self) -> dict:
        return {
            "alice_dim": self.alice_dim,
            "bob_dim": self.bob_dim,
            "shared_state": la.matrix_to_json(self.shared_state),
            "measurements": [[la.matrix_to_json(p) for p in m] for m in self.measurements],
            "target_ensembles": [e.to_json() for e in self.target_ensembles],
        }


def _padded_columns(e: Ensemble, n: int) -> np.ndarray:
    cols = e.weighted_columns()
    return np.hstack([cols, np.zeros((e.dim, n - cols.shape[1]), dtype=complex)])


def _complete_rows(c: np.ndarray) -> np.ndarray:
    """Extend orthonormal rows ``c`` (r x n) to an n x n unitary."""
    rest = null_space(c)
    return np.vstack([c, rest.conj().T])


def build_steering_scenario(e1: Ensemble, e2: Ensemble, tol: float = 1e-9) -> SteeringScenario:
    """Shared purification plus two Alice bases steering Bob into ``e1`` or ``e2``.

    ``|S⟩ = Σ_x sqrt(p_x) |x⟩ ⊗ |ψ_x⟩``. The first measurement is Alice's
    computational basis. The second is built from the unitary ``V`` with
    ``Ψ V = Φ`` (weighted ensemble columns): its basis vectors are the
    conjugated columns of ``V``.
    """
    if e1.dim != e2.dim:
        raise DimensionMismatch("ensembles live in different dimensions")
    gap = la.trace_distance(ensemble_density(e1), ensemble_density(e2))
    if gap > tol:
        raise NotIndistinguishable(f"ensemble densities differ by trace distance {gap:.3e}")
    d = e1.dim
    n = max(len(e1), len(e2))
    psi = _padded_columns(e1, n)
    phi = _padded_columns(e2, n)
    w = _spectral_columns(ensemble_density(e1))
    w_pinv = np.linalg.pinv(w)
    m_psi = _complete_rows(w_pinv @ psi)
    m_phi = _complete_rows(w_pinv @ phi)
    v = m_psi.conj().T @ m_phi
    u, _, vh = np.linalg.svd(v)
    v = u @ vh
    shared = psi.T.reshape(-1, 1)
    m1 = tuple(la.projector(la.basis(n, x)) for x in range(n))
    m2 = tuple(la.projector(v[:, [y]].conj()) for y in range(n))
    return SteeringScenario(shared, n, d, (m1, m2), (e1, e2))


def scenario_gaps(sc: SteeringScenario) -> dict:
    """Largest deviation from each scenario invariant."""
    shared_norm = abs(np.linalg.norm(sc.shared_state) - 1.0)
    completeness = max(
        float(np.linalg.norm(sum(m) - np.eye(sc.alice_dim))) for m in sc.measurements
    )
    prob_gap, state_gap = 0.0, 0.0
    for j, e in enumerate(sc.target_ensembles):
        cond = sc.conditioned(j)
        for k, (p, bob) in enumerate(cond):
            w = float(e.weights[k]) if k < len(e) else 0.0
            prob_gap = max(prob_gap, abs(p - w))
            if w > RANK_ATOL and bob is not None:
                state_gap = max(
                    state_gap, float(np.linalg.norm(la.projector(bob) - la.projector(e.kets[k])))
                )
    return {
        "normalization": shared_norm,
        "completeness": completeness,
        "probability": prob_gap,
        "state": state_gap,
    }


def verify_scenario(sc: SteeringScenario, tol: float = 1e-9) -> bool:
    return all(v <= tol for v in scenario_gaps(sc).values())


def signaling_gap(f: PureStateMap, sc: SteeringScenario) -> float:
    """Trace distance between Bob's post-``f`` states under Alice's two choices."""
    outs = []
    for j in range(2):
        rho = np.zeros((f.dim_out, f.dim_out), dtype=complex)
        for p, bob in sc.conditioned(j):
            if bob is not None:
                rho += p * la.projector(f(bob))
        outs.append(rho)
    return la.trace_distance(outs[0], outs[1])


@dataclass(frozen=True, eq=False)
class NonlinearityReport:
    is_linearizable: bool
    matrix: np.ndarray | None
    witness: dict | None = None

    def to_json(self) -> dict:
        return {
            "is_linearizable": self.is_linearizable,
            "matrix": None if self.matrix is None else la.matrix_to_json(self.matrix),
            "witness": self.witness,
        }


def _probe(d: int, i: int, j: int, phase: complex) -> np.ndarray:
    v = np.zeros((d, 1), dtype=complex)
    v[i, 0] = 1.0
    v[j, 0] = phase
    return v / np.sqrt(2)


def nonlinearity_witness(f: PureStateMap, tol: float = 1e-8, random_probes: int = 32, seed=0) -> NonlinearityReport:
    """Look for an operator ``L`` with ``L|ψ⟩⟨ψ|L† = f(ψ)f(ψ)†`` for all ψ.

    Columns are ``L|j⟩ = t_j f(|j⟩)`` with unknown ``|t_j| = 1`` (``t_0 = 1``).
    The ``(|0⟩+|j⟩)/√2`` and ``(|0⟩+i|j⟩)/√2`` probes pin the cross term
    ``conj(t_j) f(|0⟩) f(|j⟩)†`` exactly; if it is not of that form with a unit
    ``t_j``, no such ``L`` exists. Otherwise the fitted ``L`` is tested on every
    other basis pair and on random states.
    """
    d = f.dim_in
    if f.dim_out != d:
        raise DimensionMismatch("nonlinearity witness needs dim_in == dim_out")
    cols = [f(la.basis(d, i)) for i in range(d)]
    fitted = np.zeros((d, d), dtype=complex)
    fitted[:, 0] = cols[0].ravel()
    base = [la.projector(c) for c in cols]
    for j in range(1, d):
        plus = la.projector(f(_probe(d, 0, j, 1.0)))
        plus_i = la.projector(f(_probe(d, 0, j, 1j)))
        x_plus = 2 * plus - base[0] - base[j]
        x_i = 2 * plus_i - base[0] - base[j]
        cross = (x_plus + 1j * x_i) / 2
        t_conj = complex((cols[0].conj().T @ cross @ cols[j])[0, 0])
        residual = float(np.linalg.norm(cross - t_conj * cols[0] @ cols[j].conj().T))
        modulus = abs(t_conj)
        if residual > tol or abs(modulus - 1.0) > tol:
            return NonlinearityReport(False, None, {
                "kind": "phase_probe",
                "probes": ["|+>", "|+i>"],
                "basis_pair": [0, j],
                "cross_term_modulus": modulus,
                "residual": residual,
                "message": (
                    f"the |+>/|+i> probes on |0>,|{j}> force L|0><{j}|L† = "
                    f"{modulus:.3g} x f(|0>)f(|{j}>)†, but a norm-preserving L needs modulus 1"
                ),
            })
        fitted[:, j] = np.conj(t_conj) * cols[j].ravel()

    def mismatch(psi):
        lp = fitted @ psi
        return float(np.linalg.norm(lp @ lp.conj().T - la.projector(f(psi))))

    checks = [
        (f"(|{i}>+|{j}>)/sqrt2", _probe(d, i, j, ph))
        for i in range(1, d) for j in range(i + 1, d) for ph in (1.0, 1j)
    ]
    rng = la.make_rng(seed)
    checks += [(f"random[{k}]", la.random_pure(d, rng)) for k in range(random_probes)]
    for label, psi in checks:
        gap = mismatch(psi)
        if gap > tol:
            return NonlinearityReport(False, None, {
                "kind": "state_probe",
                "probe": label,
                "state": la.matrix_to_json(psi),
                "residual": gap,
                "message": "fitted operator disagrees with the map on this state",
            })
    return NonlinearityReport(True, fitted, None)
