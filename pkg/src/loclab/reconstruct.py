"""Recover the linear object behind a transformation family.

Pure families: feed half of a Bell pair through the member acting on a copy of
``A`` as environment and read the operator off the output,
``V = sqrt(d_A) * unvec(L_A(Φ⁺))``. Mixed families: the Choi matrix
``J = d_A * L_A(Φ⁺⟨Φ⁺|)`` on ``B ⊗ A``. Extraction never trusts the family;
:func:`certify` runs the axiom checker and an equivalence test before it
labels anything a unitary, isometry or channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import DimensionMismatch, TheoryMismatch
from .latrans.axioms import (
    AxiomReport,
    SamplingConfig,
    Witness,
    json_float,
    random_joint_state,
    random_local_state,
    check_all,
)
from .latrans.family import TransFamily
from .smt import Theory

UNITARY = "Unitary"
ISOMETRY = "Isometry"
NON_ISOMETRIC = "NonIsometric"
CHANNEL = "Channel"
NOT_CPTP = "NotCPTP"


@dataclass(frozen=True, eq=False)
class ExtractedOperator:
    matrix: np.ndarray
    isometry_defect: float
    classification: str

    @property
    def dim_in(self) -> int:
        return self.matrix.shape[1]

    @property
    def dim_out(self) -> int:
        return self.matrix.shape[0]

    def apply(self, psi, env_dim: int = 1) -> np.ndarray:
        psi = la.as_matrix(psi)
        if psi.shape != (self.dim_in * env_dim, 1):
            raise DimensionMismatch(f"ket {psi.shape} does not match {self.dim_in}x{env_dim}")
        return (self.matrix @ psi.reshape(self.dim_in, env_dim)).reshape(-1, 1)


def classify_operator(v: np.ndarray, tol: float = 1e-8) -> tuple[float, str]:
    d_out, d_in = v.shape
    defect = float(np.linalg.norm(v.conj().T @ v - np.eye(d_in)))
    if defect > tol:
        return defect, NON_ISOMETRIC
    return defect, UNITARY if d_in == d_out else ISOMETRY


def extract_pure_operator(l: TransFamily, tol: float = 1e-8, validate: bool = True) -> ExtractedOperator:
    if l.theory is not Theory.PURE:
        raise TheoryMismatch("extract_pure_operator needs a pure-theory family")
    d = l.dim_in
    chi = l.apply(la.bell_state(d), env_dim=d, validate=validate)
    v = np.sqrt(d) * la.unvec(chi, l.dim_out, d)
    defect, cls = classify_operator(v, tol)
    return ExtractedOperator(v, defect, cls)


def teleport_apply(chi, psi, d_in: int) -> np.ndarray:
    """``d (I ⊗ ⟨Φ⁺|)(χ ⊗ ψ)``: apply the operator encoded in ``χ = L_A(Φ⁺)`` to ψ.

    This is the Bell-effect route, computed with explicit bras and kets; it
    agrees with ``sqrt(d) * unvec(χ) @ ψ`` but shares no code with it.
    """
    chi = la.as_matrix(chi)
    psi = la.as_matrix(psi)
    d_out = chi.shape[0] // d_in
    effect = la.tensor(np.eye(d_out), la.dagger(la.bell_state(d_in)))
    return d_in * effect @ la.tensor(chi, psi)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Choi matrix on ``B ⊗ A``; the channel is ``ρ ↦ Tr_A[J (I_B ⊗ ρᵀ)]``."""

    matrix: np.ndarray
    dim_in: int
    dim_out: int
    cp_defect: float
    tp_defect: float

    def is_completely_positive(self, tol: float = 1e-8) -> bool:
        scale = max(float(np.trace(self.matrix).real), 1.0)
        return self.cp_defect <= tol * scale

    def is_trace_preserving(self, tol: float = 1e-8) -> bool:
        return self.tp_defect <= tol

    def is_channel(self, tol: float = 1e-8) -> bool:
        return self.is_completely_positive(tol) and self.is_trace_preserving(tol)


def choi_from_matrix(j, dim_in: int, dim_out: int) -> ChoiMatrix:
    j = la.as_matrix(j)
    if j.shape != (dim_in * dim_out, dim_in * dim_out):
        raise DimensionMismatch(f"Choi matrix {j.shape} does not match {dim_out}x{dim_in}")
    herm = (j + j.conj().T) / 2
    cp_defect = max(0.0, -float(np.linalg.eigvalsh(herm)[0]))
    marginal = la.partial_trace(j, [dim_out, dim_in], keep=[1])
    tp_defect = float(np.linalg.norm(marginal - np.eye(dim_in)))
    return ChoiMatrix(j, dim_in, dim_out, cp_defect, tp_defect)


def choi_from_kraus(kraus) -> ChoiMatrix:
    """``Σ_j vec(K_j) vec(K_j)†``: the direct Kraus-to-Choi route."""
    ks = [la.as_matrix(k) for k in kraus]
    d_out, d_in = ks[0].shape
    j = sum(la.vec(k) @ la.dagger(la.vec(k)) for k in ks)
    return choi_from_matrix(j, d_in, d_out)


def extract_choi(l: TransFamily, tol: float = 1e-8, validate: bool = True) -> ChoiMatrix:
    if l.theory is not Theory.MIXED:
        raise TheoryMismatch("extract_choi needs a mixed-theory family")
    d = l.dim_in
    j = d * l.apply(la.bell_projector(d), env_dim=d, validate=validate)
    return choi_from_matrix(j, d, l.dim_out)


def apply_choi(j: ChoiMatrix, rho, env_dim: int = 1) -> np.ndarray:
    """``(E ⊗ id_X)(ρ)`` by contracting the Choi matrix against ``ρ``."""
    rho = la.as_matrix(rho)
    d_in, d_out = j.dim_in, j.dim_out
    n = d_in * env_dim
    if rho.shape != (n, n):
        raise DimensionMismatch(f"state {rho.shape} does not match input {d_in}x{env_dim}")
    jt = j.matrix.reshape(d_out, d_in, d_out, d_in)
    r = rho.reshape(d_in, env_dim, d_in, env_dim)
    out = np.einsum("bacd,axdy->bxcy", jt, r)
    return out.reshape(d_out * env_dim, d_out * env_dim)


def apply_choi_sandwich(j: ChoiMatrix, rho) -> np.ndarray:
    """``d² (I ⊗ ⟨Φ⁺|)(J/d ⊗ ρ)(I ⊗ |Φ⁺⟩)`` with explicit Bell bras and kets."""
    rho = la.as_matrix(rho)
    d = j.dim_in
    cup = la.tensor(np.eye(j.dim_out), la.bell_state(d))
    return d * la.dagger(cup) @ la.tensor(j.matrix, rho) @ cup


def compose_choi(j2: ChoiMatrix, j1: ChoiMatrix) -> ChoiMatrix:
    """Choi matrix of ``E2 ∘ E1``, i.e. ``(E2 ⊗ id)(J1)``."""
    if j1.dim_out != j2.dim_in:
        raise DimensionMismatch("Choi matrices do not compose")
    return choi_from_matrix(apply_choi(j2, j1.matrix, env_dim=j1.dim_in), j1.dim_in, j2.dim_out)


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    env_dims: tuple
    trials: int
    max_gap: float
    tolerance: float
    witness: Witness | None = None

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.tolerance

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "env_dims": list(self.env_dims),
            "trials": self.trials,
            "max_gap": json_float(self.max_gap),
            "tolerance": self.tolerance,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def verify_equivalence(l: TransFamily, extracted, cfg: SamplingConfig = SamplingConfig()) -> EquivalenceReport:
    """Compare every sampled member ``L_X`` with ``extracted ⊗ id_X``."""
    rng = np.random.default_rng([cfg.seed, 101])
    th = l.theory
    worst, worst_gap = None, 0.0
    for t in range(cfg.trials):
        n = cfg.env_dims[t % len(cfg.env_dims)]
        entangled = rng.random() < cfg.entangled_fraction
        s = random_joint_state(th, l.dim_in, n, entangled, rng)
        out = l.apply(s, n, validate=False)
        if th is Theory.PURE:
            gap = float(np.linalg.norm(out - extracted.apply(s, n)))
        else:
            gap = 0.5 * la.trace_norm(out - apply_choi(extracted, s, n))
        if math.isnan(gap):
            gap = math.inf
        if worst is None or gap > worst_gap:
            worst_gap = gap
            worst = Witness("state_locality", t, n, gap, kind="equivalence", state=s,
                            message="L_X(s) differs from (extracted ⊗ id)(s)")
    witness = worst if worst_gap > cfg.tolerance else None
    return EquivalenceReport(cfg.env_dims, cfg.trials, worst_gap, cfg.tolerance, witness)


@dataclass(frozen=True, eq=False)
class SwapReport:
    trials: int
    max_gap: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.tolerance

    def to_json(self) -> dict:
        return {"trials": self.trials, "max_gap": json_float(self.max_gap),
                "tolerance": self.tolerance, "verdict": "pass" if self.passed else "fail"}


def check_swap_compatibility(l: TransFamily, cfg: SamplingConfig = SamplingConfig()) -> SwapReport:
    """``L_XX'(S ρ S†) = S L_X'X(ρ) S†`` for the environment swap ``S: X' ⊗ X -> X ⊗ X'``."""
    if l.theory is not Theory.MIXED:
        raise TheoryMismatch("swap compatibility is checked in mixed theory")
    rng = np.random.default_rng([cfg.seed, 202])
    dims = cfg.env_dims
    worst = 0.0
    for t in range(cfg.trials):
        dx, dx2 = dims[t % len(dims)], dims[(t // len(dims)) % len(dims)]
        d = l.dim_in * dx2 * dx
        rho = random_local_state(Theory.MIXED, d, rng)
        s_in = la.tensor(np.eye(l.dim_in), la.swap(dx2, dx))
        s_out = la.tensor(np.eye(l.dim_out), la.swap(dx2, dx))
        lhs = l.apply(s_in @ rho @ la.dagger(s_in), dx * dx2, validate=False)
        rhs = s_out @ l.apply(rho, dx2 * dx, validate=False) @ la.dagger(s_out)
        worst = max(worst, la.trace_norm(lhs - rhs))
    return SwapReport(cfg.trials, worst, cfg.tolerance)


@dataclass(frozen=True, eq=False)
class Certificate:
    verdict: str
    classification: str
    axioms: AxiomReport
    equivalence: EquivalenceReport
    extracted: ExtractedOperator | ChoiMatrix
    isometry_defect: float | None = None
    cp_defect: float | None = None
    tp_defect: float | None = None
    notes: tuple = field(default_factory=tuple)

    @property
    def locally_applicable(self) -> bool:
        return self.verdict == "LocallyApplicable"

    @property
    def witnesses(self) -> tuple:
        wit = list(self.axioms.witnesses)
        if self.equivalence.witness is not None:
            wit.append(self.equivalence.witness)
        return tuple(wit)

    def to_json(self) -> dict:
        matrix = self.extracted.matrix
        return {
            "verdict": self.verdict,
            "classification": self.classification,
            "isometry_defect": json_float(self.isometry_defect),
            "cp_defect": json_float(self.cp_defect),
            "tp_defect": json_float(self.tp_defect),
            "equivalence_max_gap": json_float(self.equivalence.max_gap),
            "matrix": la.matrix_to_json(matrix),
            "axioms": self.axioms.to_json(),
            "equivalence": self.equivalence.to_json(),
            "notes": list(self.notes),
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def certify(l: TransFamily, cfg: SamplingConfig = SamplingConfig()) -> Certificate:
    tol = cfg.tolerance
    axioms = check_all(l, cfg)
    notes = []
    if l.theory is Theory.PURE:
        op = extract_pure_operator(l, tol, validate=False)
        equivalence = verify_equivalence(l, op, cfg)
        ok = op.classification != NON_ISOMETRIC
        if not ok:
            notes.append("extracted operator is not an isometry")
        cls = op.classification
        kw = {"isometry_defect": op.isometry_defect}
        extracted = op
    else:
        choi = extract_choi(l, tol, validate=False)
        equivalence = verify_equivalence(l, choi, cfg)
        ok = choi.is_channel(tol)
        if not choi.is_completely_positive(tol):
            notes.append("Choi matrix has a negative eigenvalue")
        if not choi.is_trace_preserving(tol):
            notes.append("Choi matrix marginal is not the identity")
        cls = CHANNEL if ok else NOT_CPTP
        kw = {"cp_defect": choi.cp_defect, "tp_defect": choi.tp_defect}
        extracted = choi
    if not axioms.passed:
        notes.append("axioms failed: " + ", ".join(axioms.failed_axioms()))
    if not equivalence.passed:
        notes.append("family is not extracted ⊗ identity on sampled states")
    verdict = "LocallyApplicable" if (axioms.passed and equivalence.passed and ok) else "Violating"
    return Certificate(verdict, cls, axioms, equivalence, extracted, notes=tuple(notes), **kw)
