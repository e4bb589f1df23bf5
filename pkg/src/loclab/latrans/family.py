"""Transformation families indexed by environment dimension.

A family ``L`` of type ``A -> B`` assigns to every environment dimension
``d_X >= 1`` a map from states on ``A ⊗ X`` to states on ``B ⊗ X``; the
``d_X = 1`` member is the unextended map. Nothing here assumes linearity: the
evaluator is an arbitrary Python callable ``(state, env_dim) -> state`` acting on
kets (pure theory) or density matrices (mixed theory).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .. import linalg as la
from ..errors import (
    DimensionMismatch,
    InvalidOutputState,
    NotIsometry,
    NotTracePreserving,
    TheoryMismatch,
)
from ..smt import Theory

Evaluator = Callable[[np.ndarray, int], np.ndarray]

STATE_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class TransFamily:
    theory: Theory
    dim_in: int
    dim_out: int
    evaluator: Evaluator
    kind: str
    name: str = ""
    params: dict = field(default_factory=dict)
    matrices: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "theory", Theory(self.theory))
        if self.dim_in < 1 or self.dim_out < 1:
            raise ValueError("family dimensions must be positive")

    def input_shape(self, env_dim: int) -> tuple[int, int]:
        n = self.dim_in * env_dim
        return (n, 1) if self.theory is Theory.PURE else (n, n)

    def apply(self, state, env_dim: int = 1, validate: bool = True) -> np.ndarray:
        """Evaluate the member at ``env_dim`` on a state of ``A ⊗ X``.

        With ``validate`` the output is checked to be a state of the family's
        theory; failures raise :class:`InvalidOutputState`.
        """
        if env_dim < 1:
            raise ValueError("environment dimension must be >= 1")
        x = la.as_matrix(state)
        if x.shape != self.input_shape(env_dim):
            raise DimensionMismatch(
                f"{self.label()} at env dim {env_dim} expects {self.input_shape(env_dim)}, "
                f"got {x.shape}"
            )
        out = la.as_matrix(self.evaluator(x, env_dim))
        if validate:
            validate_output(out, self.theory, self.dim_out * env_dim)
        return out

    def __call__(self, state, env_dim: int = 1) -> np.ndarray:
        return self.apply(state, env_dim)

    def label(self) -> str:
        return f"{self.kind}:{self.name}" if self.name else self.kind


def validate_output(out: np.ndarray, theory: Theory, dim: int, atol: float = STATE_ATOL):
    if not np.all(np.isfinite(out)):
        raise InvalidOutputState("output has non-finite entries", np.inf)
    if theory is Theory.PURE:
        if out.shape != (dim, 1):
            raise InvalidOutputState(f"output ket has shape {out.shape}, expected ({dim}, 1)", np.inf)
        norm = float(np.linalg.norm(out))
        if abs(norm - 1.0) > atol:
            raise InvalidOutputState(
                f"output ket has norm {norm:.12f}", abs(norm - 1.0), {"norm": norm}
            )
        return
    if out.shape != (dim, dim):
        raise InvalidOutputState(f"output has shape {out.shape}, expected ({dim}, {dim})", np.inf)
    asym = float(np.max(np.abs(out - out.conj().T)))
    if asym > atol:
        raise InvalidOutputState(f"output is not Hermitian ({asym:.2e})", asym, {"asymmetry": asym})
    tr = float(np.trace(out).real)
    if abs(tr - 1.0) > atol:
        raise InvalidOutputState(f"output has trace {tr:.12f}", abs(tr - 1.0), {"trace": tr})
    lam_min = float(np.linalg.eigvalsh((out + out.conj().T) / 2)[0])
    if lam_min < -atol:
        raise InvalidOutputState(
            f"output is not positive (min eigenvalue {lam_min:.6f})",
            -lam_min,
            {"min_eigenvalue": lam_min},
        )


def _apply_isometry(v: np.ndarray, psi: np.ndarray, env_dim: int) -> np.ndarray:
    d_in = v.shape[1]
    return (v @ psi.reshape(d_in, env_dim)).reshape(-1, 1)


def _apply_kraus(kraus: np.ndarray, rho: np.ndarray, env_dim: int) -> np.ndarray:
    _, d_out, d_in = kraus.shape
    r = rho.reshape(d_in, env_dim, d_in, env_dim)
    out = np.einsum("kai,ixjy,kbj->axby", kraus, r, kraus.conj(), optimize=True)
    return out.reshape(d_out * env_dim, d_out * env_dim)


def lift_isometry(v, atol: float = la.ATOL) -> TransFamily:
    """Family ``ψ ↦ (V ⊗ I_X) ψ`` for an isometry ``V`` (unitary when square)."""
    v = la.as_matrix(v)
    d_out, d_in = v.shape
    defect = np.linalg.norm(v.conj().T @ v - np.eye(d_in))
    if defect > atol:
        raise NotIsometry(f"V†V deviates from identity by {defect:.3e}")
    v = v.copy()
    v.setflags(write=False)
    kind = "unitary" if d_in == d_out else "isometry"
    return TransFamily(
        Theory.PURE,
        d_in,
        d_out,
        lambda psi, n: _apply_isometry(v, psi, n),
        kind=kind,
        matrices=(v,),
    )


def lift_unitary(u, atol: float = la.ATOL) -> TransFamily:
    u = la.as_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise NotIsometry(f"unitary must be square, got {u.shape}")
    return lift_isometry(u, atol)


def lift_channel(kraus: Sequence, atol: float = la.ATOL) -> TransFamily:
    """Family ``ρ ↦ Σ_j (K_j ⊗ I) ρ (K_j ⊗ I)†`` for trace-preserving Kraus operators."""
    ks = [la.as_matrix(k) for k in kraus]
    if not ks:
        raise NotTracePreserving("empty Kraus list")
    shape = ks[0].shape
    if any(k.shape != shape for k in ks):
        raise DimensionMismatch("Kraus operators have inconsistent shapes")
    d_out, d_in = shape
    stack = np.stack(ks)
    defect = np.linalg.norm(np.einsum("kai,kaj->ij", stack.conj(), stack) - np.eye(d_in))
    if defect > atol:
        raise NotTracePreserving(f"Σ K†K deviates from identity by {defect:.3e}")
    stack.setflags(write=False)
    return TransFamily(
        Theory.MIXED,
        d_in,
        d_out,
        lambda rho, n: _apply_kraus(stack, rho, n),
        kind="kraus",
        matrices=tuple(ks),
    )


def identity_family(d: int, theory=Theory.PURE) -> TransFamily:
    eye = np.eye(d, dtype=complex)
    if Theory(theory) is Theory.PURE:
        return lift_isometry(eye)
    return lift_channel([eye])


def compose_families(l2: TransFamily, l1: TransFamily) -> TransFamily:
    """``l2 ∘ l1``: at every environment dimension apply ``l1`` first, then ``l2``."""
    if l1.theory is not l2.theory:
        raise TheoryMismatch(f"cannot compose {l2.theory.value} after {l1.theory.value}")
    if l1.dim_out != l2.dim_in:
        raise DimensionMismatch(
            f"output dim {l1.dim_out} of first family != input dim {l2.dim_in} of second"
        )

    def evaluator(x, n):
        return l2.evaluator(l1.apply(x, n), n)

    return TransFamily(
        l1.theory,
        l1.dim_in,
        l2.dim_out,
        evaluator,
        kind="composed",
        name=f"{l2.label()}∘{l1.label()}",
        params={"first": l1, "second": l2},
    )
