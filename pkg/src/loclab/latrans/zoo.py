"""Built-in candidate families, most of which are *not* locally applicable.

They exist to exercise the axiom checker: each one breaks a different
assumption (linearity, complete positivity, independence from the
environment) while still mapping normalized inputs to something state-like.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .. import linalg as la
from ..errors import UnknownZooEntry
from ..smt import Theory
from .family import TransFamily


def parity_z(d: int) -> np.ndarray:
    """``diag(1, -1, 1, -1, ...)``; the Pauli Z for ``d = 2``."""
    return np.diag([(-1.0) ** k for k in range(d)]).astype(complex)


def constant_pure(dim_in: int = 2, dim_out: int = 2) -> TransFamily:
    """``ψ_AX ↦ |0⟩_B ⊗ η`` where ``η`` is the normalized ``(⟨0|_A ⊗ I) ψ``.

    Falls back to ``|0…0⟩_X`` when that slice vanishes. At ``d_X = 1`` this is the
    constant map onto ``|0⟩`` up to a phase.
    """

    def evaluator(psi, n):
        slice0 = psi.reshape(dim_in, n)[0, :]
        norm = np.linalg.norm(slice0)
        eta = slice0 / norm if norm > 1e-12 else la.basis(n, 0).ravel()
        return np.kron(la.basis(dim_out, 0).ravel(), eta).reshape(-1, 1)

    return TransFamily(
        Theory.PURE, dim_in, dim_out, evaluator, kind="zoo", name="constant_pure",
        params={"dim_in": dim_in, "dim_out": dim_out},
    )


def constant_mixed(dim_in: int = 2, dim_out: int = 2) -> TransFamily:
    """``ρ ↦ |0⟩⟨0| ⊗ Tr_A ρ``, the replace-with-|0⟩ channel in disguise."""

    def evaluator(rho, n):
        env = la.partial_trace(rho, [dim_in, n], keep=[1])
        return la.tensor(la.projector(la.basis(dim_out, 0)), env)

    return TransFamily(
        Theory.MIXED, dim_in, dim_out, evaluator, kind="zoo", name="constant_mixed",
        params={"dim_in": dim_in, "dim_out": dim_out},
    )


def nonlinear_phase(theta: float = 0.7, dim: int = 2) -> TransFamily:
    """``ψ ↦ exp(iθ ⟨ψ|Z_A ⊗ I|ψ⟩ Z_A ⊗ I) ψ``: a state-dependent local phase."""
    z = np.diag(parity_z(dim)).real

    def evaluator(psi, n):
        amps = psi.reshape(dim, n)
        expect = float(np.sum(z[:, None] * np.abs(amps) ** 2))
        phases = np.exp(1j * theta * expect * z)
        return (phases[:, None] * amps).reshape(-1, 1)

    return TransFamily(
        Theory.PURE, dim, dim, evaluator, kind="zoo", name="nonlinear_phase",
        params={"theta": float(theta), "dim": dim},
    )


def transpose_mixed(dim: int = 2) -> TransFamily:
    """Partial transpose on ``A``: positive but not completely positive."""

    def evaluator(rho, n):
        r = rho.reshape(dim, n, dim, n)
        return r.transpose(2, 1, 0, 3).reshape(dim * n, dim * n)

    return TransFamily(
        Theory.MIXED, dim, dim, evaluator, kind="zoo", name="transpose_mixed",
        params={"dim": dim},
    )


@dataclass(frozen=True)
class ZooEntry:
    name: str
    theory: Theory
    factory: Callable[..., TransFamily]
    summary: str
    anchor: str
    expected: str


ZOO: dict[str, ZooEntry] = {
    e.name: e
    for e in [
        ZooEntry(
            "constant_pure",
            Theory.PURE,
            constant_pure,
            "|0>_B tensored with the normalized <0|_A slice of the input",
            "extension of the constant map g(|psi><psi|) = |0><0| used against "
            "Gisin's no-signaling argument for linearity",
            "fails no-signaling and (on Bell-state probes) update commutativity",
        ),
        ZooEntry(
            "constant_mixed",
            Theory.MIXED,
            constant_mixed,
            "|0><0| tensored with the environment marginal",
            "mixed-state version of the constant map; coincides with the "
            "replace-with-|0> quantum channel",
            "locally applicable; certifies as a channel",
        ),
        ZooEntry(
            "nonlinear_phase",
            Theory.PURE,
            nonlinear_phase,
            "exp(i theta <Z_A> Z_A) applied to the input",
            "Weinberg-style state-dependent phase, a nonlinearity probe",
            "fails update commutativity for theta != 0",
        ),
        ZooEntry(
            "transpose_mixed",
            Theory.MIXED,
            transpose_mixed,
            "transpose on A, identity on the environment",
            "positive but not completely positive map; a complete-positivity probe",
            "emits InvalidOutputState on entangled inputs (min eigenvalue -1/2 on Phi+)",
        ),
    ]
}


def zoo(name: str, **params) -> TransFamily:
    """Construct a built-in family by name (``zoo:`` prefix accepted)."""
    key = name.removeprefix("zoo:")
    try:
        entry = ZOO[key]
    except KeyError:
        raise UnknownZooEntry(f"unknown zoo family {name!r}; known: {sorted(ZOO)}") from None
    return entry.factory(**params)
