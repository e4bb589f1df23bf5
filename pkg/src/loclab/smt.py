"""Finite-dimensional pure and mixed quantum theory as state-measurement theories.

A theory supplies states, projective outcomes, a probability rule and a partial
update rule, plus a null outcome (the identity). Spatial composition is the
tensor product; system labels compose by concatenating their factor lists.

The probability and update functions accept either the typed wrappers
(:class:`PureState`, :class:`MixedState`, :class:`Outcome`) or bare arrays.
Updates return the same kind of object they were given.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import linalg as la
from .errors import DimensionMismatch, TheoryMismatch, ZeroProbabilityUpdate

ZERO_PROBABILITY = 1e-12


class Theory(str, enum.Enum):
    PURE = "pure"
    MIXED = "mixed"


@dataclass(frozen=True)
class SystemLabel:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid system dims {self.dims!r}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def of(cls, *dims) -> "SystemLabel":
        if len(dims) == 1 and not isinstance(dims[0], (int, np.integer)):
            dims = tuple(dims[0])
        return cls(tuple(dims))

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def __matmul__(self, other: "SystemLabel") -> "SystemLabel":
        return SystemLabel(self.dims + other.dims)


def _label(system) -> SystemLabel:
    if isinstance(system, SystemLabel):
        return system
    if isinstance(system, (int, np.integer)):
        return SystemLabel((int(system),))
    return SystemLabel(tuple(system))


@dataclass(frozen=True, eq=False)
class PureState:
    system: SystemLabel
    ket: np.ndarray

    def __post_init__(self):
        system = _label(self.system)
        v = la.as_matrix(self.ket)
        if v.shape != (system.total_dim, 1):
            raise DimensionMismatch(
                f"ket shape {v.shape} does not match system dims {system.dims}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("ket has non-finite entries")
        if abs(np.linalg.norm(v) - 1.0) > la.ATOL:
            raise ValueError(f"ket is not normalized (norm {np.linalg.norm(v):.12f})")
        v.setflags(write=False)
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "ket", v)

    theory = Theory.PURE

    def density(self) -> "MixedState":
        return MixedState(self.system, la.projector(self.ket))


@dataclass(frozen=True, eq=False)
class MixedState:
    system: SystemLabel
    rho: np.ndarray

    def __post_init__(self):
        system = _label(self.system)
        r = la.as_matrix(self.rho)
        n = system.total_dim
        if r.shape != (n, n):
            raise DimensionMismatch(f"rho shape {r.shape} does not match dims {system.dims}")
        if not la.is_hermitian(r):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(r).real - 1.0) > la.ATOL:
            raise ValueError(f"density matrix has trace {np.trace(r).real:.12f}")
        if la.eigvals_hermitian(r)[0] < -la.ATOL:
            raise ValueError("density matrix is not positive semidefinite")
        r.setflags(write=False)
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "rho", r)

    theory = Theory.MIXED


@dataclass(frozen=True, eq=False)
class Outcome:
    system: SystemLabel
    projector: np.ndarray

    def __post_init__(self):
        system = _label(self.system)
        p = la.as_matrix(self.projector)
        n = system.total_dim
        if p.shape != (n, n):
            raise DimensionMismatch(f"projector shape {p.shape} does not match dims {system.dims}")
        if not la.is_hermitian(p):
            raise ValueError("outcome is not Hermitian")
        if np.linalg.norm(p @ p - p) > la.ATOL:
            raise ValueError("outcome is not idempotent")
        p.setflags(write=False)
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "projector", p)


State = Union[PureState, MixedState]


def null_outcome(system) -> Outcome:
    system = _label(system)
    return Outcome(system, np.eye(system.total_dim, dtype=complex))


def _unwrap_outcome(m) -> np.ndarray:
    return m.projector if isinstance(m, Outcome) else la.as_matrix(m)


def _clamp(p: float) -> float:
    if -la.ATOL <= p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + la.ATOL:
        return 1.0
    return p


def born_pure(s, m) -> float:
    """``⟨ψ|m|ψ⟩`` for a ket ψ and projector m."""
    v = s.ket if isinstance(s, PureState) else la.as_matrix(s)
    p = _unwrap_outcome(m)
    if p.shape != (v.shape[0], v.shape[0]):
        raise DimensionMismatch(f"outcome {p.shape} does not act on ket {v.shape}")
    return _clamp(float(np.vdot(v, p @ v).real))


def update_pure(s, m, threshold: float = ZERO_PROBABILITY):
    """Projection postulate ``m|ψ⟩ / sqrt(p)``."""
    prob = born_pure(s, m)
    if prob <= threshold:
        raise ZeroProbabilityUpdate(prob, threshold)
    v = s.ket if isinstance(s, PureState) else la.as_matrix(s)
    w = _unwrap_outcome(m) @ v
    w = w / np.linalg.norm(w)
    if isinstance(s, PureState):
        return PureState(s.system, w)
    return w


def born_mixed(s, m) -> float:
    """``Tr(ρ π)``."""
    r = s.rho if isinstance(s, MixedState) else la.as_matrix(s)
    p = _unwrap_outcome(m)
    if p.shape != r.shape:
        raise DimensionMismatch(f"outcome {p.shape} does not act on state {r.shape}")
    return _clamp(float(np.trace(r @ p).real))


def update_mixed(s, m, threshold: float = ZERO_PROBABILITY):
    """Lüders rule ``π ρ π / Tr(ρ π)``, renormalized to unit trace."""
    prob = born_mixed(s, m)
    if prob <= threshold:
        raise ZeroProbabilityUpdate(prob, threshold)
    r = s.rho if isinstance(s, MixedState) else la.as_matrix(s)
    p = _unwrap_outcome(m)
    out = p @ r @ p
    out = (out + out.conj().T) / 2
    out = out / np.trace(out).real
    if isinstance(s, MixedState):
        return MixedState(s.system, out)
    return out


def born(s: State, m) -> float:
    return born_pure(s, m) if isinstance(s, PureState) else born_mixed(s, m)


def update(s: State, m, threshold: float = ZERO_PROBABILITY) -> State:
    if isinstance(s, PureState):
        return update_pure(s, m, threshold)
    return update_mixed(s, m, threshold)


def compose_states(a: State, b: State) -> State:
    if type(a) is not type(b):
        raise TheoryMismatch(f"cannot compose {type(a).__name__} with {type(b).__name__}")
    if isinstance(a, PureState):
        return PureState(a.system @ b.system, la.tensor(a.ket, b.ket))
    return MixedState(a.system @ b.system, la.tensor(a.rho, b.rho))


def compose_outcomes(a: Outcome, b: Outcome) -> Outcome:
    return Outcome(a.system @ b.system, la.tensor(a.projector, b.projector))


def lift_pure(s: PureState) -> MixedState:
    """Embed a pure state into mixed theory as ``|ψ⟩⟨ψ|``."""
    return s.density()


def state_to_json(s: State) -> dict:
    matrix = s.ket if isinstance(s, PureState) else s.rho
    return {
        "theory": s.theory.value,
        "dims": list(s.system.dims),
        "matrix": la.matrix_to_json(matrix),
    }


def state_from_json(obj) -> State:
    try:
        theory = Theory(obj["theory"])
        dims: Sequence[int] = obj["dims"]
        matrix = la.matrix_from_json(obj["matrix"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed state JSON: {exc}") from None
    if theory is Theory.PURE:
        return PureState(SystemLabel(tuple(dims)), matrix)
    return MixedState(SystemLabel(tuple(dims)), matrix)


def outcome_to_json(m: Outcome, theory: Theory | str = Theory.MIXED) -> dict:
    return {
        "theory": Theory(theory).value,
        "dims": list(m.system.dims),
        "matrix": la.matrix_to_json(m.projector),
    }


def outcome_from_json(obj) -> Outcome:
    try:
        return Outcome(SystemLabel(tuple(obj["dims"])), la.matrix_from_json(obj["matrix"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed outcome JSON: {exc}") from None
