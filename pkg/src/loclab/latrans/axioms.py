"""Randomized checking of the three local-applicability axioms.

Each check draws states on ``A ⊗ X`` (Haar-random global states for the
entangled fraction, tensor products of random marginals otherwise) and
environment projectors of uniformly random rank spanning a Haar-random
subspace. Before the random trials a small deterministic probe set is run:
maximally entangled ``A``-``X`` states measured in the environment's
computational basis. Those probes hit measure-zero failure sets (such as the
constant map's undefined updates) that random sampling would never find.

Gaps are vector distances for kets and trace distances for density matrices.
A family whose output is not a state is not a crash: the failure is recorded
as a witness whose gap is the size of the defect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .. import linalg as la
from ..errors import InvalidOutputState
from ..smt import ZERO_PROBABILITY, Theory
from .family import TransFamily

AXIOMS = ("state_locality", "no_signaling", "update_commutativity")


@dataclass(frozen=True)
class SamplingConfig:
    trials: int = 200
    env_dims: tuple[int, ...] = (1, 2, 3, 4)
    seed: int = 0
    tolerance: float = 1e-8
    entangled_fraction: float = 0.5
    max_witnesses: int = 5
    probes: bool = True
    zero_probability: float = ZERO_PROBABILITY

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        dims = tuple(int(d) for d in self.env_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"invalid env_dims {self.env_dims!r}")
        object.__setattr__(self, "env_dims", dims)
        if not 0.0 <= self.entangled_fraction <= 1.0:
            raise ValueError("entangled_fraction must lie in [0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "env_dims": list(self.env_dims),
            "seed": self.seed,
            "tolerance": self.tolerance,
            "entangled_fraction": self.entangled_fraction,
            "max_witnesses": self.max_witnesses,
            "probes": self.probes,
        }


@dataclass(frozen=True, eq=False)
class Witness:
    axiom: str
    trial: int
    env_dim: int
    gap: float
    kind: str = "gap"
    message: str = ""
    env_dim_extra: int | None = None
    state: np.ndarray | None = None
    outcome: np.ndarray | None = None
    details: dict = field(default_factory=dict)

    def sort_key(self):
        gap = self.gap if not math.isnan(self.gap) else math.inf
        return (-gap, AXIOMS.index(self.axiom), self.trial)

    def to_json(self, include_matrices: bool = True) -> dict:
        out = {
            "axiom": self.axiom,
            "trial": self.trial,
            "env_dim": self.env_dim,
            "gap": json_float(self.gap),
            "kind": self.kind,
            "message": self.message,
        }
        if self.env_dim_extra is not None:
            out["env_dim_extra"] = self.env_dim_extra
        if self.details:
            out["details"] = {k: json_float(v) for k, v in sorted(self.details.items())}
        if include_matrices:
            out["state"] = None if self.state is None else la.matrix_to_json(self.state)
            out["outcome"] = None if self.outcome is None else la.matrix_to_json(self.outcome)
        return out


def json_float(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


@dataclass(frozen=True, eq=False)
class AxiomReport:
    trials: dict
    max_violation: dict
    witnesses: tuple
    tolerance: float
    skipped: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v <= self.tolerance for v in self.max_violation.values())

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def failed_axioms(self) -> list[str]:
        return [a for a in AXIOMS if self.max_violation.get(a, 0.0) > self.tolerance]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "trials": {k: self.trials[k] for k in AXIOMS if k in self.trials},
            "skipped": {k: self.skipped[k] for k in AXIOMS if k in self.skipped},
            "max_violation": {
                k: json_float(self.max_violation[k]) for k in AXIOMS if k in self.max_violation
            },
            "failed_axioms": self.failed_axioms(),
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def merge_reports(*reports: AxiomReport, max_witnesses: int = 5) -> AxiomReport:
    trials, maxv, skipped, wit = {}, {}, {}, []
    tol = reports[0].tolerance if reports else 0.0
    for r in reports:
        for k, v in r.trials.items():
            trials[k] = trials.get(k, 0) + v
        for k, v in r.max_violation.items():
            maxv[k] = max(maxv.get(k, 0.0), v)
        for k, v in r.skipped.items():
            skipped[k] = skipped.get(k, 0) + v
        wit.extend(r.witnesses)
        tol = min(tol, r.tolerance)
    wit.sort(key=Witness.sort_key)
    return AxiomReport(trials, maxv, tuple(wit[:max_witnesses]), tol, skipped)


class _Recorder:
    def __init__(self, axiom: str, cfg: SamplingConfig):
        self.axiom = axiom
        self.cfg = cfg
        self.max_gap = 0.0
        self.count = 0
        self.skipped = 0
        self.witnesses: list[Witness] = []

    def record(self, gap: float, **kw):
        self.count += 1
        if gap > self.max_gap or math.isnan(gap):
            self.max_gap = math.inf if math.isnan(gap) else gap
        if gap > self.cfg.tolerance or math.isnan(gap):
            self.witnesses.append(Witness(self.axiom, gap=gap, **kw))
            if len(self.witnesses) > 4 * max(self.cfg.max_witnesses, 1):
                self._prune()

    def record_invalid(self, exc: InvalidOutputState, **kw):
        self.record(exc.violation, kind="invalid_output", message=str(exc), details=exc.details, **kw)

    def _prune(self):
        self.witnesses.sort(key=Witness.sort_key)
        del self.witnesses[self.cfg.max_witnesses :]

    def report(self) -> AxiomReport:
        self._prune()
        return AxiomReport(
            {self.axiom: self.count},
            {self.axiom: self.max_gap},
            tuple(self.witnesses),
            self.cfg.tolerance,
            {self.axiom: self.skipped},
        )


def _rng_for(cfg: SamplingConfig, axiom: str) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, AXIOMS.index(axiom)])


def _distance(a: np.ndarray, b: np.ndarray, theory: Theory) -> float:
    if theory is Theory.PURE:
        return float(np.linalg.norm(a - b))
    return 0.5 * la.trace_norm(a - b)


def random_local_state(theory: Theory, d: int, rng) -> np.ndarray:
    if theory is Theory.PURE:
        return la.random_pure(d, rng)
    return la.random_density(d, rng, rank=int(rng.integers(1, d + 1)))


def random_joint_state(theory: Theory, d_a: int, d_x: int, entangled: bool, rng) -> np.ndarray:
    if entangled:
        return random_local_state(theory, d_a * d_x, rng)
    return la.tensor(random_local_state(theory, d_a, rng), random_local_state(theory, d_x, rng))


def _as_theory_state(v: np.ndarray, theory: Theory) -> np.ndarray:
    return v if theory is Theory.PURE else la.projector(v)


def _probe_states(theory: Theory, d_a: int, env_dims: Sequence[int]):
    """Maximally entangled states between A and each environment dimension >= 2."""
    for n in env_dims:
        if n < 2:
            continue
        k = min(d_a, n)
        v = np.zeros((d_a * n, 1), dtype=complex)
        for i in range(k):
            v[i * n + i, 0] = 1.0 / np.sqrt(k)
        yield n, _as_theory_state(v, theory)


def _env_outcome(d_sys: int, proj_env: np.ndarray) -> np.ndarray:
    return la.tensor(np.eye(d_sys), proj_env)


def _prob(state: np.ndarray, outcome: np.ndarray, theory: Theory) -> float:
    if theory is Theory.PURE:
        return float(np.vdot(state, outcome @ state).real)
    return float(np.trace(state @ outcome).real)


def _update(state: np.ndarray, outcome: np.ndarray, theory: Theory, p: float) -> np.ndarray:
    if theory is Theory.PURE:
        return outcome @ state / np.sqrt(p)
    return outcome @ state @ outcome / p


def _env_schedule(cfg: SamplingConfig, t: int) -> tuple[int, int]:
    dims = cfg.env_dims
    return dims[t % len(dims)], dims[(t // len(dims)) % len(dims)]


def check_state_locality(l: TransFamily, cfg: SamplingConfig = SamplingConfig()) -> AxiomReport:
    """Does ``L`` commute with appending an untouched environment system?"""
    rec = _Recorder("state_locality", cfg)
    rng = _rng_for(cfg, "state_locality")
    th = l.theory

    def trial(t, n, n2, psi_a, phi_x, psi_ax, phi_x2):
        try:
            gap1 = _distance(l.apply(la.tensor(psi_a, phi_x), n), la.tensor(l.apply(psi_a, 1), phi_x), th)
            gap2 = _distance(
                l.apply(la.tensor(psi_ax, phi_x2), n * n2), la.tensor(l.apply(psi_ax, n), phi_x2), th
            )
        except InvalidOutputState as exc:
            rec.record_invalid(exc, trial=t, env_dim=n, env_dim_extra=n2, state=psi_ax)
            return
        if gap1 >= gap2:
            rec.record(gap1, trial=t, env_dim=n, state=la.tensor(psi_a, phi_x),
                       message="L_X(psi ⊗ phi) != L(psi) ⊗ phi")
        else:
            rec.record(gap2, trial=t, env_dim=n, env_dim_extra=n2, state=la.tensor(psi_ax, phi_x2),
                       message="L_XX'(psi ⊗ phi) != L_X(psi) ⊗ phi")

    if cfg.probes:
        zero = lambda d: _as_theory_state(la.basis(d, 0), th)  # noqa: E731
        for i, (n, probe) in enumerate(_probe_states(th, l.dim_in, cfg.env_dims)):
            trial(-1 - i, n, 2, zero(l.dim_in), zero(n), probe, zero(2))
    for t in range(cfg.trials):
        n, n2 = _env_schedule(cfg, t)
        entangled = rng.random() < cfg.entangled_fraction
        psi_a = random_local_state(th, l.dim_in, rng)
        phi_x = random_local_state(th, n, rng)
        psi_ax = random_joint_state(th, l.dim_in, n, entangled, rng)
        phi_x2 = random_local_state(th, n2, rng)
        trial(t, n, n2, psi_a, phi_x, psi_ax, phi_x2)
    return rec.report()


def _signaling_draws(l: TransFamily, cfg: SamplingConfig, rng):
    """Yield ``(trial, env_dim, state, env_projector)``; probes first."""
    th = l.theory
    if cfg.probes:
        i = 0
        for n, probe in _probe_states(th, l.dim_in, cfg.env_dims):
            for j in range(n):
                i += 1
                yield -i, n, probe, la.projector(la.basis(n, j))
    for t in range(cfg.trials):
        n = cfg.env_dims[t % len(cfg.env_dims)]
        entangled = rng.random() < cfg.entangled_fraction
        s = random_joint_state(th, l.dim_in, n, entangled, rng)
        yield t, n, s, la.random_projector(n, rng)


def check_no_signaling(l: TransFamily, cfg: SamplingConfig = SamplingConfig()) -> AxiomReport:
    """Are environment outcome probabilities unchanged by ``L``?"""
    rec = _Recorder("no_signaling", cfg)
    rng = _rng_for(cfg, "no_signaling")
    th = l.theory
    for t, n, s, pi in _signaling_draws(l, cfg, rng):
        try:
            out = l.apply(s, n)
        except InvalidOutputState as exc:
            rec.record_invalid(exc, trial=t, env_dim=n, state=s, outcome=pi)
            continue
        before = _prob(s, _env_outcome(l.dim_in, pi), th)
        after = _prob(out, _env_outcome(l.dim_out, pi), th)
        rec.record(abs(after - before), trial=t, env_dim=n, state=s, outcome=pi,
                   message="environment outcome probability changed",
                   details={"p_before": before, "p_after": after})
    return rec.report()


def check_update_commutativity(l: TransFamily, cfg: SamplingConfig = SamplingConfig()) -> AxiomReport:
    """Does an environment update commute with applying ``L``?

    Draws whose outcome has probability below ``cfg.zero_probability`` on the
    input are skipped and counted. If the outcome is possible before ``L`` but
    impossible after it, the update on the left is undefined and the draw is
    recorded with gap 1.
    """
    rec = _Recorder("update_commutativity", cfg)
    rng = _rng_for(cfg, "update_commutativity")
    th = l.theory
    for t, n, s, pi in _signaling_draws(l, cfg, rng):
        m_in = _env_outcome(l.dim_in, pi)
        m_out = _env_outcome(l.dim_out, pi)
        p_in = _prob(s, m_in, th)
        if p_in <= cfg.zero_probability:
            rec.skipped += 1
            continue
        try:
            out = l.apply(s, n)
            rhs = l.apply(_update(s, m_in, th, p_in), n)
        except InvalidOutputState as exc:
            rec.record_invalid(exc, trial=t, env_dim=n, state=s, outcome=pi)
            continue
        p_out = _prob(out, m_out, th)
        if p_out <= cfg.zero_probability:
            rec.record(1.0, trial=t, env_dim=n, state=s, outcome=pi, kind="undefined_update",
                       message="outcome possible before L but impossible after it",
                       details={"p_before": p_in, "p_after": p_out})
            continue
        lhs = _update(out, m_out, th, p_out)
        rec.record(_distance(lhs, rhs, th), trial=t, env_dim=n, state=s, outcome=pi,
                   message="u(L_X(s), I⊗m) != L_X(u(s, I⊗m))")
    return rec.report()


def check_all(l: TransFamily, cfg: SamplingConfig = SamplingConfig()) -> AxiomReport:
    return merge_reports(
        check_state_locality(l, cfg),
        check_no_signaling(l, cfg),
        check_update_commutativity(l, cfg),
        max_witnesses=cfg.max_witnesses,
    )


def with_overrides(cfg: SamplingConfig, **kw) -> SamplingConfig:
    return replace(cfg, **kw)
