"""Dense complex linear algebra used throughout loclab.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Kets are column
vectors of shape ``(n, 1)`` so that ``ket @ dagger(ket)`` is a projector and
Kronecker products of kets are kets again.

Conventions
-----------
* The computational basis is self-conjugate, so complex conjugation of a vector
  or operator is entrywise.
* Vectorization is row-major with the operator's row index as the *first*
  tensor factor: ``vec(M)[b * cols + i] == M[b, i]``. With this choice
  ``(U ⊗ I) |Φ⁺⟩ = vec(U) / sqrt(d)``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotHermitian

ATOL = 1e-9
UNITARY_ATOL = 1e-10

__all__ = [
    "ATOL",
    "UNITARY_ATOL",
    "as_matrix",
    "ket",
    "basis",
    "tensor",
    "dagger",
    "conjugate",
    "projector",
    "bell_state",
    "bell_projector",
    "vec",
    "unvec",
    "swap",
    "partial_trace",
    "make_rng",
    "haar_unitary",
    "haar_isometry",
    "random_pure",
    "random_density",
    "random_projector",
    "random_kraus_channel",
    "eigvals_hermitian",
    "trace_distance",
    "trace_norm",
    "is_hermitian",
    "matrix_to_json",
    "matrix_from_json",
]


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a 2-D complex array; 1-D input becomes a column."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    elif m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got array of shape {m.shape}")
    return m


def ket(*amplitudes) -> np.ndarray:
    return as_matrix(np.array(amplitudes, dtype=complex))


def basis(d: int, i: int) -> np.ndarray:
    """Computational basis ket ``|i⟩`` in dimension ``d``."""
    v = np.zeros((d, 1), dtype=complex)
    v[i, 0] = 1.0
    return v


def tensor(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices, left factor first."""
    if not ops:
        return np.ones((1, 1), dtype=complex)
    out = as_matrix(ops[0])
    for op in ops[1:]:
        out = np.kron(out, as_matrix(op))
    return out


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def conjugate(a) -> np.ndarray:
    return as_matrix(a).conj()


def projector(v) -> np.ndarray:
    v = as_matrix(v)
    return v @ v.conj().T


def bell_state(d: int) -> np.ndarray:
    """The maximally entangled ket ``Σ_i |ii⟩ / sqrt(d)`` on ``d ⊗ d``."""
    if d < 1:
        raise ValueError("dimension must be positive")
    v = np.zeros((d * d, 1), dtype=complex)
    v[:: d + 1, 0] = 1.0 / np.sqrt(d)
    return v


def bell_projector(d: int) -> np.ndarray:
    return projector(bell_state(d))


def vec(m) -> np.ndarray:
    """Row-major vectorization, inverse of :func:`unvec`."""
    return as_matrix(m).reshape(-1, 1)


def unvec(v, rows_out: int, cols_out: int) -> np.ndarray:
    v = as_matrix(v)
    if v.shape != (rows_out * cols_out, 1):
        raise DimensionMismatch(
            f"cannot unvec shape {v.shape} into {rows_out}x{cols_out}"
        )
    return v.reshape(rows_out, cols_out)


def swap(d1: int, d2: int) -> np.ndarray:
    """Permutation matrix sending ``|a⟩|b⟩`` (a in d1, b in d2) to ``|b⟩|a⟩``."""
    s = np.zeros((d1 * d2, d1 * d2), dtype=complex)
    for a in range(d1):
        for b in range(d2):
            s[b * d1 + a, a * d2 + b] = 1.0
    return s


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every factor of ``m`` not listed in ``keep``.

    ``dims`` lists the tensor factors; kept factors stay in their original order.
    """
    m = as_matrix(m)
    dims = [int(x) for x in dims]
    n = len(dims)
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise DimensionMismatch(f"matrix of shape {m.shape} does not match dims {dims}")
    keep = sorted({int(k) for k in keep})
    if any(k < 0 or k >= n for k in keep):
        raise DimensionMismatch(f"keep={keep} out of range for {n} factors")
    t = m.reshape(dims + dims)
    # Trace from the highest factor down so remaining axis indices stay valid.
    for k in reversed(range(n)):
        if k in keep:
            continue
        nfac = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + nfac)
    kept = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(kept, kept)


def make_rng(seed=None) -> np.random.Generator:
    """``numpy`` Generator from an integer seed (or pass a Generator through)."""
    return np.random.default_rng(seed)


def _ginibre(rng, rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random ``d x d`` unitary via QR with phase-corrected ``R`` (Mezzadri)."""
    rng = make_rng(seed)
    z = _ginibre(rng, d, d)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return q * phases


def haar_isometry(d_out: int, d_in: int, seed=None) -> np.ndarray:
    """First ``d_in`` columns of a Haar unitary on ``d_out``."""
    if d_in > d_out:
        raise ValueError(f"no isometry from dimension {d_in} into {d_out}")
    return haar_unitary(d_out, seed)[:, :d_in]


def random_pure(d: int, seed=None) -> np.ndarray:
    rng = make_rng(seed)
    v = _ginibre(rng, d, 1)
    return v / np.linalg.norm(v)


def random_density(d: int, seed=None, rank: int | None = None) -> np.ndarray:
    """Normalized Wishart density matrix; ``rank=1`` gives a pure state."""
    rng = make_rng(seed)
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {rank}")
    g = _ginibre(rng, d, rank)
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def random_projector(d: int, seed=None, rank: int | None = None) -> np.ndarray:
    """Projector onto a Haar-random subspace; rank uniform in ``1..d`` if not given."""
    rng = make_rng(seed)
    if rank is None:
        rank = int(rng.integers(1, d + 1))
    v = haar_unitary(d, rng)[:, :rank]
    p = v @ v.conj().T
    return (p + p.conj().T) / 2


def random_kraus_channel(d_in: int, d_out: int, rank: int, seed=None) -> list[np.ndarray]:
    """Kraus operators of a random channel, cut from a Haar Stinespring isometry.

    The isometry maps ``d_in`` into ``rank ⊗ d_out``; block ``j`` of its rows is
    ``K_j``. Needs ``rank * d_out >= d_in``.
    """
    if not 1 <= rank <= d_in * d_out:
        raise ValueError(f"rank must lie in [1, {d_in * d_out}], got {rank}")
    if rank * d_out < d_in:
        raise ValueError(
            f"a channel {d_in}->{d_out} needs Kraus rank >= {int(np.ceil(d_in / d_out))}"
        )
    v = haar_isometry(rank * d_out, d_in, seed)
    return [v[j * d_out : (j + 1) * d_out, :].copy() for j in range(rank)]


def is_hermitian(a, atol: float = ATOL) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= atol)


def _require_hermitian(a, atol):
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if not is_hermitian(a, atol):
        raise NotHermitian(
            f"matrix is not Hermitian (asymmetry {np.max(np.abs(a - a.conj().T)):.2e})"
        )
    return (a + a.conj().T) / 2


def eigvals_hermitian(a, atol: float = ATOL) -> np.ndarray:
    """Ascending real spectrum of a Hermitian matrix (LAPACK ``heevd``)."""
    return np.linalg.eigvalsh(_require_hermitian(a, atol))


def trace_distance(a, b, atol: float = ATOL) -> float:
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    diff = _require_hermitian(a, atol) - _require_hermitian(b, atol)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))


def trace_norm(a) -> float:
    """Schatten-1 norm; works for non-Hermitian input too."""
    return float(np.sum(np.linalg.svd(as_matrix(a), compute_uv=False)))


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        data = obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from None
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    if len(data) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(data)}")
    try:
        flat = np.array([complex(float(re), float(im)) for re, im in data])
    except (TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix entry: {exc}") from None
    if not np.all(np.isfinite(flat)):
        raise ValueError("matrix JSON contains non-finite entries")
    return flat.reshape(rows, cols)
