"""Dense complex linear algebra kernel used by the higher layers.

Conventions: matrices are numpy arrays of complex128; ``vec`` flattens
row-major, so vec(A X B) = (A (x) B^T) vec(X); Hermitian eigensystems come
back with eigenvalues descending and eigenvector phases fixed, which makes
every decomposition built on top of them deterministic for identical input.
Tolerances are module constants rather than per-call magic numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionLimit, NotHermitian, NotPsd, ShapeMismatch

EPS_PSD = 1e-9      # PSD slack, relative to max(1, scale)
EPS_HERM = 1e-8     # Hermiticity deviation, relative to the operator norm
EPS_PHASE = 1e-10   # smallest component magnitude used to fix a phase
RANK_TOL = 1e-10    # relative eigenvalue / singular value cutoff
MAX_DIM = 2 ** 14   # default per-axis cap for tensor products


def recon_tol(scale: float) -> float:
    """Reconstruction tolerance at a given operator-norm scale."""
    return 1e-9 * max(1.0, float(scale))


def as_matrix(a) -> np.ndarray:
    """Coerce to a complex 2-d array, rejecting non-finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got array of ndim {m.ndim}")
    if not np.isfinite(m).all():
        raise ShapeMismatch("matrix entries must be finite")
    return m


def hermitize(m) -> np.ndarray:
    """Project onto the Hermitian part, (m + m*)/2."""
    m = as_matrix(m)
    return (m + m.conj().T) / 2.0


def tensor(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product with a per-axis dimension guard."""
    a = as_matrix(a)
    b = as_matrix(b)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > max_dim or cols > max_dim:
        raise DimensionLimit(
            f"tensor product of shape {rows}x{cols} exceeds the cap {max_dim}"
        )
    return np.kron(a, b)


def partial_trace(m, over: str, d1: int, d2: int) -> np.ndarray:
    """Trace out one tensor factor of an operator on C^d1 (x) C^d2.

    ``over`` selects the factor: "first" returns a d2 x d2 matrix, "second"
    a d1 x d1 matrix.
    """
    m = as_matrix(m)
    if m.shape != (d1 * d2, d1 * d2):
        raise ShapeMismatch(
            f"expected shape {(d1 * d2, d1 * d2)} for factors {d1}x{d2}, got {m.shape}"
        )
    t = m.reshape(d1, d2, d1, d2)
    if over == "first":
        return np.einsum("ikil->kl", t)
    if over == "second":
        return np.einsum("ikjk->ij", t)
    raise ValueError("over must be 'first' or 'second'")


def op_norm(m) -> float:
    """Largest singular value."""
    return float(np.linalg.svd(as_matrix(m), compute_uv=False)[0])


def trace_norm(m) -> float:
    """Sum of singular values."""
    return float(np.linalg.svd(as_matrix(m), compute_uv=False).sum())


@dataclass(frozen=True)
class HermEig:
    """Eigensystem of a Hermitian matrix, eigenvalues descending.

    ``vectors`` holds orthonormal eigenvector columns whose first component
    of magnitude above EPS_PHASE has been made real positive; together with
    the deterministic tie-break this pins the decomposition of a given
    input down to a unique matrix.
    """

    values: np.ndarray
    vectors: np.ndarray


def _fix_phase(v: np.ndarray) -> np.ndarray:
    for x in v:
        if abs(x) > EPS_PHASE:
            return v * (np.conj(x) / abs(x))
    return v


def herm_eig(m) -> HermEig:
    """Eigendecompose a Hermitian matrix deterministically.

    Eigenvalues are sorted descending; exact ties are broken by the
    phase-fixed eigenvectors' lexicographic order (largest first), so the
    standard basis comes out in natural order for diagonal input.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got {m.shape}")
    dev = op_norm(m - m.conj().T)
    scale = op_norm(m)
    if dev > EPS_HERM * max(1.0, scale):
        raise NotHermitian(f"deviation from Hermiticity {dev:.3e} at scale {scale:.3e}")
    w, u = np.linalg.eigh(hermitize(m))
    cols = [_fix_phase(u[:, k]) for k in range(u.shape[1])]

    def key(k: int):
        parts = [-float(w[k])]
        for x in cols[k]:
            parts.append(-float(x.real))
            parts.append(-float(x.imag))
        return tuple(parts)

    order = sorted(range(len(cols)), key=key)
    values = np.array([float(w[k]) for k in order])
    vectors = np.column_stack([cols[k] for k in order]) if order else u
    return HermEig(values=values, vectors=vectors)


def psd_leq(a, b, tol: float = EPS_PSD) -> bool:
    """Decide a <= b in the PSD order, for Hermitian a and b.

    True iff the smallest eigenvalue of b - a is >= -tol * max(1, ||b - a||).
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"incompatible shapes {a.shape} and {b.shape}")
    w = np.linalg.eigvalsh(hermitize(b - a))
    scale = max(1.0, float(np.abs(w).max())) if w.size else 1.0
    return bool(w.size == 0 or w[0] >= -tol * scale)


def pinv(m, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Moore-Penrose inverse, zeroing singular values below rank_tol * largest."""
    return np.linalg.pinv(as_matrix(m), rcond=rank_tol)


def psd_sqrt(m) -> np.ndarray:
    """Unique PSD square root of a PSD matrix."""
    e = herm_eig(m)
    scale = max(1.0, float(np.abs(e.values).max())) if e.values.size else 1.0
    low = float(e.values.min()) if e.values.size else 0.0
    if low < -EPS_PSD * scale:
        raise NotPsd(f"eigenvalue {low:.3e} below zero at scale {scale:.3e}")
    w = np.sqrt(np.clip(e.values, 0.0, None))
    return (e.vectors * w) @ e.vectors.conj().T


def vec(m) -> np.ndarray:
    """Row-major flattening of a matrix."""
    return as_matrix(m).reshape(-1)


def unvec(v, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec` for the given shape."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size != rows * cols:
        raise ShapeMismatch(f"cannot reshape {v.shape} into {rows}x{cols}")
    return v.reshape(rows, cols)
