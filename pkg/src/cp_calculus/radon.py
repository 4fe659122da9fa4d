"""Radon-Nikodym calculus for the complete-positivity order.

S <= T means T - S is completely positive.  For dominated pairs there is a
unique operator F on the environment of T's minimal dilation V with
0 <= F <= 1 and S(A) = V*(A (x) F)V; this module extracts F, re-expands it
into maps, and decomposes instruments into such densities.

Extraction works on the canonical Kraus stack W (columns vec(V_x*)): the
unnormalized process matrix of S equals W F W^T-conjugate up to scaling, so
F = pinv(W) @ choi_unnormalized(S) @ pinv(W)*.  Reconstruction residual and
the eigenvalue window of F together decide domination exactly, which is why
no separate order check is run first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cpmap import (
    ChoiOperator,
    CpMap,
    canonicalize,
    choi_unnormalized,
    from_choi,
    kraus_stack,
    to_choi,
)
from .errors import (
    DimMismatch,
    NotADecomposition,
    NotAResolution,
    NotDominated,
    NotPsd,
    ShapeMismatch,
)
from .numerics import (
    EPS_PSD,
    as_matrix,
    herm_eig,
    hermitize,
    op_norm,
    pinv,
    psd_leq,
    recon_tol,
)


def _check_same_dims(s: CpMap, t: CpMap):
    if (s.dim_in, s.dim_out) != (t.dim_in, t.dim_out):
        raise DimMismatch(
            f"maps have dims {(s.dim_in, s.dim_out)} and {(t.dim_in, t.dim_out)}"
        )


def dominates(s: CpMap, t: CpMap, tol: float = EPS_PSD) -> bool:
    """True when T - S is completely positive (process-operator order)."""
    _check_same_dims(s, t)
    return psd_leq(to_choi(s).matrix, to_choi(t).matrix, tol)


@dataclass(frozen=True)
class RnDerivative:
    """Derivative density on the canonical environment of the dominating map."""

    dim_in: int
    dim_out: int
    env_dim: int
    matrix: np.ndarray


@dataclass(frozen=True)
class KernelMatrix:
    """Kernel K(x,y) indexed by the dominating map's canonical Kraus family."""

    dim_in: int
    dim_out: int
    env_dim: int
    matrix: np.ndarray


@dataclass(frozen=True)
class RescaledKraus:
    """Kraus family of the dominating map rotated so the dominated map is
    a plain reweighting: S(A) = sum_x weights[x] W_x* A W_x."""

    dim_in: int
    dim_out: int
    kraus: tuple[np.ndarray, ...]
    weights: np.ndarray


@dataclass(frozen=True)
class PovmDecomposition:
    """Environment POVM arising from an instrument decomposition."""

    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.elements:
            raise ShapeMismatch("a POVM needs at least one element")
        mats = []
        d = None
        for idx, f in enumerate(self.elements):
            f = as_matrix(f)
            if f.shape[0] != f.shape[1]:
                raise ShapeMismatch(f"element {idx} is not square: {f.shape}")
            if d is None:
                d = f.shape[0]
            elif f.shape[0] != d:
                raise ShapeMismatch(f"element {idx} has dim {f.shape[0]}, expected {d}")
            low = float(np.linalg.eigvalsh(hermitize(f))[0])
            scale = max(1.0, op_norm(f))
            if low < -EPS_PSD * scale:
                raise NotPsd(f"element {idx} has eigenvalue {low:.3e}")
            mats.append(f)
        total = sum(mats)
        dev = op_norm(total - np.eye(d))
        if dev > recon_tol(1.0):
            raise NotAResolution(f"elements sum to identity + {dev:.3e}")
        object.__setattr__(self, "elements", tuple(mats))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]


def rn_derivative(s: CpMap, t: CpMap) -> RnDerivative:
    """Extract the unique density F with S(A) = V*(A (x) F)V.

    Raises NotDominated when the reconstruction residual exceeds tolerance
    (support escape) or F's spectrum leaves [0, 1] beyond EPS_PSD; those
    two checks are exactly the domination criterion.
    """
    _check_same_dims(s, t)
    base = canonicalize(t)
    w = kraus_stack(base.kraus)
    cs = choi_unnormalized(to_choi(s))
    wp = pinv(w)
    f = hermitize(wp @ cs @ wp.conj().T)
    resid = op_norm(w @ f @ w.conj().T - cs)
    if resid > recon_tol(op_norm(cs)):
        raise NotDominated(
            f"residual {resid:.3e} outside the dominating map's support"
        )
    eigs = np.linalg.eigvalsh(f)
    if eigs[0] < -EPS_PSD or eigs[-1] > 1.0 + EPS_PSD:
        raise NotDominated(
            f"density spectrum [{eigs[0]:.3e}, {eigs[-1]:.3e}] escapes [0, 1]"
        )
    return RnDerivative(
        dim_in=t.dim_in, dim_out=t.dim_out, env_dim=len(base.kraus), matrix=f
    )


def rn_reconstruct(t: CpMap, f) -> CpMap:
    """Expand a density on T's canonical environment back into a map.

    Accepts an RnDerivative or a bare matrix; the result is returned in
    canonical Kraus form and is dominated by ``t`` by construction.
    """
    base = canonicalize(t)
    d = len(base.kraus)
    mat = as_matrix(f.matrix if isinstance(f, RnDerivative) else f)
    if mat.shape != (d, d):
        raise ShapeMismatch(f"density has shape {mat.shape}, environment dim is {d}")
    eigs = np.linalg.eigvalsh(hermitize(mat))
    if eigs[0] < -EPS_PSD or eigs[-1] > 1.0 + EPS_PSD:
        raise NotPsd(
            f"density spectrum [{eigs[0]:.3e}, {eigs[-1]:.3e}] escapes [0, 1]"
        )
    w = kraus_stack(base.kraus)
    choi = t.dim_in * (w @ hermitize(mat) @ w.conj().T)
    return from_choi(ChoiOperator(t.dim_in, t.dim_out, hermitize(choi)))


def kernel_form(s: CpMap, t: CpMap) -> KernelMatrix:
    """Derivative as a kernel on the canonical Kraus index set of ``t``.

    The kernel satisfies 0 <= K <= Kronecker kernel (identity matrix) and
    S(A) = sum_{x,y} K(x,y) V_x* A V_y.
    """
    der = rn_derivative(s, t)
    return KernelMatrix(
        dim_in=der.dim_in,
        dim_out=der.dim_out,
        env_dim=der.env_dim,
        matrix=der.matrix,
    )


def rescaled_kraus(s: CpMap, t: CpMap) -> RescaledKraus:
    """Rotate T's canonical family so S becomes a spectral reweighting.

    Diagonalizing the density F = sum_x lam_x |phi_x><phi_x| and setting
    W_x = sum_y conj(phi_x[y]) V_y gives T(A) = sum W_x* A W_x and
    S(A) = sum lam_x W_x* A W_x with weights descending in [0, 1].
    """
    der = rn_derivative(s, t)
    base = canonicalize(t)
    e = herm_eig(der.matrix)
    weights = np.clip(e.values, 0.0, 1.0)
    stack = np.stack(base.kraus, axis=0)
    rotated = np.einsum("yx,ymn->xmn", e.vectors.conj(), stack)
    return RescaledKraus(
        dim_in=t.dim_in,
        dim_out=t.dim_out,
        kraus=tuple(rotated[x] for x in range(rotated.shape[0])),
        weights=weights,
    )


def cp_difference(t: CpMap, s: CpMap) -> CpMap:
    """The CP map T - S for a dominated pair, in canonical Kraus form."""
    _check_same_dims(s, t)
    diff = to_choi(t).matrix - to_choi(s).matrix
    try:
        return from_choi(ChoiOperator(t.dim_in, t.dim_out, hermitize(diff)))
    except NotPsd as exc:
        raise NotDominated(f"difference is not completely positive: {exc}") from exc


def instrument_rn(t: CpMap, parts) -> PovmDecomposition:
    """Derivatives of an instrument's parts form a POVM on T's environment.

    ``parts`` must sum to ``t``; each density F_i = D_T(part_i) is PSD and
    the family resolves the identity on the canonical environment.
    """
    parts = list(parts)
    if not parts:
        raise NotADecomposition("an instrument needs at least one part")
    for p in parts:
        _check_same_dims(p, t)
    total = sum(to_choi(p).matrix for p in parts)
    target = to_choi(t).matrix
    dev = op_norm(total - target)
    if dev > recon_tol(op_norm(target)):
        raise NotADecomposition(f"parts sum differs from the map by {dev:.3e}")
    elements = [rn_derivative(p, t).matrix for p in parts]
    return PovmDecomposition(elements=tuple(elements))
