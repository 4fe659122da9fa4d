"""Order structure of CP maps: rigidity, domination constants, dilations.

Channels are extreme in the complete-positivity order: two distinct
channels never dominate one another, so the only way to compare them is by
a constant, s <= c * t.  This module computes the least such constant,
builds mixtures and paddings, and turns an increasing chain of operations
into a single dilation carrying an increasing family of projections.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cpmap import (
    CpMap,
    add,
    apply,
    canonicalize,
    dilation_matrix,
    is_channel,
    is_quantum_operation,
    scale,
    to_choi,
    to_stinespring,
)
from .errors import (
    CpError,
    DimMismatch,
    NotAChannel,
    NotAnOperation,
    NotMonotone,
    ShapeMismatch,
)
from .numerics import (
    EPS_PSD,
    RANK_TOL,
    as_matrix,
    herm_eig,
    hermitize,
    op_norm,
    psd_sqrt,
    recon_tol,
    tensor,
)
from .radon import PovmDecomposition, cp_difference, dominates, instrument_rn


class DifferenceVerdict(enum.Enum):
    """Outcome of comparing two equally normalized maps for domination."""

    EQUAL = "equal"
    NOT_CP = "not_cp"


def channel_difference_is_cp(
    s: CpMap, t: CpMap, tol: float = EPS_PSD
) -> DifferenceVerdict:
    """Rigidity of channels: T - S is CP only when S = T.

    Accepts channel pairs, or more generally maps with apply(s, 1) equal to
    apply(t, 1) within tolerance (same normalization); anything else raises
    NotAChannel.  Returns EQUAL when the maps agree on all inputs, NOT_CP
    otherwise.  For pairs separated by more than 1e-6 in process-operator
    norm the NOT_CP verdict is cross-checked against ``dominates``; closer
    ties sit inside the order check's tolerance window and are reported
    without the cross-check.
    """
    if (s.dim_in, s.dim_out) != (t.dim_in, t.dim_out):
        raise DimMismatch(
            f"maps have dims {(s.dim_in, s.dim_out)} and {(t.dim_in, t.dim_out)}"
        )
    if not (is_channel(s, tol) and is_channel(t, tol)):
        norm_gap = op_norm(
            apply(s, np.eye(s.dim_in)) - apply(t, np.eye(t.dim_in))
        )
        if norm_gap > tol:
            raise NotAChannel(
                f"normalizations differ by {norm_gap:.3e}; rigidity needs equality"
            )
    gap = op_norm(to_choi(s).matrix - to_choi(t).matrix)
    if gap <= recon_tol(op_norm(to_choi(t).matrix)):
        return DifferenceVerdict.EQUAL
    if gap > 1e-6:
        assert not dominates(s, t, tol), "rigidity violated for a separated pair"
    return DifferenceVerdict.NOT_CP


@dataclass(frozen=True)
class DominationConstant:
    """Least c with s <= c * t; infinite when no finite constant works."""

    value: float
    attained: bool


def c_min(s: CpMap, t: CpMap) -> DominationConstant:
    """Least constant c such that c * t dominates s.

    Computed as the operator norm of the compression of s's process
    operator by the inverse square root of t's, on t's support.  When s
    leaks outside that support no finite constant works and the sentinel
    (inf, attained=False) is returned.
    """
    if (s.dim_in, s.dim_out) != (t.dim_in, t.dim_out):
        raise DimMismatch(
            f"maps have dims {(s.dim_in, s.dim_out)} and {(t.dim_in, t.dim_out)}"
        )
    cs = to_choi(s).matrix
    ct = to_choi(t).matrix
    e = herm_eig(ct)
    top = float(e.values[0]) if e.values.size else 0.0
    keep = e.values >= RANK_TOL * top if top > 0.0 else np.zeros(len(e.values), bool)
    basis = e.vectors[:, keep]
    proj = basis @ basis.conj().T
    leak = op_norm(cs - proj @ cs @ proj)
    if leak > recon_tol(op_norm(cs)):
        return DominationConstant(value=float("inf"), attained=False)
    if not keep.any():
        return DominationConstant(value=0.0, attained=True)
    inv_root = (basis / np.sqrt(e.values[keep])) @ basis.conj().T
    value = op_norm(inv_root @ cs @ inv_root)
    return DominationConstant(value=float(value), attained=True)


def mix_channels(s1: CpMap, s2: CpMap, lam: float) -> CpMap:
    """Convex mixture lam * s1 + (1 - lam) * s2 of two channels."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError("mixing weight must lie in [0, 1]")
    if (s1.dim_in, s1.dim_out) != (s2.dim_in, s2.dim_out):
        raise DimMismatch(
            f"maps have dims {(s1.dim_in, s1.dim_out)} and {(s2.dim_in, s2.dim_out)}"
        )
    if not (is_channel(s1) and is_channel(s2)):
        raise NotAChannel("mixture inputs must be channels")
    return add(scale(s1, lam), scale(s2, 1.0 - lam))


def pad_to_channel(t: CpMap) -> CpMap:
    """Complete an operation to a channel by appending one Kraus operator.

    The appended operator M satisfies M*M = 1 - T(1); for
    dim_in >= dim_out it is the unique PSD root composed with the standard
    embedding, otherwise a rank factorization is used, which exists only
    while rank(1 - T(1)) <= dim_in.  The result is returned canonicalized.
    """
    if not is_quantum_operation(t):
        raise NotAnOperation("padding needs T(1) <= 1")
    m, n = t.dim_in, t.dim_out
    defect = hermitize(np.eye(n) - apply(t, np.eye(m)))
    e = herm_eig(defect)
    vals = np.clip(e.values, 0.0, None)
    top = float(vals[0]) if vals.size else 0.0
    rank = int(np.count_nonzero(vals >= RANK_TOL * top)) if top > 0.0 else 0
    if rank == 0:
        pad = np.zeros((m, n), dtype=complex)
    elif m >= n:
        pad = np.eye(m, n) @ psd_sqrt(defect)
    else:
        if rank > m:
            raise CpError(
                f"defect rank {rank} exceeds dim_in {m}; "
                "no single appended operator can complete this map"
            )
        basis = e.vectors[:, :rank]
        pad = np.eye(m, rank) @ (np.sqrt(vals[:rank])[:, None] * basis.conj().T)
    return canonicalize(add(t, CpMap(m, n, (pad,))))


class NaimarkDilation(NamedTuple):
    """Isometry and projective measurement dilating a POVM."""

    isometry: np.ndarray
    pvm: tuple[np.ndarray, ...]


def naimark_dilate(povm: PovmDecomposition) -> NaimarkDilation:
    """Dilate a POVM to a projective measurement on dim * k dimensions.

    The isometry sends xi to sum_i sqrt(F_i) xi (x) delta_i; compressing
    the block projections 1 (x) |delta_i><delta_i| reproduces the POVM.
    """
    d = povm.dim
    k = len(povm.elements)
    roots = [psd_sqrt(hermitize(f)) for f in povm.elements]
    isometry = np.stack(roots, axis=1).reshape(d * k, d)
    pvm = []
    for i in range(k):
        marker = np.zeros((k, k), dtype=complex)
        marker[i, i] = 1.0
        pvm.append(tensor(np.eye(d), marker))
    return NaimarkDilation(isometry=isometry, pvm=tuple(pvm))


@dataclass(frozen=True)
class PvmChain:
    """One dilation carrying an increasing projection per chain element.

    Each input map satisfies T_k(A) = isometry*(A (x) projections[k])isometry,
    with projections orthogonal, increasing, and contained in the identity.
    """

    dim_in: int
    dim_out: int
    env_dim: int
    isometry: np.ndarray
    projections: tuple[np.ndarray, ...]

    def __post_init__(self):
        iso = as_matrix(self.isometry)
        if iso.shape != (self.dim_in * self.env_dim, self.dim_out):
            raise ShapeMismatch(
                f"isometry shape {iso.shape}, expected "
                f"{(self.dim_in * self.env_dim, self.dim_out)}"
            )
        projs = []
        for idx, p in enumerate(self.projections):
            p = as_matrix(p)
            if p.shape != (self.env_dim, self.env_dim):
                raise ShapeMismatch(f"projection {idx} has shape {p.shape}")
            projs.append(p)
        object.__setattr__(self, "projections", tuple(projs))


def order_chain_dilation(chain) -> PvmChain:
    """Represent an increasing chain of operations on one dilation.

    The last element is padded to a channel when necessary, successive
    differences are decomposed as an instrument, and the resulting
    environment POVM is dilated projectively; partial sums of the projective
    family give the increasing projections.  Projections are returned for
    the input chain only (the padding part, when present, is excluded).
    """
    chain = list(chain)
    if not chain:
        raise ValueError("chain must contain at least one map")
    for k, t in enumerate(chain):
        if not is_quantum_operation(t):
            raise NotAnOperation(f"chain element {k} has T(1) > 1")
    for k in range(len(chain) - 1):
        if not dominates(chain[k], chain[k + 1]):
            raise NotMonotone(f"element {k} is not dominated by element {k + 1}")

    last = chain[-1]
    padded = not is_channel(last)
    base = pad_to_channel(last) if padded else canonicalize(last)

    parts = [chain[0]]
    for k in range(1, len(chain)):
        parts.append(cp_difference(chain[k], chain[k - 1]))
    if padded:
        parts.append(cp_difference(base, last))

    povm = instrument_rn(base, parts)
    nai = naimark_dilate(povm)
    k_parts = len(povm.elements)
    env = povm.dim * k_parts

    projections = []
    running = np.zeros((env, env), dtype=complex)
    for i in range(len(chain)):
        running = running + nai.pvm[i]
        projections.append(running.copy())

    big = tensor(np.eye(chain[0].dim_in), nai.isometry)
    isometry = big @ to_stinespring(base).matrix

    return PvmChain(
        dim_in=chain[0].dim_in,
        dim_out=chain[0].dim_out,
        env_dim=env,
        isometry=isometry,
        projections=tuple(projections),
    )
