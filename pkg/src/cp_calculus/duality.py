"""Process operators as derivative densities of a reference channel.

Every CP map on an m-dimensional input algebra is dominated by a multiple
of the channel sending a to tau(a)1, tau the normalized trace.  Its
derivative density with respect to that reference is, after the canonical
environment identification, the amplified process operator F of the map.
That one fact turns domination calculus into matrix calculus: the action,
the quantum-operation criterion, and composition can all be read off F
without ever touching Kraus families.  Replacing tau by a faithful
diagonal state generalizes the construction; the uniform state recovers F
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cpmap import (
    ChoiOperator,
    CpMap,
    apply,
    canonicalize,
    kraus_stack,
    scale,
    to_choi,
)
from .errors import DimMismatch, DimensionLimit, NotPsd, ShapeMismatch
from .numerics import (
    EPS_PSD,
    MAX_DIM,
    as_matrix,
    hermitize,
    op_norm,
    partial_trace,
    psd_leq,
    tensor,
)
from .radon import dominates, rn_derivative


@dataclass(frozen=True)
class ReferenceChannel(CpMap):
    """The channel a -> tau(a)1 with its flat rank-one Kraus family."""

    @property
    def m(self) -> int:
        return self.dim_in

    @property
    def n(self) -> int:
        return self.dim_out


def reference_channel(m: int, n: int) -> ReferenceChannel:
    """Build the channel sending a to tau(a)1_n, tau = normalized trace.

    The m * n Kraus operators |e_i><f_mu| / sqrt(m) are ordered with the
    input index fastest, so the environment index (mu, i) -> mu * m + i
    matches the row convention of the process operator.
    """
    if m < 1 or n < 1:
        raise ShapeMismatch("dimensions must be at least 1")
    if m * n > MAX_DIM:
        raise DimensionLimit(f"environment dimension {m * n} exceeds {MAX_DIM}")
    root = 1.0 / np.sqrt(m)
    ops = []
    for mu in range(n):
        for i in range(m):
            v = np.zeros((m, n), dtype=complex)
            v[i, mu] = root
            ops.append(v)
    return ReferenceChannel(dim_in=m, dim_out=n, kraus=tuple(ops))


def jam_forward(t: CpMap) -> ChoiOperator:
    """Process operator of ``t``, amplified by the input dimension.

    Numerically identical to ``to_choi``.  In debug mode this entry point
    additionally certifies the duality it stands for: ``t`` is dominated
    by a suitable multiple of the reference channel, and the derivative
    density on that channel's environment, rotated back to the natural
    Kraus index, is the returned operator divided by the multiple.
    """
    f = to_choi(t)
    if __debug__:
        m, n = t.dim_in, t.dim_out
        norm_one = op_norm(apply(t, np.eye(m)))
        c = m * m * max(1.0, norm_one * (1.0 + 1e-12))
        base = scale(reference_channel(m, n), c)
        assert dominates(t, base)
        deriv = rn_derivative(t, base)
        # the natural family is orthogonal with equal norms, so the frame
        # change u to the canonical environment is exactly unitary
        w_ref = kraus_stack(base.kraus)
        w_canon = kraus_stack(canonicalize(base).kraus)
        u = (m / c) * (w_ref.conj().T @ w_canon)
        nat = u @ deriv.matrix @ u.conj().T
        dev = op_norm(nat - f.matrix / c)
        assert dev <= 1e-9 * max(1.0, op_norm(f.matrix) / c), dev
    return f


def jam_apply(f: ChoiOperator, a) -> np.ndarray:
    """Recover the action on ``a`` from a process operator.

    Computes (1/m) tr_in[(1 (x) a^T) F] with the transpose taken in the
    standard basis; for F = jam_forward(t) this equals apply(t, a).
    """
    a = as_matrix(a)
    m, n = f.dim_in, f.dim_out
    if a.shape != (m, m):
        raise ShapeMismatch(f"expected shape {(m, m)}, got {a.shape}")
    prod = tensor(np.eye(n), a.T) @ f.matrix
    return partial_trace(prod, "second", n, m) / m


def jam_is_operation(f: ChoiOperator, tol: float = EPS_PSD) -> bool:
    """Quantum-operation criterion tr_in F <= m 1 on the process operator."""
    m, n = f.dim_in, f.dim_out
    marginal = partial_trace(f.matrix, "second", n, m)
    return psd_leq(marginal, m * np.eye(n), tol)


def jam_compose(f2: ChoiOperator, f1: ChoiOperator) -> ChoiOperator:
    """Compose process operators without leaving process-operator form.

    For F2 of an n -> d map and F1 of an m -> n map, the composite entries
    contract the shared factor against the maximally entangled vector:

        <x,i|F21|y,j> = (1/n) sum_{mu,nu} <x,mu|F2|y,nu> <mu,i|F1|nu,j>

    which equals jam_forward of the composed maps.
    """
    if f1.dim_out != f2.dim_in:
        raise DimMismatch(
            f"inner dimensions disagree: {f2.dim_in} and {f1.dim_out}"
        )
    m, n = f1.dim_in, f1.dim_out
    d = f2.dim_out
    f2r = f2.matrix.reshape(d, n, d, n)
    f1r = f1.matrix.reshape(n, m, n, m)
    out = np.einsum("xuyv,uivj->xiyj", f2r, f1r) / n
    return ChoiOperator(
        dim_in=m, dim_out=d, matrix=hermitize(out.reshape(d * m, d * m))
    )


@dataclass(frozen=True)
class FaithfulState:
    """Faithful diagonal state w(a) = sum_i p_i <b_i|a b_i>.

    ``basis`` holds the vectors b_i as columns; the default is the
    standard basis.  Faithfulness means every p_i is strictly positive.
    """

    p: np.ndarray
    basis: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0 or not np.all(np.isfinite(p)):
            raise ShapeMismatch("p must be a finite probability vector")
        if float(np.min(p)) <= 0.0:
            k = int(np.argmin(p))
            raise NotPsd(f"state is not faithful: p[{k}] = {p[k]:.3e}")
        total = float(np.sum(p))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        m = p.size
        b = np.eye(m, dtype=complex) if self.basis is None else as_matrix(self.basis)
        if b.shape != (m, m):
            raise ShapeMismatch(f"basis has shape {b.shape}, expected {(m, m)}")
        if op_norm(b @ b.conj().T - np.eye(m)) > 1e-8:
            raise ValueError("basis columns are not orthonormal")
        p = p.copy()
        p.setflags(write=False)
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.p.size

    def density(self) -> np.ndarray:
        """Density matrix sum_i p_i |b_i><b_i| of the state."""
        return (self.basis * self.p) @ self.basis.conj().T


def faithful_channel(w: FaithfulState, n: int) -> CpMap:
    """Channel a -> w(a)1_n induced by a faithful state on the input.

    Kraus operators sqrt(p_i)|b_i><f_mu| in the same input-fastest order
    as the reference channel; the uniform state in the standard basis
    reproduces reference_channel(w.dim, n) exactly.
    """
    if n < 1:
        raise ShapeMismatch("dimensions must be at least 1")
    m = w.dim
    if m * n > MAX_DIM:
        raise DimensionLimit(f"environment dimension {m * n} exceeds {MAX_DIM}")
    root = np.sqrt(w.p)
    ops = []
    for mu in range(n):
        for i in range(m):
            v = np.zeros((m, n), dtype=complex)
            v[:, mu] = root[i] * w.basis[:, i]
            ops.append(v)
    return CpMap(dim_in=m, dim_out=n, kraus=tuple(ops))


class FaithfulDerivative(NamedTuple):
    """Derivative density of a map against a faithful reference channel."""

    matrix: np.ndarray
    constant: float


def faithful_rn(t: CpMap, w: FaithfulState) -> FaithfulDerivative:
    """Derivative density of ``t`` on its faithful reference environment.

    Entries are <f_mu|T(|b_i><b_j|)f_nu> / sqrt(p_i p_j) at environment
    index (mu, i) -> mu * m + i, and ``constant`` is the operator norm,
    the least c with t dominated by c times the faithful channel.  The
    uniform state in the standard basis returns the process operator.
    """
    m, n = t.dim_in, t.dim_out
    if w.dim != m:
        raise DimMismatch(f"state dim {w.dim} does not match input dim {m}")
    f = np.zeros((n * m, n * m), dtype=complex)
    root = np.sqrt(w.p)
    for i in range(m):
        for j in range(m):
            img = apply(t, np.outer(w.basis[:, i], w.basis[:, j].conj()))
            f[i::m, j::m] = img / (root[i] * root[j])
    f = hermitize(f)
    c = float(op_norm(f))
    if __debug__:
        assert dominates(t, scale(faithful_channel(w, n), c))
        dinv = 1.0 / float(np.min(w.p))
        cb = op_norm(apply(t, np.eye(m)))
        assert c <= dinv * dinv * cb * (1.0 + 1e-9)
    return FaithfulDerivative(matrix=f, constant=c)
