"""Shared random generators and independent oracles for the test suite.

The oracles here deliberately avoid the library's conversion paths: the
positivity-order oracle samples the defining quadratic forms directly, and
the direct Heisenberg sum re-implements the Kraus action with a plain loop.
"""

import numpy as np

from cp_calculus.cpmap import CpMap, add, apply, scale


def rand_complex(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def rand_unitary(rng, d):
    q, r = np.linalg.qr(rand_complex(rng, d, d))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def rand_psd(rng, d, limit=None):
    m = rand_complex(rng, d, d)
    p = m @ m.conj().T
    if limit is not None:
        top = float(np.linalg.eigvalsh(p)[-1])
        if top > 0:
            p = p * (limit / top) * rng.uniform(0.2, 1.0)
    return p


def rand_contraction(rng, d):
    """Random PSD matrix with spectrum inside [0, 1]."""
    u = rand_unitary(rng, d)
    lam = rng.uniform(0.0, 1.0, size=d)
    return (u * lam) @ u.conj().T


def rand_cp_map(rng, dim_in, dim_out, n_kraus=None, norm=None):
    """Random CP map; norm rescales so that ||T(1)|| equals norm."""
    if n_kraus is None:
        n_kraus = int(rng.integers(1, dim_in * dim_out + 1))
    kraus = [rand_complex(rng, dim_in, dim_out) for _ in range(n_kraus)]
    t = CpMap(dim_in, dim_out, tuple(kraus))
    if norm is not None:
        top = float(np.linalg.eigvalsh(apply(t, np.eye(dim_in)))[-1])
        factor = np.sqrt(norm / top)
        t = CpMap(dim_in, dim_out, tuple(factor * v for v in kraus))
    return t


def rand_operation(rng, dim_in, dim_out, n_kraus=None):
    """Random quantum operation, T(1) <= 1 with some slack."""
    return rand_cp_map(rng, dim_in, dim_out, n_kraus, norm=float(rng.uniform(0.1, 1.0)))


def rand_channel(rng, dim_in, dim_out, n_kraus=None):
    """Random channel via a Haar-like isometry sliced into Kraus operators."""
    if n_kraus is None:
        lo = int(np.ceil(dim_out / dim_in))
        n_kraus = int(rng.integers(lo, lo + 3))
    if dim_in * n_kraus < dim_out:
        raise ValueError("need dim_in * n_kraus >= dim_out for an isometry")
    g = rand_complex(rng, dim_in * n_kraus, dim_out)
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    arr = q.reshape(dim_in, n_kraus, dim_out)
    return CpMap(dim_in, dim_out, tuple(arr[:, x, :] for x in range(n_kraus)))


def heisenberg_sum(kraus, a):
    """Independent oracle for the Kraus action (plain loop, no library calls)."""
    out = 0
    for v in kraus:
        out = out + np.asarray(v).conj().T @ np.asarray(a) @ np.asarray(v)
    return out


def order_gram_psd(s, t, rng, n_vectors=10, tol=1e-9):
    """Positivity-order oracle from the defining quadratic forms.

    Samples families {(eta_k, A_k)} and checks the Gram matrix
    G[k,l] = <eta_k | (T - S)(A_k* A_l) eta_l> for positive semidefiniteness;
    S <= T holds iff every such Gram matrix is PSD.
    """
    m = s.dim_in
    for _ in range(n_vectors):
        size = int(rng.integers(1, 4))
        etas = [rand_complex(rng, s.dim_out, 1)[:, 0] for _ in range(size)]
        amats = [rand_complex(rng, m, m) for _ in range(size)]
        gram = np.zeros((size, size), dtype=complex)
        for k in range(size):
            for l in range(size):
                prod = amats[k].conj().T @ amats[l]
                diff = heisenberg_sum(t.kraus, prod) - heisenberg_sum(s.kraus, prod)
                gram[k, l] = etas[k].conj() @ diff @ etas[l]
        w = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
        scale = max(1.0, float(np.abs(w).max()))
        if w[0] < -tol * scale:
            return False
    return True


def conic_chain(rng, m, n, length):
    """Random increasing chain of operations by accumulating CP increments."""
    increments = [
        rand_cp_map(rng, m, n, n_kraus=int(rng.integers(1, 3))) for _ in range(length)
    ]
    sums = []
    acc = increments[0]
    sums.append(acc)
    for inc in increments[1:]:
        acc = add(acc, inc)
        sums.append(acc)
    top = float(np.linalg.eigvalsh(apply(acc, np.eye(m)))[-1])
    factor = float(rng.uniform(0.3, 1.0)) / top
    return [scale(s, factor) for s in sums]


def matrix_units(d):
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            yield e
