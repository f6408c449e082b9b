"""Random test instances with controlled structure.

Subspaces are Gaussian spans; matrices get a prescribed rank and singular
values drawn from [0.25, 2] so that desk-scale trials stay well conditioned.
"""

import numpy as np

from . import subspace as sp
from ._linalg import adj


def gaussian(rng, shape, scalar="real"):
    g = rng.standard_normal(shape)
    if scalar == "complex":
        g = (g + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    return g


def unitary_columns(rng, n, k, scalar="real"):
    if k == 0:
        return np.zeros((n, 0), dtype=complex if scalar == "complex" else float)
    q, _ = np.linalg.qr(gaussian(rng, (n, k), scalar))
    return q


def random_matrix(rng, m, n, rank=None, scalar="real", low=0.25, high=2.0):
    """m x n matrix of the given rank with singular values in [low, high]."""
    if rank is None:
        rank = int(rng.integers(0, min(m, n) + 1))
    U = unitary_columns(rng, m, rank, scalar)
    V = unitary_columns(rng, n, rank, scalar)
    s = rng.uniform(low, high, rank)
    return (U * s) @ adj(V)


def random_pair(rng, n, scalar="real"):
    """(M, N) sharing a random common part, so M ∩ N is often nontrivial."""
    c = int(rng.integers(0, n + 1))
    a = int(rng.integers(0, n - c + 1))
    b = int(rng.integers(0, n - c + 1))
    common = gaussian(rng, (n, c), scalar)
    M = sp.from_columns(np.hstack([common, gaussian(rng, (n, a), scalar)]))
    N = sp.from_columns(np.hstack([common, gaussian(rng, (n, b), scalar)]))
    return M, N


def random_complementary_pair(rng, n, scalar="real"):
    k = int(rng.integers(0, n + 1))
    return (sp.random_subspace(rng, n, k, scalar), sp.random_subspace(rng, n, n - k, scalar))


def random_relation_basis(rng, n, m, scalar="real"):
    """Orthonormal graph basis of {(d, Ad + y) : d in D, y in K}.

    D, the operator A (of random rank) and the multivalued part K are all
    random, so dom, ran, ker and mul take all kinds of dimensions.
    """
    d = int(rng.integers(0, n + 1))
    k = int(rng.integers(0, m + 1))
    D = unitary_columns(rng, n, d, scalar)
    A = random_matrix(rng, m, n, scalar=scalar)
    K = unitary_columns(rng, m, k, scalar)
    top = np.hstack([D, np.zeros((n, k), dtype=D.dtype)])
    bot = np.hstack([A @ D, K])
    return sp.from_columns(np.vstack([top, bot])).basis


def random_range_pair(rng, n, scalar="real"):
    """Square A, B whose ranges overlap in a random common part."""
    c = int(rng.integers(0, n + 1))
    a = int(rng.integers(0, n - c + 1))
    b = int(rng.integers(0, n - c + 1))
    common = unitary_columns(rng, n, c, scalar)
    ua = np.linalg.qr(np.hstack([common, gaussian(rng, (n, a), scalar)]))[0]
    ub = np.linalg.qr(np.hstack([common, gaussian(rng, (n, b), scalar)]))[0]
    A = ua @ random_matrix(rng, c + a, n, rank=c + a, scalar=scalar)
    B = ub @ random_matrix(rng, c + b, n, rank=c + b, scalar=scalar)
    return A, B


def random_psd(rng, n, rank, scalar="real"):
    U = unitary_columns(rng, n, rank, scalar)
    return (U * rng.uniform(0.25, 2.0, rank)) @ adj(U)


def random_contraction(rng, n, scalar="real", isometric=False):
    """Contraction of random rank.  With ``isometric`` the top singular value
    is exactly 1; otherwise the matrix is scaled by 1 / (1.01 sigma_max)."""
    rank = int(rng.integers(1, n + 1))
    U = unitary_columns(rng, n, rank, scalar)
    V = unitary_columns(rng, n, rank, scalar)
    s = rng.uniform(0.0, 1.0, rank)
    if isometric:
        s[0] = 1.0
    else:
        s = s / (1.01 * s.max())
    return (U * s) @ adj(V)
