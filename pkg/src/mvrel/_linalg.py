"""Dense kernels shared by every layer: orthonormal bases, null spaces,
truncated pseudo-inverses and positive square roots.

Rank decisions are made against ``tol * scale``.  Internal callers that work
on blocks of orthonormal bases pass ``scale=1`` so that the cut-off is
absolute; user-facing constructors leave ``scale`` unset and the largest
singular value of the input is used instead.
"""

import numpy as np

#: relative cut-off for numerical rank
RANK_TOL = 1e-10
#: default tolerance for containment / equality of subspaces
CMP_TOL = 1e-8


def as_array(a):
    """Return ``a`` as a float64 or complex128 array."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return a.astype(np.complex128, copy=False)
    return a.astype(np.float64, copy=False)


def adj(a):
    """Conjugate transpose."""
    return a.conj().T


def _rank(s, tol, scale):
    ref = (s[0] if s.size else 0.0) if scale is None else scale
    if ref <= 0:
        return 0
    return int(np.count_nonzero(s >= tol * ref))


def orth(g, tol=RANK_TOL, scale=None):
    """Orthonormal basis of the column span of ``g``.

    The basis is made of left singular vectors, so it is canonical up to the
    usual unitary freedom inside repeated singular values.
    """
    g = as_array(g)
    if g.ndim != 2:
        raise ValueError(f"expected a 2-d generator matrix, got shape {g.shape}")
    n, k = g.shape
    if k == 0 or n == 0:
        return np.zeros((n, 0), dtype=g.dtype)
    u, s, _ = np.linalg.svd(g, full_matrices=False)
    return u[:, :_rank(s, tol, scale)]


def null(a, tol=RANK_TOL, scale=None):
    """Orthonormal basis (as columns) of the null space of ``a``."""
    a = as_array(a)
    m, k = a.shape
    if k == 0:
        return np.zeros((0, 0), dtype=a.dtype)
    if m == 0:
        return np.eye(k, dtype=a.dtype)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    return adj(vh[_rank(s, tol, scale):])


def pinv(a, tol=RANK_TOL, scale=None):
    """Truncated Moore-Penrose inverse."""
    a = as_array(a)
    m, k = a.shape
    if m == 0 or k == 0:
        return np.zeros((k, m), dtype=a.dtype)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    r = _rank(s, tol, scale)
    return (adj(vh[:r]) / s[:r]) @ adj(u[:, :r])


def opnorm(a):
    """Spectral norm; 0 for empty matrices."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hermitian_part(a):
    a = as_array(a)
    return (a + adj(a)) / 2


def psd_eig(a, tol=RANK_TOL, scale=None):
    """Eigen-decomposition of a positive semidefinite matrix with small and
    negative eigenvalues clipped to exactly zero.

    The cut-off is ``tol * scale``; ``scale`` defaults to the top eigenvalue.
    """
    lam, v = np.linalg.eigh(hermitian_part(a))
    top = max(float(lam[-1]), 0.0) if lam.size else 0.0
    lam = np.where(lam < tol * (top if scale is None else scale), 0.0, lam)
    if top == 0.0:
        lam = np.zeros_like(lam)
    return lam, v


def psd_sqrt(a, tol=RANK_TOL, scale=None):
    """Positive square root of a positive semidefinite matrix."""
    lam, v = psd_eig(a, tol, scale)
    return (v * np.sqrt(lam)) @ adj(v)


def is_psd(a, tol=RANK_TOL):
    """True when ``a`` is Hermitian with eigenvalues >= -tol * ||a||."""
    a = as_array(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(opnorm(a), 1.0)
    if np.linalg.norm(a - adj(a), 2) > tol * scale:
        return False
    return bool(np.linalg.eigvalsh(hermitian_part(a)).min(initial=0.0) >= -tol * scale)
