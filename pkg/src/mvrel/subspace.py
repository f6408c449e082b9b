"""Subspaces of a finite-dimensional real or complex inner-product space.

A :class:`Subspace` is stored as a column-orthonormal basis.  Bases are never
compared directly: equality and containment go through projector residuals,
i.e. through the sines of principal angles.
"""

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._linalg import CMP_TOL, RANK_TOL, adj, as_array, opnorm, orth

__all__ = [
    "Containment",
    "Subspace",
    "span",
    "from_columns",
    "zero",
    "full",
    "subspace_sum",
    "intersect",
    "complement",
    "minus",
    "projector",
    "compare",
    "contains",
    "equal",
    "distance",
    "friedrichs_cosine",
    "friedrichs_sine",
    "random_subspace",
]


class Containment(enum.Enum):
    EQUAL = "equal"
    STRICT_SUBSET = "strict_subset"
    STRICT_SUPERSET = "strict_superset"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of ``scalar^n`` held as an orthonormal basis (n x r)."""

    basis: np.ndarray
    tol: float = RANK_TOL

    def __post_init__(self):
        b = np.array(as_array(self.basis))
        if b.ndim != 2:
            raise ValueError(f"basis must be 2-d, got shape {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def scalar(self):
        return "complex" if np.iscomplexobj(self.basis) else "real"

    @property
    def is_zero(self):
        return self.dim == 0

    @property
    def is_full(self):
        return self.dim == self.ambient_dim

    @cached_property
    def projector(self):
        b = self.basis
        return b @ adj(b)

    def __add__(self, other):
        return subspace_sum(self, other)

    def __and__(self, other):
        return intersect(self, other)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, {self.scalar})"


def _check_ambient(M, N):
    if M.ambient_dim != N.ambient_dim:
        raise ValueError(
            f"ambient dimension mismatch: {M.ambient_dim} != {N.ambient_dim}"
        )


def _make(basis, tol):
    return Subspace(basis, tol)


def span(vectors, ambient_dim=None, tol=RANK_TOL):
    """Span of a list of vectors of length ``ambient_dim``.

    Numerical rank counts singular values ``>= tol * sigma_max`` of the
    generator matrix.
    """
    rows = [as_array(v).ravel() for v in vectors]
    if ambient_dim is None:
        if not rows:
            raise ValueError("ambient_dim is required for an empty span")
        ambient_dim = rows[0].size
    for i, r in enumerate(rows):
        if r.size != ambient_dim:
            raise ValueError(
                f"vector {i} has length {r.size}, expected {ambient_dim}"
            )
    if not rows:
        return zero(ambient_dim, tol=tol)
    return _make(orth(np.column_stack(rows), tol), tol)


def from_columns(g, tol=RANK_TOL, scale=None):
    """Column span of a matrix."""
    return _make(orth(g, tol, scale), tol)


def zero(n, tol=RANK_TOL, dtype=np.float64):
    return _make(np.zeros((n, 0), dtype=dtype), tol)


def full(n, tol=RANK_TOL, dtype=np.float64):
    return _make(np.eye(n, dtype=dtype), tol)


def subspace_sum(M, N):
    """M + N."""
    _check_ambient(M, N)
    return _make(orth(np.hstack([M.basis, N.basis]), M.tol, scale=1.0), M.tol)


def complement(M):
    """Orthogonal complement."""
    n, r = M.basis.shape
    if r == 0:
        return full(n, M.tol, M.basis.dtype)
    u, _, _ = np.linalg.svd(M.basis, full_matrices=True)
    return _make(u[:, r:], M.tol)


def intersect(M, N):
    """M ∩ N, computed as (M⊥ + N⊥)⊥."""
    _check_ambient(M, N)
    return complement(subspace_sum(complement(M), complement(N)))


def minus(M, N):
    """M ⊖ N := M ∩ N⊥ (total; no inclusion N ⊆ M is required)."""
    return intersect(M, complement(N))


def projector(M):
    """Matrix of the orthogonal projection onto M."""
    return M.projector


def _excess(M, N):
    # norm of the part of M sticking out of N
    if M.dim == 0:
        return 0.0
    return opnorm(M.basis - N.basis @ (adj(N.basis) @ M.basis))


def contains(M, N, tol=CMP_TOL):
    """True when N ⊆ M within ``tol``."""
    _check_ambient(M, N)
    return _excess(N, M) <= tol


def distance(M, N):
    """Gap between subspaces: the sine of the largest principal angle when the
    dimensions agree, and 1 otherwise."""
    _check_ambient(M, N)
    return max(_excess(M, N), _excess(N, M))


def equal(M, N, tol=CMP_TOL):
    return distance(M, N) <= tol


def compare(M, N, tol=CMP_TOL):
    _check_ambient(M, N)
    sub = _excess(M, N) <= tol
    sup = _excess(N, M) <= tol
    if sub and sup:
        return Containment.EQUAL
    if sub:
        return Containment.STRICT_SUBSET
    if sup:
        return Containment.STRICT_SUPERSET
    return Containment.INCOMPARABLE


def _reduced(M, N):
    common = intersect(M, N)
    return minus(M, common), minus(N, common)


def friedrichs_cosine(M, N):
    """Cosine of the Friedrichs angle: the largest |<x, y>| over unit vectors
    of M ⊖ (M∩N) and N ⊖ (M∩N)."""
    _check_ambient(M, N)
    Mr, Nr = _reduced(M, N)
    if Mr.dim == 0 or Nr.dim == 0:
        return 0.0
    return min(1.0, opnorm(adj(Mr.basis) @ Nr.basis))


def friedrichs_sine(M, N):
    """Sine of the Friedrichs angle, evaluated without cancellation as the
    smallest distance from a unit vector of M ⊖ (M∩N) to N ⊖ (M∩N)."""
    _check_ambient(M, N)
    Mr, Nr = _reduced(M, N)
    if Mr.dim == 0 or Nr.dim == 0:
        return 1.0
    rest = complement(Nr).basis
    s = np.linalg.svd(adj(rest) @ Mr.basis, compute_uv=False)
    return float(s[-1]) if s.size >= Mr.dim else 0.0


def random_subspace(seed, ambient_dim, dim, scalar="real", tol=RANK_TOL):
    """Span of ``dim`` i.i.d. standard Gaussian vectors.

    ``seed`` may be an integer or a :class:`numpy.random.Generator`.
    """
    if not 0 <= dim <= ambient_dim:
        raise ValueError(f"dim must lie in [0, {ambient_dim}], got {dim}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = rng.standard_normal((ambient_dim, dim))
    if scalar == "complex":
        g = (g + 1j * rng.standard_normal((ambient_dim, dim))) / np.sqrt(2)
    elif scalar != "real":
        raise ValueError(f"scalar must be 'real' or 'complex', got {scalar!r}")
    if dim == 0:
        return zero(ambient_dim, tol, g.dtype)
    q, _ = np.linalg.qr(g)
    return _make(q, tol)
