"""Linear relations between finite-dimensional spaces.

A relation from ``scalar^n`` into ``scalar^m`` is a subspace of the product
``scalar^(n+m)``; the first ``n`` coordinates are the input block and the
last ``m`` the output block.  Every operation below works on orthonormal
bases of graphs, so rank decisions inside them use an absolute cut-off.
"""

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import subspace as sp
from ._linalg import CMP_TOL, RANK_TOL, adj, as_array, null, opnorm, orth
from .errors import NumericalInconsistency
from .subspace import Containment, Subspace

__all__ = [
    "LinearRelation",
    "AffineSet",
    "Parts",
    "SumFlags",
    "from_generators",
    "from_generator_rows",
    "graph_of",
    "parts",
    "inverse",
    "adjoint",
    "closure",
    "cw_sum",
    "cw_sum_flags",
    "op_sum",
    "compose",
    "apply",
    "image",
    "restrict",
    "canonical",
    "identity_on",
    "zero_on",
    "product_of",
    "compare_rel",
    "lemma_equal",
    "rel_equal",
    "rel_contains",
    "rel_distance",
    "operator_part",
    "operator_matrix",
    "relation_pinv",
]


class Parts(NamedTuple):
    dom: Subspace
    ran: Subspace
    ker: Subspace
    mul: Subspace
    is_operator: bool


class SumFlags(NamedTuple):
    direct: bool
    orthogonal: bool


@dataclass(frozen=True, eq=False)
class LinearRelation:
    """A subspace of ``scalar^dim_in x scalar^dim_out``."""

    dim_in: int
    dim_out: int
    graph: Subspace

    def __post_init__(self):
        if self.graph.ambient_dim != self.dim_in + self.dim_out:
            raise ValueError(
                f"graph lives in dimension {self.graph.ambient_dim}, "
                f"expected {self.dim_in} + {self.dim_out}"
            )

    @property
    def tol(self):
        return self.graph.tol

    @property
    def dim(self):
        return self.graph.dim

    @property
    def scalar(self):
        return self.graph.scalar

    @property
    def inp(self):
        return self.graph.basis[: self.dim_in]

    @property
    def out(self):
        return self.graph.basis[self.dim_in:]

    @cached_property
    def _input_svd(self):
        return _split_block(self.inp, self.tol)

    @cached_property
    def _output_svd(self):
        return _split_block(self.out, self.tol)

    @cached_property
    def dom(self):
        return Subspace(self._input_svd[0], self.tol)

    @cached_property
    def ran(self):
        return Subspace(self._output_svd[0], self.tol)

    @cached_property
    def mul(self):
        # graph vectors with vanishing input block
        return Subspace(orth(self.out @ self._input_svd[1], self.tol, 1.0), self.tol)

    @cached_property
    def ker(self):
        return Subspace(orth(self.inp @ self._output_svd[1], self.tol, 1.0), self.tol)

    @property
    def is_operator(self):
        return self.mul.dim == 0

    def parts(self):
        return Parts(self.dom, self.ran, self.ker, self.mul, self.is_operator)

    def __matmul__(self, other):
        return compose(self, other)

    def __repr__(self):
        return (
            f"LinearRelation({self.dim_in} -> {self.dim_out}, dim={self.dim}, "
            f"{self.scalar})"
        )


def _split_block(block, tol):
    """Range basis and coefficient null space of a block of a graph basis."""
    rows, k = block.shape
    if k == 0:
        return np.zeros((rows, 0), dtype=block.dtype), np.zeros((0, 0), dtype=block.dtype)
    u, s, vh = np.linalg.svd(block, full_matrices=True)
    r = int(np.count_nonzero(s >= tol))
    return u[:, :r], adj(vh[r:])


def _rel(n, m, gens, tol):
    return LinearRelation(n, m, Subspace(orth(gens, tol, 1.0), tol))


def _check_same_shape(T, S):
    if (T.dim_in, T.dim_out) != (S.dim_in, S.dim_out):
        raise ValueError(
            f"relation shapes differ: {T.dim_in}x{T.dim_out} vs {S.dim_in}x{S.dim_out}"
        )


@dataclass(frozen=True, eq=False)
class AffineSet:
    """``point + directions``, or the empty set.

    ``point`` is the minimum-norm element, hence orthogonal to ``directions``.
    """

    nonempty: bool
    point: np.ndarray
    directions: Subspace

    @classmethod
    def empty(cls, dim, tol=RANK_TOL):
        return cls(False, np.zeros(dim), sp.zero(dim, tol))

    @property
    def dim(self):
        return self.directions.ambient_dim

    def contains(self, x, tol=CMP_TOL):
        if not self.nonempty:
            return False
        d = as_array(x) - self.point
        r = d - self.directions.projector @ d
        return bool(np.linalg.norm(r) <= tol * max(1.0, np.linalg.norm(x)))

    def equals(self, other, tol=CMP_TOL):
        if self.nonempty != other.nonempty:
            return False
        if not self.nonempty:
            return True
        if not sp.equal(self.directions, other.directions, tol):
            return False
        scale = max(1.0, np.linalg.norm(self.point), np.linalg.norm(other.point))
        return bool(np.linalg.norm(self.point - other.point) <= tol * scale)


# --------------------------------------------------------------- construction


def from_generators(pairs, dim_in, dim_out, tol=RANK_TOL):
    """Relation spanned by the pairs ``(x, y)``."""
    cols = []
    for i, (x, y) in enumerate(pairs):
        x, y = as_array(x).ravel(), as_array(y).ravel()
        if x.size != dim_in or y.size != dim_out:
            raise ValueError(
                f"pair {i} has sizes ({x.size}, {y.size}), expected ({dim_in}, {dim_out})"
            )
        cols.append(np.concatenate([x, y]))
    if not cols:
        return LinearRelation(dim_in, dim_out, sp.zero(dim_in + dim_out, tol))
    return LinearRelation(dim_in, dim_out, sp.from_columns(np.column_stack(cols), tol))


def from_generator_rows(rows, dim_in, dim_out, tol=RANK_TOL):
    """Relation spanned by length ``dim_in + dim_out`` rows."""
    rows = as_array(rows)
    if rows.size == 0:
        return LinearRelation(dim_in, dim_out, sp.zero(dim_in + dim_out, tol))
    if rows.ndim != 2 or rows.shape[1] != dim_in + dim_out:
        raise ValueError(
            f"generators must be rows of length {dim_in + dim_out}, got shape {rows.shape}"
        )
    return LinearRelation(dim_in, dim_out, sp.from_columns(rows.T, tol))


def graph_of(A, tol=RANK_TOL):
    """Graph {(x, Ax)} of an m x n matrix."""
    A = as_array(A)
    m, n = A.shape
    q, _ = np.linalg.qr(np.vstack([np.eye(n, dtype=A.dtype), A]))
    return LinearRelation(n, m, Subspace(q, tol))


def canonical(kind, M, N=None):
    """``identity_on`` (I_M), ``zero_on`` (M x {0}) or ``product_of`` (M x N)."""
    tol = M.tol
    n = M.ambient_dim
    B = M.basis
    if kind == "identity_on":
        return LinearRelation(n, n, Subspace(np.vstack([B, B]) / np.sqrt(2), tol))
    if kind == "zero_on":
        return LinearRelation(n, n, Subspace(np.vstack([B, np.zeros_like(B)]), tol))
    if kind == "product_of":
        if N is None:
            raise ValueError("product_of needs two subspaces")
        m = N.ambient_dim
        C = N.basis
        dt = np.result_type(B, C)
        top = np.hstack([B, np.zeros((n, C.shape[1]), dt)])
        bot = np.hstack([np.zeros((m, B.shape[1]), dt), C])
        return LinearRelation(n, m, Subspace(np.vstack([top, bot]), tol))
    raise ValueError(f"unknown canonical relation {kind!r}")


def identity_on(M):
    return canonical("identity_on", M)


def zero_on(M):
    return canonical("zero_on", M)


def product_of(M, N):
    return canonical("product_of", M, N)


# ------------------------------------------------------------------- calculus


def parts(T):
    """(dom, ran, ker, mul, is_operator)."""
    return T.parts()


def inverse(T):
    """Block swap {(y, x) : (x, y) in T}."""
    G = T.graph.basis
    return LinearRelation(
        T.dim_out, T.dim_in, Subspace(np.vstack([G[T.dim_in:], G[: T.dim_in]]), T.tol)
    )


def adjoint(T):
    """T* = {(x, y) : (y, -x) ⊥ T}."""
    C = sp.complement(T.graph).basis
    n = T.dim_in
    return LinearRelation(T.dim_out, n, Subspace(np.vstack([-C[n:], C[:n]]), T.tol))


def closure(T):
    """Every finite-dimensional relation is closed; returns ``T`` unchanged."""
    return T


def cw_sum(T, S):
    """Componentwise sum T +̂ S (sum of graphs)."""
    _check_same_shape(T, S)
    return LinearRelation(T.dim_in, T.dim_out, sp.subspace_sum(T.graph, S.graph))


def cw_sum_flags(T, S, tol=CMP_TOL):
    """Whether T +̂ S is direct and whether it is orthogonal."""
    _check_same_shape(T, S)
    total = sp.subspace_sum(T.graph, S.graph)
    direct = total.dim == T.dim + S.dim
    orthogonal = opnorm(adj(T.graph.basis) @ S.graph.basis) <= tol
    return SumFlags(direct, orthogonal)


def op_sum(T, S):
    """Operator-like sum {(x, y + z) : (x, y) in T, (x, z) in S}."""
    _check_same_shape(T, S)
    k = T.dim
    w = null(np.hstack([T.inp, -S.inp]), T.tol, 1.0)
    gens = np.vstack([T.inp @ w[:k], T.out @ w[:k] + S.out @ w[k:]])
    return _rel(T.dim_in, T.dim_out, gens, T.tol)


def compose(R, T):
    """Product RT = {(x, y) : (x, z) in T, (z, y) in R for some z}."""
    if T.dim_out != R.dim_in:
        raise ValueError(
            f"cannot compose: T maps into dimension {T.dim_out}, R acts on {R.dim_in}"
        )
    k = T.dim
    # match the middle coordinate, then drop it
    w = null(np.hstack([T.out, -R.inp]), T.tol, 1.0)
    gens = np.vstack([T.inp @ w[:k], R.out @ w[k:]])
    return _rel(T.dim_in, R.dim_out, gens, T.tol)


def apply(T, x, tol=CMP_TOL):
    """T x as an :class:`AffineSet` (empty when x is not in dom T)."""
    x = as_array(x).ravel()
    if x.size != T.dim_in:
        raise ValueError(f"vector has length {x.size}, expected {T.dim_in}")
    X, Y = T.inp, T.out
    if T.dim == 0:
        c = np.zeros(0)
    else:
        u, s, vh = np.linalg.svd(X, full_matrices=False)
        r = int(np.count_nonzero(s >= T.tol))
        c = adj(vh[:r]) @ ((adj(u[:, :r]) @ x) / s[:r])
    if np.linalg.norm(X @ c - x) > tol * max(1.0, np.linalg.norm(x)):
        return AffineSet.empty(T.dim_out, T.tol)
    mul = T.mul
    y = Y @ c if T.dim else np.zeros(T.dim_out, dtype=x.dtype)
    return AffineSet(True, y - mul.projector @ y, mul)


def image(T, M):
    """T(M) = {y : (x, y) in T for some x in M}."""
    if M.ambient_dim != T.dim_in:
        raise ValueError(f"subspace lives in {M.ambient_dim}, relation acts on {T.dim_in}")
    c = null(adj(sp.complement(M).basis) @ T.inp, T.tol, 1.0)
    return Subspace(orth(T.out @ c, T.tol, 1.0), T.tol)


def restrict(T, M):
    """T|_M = T ∩ (M x scalar^m)."""
    if M.ambient_dim != T.dim_in:
        raise ValueError(f"subspace lives in {M.ambient_dim}, relation acts on {T.dim_in}")
    c = null(adj(sp.complement(M).basis) @ T.inp, T.tol, 1.0)
    return _rel(T.dim_in, T.dim_out, T.graph.basis @ c, T.tol)


# ---------------------------------------------------------------- comparisons


def rel_distance(T, S):
    _check_same_shape(T, S)
    return sp.distance(T.graph, S.graph)


def rel_equal(T, S, tol=CMP_TOL):
    return rel_distance(T, S) <= tol


def rel_contains(T, S, tol=CMP_TOL):
    """S ⊆ T."""
    _check_same_shape(T, S)
    return sp.contains(T.graph, S.graph, tol)


def compare_rel(T, S, tol=CMP_TOL):
    """Graph-level comparison of T against S."""
    _check_same_shape(T, S)
    return sp.compare(T.graph, S.graph, tol)


def lemma_equal(S, T, tol=CMP_TOL):
    """S = T decided through S ⊆ T, dom T ⊆ dom S and mul T ⊆ mul S."""
    return (
        rel_contains(T, S, tol)
        and sp.contains(S.dom, T.dom, tol)
        and sp.contains(S.mul, T.mul, tol)
    )


# ----------------------------------------------------------- operator pieces


def _block_pinv(X, tol):
    u, s, vh = np.linalg.svd(X, full_matrices=False)
    r = int(np.count_nonzero(s >= tol))
    return (adj(vh[:r]) / s[:r]) @ adj(u[:, :r])


def operator_part(T):
    """Matrix of T_m = P_{(mul T)⊥} T, extended by 0 off dom T, and its norm."""
    if T.dim == 0:
        B = np.zeros((T.dim_out, T.dim_in), dtype=T.graph.basis.dtype)
        return B, 0.0
    Y = T.out - T.mul.projector @ T.out
    B = Y @ _block_pinv(T.inp, T.tol)
    return B, opnorm(B)


def operator_matrix(T):
    """Matrix of an operator relation (extended by 0 off its domain)."""
    if not T.is_operator:
        raise NumericalInconsistency(
            f"relation is not an operator (mul has dimension {T.mul.dim})"
        )
    return operator_part(T)[0]


def relation_pinv(A, tol=RANK_TOL):
    """Moore-Penrose inverse built as P_{(ker A)⊥} A⁻¹ P_{(ker A*)⊥}."""
    A = as_array(A)
    scale = opnorm(A)
    p_row = sp.complement(sp.from_columns(null(A, tol, scale), tol)).projector
    p_col = sp.complement(sp.from_columns(null(adj(A), tol, scale), tol)).projector
    rel = compose(graph_of(p_row, tol), compose(inverse(graph_of(A, tol)), graph_of(p_col, tol)))
    if not rel.is_operator or not rel.dom.is_full:
        raise NumericalInconsistency(
            "P_(ker A)⊥ A⁻¹ P_(ker A*)⊥ is not an everywhere defined operator"
        )
    return operator_matrix(rel)
