"""Decompositions of relations and of multivalued projections.

In finite dimensions every relation is closed, hence decomposable, and every
sum of subspaces is closed.  The reports below still evaluate each condition
separately so that the equivalences are checked rather than assumed.
"""

from dataclasses import dataclass

import numpy as np

from . import relation as rl
from . import subspace as sp
from ._linalg import CMP_TOL, adj, opnorm
from .errors import HypothesisError, NumericalInconsistency
from .projection import mv_projection
from .relation import LinearRelation

__all__ = [
    "Decomposition",
    "DecomposabilityReport",
    "MvDecomposabilityReport",
    "CompressionReport",
    "ContinuityReport",
    "t0",
    "lebesgue",
    "weak_lebesgue",
    "is_decomposable",
    "decompose_mv",
    "decomposability_conditions_mv",
    "compress",
    "continuity_report",
]


@dataclass(frozen=True, eq=False)
class Decomposition:
    original: LinearRelation
    operator_term: LinearRelation
    residual_term: LinearRelation
    kind: str  # "componentwise" or "range_orthogonal"


def t0(T):
    """T ∩ (dom T x dom T*)."""
    box = rl.product_of(T.dom, rl.adjoint(T).dom)
    return LinearRelation(T.dim_in, T.dim_out, sp.intersect(T.graph, box.graph))


def _range_orthogonal(T, proj, tol):
    m = T.dim_out
    first = rl.compose(rl.graph_of(proj, T.tol), T)
    second = rl.compose(rl.graph_of(np.eye(m) - proj, T.tol), T)
    if not rl.rel_equal(rl.op_sum(first, second), T, tol):
        raise NumericalInconsistency("the two terms do not add back to T")
    overlap = opnorm(adj(first.ran.basis) @ second.ran.basis)
    if overlap > tol:
        raise NumericalInconsistency(f"ranges of the terms are not orthogonal ({overlap:.3g})")
    return Decomposition(T, first, second, "range_orthogonal")


def lebesgue(T, tol=CMP_TOL):
    """T = T_reg + T_sing with T_reg = PT, T_sing = (I - P)T, P onto dom T*."""
    P = rl.adjoint(T).dom.projector
    dec = _range_orthogonal(T, P, tol)
    if not rl.rel_equal(dec.residual_term, rl.product_of(T.dom, T.mul), tol):
        raise NumericalInconsistency("T_sing differs from dom T x mul T")
    return dec


def weak_lebesgue(T, tol=CMP_TOL):
    """T = T_m + (I - Q)T with Q onto (mul T)⊥."""
    Q = sp.complement(T.mul).projector
    return _range_orthogonal(T, Q, tol)


@dataclass(frozen=True)
class DecomposabilityReport:
    flag: bool
    dom_t0_is_dom: bool
    ran_sing_in_mul: bool
    t0_is_reg: bool
    t0_is_m: bool
    mul_closure_ok: bool = True


def is_decomposable(T, tol=CMP_TOL):
    """Evaluate the four equivalent decomposability conditions independently."""
    op = t0(T)
    reg = lebesgue(T, tol)
    m = weak_lebesgue(T, tol)
    conds = (
        sp.equal(op.dom, T.dom, tol),
        sp.contains(T.mul, reg.residual_term.ran, tol),
        rl.rel_equal(op, reg.operator_term, tol),
        rl.rel_equal(op, m.operator_term, tol),
    )
    if len(set(conds)) != 1:
        raise NumericalInconsistency(f"decomposability conditions disagree: {conds}")
    return DecomposabilityReport(conds[0], *conds)


def decompose_mv(M, N, tol=CMP_TOL):
    """P_{M,N} = P_{M⊖(M∩N)//N} ⊕̂ ({0} x M∩N)."""
    common = sp.intersect(M, N)
    op = mv_projection(sp.minus(M, common), N).rel
    if not op.is_operator:
        raise NumericalInconsistency("P_{M⊖(M∩N)//N} is multivalued")
    residual = rl.product_of(sp.zero(M.ambient_dim, M.tol), common)
    P = mv_projection(M, N).rel
    total = rl.cw_sum(op, residual)
    flags = rl.cw_sum_flags(op, residual, tol)
    if not (rl.rel_equal(total, P, tol) and flags.orthogonal):
        raise NumericalInconsistency("componentwise decomposition does not rebuild P_{M,N}")
    return Decomposition(P, op, residual, "componentwise")


@dataclass(frozen=True, eq=False)
class MvDecomposabilityReport:
    decomposable: bool
    # (ii) M + N = (M ∩ (M⊥+N⊥)) ∔ N
    sum_split: bool
    # (iii) P_{M∩N}(M) = M ∩ N
    projected_range: bool
    # (iv) M = (M ∩ (M⊥+N⊥)) ⊕ (M∩N)
    range_split: bool
    core: sp.Subspace
    common: sp.Subspace
    projected: sp.Subspace

    @property
    def all_hold(self):
        return self.decomposable and self.sum_split and self.projected_range and self.range_split


def decomposability_conditions_mv(M, N, tol=CMP_TOL):
    common = sp.intersect(M, N)
    core = sp.intersect(M, sp.subspace_sum(sp.complement(M), sp.complement(N)))
    total = sp.subspace_sum(M, N)
    sum_split = (
        sp.equal(total, sp.subspace_sum(core, N), tol)
        and core.dim + N.dim == total.dim
    )
    projected = sp.from_columns(common.projector @ M.basis, M.tol, 1.0)
    projected_range = sp.equal(projected, common, tol)
    range_split = (
        sp.equal(M, sp.subspace_sum(core, common), tol)
        and core.dim + common.dim == M.dim
        and opnorm(adj(core.basis) @ common.basis) <= tol
    )
    rep = MvDecomposabilityReport(
        is_decomposable(mv_projection(M, N).rel, tol).flag,
        sum_split, projected_range, range_split, core, common, projected,
    )
    if not rep.all_hold:
        raise NumericalInconsistency(f"decomposability conditions failed: {rep}")
    return rep


@dataclass(frozen=True, eq=False)
class CompressionReport:
    is_projection: bool
    mul_in_ker: bool
    domain_split: bool
    range_condition: bool
    result: LinearRelation
    expected: LinearRelation = None
    # when is_projection is false: which of these fails for F P_{M,N}
    witness: dict = None


def compress(F, M, N, tol=CMP_TOL):
    """Decide whether F P_{M,N} is a projection for an orthogonal projector F.

    The three subspace conditions are evaluated and cross-checked against a
    direct test (operator + idempotent) of the product relation.
    """
    F = np.asarray(F)
    n = M.ambient_dim
    if F.shape != (n, n):
        raise ValueError(f"F must be {n}x{n}, got {F.shape}")
    if opnorm(F @ F - F) > tol or opnorm(F - adj(F)) > tol:
        raise HypothesisError("F is not an orthogonal projector")
    Fg = rl.graph_of(F, M.tol)
    kerF = Fg.ker
    FM = rl.image(Fg, M)
    common = sp.intersect(M, N)
    M_kerF = sp.intersect(M, kerF)
    c1 = sp.contains(kerF, common, tol)
    c2 = sp.equal(
        sp.subspace_sum(M, N), sp.subspace_sum(sp.subspace_sum(FM, M_kerF), N), tol
    )
    c3 = sp.contains(sp.subspace_sum(M, sp.intersect(N, kerF)), FM, tol)
    E = rl.compose(Fg, mv_projection(M, N).rel)
    operator = E.is_operator
    idempotent = rl.rel_equal(rl.compose(E, E), E, tol)
    direct = operator and idempotent
    conds = c1 and c2 and c3
    if conds != direct:
        raise NumericalInconsistency(
            f"conditions ({c1}, {c2}, {c3}) disagree with direct test "
            f"(operator={operator}, idempotent={idempotent})"
        )
    if not conds:
        return CompressionReport(False, c1, c2, c3, E, None,
                                 {"operator": operator, "idempotent": idempotent})
    expected = mv_projection(FM, sp.subspace_sum(N, M_kerF)).rel
    if not rl.rel_equal(E, expected, tol):
        raise NumericalInconsistency("F P_{M,N} differs from P_{F(M)//N+M∩ker F}")
    return CompressionReport(True, c1, c2, c3, E, expected, None)


@dataclass(frozen=True)
class ContinuityReport:
    cosine: float
    sine: float
    op_norm: float
    criterion_ok: bool


def continuity_report(M, N, tol=CMP_TOL):
    """Friedrichs cosine, operator-part norm of P_{M,N} and the closedness
    criterion M⊥ + N⊥ = (M∩N)⊥."""
    lhs = sp.subspace_sum(sp.complement(M), sp.complement(N))
    ok = sp.equal(lhs, sp.complement(sp.intersect(M, N)), tol)
    if not ok:
        raise NumericalInconsistency("M⊥ + N⊥ differs from (M∩N)⊥")
    _, norm = rl.operator_part(mv_projection(M, N).rel)
    return ContinuityReport(sp.friedrichs_cosine(M, N), sp.friedrichs_sine(M, N), norm, ok)
