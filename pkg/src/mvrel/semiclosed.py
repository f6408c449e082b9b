"""Operator-range machinery: the row polar decomposition [A B] = Γ [C_A C_B],
quotient relations L(C, D), Ando-type formulas for P_{ran A, ran B}, and
de Branges-Rovnyak complements."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import relation as rl
from . import subspace as sp
from ._linalg import CMP_TOL, RANK_TOL, adj, as_array, null, opnorm, orth, pinv, psd_sqrt
from .decomposition import t0
from .errors import HypothesisError, NumericalInconsistency
from .projection import MvProjection, mv_projection
from .relation import LinearRelation

__all__ = [
    "RangePair",
    "OperatorRangeSpace",
    "row_polar",
    "range_of",
    "quotient",
    "as_quotient",
    "semiclosed_projection",
    "ando_projection",
    "preimage",
    "conjugate",
    "quasi_affine_form",
    "gamma_splitting",
    "orthogonalize",
    "mt_inner",
    "mt_norm",
    "ando_split",
    "debranges",
]

# Douglas-factor residuals are relative to max(||A||, ||B||)
POLAR_TOL = 1e-8


def range_of(A, tol=RANK_TOL, scale=None):
    """ran A as a subspace (rank relative to ||A|| unless ``scale`` is given)."""
    return sp.from_columns(A, tol, scale)


def _image(A, S):
    """A(S) for a matrix A and subspace S."""
    return sp.from_columns(A @ S.basis, S.tol, scale=max(opnorm(A), 1e-300))


def _kernel(A, tol=RANK_TOL, scale=None):
    return sp.from_columns(null(A, tol, scale), tol)


def _square_pair(A, B):
    A, B = as_array(A), as_array(B)
    if A.ndim != 2 or B.ndim != 2 or A.shape[0] != B.shape[0]:
        raise ValueError(f"A and B must have the same number of rows, got {A.shape} and {B.shape}")
    return A, B


@dataclass(frozen=True, eq=False)
class RangePair:
    """A, B with Γ = (AA* + BB*)^{1/2} and Douglas factors A = Γ C_A, B = Γ C_B."""

    A: np.ndarray
    B: np.ndarray
    gamma: np.ndarray
    c_a: np.ndarray
    c_b: np.ndarray
    frame: np.ndarray  # orthonormal basis of ran Γ
    tol: float = RANK_TOL

    @cached_property
    def M(self):
        return range_of(self.A, self.tol)

    @cached_property
    def N(self):
        return range_of(self.B, self.tol)

    @property
    def row(self):
        return np.hstack([self.c_a, self.c_b])

    def residuals(self):
        """Relative residuals of every identity the factorisation must satisfy."""
        A, B, G, CA, CB = self.A, self.B, self.gamma, self.c_a, self.c_b
        scale = max(opnorm(A), opnorm(B)) or 1.0
        W = self.row
        P_frame = self.frame @ adj(self.frame)
        ker_W = _kernel(W, self.tol, 1.0)
        ker_AB = _kernel(np.hstack([A, B]), self.tol)
        return {
            "douglas_a": opnorm(A - G @ CA) / scale,
            "douglas_b": opnorm(B - G @ CB) / scale,
            "gamma_reconstruction": opnorm(G - A @ adj(CA) - B @ adj(CB)) / scale,
            "frame_projector": opnorm(P_frame - CA @ adj(CA) - CB @ adj(CB)),
            "gamma_squared": opnorm(G @ G - A @ adj(A) - B @ adj(B)) / scale**2,
            "partial_isometry": opnorm(W @ adj(W) @ W - W),
            "ran_c_in_frame": opnorm(W - P_frame @ W),
            "contraction_a": max(opnorm(CA) - 1.0, 0.0),
            "contraction_b": max(opnorm(CB) - 1.0, 0.0),
            "kernel_match": sp.distance(ker_W, ker_AB),
        }


def row_polar(A, B, tol=RANK_TOL, check=True):
    """Left polar decomposition of the row operator [A B].

    Γ is assembled from the SVD of [A B] (Γ = U S U*), which is the positive
    square root of AA* + BB* without squaring the condition number.
    """
    A, B = _square_pair(A, B)
    R = np.hstack([A, B])
    u, s, vh = np.linalg.svd(R, full_matrices=False)
    r = int(np.count_nonzero(s >= tol * s[0])) if s.size and s[0] > 0 else 0
    U, S, Vh = u[:, :r], s[:r], vh[:r]
    gamma = (U * S) @ adj(U)
    W = U @ Vh
    p = A.shape[1]
    pair = RangePair(A, B, gamma, W[:, :p], W[:, p:], U, tol)
    if check:
        bad = {k: v for k, v in pair.residuals().items() if v > POLAR_TOL}
        if bad:
            raise NumericalInconsistency(f"row polar decomposition residuals too large: {bad}")
    return pair


# ------------------------------------------------------------------ quotients


def quotient(C, D, tol=RANK_TOL):
    """L(C, D) = {(Cx, Dx)} = D C⁻¹."""
    C, D = as_array(C), as_array(D)
    if C.shape[1] != D.shape[1]:
        raise ValueError(f"C and D must act on the same space, got {C.shape} and {D.shape}")
    gens = np.vstack([C, D])
    return LinearRelation(C.shape[0], D.shape[0], sp.from_columns(gens, tol))


def as_quotient(T):
    """A pair (C, D) with T = L(C, D): the blocks of an orthonormal graph basis."""
    return T.inp.copy(), T.out.copy()


def semiclosed_projection(A, B, tol=RANK_TOL):
    """L([A B], [A 0]) = {(Ah + Bk, Ah)}; equals P_{ran A, ran B}."""
    A, B = _square_pair(A, B)
    C = np.hstack([A, B])
    D = np.hstack([A, np.zeros_like(B)])
    return quotient(C, D, tol)


@dataclass(frozen=True, eq=False)
class AndoProjection:
    via_gamma: LinearRelation
    via_adjoint_form: LinearRelation
    operator_term: LinearRelation
    reference: LinearRelation


def ando_projection(A, B, tol=CMP_TOL, pair=None):
    """Build P_{ran A, ran B} as Γ C_A C_A* Γ⁻¹ ∔̂ ({0} x M∩N) and as
    (Γ⁻¹AA*)* Γ⁻¹ ∔̂ ({0} x M∩N), and check both against the definition."""
    pair = pair or row_polar(A, B)
    A, G, CA = pair.A, pair.gamma, pair.c_a
    n = A.shape[0]
    rt = pair.tol
    g_inv = rl.inverse(rl.graph_of(G, rt))
    common = sp.intersect(pair.M, pair.N)
    mul_part = rl.product_of(sp.zero(n, rt), common)

    op_term = rl.compose(rl.graph_of(G @ CA @ adj(CA), rt), g_inv)
    via_gamma = rl.cw_sum(op_term, mul_part)

    inner = rl.compose(g_inv, rl.graph_of(A @ adj(A), rt))
    via_adjoint = rl.cw_sum(rl.compose(rl.adjoint(inner), g_inv), mul_part)

    ref = mv_projection(pair.M, pair.N).rel
    if not op_term.is_operator or not sp.equal(op_term.dom, sp.subspace_sum(pair.M, pair.N), tol):
        raise NumericalInconsistency("Γ C_A C_A* Γ⁻¹ is not an operator part of P_{M,N}")
    for name, rel in (("gamma form", via_gamma), ("adjoint form", via_adjoint)):
        d = rl.rel_distance(rel, ref)
        if d > tol:
            raise NumericalInconsistency(f"{name} differs from P_(M,N) by {d:.3g}")
    return AndoProjection(via_gamma, via_adjoint, op_term, ref)


# ---------------------------------------------------------------- conjugation


def preimage(G, S):
    """G⁻¹(S) for a matrix (null space of (I - P_S) G) or a relation."""
    if isinstance(G, LinearRelation):
        return rl.image(rl.inverse(G), S)
    G = as_array(G)
    rest = sp.complement(S).basis
    return _kernel(adj(rest) @ G, S.tol, max(opnorm(G), 1e-300))


@dataclass(frozen=True, eq=False)
class Conjugation:
    relation: LinearRelation
    M_pre: sp.Subspace
    N_pre: sp.Subspace
    expected: LinearRelation


def conjugate(G, P, tol=CMP_TOL):
    """Γ⁻¹ P_{M,N} Γ, checked against P_{Γ⁻¹(M), Γ⁻¹(N)}.

    ``G`` is a matrix or a relation with ran Γ = M + N and mul Γ ⊆ N.
    """
    if not isinstance(P, MvProjection):
        raise TypeError("conjugate expects an MvProjection")
    g = G if isinstance(G, LinearRelation) else rl.graph_of(as_array(G), P.M.tol)
    if not sp.equal(g.ran, sp.subspace_sum(P.M, P.N), tol):
        raise HypothesisError("hypothesis ran Γ = M + N fails")
    if not sp.contains(P.N, g.mul, tol):
        raise HypothesisError("hypothesis mul Γ ⊆ N fails")
    rel = rl.compose(rl.inverse(g), rl.compose(P.rel, g))
    M_pre, N_pre = preimage(G, P.M), preimage(G, P.N)
    expected = mv_projection(M_pre, N_pre).rel
    d = rl.rel_distance(rel, expected)
    if d > tol:
        raise NumericalInconsistency(f"Γ⁻¹PΓ differs from P_(Γ⁻¹M, Γ⁻¹N) by {d:.3g}")
    return Conjugation(rel, M_pre, N_pre, expected)


def _in_frame(U, S):
    return sp.from_columns(adj(U) @ S.basis, S.tol, 1.0)


def _intertwining_distance(E, X, inner):
    """Distance between E X and X · inner as relations."""
    gx = rl.graph_of(X, E.tol)
    return rl.rel_distance(rl.compose(E, gx), rl.compose(gx, inner))


@dataclass(frozen=True, eq=False)
class QuasiAffineForm:
    frame: np.ndarray  # orthonormal basis of M + N
    X: np.ndarray  # Γ in frame coordinates
    C: np.ndarray  # C_A C_A* in frame coordinates
    S: sp.Subspace  # ran C_A ∩ ran C_B, in the ambient space
    residual: float


def quasi_affine_form(A, B, tol=CMP_TOL, pair=None):
    """P_{M,N} X = X (C ∔̂ ({0} x S)) on M + N, with X = Γ and C = C_A C_A*."""
    pair = pair or row_polar(A, B)
    U = pair.frame
    X = adj(U) @ pair.gamma @ U
    C = adj(U) @ pair.c_a @ adj(pair.c_a) @ U
    # C_A, C_B are blocks of a partial isometry: absolute rank cut-off
    S = sp.intersect(range_of(pair.c_a, pair.tol, 1.0), range_of(pair.c_b, pair.tol, 1.0))
    r = U.shape[1]
    E = mv_projection(_in_frame(U, pair.M), _in_frame(U, pair.N)).rel
    inner = rl.cw_sum(rl.graph_of(C, pair.tol), rl.product_of(sp.zero(r, pair.tol), _in_frame(U, S)))
    res = _intertwining_distance(E, X, inner) if r else 0.0
    if res > tol:
        raise NumericalInconsistency(f"intertwining fails by {res:.3g}")
    if r:
        lam_c = np.linalg.eigvalsh((C + adj(C)) / 2)
        lam_x = np.linalg.eigvalsh((X + adj(X)) / 2)
        if lam_c.min() < -tol or lam_c.max() > 1 + tol:
            raise NumericalInconsistency("C is not a positive contraction")
        if lam_x.min() <= 0:
            raise NumericalInconsistency("X is not injective on M + N")
    return QuasiAffineForm(U, X, C, S, res)


@dataclass(frozen=True, eq=False)
class GammaSplitting:
    gamma_ker_cb: sp.Subspace  # Γ(ker C_B*)
    gamma_ker_ca: sp.Subspace  # Γ(ker C_A*)
    common: sp.Subspace  # M ∩ N
    direct: bool
    sum_ok: bool
    M_ok: bool
    N_ok: bool
    relation_ok: bool

    @property
    def all_hold(self):
        return self.direct and self.sum_ok and self.M_ok and self.N_ok and self.relation_ok


def gamma_splitting(A, B, tol=CMP_TOL, pair=None):
    """M + N = Γ(ker C_B*) ∔ Γ(ker C_A*) ∔ M∩N together with the split of M
    and N, and P_{M,N} = P_{Γ(ker C_B*)//N} ∔̂ ({0} x M∩N)."""
    pair = pair or row_polar(A, B)
    G, t = pair.gamma, pair.tol
    n = G.shape[0]
    KB = _image(G, _kernel(adj(pair.c_b), t, 1.0))
    KA = _image(G, _kernel(adj(pair.c_a), t, 1.0))
    common = sp.intersect(pair.M, pair.N)
    total = sp.subspace_sum(pair.M, pair.N)
    three = sp.subspace_sum(sp.subspace_sum(KB, KA), common)
    direct = three.dim == KB.dim + KA.dim + common.dim
    sum_ok = sp.equal(three, total, tol)
    M_ok = sp.equal(sp.subspace_sum(KB, common), pair.M, tol) and KB.dim + common.dim == pair.M.dim
    N_ok = sp.equal(sp.subspace_sum(KA, common), pair.N, tol) and KA.dim + common.dim == pair.N.dim
    op = mv_projection(KB, pair.N).rel
    rebuilt = rl.cw_sum(op, rl.product_of(sp.zero(n, t), common))
    relation_ok = op.is_operator and rl.rel_equal(rebuilt, mv_projection(pair.M, pair.N).rel, tol)
    rep = GammaSplitting(KB, KA, common, direct, sum_ok, M_ok, N_ok, relation_ok)
    if not rep.all_hold:
        raise NumericalInconsistency(f"Γ splitting failed: {rep}")
    return rep


@dataclass(frozen=True, eq=False)
class Orthogonalization:
    P0: np.ndarray
    S: sp.Subspace  # Γ⁻¹(M ∩ N)
    X: np.ndarray  # Γ
    conjugated: LinearRelation  # Γ⁻¹ P_{M,N} Γ
    residuals: dict


def orthogonalize(A, B, tol=CMP_TOL, pair=None):
    """Γ⁻¹ P_{M,N} Γ = P0 ⊕̂ ({0} x S) with P0 an orthogonal projector, and
    the intertwining P_{M,N} Γ = Γ (P0 ⊕̂ ({0} x S))."""
    pair = pair or row_polar(A, B)
    G, t = pair.gamma, pair.tol
    n = G.shape[0]
    E = mv_projection(pair.M, pair.N).rel
    g = rl.graph_of(G, t)
    conj = rl.compose(rl.inverse(g), rl.compose(E, g))
    op = t0(conj)
    if not op.dom.is_full:
        raise NumericalInconsistency("(Γ⁻¹EΓ)₀ is not everywhere defined")
    P0 = rl.operator_matrix(op)
    kb = _kernel(adj(pair.c_b), t, 1.0)
    ka = _kernel(adj(pair.c_a), t, 1.0)
    P0_alt = sp.minus(kb, sp.intersect(ka, kb)).projector
    S = conj.mul
    inner = rl.cw_sum(rl.graph_of(P0, t), rl.product_of(sp.zero(n, t), S))
    flags = rl.cw_sum_flags(rl.graph_of(P0, t), rl.product_of(sp.zero(n, t), S), tol)

    U = pair.frame
    r = U.shape[1]
    E_f = mv_projection(_in_frame(U, pair.M), _in_frame(U, pair.N)).rel
    P0_f = adj(U) @ P0 @ U
    S_f = _in_frame(U, sp.intersect(S, sp.Subspace(U, t)))
    inner_f = rl.cw_sum(rl.graph_of(P0_f, t), rl.product_of(sp.zero(r, t), S_f))
    res = {
        "idempotent": opnorm(P0 @ P0 - P0),
        "selfadjoint": opnorm(P0 - adj(P0)),
        "kernel_formula": opnorm(P0 - P0_alt),
        "orthogonal_sum": rl.rel_distance(conj, inner),
        "intertwining": _intertwining_distance(E, G, inner),
        "intertwining_frame": _intertwining_distance(E_f, adj(U) @ G @ U, inner_f) if r else 0.0,
    }
    if not flags.orthogonal:
        res["orthogonal_sum"] = max(res["orthogonal_sum"], 1.0)
    bad = {k: v for k, v in res.items() if v > tol}
    if bad:
        raise NumericalInconsistency(f"orthogonalisation residuals too large: {bad}")
    return Orthogonalization(P0, S, G, conj, res)


# ------------------------------------------------------------ M(T) structures


@dataclass(frozen=True, eq=False)
class OperatorRangeSpace:
    """ran T with the inner product <u, v>_T = <T†u, T†v>."""

    T: np.ndarray
    tol: float = RANK_TOL

    @cached_property
    def pinv_T(self):
        return pinv(self.T, self.tol)

    @cached_property
    def range(self):
        return range_of(self.T, self.tol)

    def check_member(self, u, tol=CMP_TOL):
        u = as_array(u)
        off = np.linalg.norm(u - self.range.projector @ u)
        if off > tol * max(1.0, np.linalg.norm(u)):
            raise ValueError(f"vector is not in ran T (distance {off:.3g})")
        return u


def mt_inner(space, u, v):
    u, v = space.check_member(u), space.check_member(v)
    return complex(np.vdot(space.pinv_T @ v, space.pinv_T @ u)) if (
        np.iscomplexobj(u) or np.iscomplexobj(v) or np.iscomplexobj(space.T)
    ) else float(np.dot(space.pinv_T @ u, space.pinv_T @ v))


def mt_norm(space, u):
    u = space.check_member(u)
    return float(np.linalg.norm(space.pinv_T @ u))


@dataclass(frozen=True, eq=False)
class AndoSplit:
    u1: np.ndarray
    u2: np.ndarray
    norm_sq: float  # ||u||_T^2
    parts_sq: float  # ||u1||_{T1}^2 + ||u2||_{T2}^2


def ando_split(T1, T2, u, tol=CMP_TOL):
    """Unique u = u1 + u2 with u_i in ran T_i attaining
    ||u||_T^2 = ||u1||_{T1}^2 + ||u2||_{T2}^2, T = (T1T1* + T2T2*)^{1/2}."""
    pair = row_polar(T1, T2)
    space = OperatorRangeSpace(pair.gamma, pair.tol)
    u = space.check_member(u, tol)
    w = space.pinv_T @ u
    u1 = pair.A @ adj(pair.c_a) @ w
    u2 = pair.B @ adj(pair.c_b) @ w
    norm_sq = float(np.linalg.norm(w) ** 2)
    parts_sq = float(
        np.linalg.norm(pinv(pair.A, pair.tol) @ u1) ** 2
        + np.linalg.norm(pinv(pair.B, pair.tol) @ u2) ** 2
    )
    scale = max(1.0, norm_sq)
    if np.linalg.norm(u1 + u2 - u) > tol * max(1.0, np.linalg.norm(u)):
        raise NumericalInconsistency("u1 + u2 does not reproduce u")
    if abs(norm_sq - parts_sq) > tol * scale:
        raise NumericalInconsistency(
            f"Pythagoras identity fails: {norm_sq!r} vs {parts_sq!r}"
        )
    return AndoSplit(u1, u2, norm_sq, parts_sq)


@dataclass(frozen=True, eq=False)
class DeBranges:
    S: sp.Subspace
    S_prime: sp.Subspace
    overlap: sp.Subspace
    relation: LinearRelation
    norm: float
    norm_bound_ok: bool


def debranges(T, tol=1e-9):
    """S = ran T, its complement S' = ran (I - TT*)^{1/2} for a contraction T,
    and the multivalued projection P_{S,S'}."""
    T = as_array(T)
    n = T.shape[0]
    if opnorm(T) > 1 + tol:
        raise HypothesisError(f"T is not a contraction (norm {opnorm(T)!r})")
    S = range_of(T)
    # I - TT* lies between 0 and I, so its rank cut-off is absolute
    D = psd_sqrt(np.eye(n) - T @ adj(T), RANK_TOL, 1.0)
    S_prime = range_of(D, RANK_TOL, 1.0)
    rel = mv_projection(S, S_prime).rel
    _, norm = rl.operator_part(rel)
    return DeBranges(S, S_prime, sp.intersect(S, S_prime), rel, norm, norm <= 1 + tol)
