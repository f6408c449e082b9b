"""Multivalued projections P_{M,N} = I_M +̂ (N x {0}) and nilpotents."""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import relation as rl
from . import subspace as sp
from ._linalg import CMP_TOL, RANK_TOL
from .errors import HypothesisError, NumericalInconsistency
from .relation import LinearRelation
from .subspace import Subspace

__all__ = [
    "Kind",
    "Classification",
    "MvProjection",
    "mv_projection",
    "classify",
    "greville",
    "greville_pinv",
    "ptak",
    "ptak_kernel",
]


@dataclass(frozen=True, eq=False)
class MvProjection:
    """Multivalued projection with range ``M`` and kernel ``N``."""

    M: Subspace
    N: Subspace
    rel: LinearRelation

    @property
    def is_operator(self):
        return self.rel.is_operator

    def matrix(self):
        """Operator-part matrix; for a genuine projection this is P_{M//N}
        (extended by zero off M + N)."""
        return rl.operator_part(self.rel)[0]


def mv_projection(M, N):
    if M.ambient_dim != N.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {M.ambient_dim} != {N.ambient_dim}")
    return MvProjection(M, N, rl.cw_sum(rl.identity_on(M), rl.zero_on(N)))


class Kind(enum.Enum):
    MV_PROJECTION = "mv_projection"
    MV_NILPOTENT = "mv_nilpotent"
    IDEMPOTENT_ONLY = "idempotent_only"
    NONE = "none"


@dataclass(frozen=True)
class Classification:
    kind: Kind
    # each certificate is (holds, margin): margin is the residual of the
    # containment, so it is small exactly when the containment holds
    certificates: dict = field(default_factory=dict)


def _excess(big, small):
    return sp._excess(small, big)


def classify(T, tol=CMP_TOL):
    """Classify a square relation.

    ``mv_projection`` when I_{ran T} ⊆ T (this forces ran T ⊆ dom T),
    ``mv_nilpotent`` when ran T ⊆ ker T, ``idempotent_only`` when T² = T but
    ran T ⊄ dom T, and ``none`` otherwise.  Products D x S with S ⊆ D
    (that is, P_{S,D}) are both projections and nilpotents; they are labelled
    ``mv_projection`` and the ``ran_in_ker`` certificate records the rest.
    """
    if T.dim_in != T.dim_out:
        raise ValueError(f"classify needs a square relation, got {T.dim_in}x{T.dim_out}")
    dom, ran, ker, mul = T.dom, T.ran, T.ker, T.mul
    T2 = rl.compose(T, T)
    margins = {
        "ran_in_dom": _excess(dom, ran),
        "identity_on_ran_in_T": _excess(T.graph, rl.identity_on(ran).graph),
        "ran_in_ker": _excess(ker, ran),
        "idempotent": rl.rel_distance(T2, T),
        "square_is_dom_x_mul": rl.rel_distance(T2, rl.product_of(dom, mul)),
    }
    certs = {k: (v <= tol, v) for k, v in margins.items()}
    if certs["ran_in_dom"][0] and certs["identity_on_ran_in_T"][0]:
        kind = Kind.MV_PROJECTION
    elif certs["ran_in_ker"][0]:
        kind = Kind.MV_NILPOTENT
    elif certs["idempotent"][0]:
        kind = Kind.IDEMPOTENT_ONLY
    else:
        kind = Kind.NONE
    return Classification(kind, certs)


def greville(M, N):
    """P_M ((I - P_N) P_M)⁻¹ (I - P_N) as a product of relations."""
    if M.ambient_dim != N.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {M.ambient_dim} != {N.ambient_dim}")
    n = M.ambient_dim
    PM = M.projector
    QN = np.eye(n) - N.projector
    middle = rl.inverse(rl.graph_of(QN @ PM, M.tol))
    return rl.compose(rl.graph_of(PM, M.tol), rl.compose(middle, rl.graph_of(QN, M.tol)))


def greville_pinv(M, N, tol=CMP_TOL):
    """Matrix of P_{M//N} as the pseudo-inverse (P_{N⊥} P_M)†.

    Only defined for complementary pairs: M ∩ N = {0} and M + N = whole space.
    """
    common = sp.intersect(M, N)
    if common.dim:
        raise HypothesisError(f"M ∩ N has dimension {common.dim}; need {{0}}")
    if not sp.subspace_sum(M, N).is_full:
        raise HypothesisError("M + N is not the whole space")
    T = sp.complement(N).projector @ M.projector
    return rl.relation_pinv(T, M.tol)


def ptak_kernel(M, N):
    """ker(I - P_N P_M), which coincides with M ∩ N."""
    n = M.ambient_dim
    return rl.graph_of(np.eye(n) - N.projector @ M.projector, M.tol).ker


def ptak(M, N):
    """(I - P_N P_M)⁻¹ P_{N⊥}|_{M+N} as a product of relations."""
    if M.ambient_dim != N.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {M.ambient_dim} != {N.ambient_dim}")
    n = M.ambient_dim
    left = rl.inverse(rl.graph_of(np.eye(n) - N.projector @ M.projector, M.tol))
    right = rl.restrict(rl.graph_of(sp.complement(N).projector, M.tol), sp.subspace_sum(M, N))
    return rl.compose(left, right)
