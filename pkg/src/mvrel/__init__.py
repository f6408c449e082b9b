"""Finite-dimensional calculus of linear relations and multivalued projections."""

from . import decomposition, projection, relation, sampling, semiclosed, serialize, subspace, verify, wlss
from .decomposition import (
    compress,
    continuity_report,
    decompose_mv,
    decomposability_conditions_mv,
    is_decomposable,
    lebesgue,
    t0,
    weak_lebesgue,
)
from .errors import HypothesisError, NumericalInconsistency
from .projection import Kind, MvProjection, classify, greville, greville_pinv, mv_projection, ptak, ptak_kernel
from .relation import (
    AffineSet,
    LinearRelation,
    adjoint,
    apply,
    compose,
    cw_sum,
    from_generators,
    graph_of,
    inverse,
    op_sum,
    relation_pinv,
)
from .semiclosed import ando_projection, ando_split, debranges, orthogonalize, row_polar
from .subspace import Subspace, complement, intersect, span, subspace_sum
from .wlss import WlssProblem

__version__ = "0.1.0"
