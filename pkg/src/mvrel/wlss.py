"""Weighted least squares with a positive semidefinite, possibly singular,
weight W, solved through the multivalued projection P_{W, ran A}.

dom P_{W, ran A} is the whole space for every psd W.  With S = ran A,
(S + S^{⊥_W})⊥ = S⊥ ∩ W(S), and Ws ⊥ S gives <Ws, s> = ||W^{1/2}s||² = 0, so
Ws = 0.  The intersection is {0} and every b has W-least-squares solutions.
"""

from dataclasses import dataclass

import numpy as np

from . import relation as rl
from . import subspace as sp
from ._linalg import CMP_TOL, RANK_TOL, adj, as_array, is_psd, null, opnorm, psd_sqrt
from .projection import mv_projection

__all__ = ["WlssProblem", "w_companion", "w_projection", "solve", "residual"]


@dataclass(frozen=True, eq=False)
class WlssProblem:
    W: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        W, A, b = as_array(self.W), as_array(self.A), as_array(self.b).ravel()
        n = W.shape[0]
        if W.shape != (n, n):
            raise ValueError(f"W must be square, got {W.shape}")
        if A.ndim != 2 or A.shape[0] != n:
            raise ValueError(f"A must have {n} rows, got shape {A.shape}")
        if b.size != n:
            raise ValueError(f"b must have length {n}, got {b.size}")
        _check_psd(W)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    def solve(self):
        return solve(self.W, self.A, self.b)


def _check_psd(W):
    if not is_psd(W, 1e-9):
        raise ValueError("W is not positive semidefinite")


def w_companion(W, S):
    """S^{⊥_W} = {x : <Wx, s> = 0 for all s in S}."""
    W = as_array(W)
    _check_psd(W)
    if W.shape[0] != S.ambient_dim:
        raise ValueError(f"W is {W.shape}, subspace lives in {S.ambient_dim}")
    return sp.from_columns(null(adj(S.basis) @ W, S.tol, opnorm(W)), S.tol)


def w_projection(W, A):
    """P_{W, ran A} := P_{ran A, (ran A)^{⊥_W}}."""
    R = sp.from_columns(as_array(A))
    return mv_projection(R, w_companion(W, R))


def solve(W, A, b):
    """Set of W-least-squares solutions of Ax = b, i.e. A⁻¹ P_{W, ran A} b.

    Returns an :class:`~mvrel.relation.AffineSet` whose point is the
    minimum-norm solution.
    """
    W, A, b = as_array(W), as_array(A), as_array(b).ravel()
    P = w_projection(W, A)
    pullback = rl.compose(rl.inverse(rl.graph_of(A, P.M.tol)), P.rel)
    # empty only if b ∉ dom P_{W, ran A}, which cannot happen for psd W
    return rl.apply(pullback, b)


def residual(W, A, x, b):
    """||Ax - b||_W = ||W^{1/2}(Ax - b)||."""
    W, A = as_array(W), as_array(A)
    r = A @ as_array(x).ravel() - as_array(b).ravel()
    return float(np.linalg.norm(psd_sqrt(W) @ r))
