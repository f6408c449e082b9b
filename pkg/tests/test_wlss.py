import numpy as np
import pytest
from hypothesis import given, strategies as st

from mvrel import relation as rl
from mvrel import sampling as smp
from mvrel import subspace as sp
from mvrel import verify as vf
from mvrel import wlss
from mvrel.relation import AffineSet

from conftest import e, scalars, seeds, sub


def problem(seed, scalar="real"):
    cfg = vf.VerifyConfig(max_dim=6, scalar=scalar)
    inst = vf._gen_wlss(np.random.default_rng(seed), cfg)
    return inst["W"], inst["A"], inst["b"]


def normal_equation_set(W, A, b):
    N = A.conj().T @ W @ A
    x = np.linalg.pinv(N, rcond=1e-10, hermitian=True) @ (A.conj().T @ W @ b)
    _, s, vh = np.linalg.svd(N)
    r = int(np.sum(s > 1e-10 * max(s[0], 1e-300)))
    return AffineSet(True, x, sp.from_columns(vh[r:].conj().T))


def test_w_companion_examples():
    S = sub([1, 1, 0])
    assert sp.equal(wlss.w_companion(np.eye(3), S), sp.complement(S))
    assert sp.equal(wlss.w_companion(np.diag([1.0, 0.0]), sub(e(0, 2))), sub(e(1, 2)))
    assert wlss.w_companion(np.diag([0.0, 1.0]), sub(e(0, 2))).is_full


def test_w_companion_rejects_indefinite():
    with pytest.raises(ValueError, match="positive semidefinite"):
        wlss.w_companion(np.diag([1.0, -1.0]), sub(e(0, 2)))


def test_w_projection_examples():
    A = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    P = wlss.w_projection(np.eye(3), A)
    assert np.allclose(P.matrix(), sp.from_columns(A).projector)
    P = wlss.w_projection(np.zeros((3, 3)), A)
    assert P.N.is_full and sp.equal(P.rel.mul, sp.from_columns(A))
    P = wlss.w_projection(np.diag([1.0, 0.0]), np.array([[1.0], [1.0]]))
    assert sp.equal(P.N, sub(e(1, 2))) and sp.equal(P.M, sub([1, 1]))


def test_solve_examples():
    b = np.array([1.0, -4.0, 2.0])
    out = wlss.solve(np.eye(3), np.eye(3), b)
    assert out.equals(AffineSet(True, b, sp.zero(3)))
    # minimise |x - 3|: the scalar normal equation is 1 · x = 3
    out = wlss.solve(np.diag([1.0, 0.0]), np.array([[1.0], [1.0]]), np.array([3.0, 7.0]))
    assert out.equals(AffineSet(True, np.array([3.0]), sp.zero(1)))
    out = wlss.solve(np.eye(2), np.diag([1.0, 0.0]), np.array([1.0, 2.0]))
    assert out.equals(AffineSet(True, np.array([1.0, 0.0]), sub(e(1, 2))))


def test_residual_examples():
    A = np.array([[1.0, 2.0], [0.0, 1.0]])
    x = np.array([1.0, 1.0])
    W = np.diag([2.0, 0.5])
    assert wlss.residual(W, A, x, A @ x) == 0.0
    assert wlss.residual(np.zeros((2, 2)), A, x, np.array([5.0, 5.0])) == 0.0


def test_solution_beats_random_probes():
    W, A, b = problem(17)
    x0 = wlss.solve(W, A, b).point
    best = wlss.residual(W, A, x0, b)
    rng = np.random.default_rng(0)
    probes = x0 + rng.standard_normal((1000, A.shape[1])) * rng.uniform(1e-3, 10, (1000, 1))
    assert all(best <= wlss.residual(W, A, x, b) + 1e-12 for x in probes)


def test_problem_validation():
    with pytest.raises(ValueError, match="square"):
        wlss.WlssProblem(np.ones((2, 3)), np.ones((2, 1)), np.ones(2))
    with pytest.raises(ValueError, match="rows"):
        wlss.WlssProblem(np.eye(2), np.ones((3, 1)), np.ones(2))
    with pytest.raises(ValueError, match="length"):
        wlss.WlssProblem(np.eye(2), np.ones((2, 1)), np.ones(3))
    with pytest.raises(ValueError, match="semidefinite"):
        wlss.WlssProblem(-np.eye(2), np.ones((2, 1)), np.ones(2))
    sol = wlss.WlssProblem(np.eye(2), np.eye(2), [1, 2]).solve()
    assert np.allclose(sol.point, [1, 2])


@given(seeds, scalars)
def test_normal_equation_equivalence(seed, scalar):
    W, A, b = problem(seed, scalar)
    sol = wlss.solve(W, A, b)
    assert sol.nonempty
    assert sol.equals(normal_equation_set(W, A, b))


@given(seeds, scalars)
def test_optimal_value(seed, scalar):
    W, A, b = problem(seed, scalar)
    x0 = wlss.solve(W, A, b).point
    lam, V = np.linalg.eigh(W)
    lam = np.where(lam > 1e-12 * max(lam.max(), 0), lam, 0)
    Wh = (V * np.sqrt(lam)) @ V.conj().T
    R = sp.from_columns(Wh @ A)
    best = np.linalg.norm(Wh @ b - R.projector @ (Wh @ b))
    assert wlss.residual(W, A, x0, b) == pytest.approx(best, abs=1e-8 * max(1.0, np.linalg.norm(b)))


@given(seeds, st.floats(0.01, 100.0))
def test_weight_scaling(seed, c):
    W, A, b = problem(seed)
    s1, s2 = wlss.solve(W, A, b), wlss.solve(c * W, A, b)
    assert s1.equals(s2)
    r1, r2 = wlss.residual(W, A, s1.point, b), wlss.residual(c * W, A, s2.point, b)
    assert r2 == pytest.approx(np.sqrt(c) * r1, rel=1e-6, abs=1e-9)


@given(seeds, scalars)
def test_domain_is_everything(seed, scalar):
    W, A, _ = problem(seed, scalar)
    assert wlss.w_projection(W, A).rel.dom.is_full


@given(seeds, scalars)
def test_every_point_is_optimal(seed, scalar):
    W, A, b = problem(seed, scalar)
    sol = wlss.solve(W, A, b)
    best = wlss.residual(W, A, sol.point, b)
    rng = np.random.default_rng(seed)
    if sol.directions.dim:
        x = sol.point + sol.directions.basis @ smp.gaussian(rng, sol.directions.dim, scalar)
        assert wlss.residual(W, A, x, b) == pytest.approx(best, abs=1e-8 * max(1.0, np.linalg.norm(b)))
    assert np.linalg.norm(sol.directions.basis.conj().T @ sol.point) < 1e-10


def test_pinv_through_relation():
    A = smp.random_matrix(np.random.default_rng(3), 5, 3, rank=2)
    ref = np.linalg.pinv(A)
    assert np.linalg.norm(rl.relation_pinv(A) - ref, 2) <= 1e-9 * np.linalg.norm(ref, 2)
