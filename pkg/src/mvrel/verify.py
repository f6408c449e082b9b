"""Seeded verification battery.

Each suite pairs an instance generator with a checker.  Every trial draws
from its own stream ``default_rng([seed, crc32(tag), trial])``, so suites and
trials can run in any order with identical results.  Failing instances are
dumped with their inputs and can be replayed with :func:`replay`.
"""

import zlib
from dataclasses import asdict, dataclass, field

import numpy as np

from . import decomposition as dc
from . import projection as pj
from . import relation as rl
from . import sampling as smp
from . import semiclosed as sc
from . import subspace as sp
from . import wlss
from ._linalg import adj, null, opnorm, orth
from .serialize import decode_array, encode_array

__all__ = ["VerifyConfig", "SUITES", "run", "run_suite", "run_trial", "replay"]

MAX_DUMPS = 20
ORTHO_TOL = 1e-9  # P0 idempotent / selfadjoint, W-LSS pseudo-inverse
CONT_COS_TOL = 1e-10
CONT_NORM_TOL = 1e-6
DB_NORM_TOL = 1e-9
DB_ISO_TOL = 1e-6


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 0
    trials: int = 200
    max_dim: int = 8
    tol: float = 1e-8
    scalar: str = "real"
    suites: tuple = field(default_factory=lambda: tuple(SUITES))

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        if self.max_dim < 2:
            raise ValueError("max_dim must be at least 2")
        if self.scalar not in ("real", "complex"):
            raise ValueError(f"scalar must be 'real' or 'complex', got {self.scalar!r}")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ValueError(f"unknown suite(s): {', '.join(unknown)}")


class _Failure(Exception):
    pass


def _sub(a):
    return sp.from_columns(np.asarray(a))


def _rel(basis, n, m):
    return rl.LinearRelation(n, m, sp.Subspace(orth(np.asarray(basis))))


def _dim(rng, cfg, low=1):
    return int(rng.integers(low, cfg.max_dim + 1))


def _pair_instance(rng, cfg):
    M, N = smp.random_pair(rng, _dim(rng, cfg), cfg.scalar)
    return {"M": M.basis, "N": N.basis}


def _relation_instance(rng, cfg, square=False):
    n = _dim(rng, cfg)
    m = n if square else _dim(rng, cfg)
    return {"T": smp.random_relation_basis(rng, n, m, cfg.scalar), "dims": np.array([n, m], float)}


def _load_relation(inst, key="T", dims="dims"):
    n, m = (int(v) for v in inst[dims])
    return _rel(inst[key], n, m)


# ------------------------------------------------------------------- suites


def _check_structure(inst, cfg):
    M, N = _sub(inst["M"]), _sub(inst["N"])
    P = pj.mv_projection(M, N).rel
    # graph spanned directly by {(m, m)} and {(k, 0)}
    n = M.ambient_dim
    gens = np.hstack([
        np.vstack([M.basis, M.basis]),
        np.vstack([N.basis, np.zeros_like(N.basis)]),
    ])
    direct = rl.LinearRelation(n, n, sp.from_columns(gens, scale=1.0))
    kind = pj.classify(P, cfg.tol).kind
    return {
        "dom": sp.distance(P.dom, M + N),
        "ran": sp.distance(P.ran, M),
        "ker": sp.distance(P.ker, N),
        "mul": sp.distance(P.mul, sp.intersect(M, N)),
        "idempotent": rl.rel_distance(rl.compose(P, P), P),
        "direct": rl.rel_distance(P, direct),
        "classified": 0.0 if kind is pj.Kind.MV_PROJECTION else 1.0,
    }, {}


def _adjoint_direct(T):
    # (k, h) with <k, g> = <h, f> for every (f, g) in T
    X, Y = T.inp, T.out
    rows = np.hstack([adj(Y), -adj(X)])
    basis = null(rows, T.tol, 1.0) if rows.shape[0] else np.eye(T.dim_in + T.dim_out)
    return rl.LinearRelation(T.dim_out, T.dim_in, sp.from_columns(basis, scale=1.0))


def _check_adjoint(inst, cfg):
    M, N = _sub(inst["M"]), _sub(inst["N"])
    P = pj.mv_projection(M, N).rel
    Pa = rl.adjoint(P)
    expected = pj.mv_projection(sp.complement(N), sp.complement(M)).rel
    return {
        "formula": rl.rel_distance(Pa, expected),
        "direct": rl.rel_distance(Pa, _adjoint_direct(P)),
        "involution": rl.rel_distance(rl.adjoint(Pa), P),
    }, {}


def _check_greville(inst, cfg):
    M, N = _sub(inst["M"]), _sub(inst["N"])
    P = pj.mv_projection(M, N).rel
    return {"greville": rl.rel_distance(pj.greville(M, N), P)}, {}


def _check_ptak(inst, cfg):
    M, N = _sub(inst["M"]), _sub(inst["N"])
    P = pj.mv_projection(M, N).rel
    return {
        "ptak": rl.rel_distance(pj.ptak(M, N), P),
        "kernel": sp.distance(pj.ptak_kernel(M, N), sp.intersect(M, N)),
    }, {}


def _gen_complementary(rng, cfg):
    M, N = smp.random_complementary_pair(rng, _dim(rng, cfg), cfg.scalar)
    return {"M": M.basis, "N": N.basis}


def _check_greville_pinv(inst, cfg):
    M, N = _sub(inst["M"]), _sub(inst["N"])
    G = pj.greville_pinv(M, N, cfg.tol)
    # oblique projector [B_M 0][B_M B_N]^{-1}
    K = np.hstack([M.basis, N.basis])
    direct = np.hstack([M.basis, np.zeros_like(N.basis)]) @ np.linalg.inv(K)
    return {"matrix": opnorm(G - direct) / max(1.0, opnorm(direct))}, {}


def _check_inverse_system(inst, cfg):
    T = _load_relation(inst)
    X = rl.inverse(T)
    XT, TX = rl.compose(X, T), rl.compose(T, X)
    system = lambda Z: (  # noqa: E731
        rl.rel_distance(rl.compose(Z, T), pj.mv_projection(T.dom, T.ker).rel),
        rl.rel_distance(rl.compose(T, Z), pj.mv_projection(T.ran, T.mul).rel),
        rl.rel_distance(rl.compose(rl.compose(Z, T), Z), Z),
    )
    # a second candidate, reached through the adjoint
    cand = rl.adjoint(rl.inverse(rl.adjoint(T)))
    c = system(cand)
    return {
        "XT": rl.rel_distance(XT, pj.mv_projection(T.dom, T.ker).rel),
        "TX": rl.rel_distance(TX, pj.mv_projection(T.ran, T.mul).rel),
        "XTX": rl.rel_distance(rl.compose(XT, X), X),
        "candidate_system": max(c),
        "candidate_equal": rl.rel_distance(cand, X),
    }, {}


def _gen_relation_triple(rng, cfg):
    n, m, k = _dim(rng, cfg), _dim(rng, cfg), _dim(rng, cfg)
    return {
        "T": smp.random_relation_basis(rng, n, m, cfg.scalar),
        "S": smp.random_relation_basis(rng, m, k, cfg.scalar),
        "dims": np.array([n, m, k], float),
    }


def _check_relation(inst, cfg):
    n, m, k = (int(v) for v in inst["dims"])
    T, S = _rel(inst["T"], n, m), _rel(inst["S"], m, k)
    Ta = rl.adjoint(T)
    ST = rl.compose(S, T)
    res = {
        "inverse_of_product": rl.rel_distance(rl.inverse(ST), rl.compose(rl.inverse(T), rl.inverse(S))),
        "adjoint_of_product": 0.0,
        "TT-1T": rl.rel_distance(rl.compose(T, rl.compose(rl.inverse(T), T)), T),
        "mul_adjoint": sp.distance(Ta.mul, sp.complement(T.dom)),
        "ker_adjoint": sp.distance(Ta.ker, sp.complement(T.ran)),
        "operator_part": 0.0,
    }
    # (ST)* ⊇ T*S*, with equality when S is an everywhere defined operator
    if not rl.rel_contains(rl.adjoint(ST), rl.compose(Ta, rl.adjoint(S)), cfg.tol):
        res["adjoint_of_product"] = 1.0
    Q, _ = rl.operator_part(T)
    op = rl.cw_sum(rl.restrict(rl.graph_of(Q), T.dom), rl.product_of(sp.zero(n), T.mul))
    res["operator_part"] = rl.rel_distance(op, T)
    # lemma path and graph path agree, on T vs itself and vs a perturbation
    Tp = rl.cw_sum(T, rl.product_of(sp.zero(n), sp.full(m))) if m else T
    for other in (T, Tp):
        if rl.lemma_equal(other, T, cfg.tol) != rl.rel_equal(other, T, cfg.tol):
            res["lemma_path"] = 1.0
    res.setdefault("lemma_path", 0.0)
    return res, {}


def _gen_decomposition(rng, cfg):
    inst = _relation_instance(rng, cfg)
    inst.update(_pair_instance(rng, cfg))
    return inst


def _check_decomposition(inst, cfg):
    T = _load_relation(inst)
    M, N = _sub(inst["M"]), _sub(inst["N"])
    base = dc.t0(T)
    reg = dc.lebesgue(T, cfg.tol)
    weak = dc.weak_lebesgue(T, cfg.tol)
    rep = dc.is_decomposable(T, cfg.tol)
    d = dc.decompose_mv(M, N, cfg.tol)
    dc.decomposability_conditions_mv(M, N, cfg.tol)
    dc.decomposability_conditions_mv(N, M, cfg.tol)
    P = pj.mv_projection(M, N).rel
    core = sp.intersect(M, sp.subspace_sum(sp.complement(M), sp.complement(N)))
    total = sp.subspace_sum(M, N)
    return {
        "t0_reg": rl.rel_distance(base, reg.operator_term),
        "t0_m": rl.rel_distance(base, weak.operator_term),
        "t0_operator": 0.0 if base.is_operator else 1.0,
        "decomposable": 0.0 if rep.flag else 1.0,
        "mv_rebuild": rl.rel_distance(rl.cw_sum(d.operator_term, d.residual_term), P),
        "mv_t0": rl.rel_distance(dc.t0(P), pj.mv_projection(core, N).rel),
        "mv_sing": rl.rel_distance(dc.lebesgue(P, cfg.tol).residual_term,
                                   rl.product_of(total, sp.intersect(M, N))),
    }, {}


def _gen_compression(rng, cfg):
    n = _dim(rng, cfg, low=2)
    # half the time M + N sits inside a proper subspace, so that F can move
    # M outside M + N and the sum conditions get exercised both ways
    t = n if rng.random() < 0.4 else int(rng.integers(1, n))
    U = smp.unitary_columns(rng, n, t, cfg.scalar)
    M0, N0 = smp.random_pair(rng, t, cfg.scalar)
    M, N = sp.from_columns(U @ M0.basis, scale=1.0), sp.from_columns(U @ N0.basis, scale=1.0)
    strategy = int(rng.choice(5, p=[0.4, 0.15, 0.15, 0.15, 0.15]))
    common = sp.intersect(M, N)
    if strategy == 0:
        F = sp.random_subspace(rng, n, int(rng.integers(0, n + 1)), cfg.scalar).projector
    elif strategy == 1:
        F = np.eye(n)
    elif strategy == 2:
        # the projector onto (M∩N)⊥, i.e. both P and Q of the Lebesgue pictures
        F = sp.complement(common).projector
    elif strategy == 3:
        # kill M∩N plus a random part of N
        coef = smp.gaussian(rng, (N.dim, int(rng.integers(0, N.dim + 1))), cfg.scalar)
        F = sp.complement(sp.from_columns(np.hstack([common.basis, N.basis @ coef]))).projector
    else:
        # kill a random subspace that contains M∩N
        extra = smp.gaussian(rng, (n, int(rng.integers(0, n - common.dim + 1))), cfg.scalar)
        F = sp.complement(sp.from_columns(np.hstack([common.basis, extra]))).projector
    return {"F": F, "M": M.basis, "N": N.basis}


def _check_compression(inst, cfg):
    M, N = _sub(inst["M"]), _sub(inst["N"])
    F = np.asarray(inst["F"])
    rep = dc.compress(F, M, N, cfg.tol)
    res = {"result": rl.rel_distance(rep.result, rep.expected) if rep.is_projection else 0.0}
    stats = {
        "satisfying": int(rep.is_projection),
        "violating": int(not rep.is_projection),
        "mul_in_ker_true": int(rep.mul_in_ker),
        "mul_in_ker_false": int(not rep.mul_in_ker),
        "domain_split_true": int(rep.domain_split),
        "domain_split_false": int(not rep.domain_split),
        "range_condition_true": int(rep.range_condition),
        "range_condition_false": int(not rep.range_condition),
    }
    return res, stats


def _gen_range_pair(rng, cfg):
    A, B = smp.random_range_pair(rng, _dim(rng, cfg), cfg.scalar)
    return {"A": A, "B": B}


def _check_gamma(inst, cfg):
    A, B = inst["A"], inst["B"]
    pair = sc.row_polar(A, B, check=False)
    r = pair.residuals()
    res = {k: r[k] for k in ("douglas_a", "douglas_b", "gamma_reconstruction", "frame_projector")}
    ando = sc.ando_projection(A, B, cfg.tol, pair)
    res["ando_gamma"] = rl.rel_distance(ando.via_gamma, ando.reference)
    res["ando_adjoint"] = rl.rel_distance(ando.via_adjoint_form, ando.reference)
    res["quotient"] = rl.rel_distance(sc.semiclosed_projection(A, B), ando.reference)
    orth_rep = sc.orthogonalize(A, B, cfg.tol, pair)
    o = orth_rep.residuals
    res["P0_idempotent"] = o["idempotent"] * (cfg.tol / ORTHO_TOL)
    res["P0_selfadjoint"] = o["selfadjoint"] * (cfg.tol / ORTHO_TOL)
    res["intertwining"] = o["intertwining"]
    res["orthogonal_sum"] = o["orthogonal_sum"]
    return res, {}


def _gen_semiclosed(rng, cfg):
    inst = _gen_range_pair(rng, cfg)
    n = inst["A"].shape[0]
    inst["coef"] = smp.gaussian(rng, (n, n), cfg.scalar)
    return inst


def _check_semiclosed(inst, cfg):
    A, B = inst["A"], inst["B"]
    pair = sc.row_polar(A, B, check=False)
    P = pj.mv_projection(pair.M, pair.N)
    n = A.shape[0]
    C, D = sc.as_quotient(P.rel)
    res = {"quotient_roundtrip": rl.rel_distance(sc.quotient(C, D), P.rel)}
    res["quasi_affine"] = sc.quasi_affine_form(A, B, cfg.tol, pair).residual
    split = sc.gamma_splitting(A, B, cfg.tol, pair)
    res["splitting"] = 0.0 if split.all_hold else 1.0
    conj = sc.conjugate(pair.gamma, P, cfg.tol)
    res["conjugate_matrix"] = rl.rel_distance(conj.relation, conj.expected)
    # relation-valued Γ: adjoin a multivalued part inside N
    extra = sp.from_columns(pair.N.basis @ inst["coef"][: pair.N.dim, : max(pair.N.dim - 1, 0)])
    G = rl.cw_sum(rl.graph_of(pair.gamma), rl.product_of(sp.zero(n), extra))
    conj = sc.conjugate(G, P, cfg.tol)
    res["conjugate_relation"] = rl.rel_distance(conj.relation, conj.expected)
    return res, {}


def _gen_ando_split(rng, cfg):
    inst = _gen_range_pair(rng, cfg)
    n = inst["A"].shape[0]
    inst["s"] = smp.gaussian(rng, n, cfg.scalar)
    inst["t"] = smp.gaussian(rng, n, cfg.scalar)
    return inst


def _check_ando_split(inst, cfg):
    T1, T2 = inst["A"], inst["B"]
    u = T1 @ inst["s"] + T2 @ inst["t"]
    split = sc.ando_split(T1, T2, u, cfg.tol)
    # minimum-norm solution of [T1 T2] z = u: the optimal decomposition
    z = np.linalg.lstsq(np.hstack([T1, T2]), u, rcond=None)[0]
    p = T1.shape[1]
    zz = float(np.linalg.norm(z) ** 2)
    un = max(1.0, float(np.linalg.norm(u)))
    return {
        "pythagoras": abs(split.norm_sq - split.parts_sq) / max(1.0, split.norm_sq),
        "minimality": abs(split.parts_sq - zz) / max(1.0, zz),
        "u1": float(np.linalg.norm(split.u1 - T1 @ z[:p])) / un,
        "u2": float(np.linalg.norm(split.u2 - T2 @ z[p:])) / un,
    }, {}


def _gen_debranges(rng, cfg, trial):
    iso = trial % 11 == 10
    T = smp.random_contraction(rng, _dim(rng, cfg), cfg.scalar, isometric=iso)
    return {"T": T, "isometric": np.array(float(iso))}


def _check_debranges(inst, cfg):
    iso = bool(inst["isometric"])
    rep = sc.debranges(inst["T"], DB_NORM_TOL)
    total = sp.subspace_sum(rep.S, rep.S_prime)
    res = {
        "sum_full": sp.distance(total, sp.full(total.ambient_dim)),
        "norm_bound": max(rep.norm - 1.0, 0.0) * (cfg.tol / DB_NORM_TOL),
    }
    if iso:
        res["norm_isometric"] = max(1.0 - rep.norm, 0.0) * (cfg.tol / DB_ISO_TOL)
    return res, {"isometric": int(iso), "contraction": int(not iso)}


def _gen_wlss(rng, cfg):
    # Redraw until W^{1/2}A has no singular values in (1e-10, 1e-4) sigma_max:
    # the normal-equation oracle squares the spectrum and cannot decide the
    # rank of such instances.
    while True:
        n, k = _dim(rng, cfg), _dim(rng, cfg)
        W = smp.random_psd(rng, n, int(rng.integers(0, n)), cfg.scalar)
        A = smp.random_matrix(rng, n, k, scalar=cfg.scalar)
        lam, V = np.linalg.eigh(W)
        s = np.linalg.svd((V * np.sqrt(np.clip(lam, 0, None))) @ adj(V) @ A, compute_uv=False)
        top = s[0] if s.size else 0.0
        if not np.any((s > 1e-10 * top) & (s < 1e-4 * top)):
            return {"W": W, "A": A, "b": smp.gaussian(rng, n, cfg.scalar)}


def _check_wlss(inst, cfg):
    W, A, b = inst["W"], inst["A"], inst["b"]
    sol = wlss.solve(W, A, b)
    # normal equations A*WA x = A*Wb through the pseudo-inverse and null space
    Nm = adj(A) @ W @ A
    rhs = adj(A) @ W @ b
    xp = np.linalg.pinv(Nm, rcond=1e-10, hermitian=True) @ rhs
    u, s, vh = np.linalg.svd(Nm)
    r = int(np.count_nonzero(s > 1e-10 * max(s[0], 1e-300))) if s.size else 0
    oracle = rl.AffineSet(True, xp, sp.Subspace(adj(vh[r:])))
    # optimal value ||(I - P) W^{1/2} b||, P onto ran W^{1/2} A
    lam, V = np.linalg.eigh(W)
    lam = np.where(lam > W.shape[0] * np.finfo(float).eps * max(lam.max(), 0.0), lam, 0.0)
    Wh = (V * np.sqrt(lam)) @ adj(V)
    WA = Wh @ A
    best = float(np.linalg.norm(Wh @ b - WA @ np.linalg.lstsq(WA, Wh @ b, rcond=None)[0]))
    got = wlss.residual(W, A, sol.point, b) if sol.nonempty else np.inf
    scale = max(1.0, float(np.linalg.norm(b)))
    Apinv = rl.relation_pinv(A)
    ref = np.linalg.pinv(A)
    return {
        "nonempty": 0.0 if sol.nonempty else 1.0,
        "solution_set": 0.0 if sol.equals(oracle, cfg.tol) else 1.0,
        "point": float(np.linalg.norm(sol.point - xp)) / max(1.0, float(np.linalg.norm(xp))),
        "normal_equation": float(np.linalg.norm(Nm @ sol.point - rhs)) / max(1.0, opnorm(Nm)) / scale,
        "optimal_value": abs(got - best) / scale,
        "pinv": opnorm(Apinv - ref) / max(1.0, opnorm(ref)) * (cfg.tol / ORTHO_TOL),
    }, {}


def _gen_continuity(rng, cfg, trial):
    return {"theta": np.array(10.0 ** -(1 + trial % 6))}


def _check_continuity(inst, cfg):
    th = float(inst["theta"])
    dtype = complex if cfg.scalar == "complex" else float
    M = sp.span([np.array([1.0, 0.0], dtype)])
    N = sp.span([np.array([np.cos(th), np.sin(th)], dtype)])
    rep = dc.continuity_report(M, N, cfg.tol)
    # 1/sqrt(1 - cos²θ) is 1/sin θ; the latter avoids the cancellation
    ref = 1.0 / np.sin(th)
    return {
        "cosine": abs(rep.cosine - np.cos(th)) * (cfg.tol / CONT_COS_TOL),
        "op_norm": abs(rep.op_norm - ref) / ref * (cfg.tol / CONT_NORM_TOL),
        "criterion": 0.0 if rep.criterion_ok else 1.0,
    }, {}


def _gen_angle(rng, cfg):
    n = _dim(rng, cfg, low=2)
    a = int(rng.integers(1, n))
    b = int(rng.integers(1, n - a + 1))
    M = sp.random_subspace(rng, n, a, cfg.scalar)
    N = sp.random_subspace(rng, n, b, cfg.scalar)
    return {"M": M.basis, "N": N.basis}


def _check_angle(inst, cfg):
    M, N = _sub(inst["M"]), _sub(inst["N"])
    rep = dc.continuity_report(M, N, cfg.tol)
    # operator part of P_{M//N} on M ∔ N: its norm is the largest singular
    # value of the oblique projector restricted to M + N
    K = np.hstack([M.basis, N.basis])
    Pm = np.hstack([M.basis, np.zeros_like(N.basis)]) @ np.linalg.pinv(K)
    direct = float(np.linalg.svd(Pm, compute_uv=False)[0])
    return {
        "op_norm_svd": abs(rep.op_norm - direct) / direct,
        "sine_law": abs(rep.op_norm * rep.sine - 1.0),
        "pythagoras": abs(rep.cosine**2 + rep.sine**2 - 1.0),
    }, {}


@dataclass(frozen=True)
class Suite:
    generate: object
    check: object
    coverage: tuple = ()  # stats keys that must each be hit
    uses_trial: bool = False


SUITES = {
    "structure": Suite(_pair_instance, _check_structure),
    "adjoint": Suite(_pair_instance, _check_adjoint),
    "greville": Suite(_pair_instance, _check_greville),
    "ptak": Suite(_pair_instance, _check_ptak),
    "greville_pinv": Suite(_gen_complementary, _check_greville_pinv),
    "relation": Suite(_gen_relation_triple, _check_relation),
    "inverse_system": Suite(_relation_instance, _check_inverse_system),
    "decomposition": Suite(_gen_decomposition, _check_decomposition),
    "compression": Suite(
        _gen_compression, _check_compression,
        coverage=(
            "satisfying", "violating",
            "mul_in_ker_true", "mul_in_ker_false",
            "domain_split_true", "domain_split_false",
            "range_condition_true", "range_condition_false",
        ),
    ),
    "gamma": Suite(_gen_range_pair, _check_gamma),
    "semiclosed": Suite(_gen_semiclosed, _check_semiclosed),
    "ando_split": Suite(_gen_ando_split, _check_ando_split),
    "debranges": Suite(_gen_debranges, _check_debranges, uses_trial=True),
    "wlss": Suite(_gen_wlss, _check_wlss),
    "continuity": Suite(_gen_continuity, _check_continuity, uses_trial=True),
    "angle": Suite(_gen_angle, _check_angle),
}


def trial_rng(seed, tag, trial):
    return np.random.default_rng([seed, zlib.crc32(tag.encode()), trial])


def coverage_target(trials):
    """Minimum count per branch: 100, or a tenth of the trials for short runs."""
    return min(100, trials // 10)


def _evaluate(tag, inst, cfg):
    """(ok, worst residual, stats, error message, residuals) for one instance."""
    try:
        res, stats = SUITES[tag].check(inst, cfg)
    except Exception as exc:  # noqa: BLE001 - every failure mode is reported
        return False, None, {}, f"{type(exc).__name__}: {exc}", None
    res = {k: float(v) for k, v in res.items()}
    worst = max(res.values()) if res else 0.0
    bad = sorted(k for k, v in res.items() if not v <= cfg.tol)
    err = f"residuals above tolerance: {', '.join(bad)}" if bad else None
    return not bad, worst, stats, err, res


def run_trial(tag, cfg, trial):
    suite = SUITES[tag]
    rng = trial_rng(cfg.seed, tag, trial)
    inst = suite.generate(rng, cfg, trial) if suite.uses_trial else suite.generate(rng, cfg)
    ok, worst, stats, err, res = _evaluate(tag, inst, cfg)
    return inst, ok, worst, stats, err, res


def _dump(tag, cfg, trial, inst, err, res):
    return {
        "suite": tag,
        "trial": trial,
        "config": _config_json(cfg),
        "error": err,
        "residuals": res,
        "instance": {k: encode_array(v) for k, v in sorted(inst.items())},
    }


def _config_json(cfg):
    d = asdict(cfg)
    d["suites"] = list(cfg.suites)
    return d


def run_suite(tag, cfg):
    suite = SUITES[tag]
    passed = failed = 0
    worst = 0.0
    stats = {}
    dumps = []
    for trial in range(cfg.trials):
        inst, ok, w, st, err, res = run_trial(tag, cfg, trial)
        for k, v in st.items():
            stats[k] = stats.get(k, 0) + v
        if ok:
            passed += 1
            worst = max(worst, w)
        else:
            failed += 1
            if len(dumps) < MAX_DUMPS:
                dumps.append(_dump(tag, cfg, trial, inst, err, res))
    target = coverage_target(cfg.trials)
    missing = sorted(k for k in suite.coverage if stats.get(k, 0) < target)
    out = {
        "trials": cfg.trials,
        "passed": passed,
        "failed": failed,
        "worst_residual": worst,
        "stats": stats,
        "failures": dumps,
        "ok": failed == 0 and not missing,
    }
    if suite.coverage:
        out["coverage"] = {"target": target, "missing": missing}
    return out


def run(cfg):
    """Run the selected suites; the report is a plain JSON-ready dict."""
    suites = {tag: run_suite(tag, cfg) for tag in cfg.suites}
    failed = [tag for tag, r in suites.items() if not r["ok"]]
    return {"config": _config_json(cfg), "suites": suites, "failed_suites": failed, "ok": not failed}


def replay(dump):
    """Re-run a failure dump; returns (ok, error, residuals)."""
    tag = dump["suite"]
    if tag not in SUITES:
        raise ValueError(f"suite: unknown tag {tag!r}")
    c = dict(dump["config"])
    c["suites"] = tuple(c["suites"])
    cfg = VerifyConfig(**c)
    inst = {k: decode_array(v, f"instance.{k}") for k, v in dump["instance"].items()}
    ok, _, _, err, res = _evaluate(tag, inst, cfg)
    return ok, err, res
