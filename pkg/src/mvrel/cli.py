"""``mvrel`` command line: run single operations on JSON inputs or the
seeded verification battery.  Reports go to stdout as JSON.

Exit codes: 0 ok, 1 failed check or verification, 2 usage or input error.
"""

import argparse
import sys

import numpy as np

from . import decomposition as dc
from . import projection as pj
from . import relation as rl
from . import semiclosed as sc
from . import serialize as ser
from . import subspace as sp
from . import verify as vf
from . import wlss
from ._linalg import CMP_TOL, adj
from .errors import HypothesisError, NumericalInconsistency

USAGE_ERROR = 2
CHECK_FAILED = 1


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ loading


def _cast(a, args):
    return a.astype(complex) if args.scalar == "complex" else a


def _unwrap(obj, key):
    return obj[key] if isinstance(obj, dict) and key in obj else obj


def load_subspace(path, args):
    M = ser.subspace_from_json(ser.load_json(path), path)
    return sp.Subspace(_cast(M.basis, args)) if args.scalar == "complex" else M


def load_relation(path, args):
    T = ser.relation_from_json(ser.load_json(path), path)
    if args.scalar == "complex":
        T = rl.LinearRelation(T.dim_in, T.dim_out, sp.Subspace(_cast(T.graph.basis, args)))
    return T


def load_matrix(path, args, key="matrix"):
    return _cast(ser.matrix_from_json(_unwrap(ser.load_json(path), key), path), args)


def load_vector(path, args, key="vector"):
    return _cast(ser.vector_from_json(_unwrap(ser.load_json(path), key), path), args)


def _get(obj, key, path):
    if not isinstance(obj, dict) or key not in obj:
        raise ser.SerializationError(f"{path}: missing field '{key}'")
    return obj[key]


def load_pair(path, args):
    obj = ser.load_json(path)
    A = ser.matrix_from_json(_get(obj, "A", path), f"{path}: A")
    B = ser.matrix_from_json(_get(obj, "B", path), f"{path}: B")
    if A.shape[0] != B.shape[0]:
        raise ser.SerializationError(f"{path}: B must have {A.shape[0]} rows, got {B.shape[0]}")
    return _cast(A, args), _cast(B, args)


def load_problem(path, args):
    obj = ser.load_json(path)
    W = ser.matrix_from_json(_get(obj, "W", path), f"{path}: W")
    A = ser.matrix_from_json(_get(obj, "A", path), f"{path}: A")
    b = ser.vector_from_json(_get(obj, "b", path), f"{path}: b")
    n = W.shape[0]
    if W.shape != (n, n):
        raise ser.SerializationError(f"{path}: W must be square, got {W.shape}")
    if A.shape[0] != n:
        raise ser.SerializationError(f"{path}: A must have {n} rows, got {A.shape[0]}")
    if b.size != n:
        raise ser.SerializationError(f"{path}: b must have length {n}, got {b.size}")
    return _cast(W, args), _cast(A, args), _cast(b, args)


def _same_ambient(M, N, names=("M", "N")):
    if M.ambient_dim != N.ambient_dim:
        raise ser.SerializationError(
            f"{names[1]}: ambient dimension {N.ambient_dim} differs from {names[0]} ({M.ambient_dim})"
        )


# ---------------------------------------------------------------- reporting


PART_NAMES = ("dom", "ran", "ker", "mul")


def _parts(T):
    return {k: getattr(T, k).dim for k in PART_NAMES}


def _relation(T):
    out = ser.relation_to_json(T)
    out["parts"] = _parts(T)
    out["is_operator"] = bool(T.is_operator)
    return out


def _sub(M):
    return ser.subspace_to_json(M)


def _mat(a):
    return ser.matrix_to_json(a)


# ------------------------------------------------------------------ commands


def cmd_relation(args):
    op, files = args.op, args.inputs
    need = {"compose": 2, "apply": 2}.get(op, 1)
    if len(files) != need:
        raise UsageError(f"relation {op} takes {need} input file(s), got {len(files)}")
    if op == "pinv":
        A = load_matrix(files[0], args)
        return {"op": op, "inputs": files, "pinv": _mat(rl.relation_pinv(A))}
    T = load_relation(files[0], args)
    if op == "compose":
        S = load_relation(files[1], args)
        if T.dim_in != S.dim_out:
            raise ser.SerializationError(
                f"{files[1]}: dim_out {S.dim_out} does not match dim_in {T.dim_in} of {files[0]}"
            )
        return {"op": op, "inputs": files, "relation": _relation(rl.compose(T, S))}
    if op == "inverse":
        return {"op": op, "inputs": files, "relation": _relation(rl.inverse(T))}
    if op == "adjoint":
        return {"op": op, "inputs": files, "relation": _relation(rl.adjoint(T))}
    if op == "parts":
        return {
            "op": op,
            "inputs": files,
            "parts": {k: _sub(getattr(T, k)) for k in PART_NAMES},
            "is_operator": bool(T.is_operator),
            "dims": _parts(T),
        }
    x = load_vector(files[1], args)
    if x.size != T.dim_in:
        raise ser.SerializationError(f"{files[1]}: vector has length {x.size}, expected {T.dim_in}")
    return {"op": op, "inputs": files, "image": ser.affine_to_json(rl.apply(T, x, args.tol))}


def _two_subspaces(files, args, offset=0):
    M = load_subspace(files[offset], args)
    N = load_subspace(files[offset + 1], args)
    _same_ambient(M, N, (files[offset], files[offset + 1]))
    return M, N


def cmd_mvproj(args):
    op, files = args.op, args.inputs
    need = {"classify": 1, "compress": 3}.get(op, 2)
    if len(files) != need:
        raise UsageError(f"mvproj {op} takes {need} input file(s), got {len(files)}")
    tol = args.tol
    out = {"op": op, "inputs": files}
    if op == "classify":
        c = pj.classify(load_relation(files[0], args), tol)
        out["kind"] = c.kind.value
        out["certificates"] = {k: {"holds": bool(h), "margin": float(m)} for k, (h, m) in c.certificates.items()}
        return out
    if op == "compress":
        F = load_matrix(files[0], args)
        M, N = _two_subspaces(files, args, 1)
        if F.shape != (M.ambient_dim, M.ambient_dim):
            raise ser.SerializationError(f"{files[0]}: F must be {M.ambient_dim}x{M.ambient_dim}, got {F.shape}")
        rep = dc.compress(F, M, N, tol)
        out.update(
            is_projection=rep.is_projection,
            conditions={
                "mul_in_ker": rep.mul_in_ker,
                "domain_split": rep.domain_split,
                "range_condition": rep.range_condition,
            },
            relation=_relation(rep.result),
        )
        if rep.witness is not None:
            out["witness"] = rep.witness
        return out
    M, N = _two_subspaces(files, args)
    if op == "build":
        out["relation"] = _relation(pj.mv_projection(M, N).rel)
    elif op == "greville":
        out["relation"] = _relation(pj.greville(M, N))
    elif op == "ptak":
        out["relation"] = _relation(pj.ptak(M, N))
        out["kernel"] = _sub(pj.ptak_kernel(M, N))
    elif op == "decompose":
        d = dc.decompose_mv(M, N, tol)
        rep = dc.decomposability_conditions_mv(M, N, tol)
        out.update(
            operator_term=_relation(d.operator_term),
            residual_term=_relation(d.residual_term),
            conditions={
                "decomposable": rep.decomposable,
                "sum_split": rep.sum_split,
                "projected_range": rep.projected_range,
                "range_split": rep.range_split,
            },
        )
    else:
        rep = dc.continuity_report(M, N, tol)
        out.update(cosine=rep.cosine, sine=rep.sine, op_norm=rep.op_norm, criterion_ok=rep.criterion_ok)
    return out


def cmd_semiclosed(args):
    op, files = args.op, args.inputs
    need = 3 if op == "conjugate" else 1
    if len(files) != need:
        raise UsageError(f"semiclosed {op} takes {need} input file(s), got {len(files)}")
    tol = args.tol
    out = {"op": op, "inputs": files}
    if op == "debranges":
        rep = sc.debranges(load_matrix(files[0], args))
        out.update(
            S=_sub(rep.S), S_prime=_sub(rep.S_prime), overlap=_sub(rep.overlap),
            relation=_relation(rep.relation), norm=rep.norm, norm_bound_ok=rep.norm_bound_ok,
        )
        return out
    if op == "conjugate":
        G = load_matrix(files[0], args)
        M, N = _two_subspaces(files, args, 1)
        if G.shape != (M.ambient_dim, M.ambient_dim):
            raise ser.SerializationError(f"{files[0]}: Γ must be {M.ambient_dim}x{M.ambient_dim}, got {G.shape}")
        c = sc.conjugate(G, pj.mv_projection(M, N), tol)
        out.update(relation=_relation(c.relation), M_pre=_sub(c.M_pre), N_pre=_sub(c.N_pre))
        return out
    A, B = load_pair(files[0], args)
    pair = sc.row_polar(A, B)
    if op == "polar":
        out.update(
            gamma=_mat(pair.gamma), C_A=_mat(pair.c_a), C_B=_mat(pair.c_b),
            residuals=pair.residuals(),
        )
    elif op == "ando":
        a = sc.ando_projection(A, B, tol, pair)
        out.update(relation=_relation(a.via_gamma), operator_term=_relation(a.operator_term))
    elif op == "quasiaffine":
        q = sc.quasi_affine_form(A, B, tol, pair)
        out.update(frame=_mat(q.frame), X=_mat(q.X), C=_mat(q.C), S=_sub(q.S), residual=q.residual)
    elif op == "split":
        g = sc.gamma_splitting(A, B, tol, pair)
        out.update(
            gamma_ker_cb=_sub(g.gamma_ker_cb), gamma_ker_ca=_sub(g.gamma_ker_ca), common=_sub(g.common),
            direct=g.direct, sum_ok=g.sum_ok, M_ok=g.M_ok, N_ok=g.N_ok, relation_ok=g.relation_ok,
        )
    else:
        o = sc.orthogonalize(A, B, tol, pair)
        out.update(P0=_mat(o.P0), S=_sub(o.S), residuals=o.residuals)
    return out


def cmd_wlss(args):
    op, files = args.op, args.inputs
    need = 2 if op == "residual" else 1
    if len(files) != need:
        raise UsageError(f"wlss {op} takes {need} input file(s), got {len(files)}")
    W, A, b = load_problem(files[0], args)
    try:
        wlss.WlssProblem(W, A, b)
    except ValueError as exc:
        raise ser.SerializationError(f"{files[0]}: {exc}") from None
    if op == "residual":
        x = load_vector(files[1], args)
        if x.size != A.shape[1]:
            raise ser.SerializationError(f"{files[1]}: vector has length {x.size}, expected {A.shape[1]}")
        return {"op": op, "inputs": files, "residual": wlss.residual(W, A, x, b)}
    sol = wlss.solve(W, A, b)
    out = {"op": op, "inputs": files, **ser.affine_to_json(sol)}
    if sol.nonempty:
        ne = adj(A) @ W @ (A @ sol.point - b)
        out["residual"] = wlss.residual(W, A, sol.point, b)
        out["normal_eq_residual"] = float(np.linalg.norm(ne))
    return out


def cmd_verify(args):
    if args.replay:
        dump = ser.load_json(args.replay)
        try:
            ok, err, res = vf.replay(dump)
        except (KeyError, TypeError) as exc:
            raise ser.SerializationError(f"{args.replay}: malformed dump ({exc})") from None
        report = {"replay": args.replay, "suite": dump["suite"], "trial": dump["trial"],
                  "ok": ok, "error": err, "residuals": res}
        return report, ok
    try:
        cfg = vf.VerifyConfig(
            seed=args.seed, trials=args.trials, max_dim=args.max_dim, tol=args.tol,
            scalar=args.scalar, suites=tuple(args.suite) if args.suite else tuple(vf.SUITES),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = vf.run(cfg)
    if not report["ok"]:
        print(f"failed suites: {', '.join(report['failed_suites'])}", file=sys.stderr)
    return report, report["ok"]


# ------------------------------------------------------------------- parser


def _suite_list(text):
    return [s for s in text.split(",") if s]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    S = argparse.SUPPRESS
    common.add_argument("--tol", type=float, default=S, help=f"comparison tolerance (default {CMP_TOL})")
    common.add_argument("--scalar", choices=("real", "complex"), default=S)
    common.add_argument("--seed", type=int, default=S, help="verify: RNG seed (default 0)")
    common.add_argument("--trials", type=int, default=S, help="verify: trials per suite (default 200)")
    common.add_argument("--max-dim", type=int, default=S, help="verify: largest dimension (default 8)")
    common.add_argument("--suite", type=_suite_list, action="extend", default=S,
                        help=f"verify: comma-separated suites from {', '.join(vf.SUITES)}")

    p = argparse.ArgumentParser(prog="mvrel", description=" ".join(__doc__.split("\n\n")[0].split()), parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    ops = {
        "relation": ("compose", "inverse", "adjoint", "parts", "apply", "pinv"),
        "mvproj": ("build", "classify", "greville", "ptak", "decompose", "compress", "continuity"),
        "semiclosed": ("polar", "ando", "conjugate", "quasiaffine", "split", "orthogonalize", "debranges"),
        "wlss": ("solve", "residual"),
    }
    for name, choices in ops.items():
        q = sub.add_parser(name, parents=[common])
        q.add_argument("op", choices=choices)
        q.add_argument("inputs", nargs="*", metavar="FILE")
    v = sub.add_parser("verify", parents=[common], help="run the seeded verification battery")
    v.add_argument("--replay", metavar="DUMP", help="re-run one failure dump")
    return p


DEFAULTS = {"tol": CMP_TOL, "scalar": "real", "seed": 0, "trials": 200, "max_dim": 8, "suite": None}

COMMANDS = {"relation": cmd_relation, "mvproj": cmd_mvproj, "semiclosed": cmd_semiclosed, "wlss": cmd_wlss}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    for k, v in DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    if not hasattr(args, "replay"):
        args.replay = None
    try:
        if args.command == "verify":
            report, ok = cmd_verify(args)
            print(ser.dumps(report))
            return 0 if ok else CHECK_FAILED
        print(ser.dumps(COMMANDS[args.command](args)))
        return 0
    except (UsageError, ser.SerializationError, HypothesisError) as exc:
        print(f"mvrel: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (NumericalInconsistency, AssertionError) as exc:
        print(f"mvrel: check failed: {exc}", file=sys.stderr)
        return CHECK_FAILED
    except ValueError as exc:
        print(f"mvrel: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
