import json
import subprocess
import sys

import numpy as np
import pytest

from mvrel import cli


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def graph(A):
    """Relation JSON for the graph of the matrix A."""
    m, n = A.shape
    rows = np.hstack([np.eye(n), A.T]).tolist()
    return {"dim_in": n, "dim_out": m, "scalar": "real", "generators": rows}


def subspace(*rows):
    return {"ambient": len(rows[0]), "scalar": "real", "generators": [list(r) for r in rows]}


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def as_matrix(rel):
    """Recover the matrix of an operator relation from its generators."""
    G = np.array(rel["generators"], dtype=float)
    n = rel["dim_in"]
    X, Y = G[:, :n], G[:, n:]
    return np.linalg.lstsq(X, Y, rcond=None)[0].T


def test_compose_is_matrix_product(tmp_path, capsys):
    rng = np.random.default_rng(1)
    A, B = rng.standard_normal((3, 4)), rng.standard_normal((4, 2))
    code, out, _ = run(capsys, "relation", "compose", write(tmp_path, "a.json", graph(A)), write(tmp_path, "b.json", graph(B)))
    assert code == 0
    rel = out["relation"]
    assert rel["is_operator"] and rel["parts"]["mul"] == 0
    np.testing.assert_allclose(as_matrix(rel), A @ B, atol=1e-10)


def test_inverse_swaps_parts(tmp_path, capsys):
    A = np.array([[1.0, 0.0], [0.0, 0.0]])
    code, out, _ = run(capsys, "relation", "inverse", write(tmp_path, "a.json", graph(A)))
    assert code == 0
    assert out["relation"]["parts"] == {"dom": 1, "ran": 2, "ker": 0, "mul": 1}
    assert not out["relation"]["is_operator"]


def test_parts_and_apply(tmp_path, capsys):
    A = np.array([[1.0, 2.0], [2.0, 4.0]])
    f = write(tmp_path, "a.json", graph(A))
    code, out, _ = run(capsys, "relation", "parts", f)
    assert code == 0 and out["dims"] == {"dom": 2, "ran": 1, "ker": 1, "mul": 0}
    code, out, _ = run(capsys, "relation", "apply", f, write(tmp_path, "x.json", {"vector": [1.0, 1.0]}))
    assert code == 0 and out["image"]["nonempty"]
    np.testing.assert_allclose(out["image"]["point"], [3.0, 6.0])
    assert out["image"]["directions"] == []


def test_pinv_matches_numpy(tmp_path, capsys):
    A = np.array([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0]])
    code, out, _ = run(capsys, "relation", "pinv", write(tmp_path, "a.json", {"matrix": A.tolist()}))
    assert code == 0
    np.testing.assert_allclose(out["pinv"], np.linalg.pinv(A), atol=1e-12)


def test_mvproj_build_and_classify(tmp_path, capsys):
    # dom = M + N, ran = M, ker = N, mul = M ∩ N
    m = write(tmp_path, "m.json", subspace([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]))
    n = write(tmp_path, "n.json", subspace([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]))
    code, out, _ = run(capsys, "mvproj", "build", m, n)
    assert code == 0
    rel = out["relation"]
    assert rel["parts"] == {"dom": 3, "ran": 2, "ker": 2, "mul": 1}
    r = write(tmp_path, "p.json", rel)
    code, out, _ = run(capsys, "mvproj", "classify", r)
    assert code == 0 and out["kind"] == "mv_projection"


def test_mvproj_continuity(tmp_path, capsys):
    t = 0.3
    m = write(tmp_path, "m.json", subspace([1.0, 0.0]))
    n = write(tmp_path, "n.json", subspace([np.cos(t), np.sin(t)]))
    code, out, _ = run(capsys, "mvproj", "continuity", m, n)
    assert code == 0
    assert out["op_norm"] == pytest.approx(1 / np.sin(t), rel=1e-8)
    assert out["criterion_ok"]


def test_mvproj_compress(tmp_path, capsys):
    f = write(tmp_path, "f.json", np.eye(2).tolist())
    m = write(tmp_path, "m.json", subspace([1.0, 0.0]))
    n = write(tmp_path, "n.json", subspace([0.0, 1.0]))
    code, out, _ = run(capsys, "mvproj", "compress", f, m, n)
    assert code == 0 and out["is_projection"]
    assert set(out["conditions"]) == {"mul_in_ker", "domain_split", "range_condition"}


def test_semiclosed_polar_residuals(tmp_path, capsys):
    rng = np.random.default_rng(2)
    pair = {"A": rng.standard_normal((3, 2)).tolist(), "B": rng.standard_normal((3, 3)).tolist()}
    code, out, _ = run(capsys, "semiclosed", "polar", write(tmp_path, "p.json", pair))
    assert code == 0
    G = np.array(out["gamma"])
    assert np.allclose(G, G.T) and np.linalg.eigvalsh(G).min() > -1e-12
    assert max(out["residuals"].values()) < 1e-10


def test_semiclosed_debranges(tmp_path, capsys):
    T = (0.5 * np.eye(2)).tolist()
    code, out, _ = run(capsys, "semiclosed", "debranges", write(tmp_path, "t.json", T))
    assert code == 0 and out["norm_bound_ok"]
    assert out["norm"] <= 1 + 1e-12


def test_wlss_solve(tmp_path, capsys):
    W = np.diag([1.0, 2.0, 0.0])
    A = np.array([[1.0], [1.0], [5.0]])
    b = [1.0, 4.0, 7.0]
    prob = write(tmp_path, "w.json", {"W": W.tolist(), "A": A.tolist(), "b": b})
    code, out, _ = run(capsys, "wlss", "solve", prob)
    assert code == 0 and out["nonempty"]
    # minimise (x-1)^2 + 2(x-4)^2
    assert out["point"][0] == pytest.approx(3.0)
    assert out["normal_eq_residual"] < 1e-10
    x = write(tmp_path, "x.json", [3.0])
    code, out2, _ = run(capsys, "wlss", "residual", prob, x)
    assert code == 0 and out2["residual"] == pytest.approx(out["residual"])


def test_verify_subset_passes(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "ptak,greville", "--trials", "5")
    assert code == 0 and out["ok"]
    assert set(out["suites"]) == {"greville", "ptak"}


def test_global_flags_before_subcommand(capsys):
    code, out, _ = run(capsys, "--trials", "2", "--seed", "7", "verify", "--suite", "angle")
    assert code == 0 and out["config"]["trials"] == 2 and out["config"]["seed"] == 7


def test_verify_failure_exit_and_replay(tmp_path, capsys):
    code, out, err = run(capsys, "verify", "--suite", "structure", "--trials", "2", "--tol", "1e-30")
    assert code == 1 and "failed suites: structure" in err
    dump = out["suites"]["structure"]["failures"][0]
    d = write(tmp_path, "dump.json", dump)
    code, rep, _ = run(capsys, "verify", "--replay", d)
    assert code == 1 and not rep["ok"]
    assert rep["residuals"] == dump["residuals"]


@pytest.mark.parametrize(
    "argv",
    [
        ["relation", "compose", "ONE"],
        ["verify", "--trials", "-3"],
        ["verify", "--suite", "nosuch"],
        ["relation", "inverse", "MISSING"],
        ["wlss", "solve", "BAD"],
        ["mvproj", "build", "M3", "N2"],
    ],
)
def test_usage_errors_exit_2(tmp_path, capsys, argv):
    files = {
        "ONE": write(tmp_path, "one.json", graph(np.eye(2))),
        "MISSING": str(tmp_path / "missing.json"),
        "BAD": write(tmp_path, "bad.json", {"W": [[1.0]], "A": [[1.0], [2.0]], "b": [1.0]}),
        "M3": write(tmp_path, "m3.json", subspace([1.0, 0.0, 0.0])),
        "N2": write(tmp_path, "n2.json", subspace([1.0, 0.0])),
    }
    code, out, err = run(capsys, *[files.get(a, a) for a in argv])
    assert code == 2 and out is None
    assert err.startswith("mvrel: error:")


def test_non_finite_input_rejected(tmp_path, capsys):
    p = tmp_path / "nan.json"
    p.write_text('{"matrix": [[1.0, NaN]]}')
    code, _, err = run(capsys, "relation", "pinv", str(p))
    assert code == 2 and "nan.json" in err


def test_argparse_rejects_unknown_op():
    with pytest.raises(SystemExit) as exc:
        cli.main(["relation", "frobnicate"])
    assert exc.value.code == 2


def test_subprocess_output_is_byte_identical():
    argv = [sys.executable, "-m", "mvrel.cli", "verify", "--trials", "3", "--max-dim", "5"]
    a = subprocess.run(argv, capture_output=True, check=True)
    b = subprocess.run(argv, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout
