import json
from pathlib import Path

import pytest

from mvrel import serialize as ser
from mvrel import verify as vf

GOLDEN = Path(__file__).parent / "golden" / "verify_schema.json"


def schema(obj):
    """Keys and value types of a report, with list items collapsed."""
    if isinstance(obj, dict):
        return {k: schema(v) for k, v in sorted(obj.items())}
    if isinstance(obj, list):
        return [schema(obj[0])] if obj else []
    if obj is None:
        return "null"
    return type(obj).__name__


def small_report(tol):
    cfg = vf.VerifyConfig(trials=2, max_dim=4, tol=tol, suites=("structure", "compression"))
    return vf.run(cfg)


def current_schema():
    return {"passing": schema(small_report(1e-8)), "failing": schema(small_report(1e-30))}


def test_report_schema_matches_golden():
    assert current_schema() == json.loads(GOLDEN.read_text())


def test_suite_names_are_stable():
    assert list(vf.SUITES) == [
        "structure", "adjoint", "greville", "ptak", "greville_pinv", "relation",
        "inverse_system", "decomposition", "compression", "gamma", "semiclosed",
        "ando_split", "debranges", "wlss", "continuity", "angle",
    ]


def test_default_config():
    cfg = vf.VerifyConfig()
    assert (cfg.seed, cfg.trials, cfg.max_dim, cfg.tol, cfg.scalar) == (0, 200, 8, 1e-8, "real")
    assert cfg.suites == tuple(vf.SUITES)


@pytest.mark.parametrize(
    "kwargs", [{"seed": -1}, {"trials": -1}, {"max_dim": 1}, {"scalar": "p-adic"}, {"suites": ("nope",)}]
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        vf.VerifyConfig(**kwargs)


def test_same_seed_same_report():
    cfg = vf.VerifyConfig(trials=3, max_dim=5)
    assert ser.dumps(vf.run(cfg)) == ser.dumps(vf.run(cfg))


def test_suite_order_does_not_matter():
    a = vf.run(vf.VerifyConfig(trials=3, suites=("ptak", "wlss")))
    b = vf.run(vf.VerifyConfig(trials=3, suites=("wlss", "ptak")))
    assert a["suites"]["ptak"] == b["suites"]["ptak"]
    assert a["suites"]["wlss"] == b["suites"]["wlss"]


def test_trials_are_independent_streams():
    cfg = vf.VerifyConfig(trials=5)
    inst4 = vf.run_trial("structure", cfg, 4)[0]
    again = vf.run_trial("structure", vf.VerifyConfig(trials=50), 4)[0]
    assert all((inst4[k] == again[k]).all() for k in inst4)


def test_different_seed_different_instances():
    a = vf.run_trial("wlss", vf.VerifyConfig(seed=1), 0)[0]
    b = vf.run_trial("wlss", vf.VerifyConfig(seed=2), 0)[0]
    assert a["W"].shape != b["W"].shape or not (a["W"] == b["W"]).all()


@pytest.mark.parametrize("tag", list(vf.SUITES))
def test_every_suite_passes_briefly(tag):
    rep = vf.run_suite(tag, vf.VerifyConfig(trials=12, suites=(tag,)))
    assert rep["failed"] == 0, rep["failures"][:1]


@pytest.mark.parametrize("tag", list(vf.SUITES))
def test_failure_dumps_replay_exactly(tag):
    cfg = vf.VerifyConfig(trials=3, tol=1e-30, suites=(tag,))
    rep = vf.run_suite(tag, cfg)
    assert rep["failed"] > 0 and not rep["ok"]
    for dump in rep["failures"]:
        text = ser.dumps(dump)
        ok, err, res = vf.replay(json.loads(text))
        assert not ok
        assert err == dump["error"]
        assert res == dump["residuals"]


def test_replay_rejects_unknown_suite():
    with pytest.raises(ValueError):
        vf.replay({"suite": "nope"})


def test_compression_coverage_reported():
    rep = vf.run_suite("compression", vf.VerifyConfig(trials=100, suites=("compression",)))
    assert rep["coverage"]["target"] == 10
    assert rep["coverage"]["missing"] == [] and rep["ok"]


def test_complex_scalars():
    rep = vf.run(vf.VerifyConfig(trials=4, scalar="complex"))
    assert rep["ok"], rep["failed_suites"]
