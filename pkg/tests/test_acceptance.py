"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line; the lines are printed together
in the terminal summary (see ``conftest.py``) and also directly when pytest
runs with ``-s``.  Battery-backed criteria run the seeded suites from
``mvrel.verify`` at dimensions up to 10.
"""

import contextlib
import subprocess
import sys

import numpy as np
import pytest

from mvrel import decomposition as dc
from mvrel import subspace as sp
from mvrel import verify as vf

MAX_DIM = 10


@pytest.fixture
def criterion(request):
    lines = request.config.__dict__.setdefault("_acceptance_lines", [])

    @contextlib.contextmanager
    def record(number, title):
        detail = []
        try:
            yield detail
        except BaseException as exc:
            line = f"criterion {number:2d} FAIL  {title}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
            lines.append(line)
            print(line)
            raise
        line = f"criterion {number:2d} PASS  {title}" + (f" ({'; '.join(detail)})" if detail else "")
        lines.append(line)
        print(line)

    return record


def battery(*suites, trials=1000, scalar="real"):
    cfg = vf.VerifyConfig(seed=0, trials=trials, max_dim=MAX_DIM, suites=suites, scalar=scalar)
    return vf.run(cfg)["suites"]


def check_suites(reports, detail):
    for tag, rep in reports.items():
        detail.append(f"{tag}: {rep['passed']}/{rep['trials']}, worst {rep['worst_residual']:.1e}")
        assert rep["failed"] == 0, f"{tag} failed {rep['failed']} trials; first: {rep['failures'][0]['error']}"
        assert rep["ok"], f"{tag} coverage missing {rep.get('coverage')}"


def test_c01_structure(criterion):
    with criterion(1, "parts of P_{M,N} and idempotence") as d:
        check_suites(battery("structure"), d)


def test_c02_adjoint(criterion):
    with criterion(2, "adjoint of P_{M,N} is P_{N⊥,M⊥}") as d:
        check_suites(battery("adjoint"), d)


def test_c03_greville_ptak(criterion):
    with criterion(3, "Greville, Pták and complementary pseudo-inverse formulas") as d:
        check_suites(battery("greville", "ptak", "greville_pinv"), d)


def test_c04_inverse_system(criterion):
    with criterion(4, "inverse system XT, TX, XTX") as d:
        check_suites(battery("inverse_system"), d)


def test_c05_decomposition(criterion):
    with criterion(5, "t0 = T_reg = T_m and the projection decomposition") as d:
        check_suites(battery("decomposition"), d)


def test_c06_compression(criterion):
    with criterion(6, "compression criterion in both directions") as d:
        rep = battery("compression")["compression"]
        check_suites({"compression": rep}, d)
        s = rep["stats"]
        d.append(f"satisfying {s['satisfying']}, violating {s['violating']}")
        assert s["satisfying"] >= 100 and s["violating"] >= 100


def test_c07_gamma(criterion):
    with criterion(7, "Douglas factorization, Ando forms and orthogonalization") as d:
        check_suites(battery("gamma"), d)


def test_c08_ando_split(criterion):
    with criterion(8, "Pythagoras identity and minimality") as d:
        check_suites(battery("ando_split", trials=500), d)


def test_c09_debranges(criterion):
    with criterion(9, "de Branges complement and norm bound") as d:
        rep = battery("debranges", trials=550)["debranges"]
        check_suites({"debranges": rep}, d)
        d.append(f"contractions {rep['stats']['contraction']}, isometric {rep['stats']['isometric']}")
        assert rep["stats"]["contraction"] >= 500 and rep["stats"]["isometric"] >= 50


def test_c10_wlss(criterion):
    with criterion(10, "weighted least squares solution set and pseudo-inverse") as d:
        check_suites(battery("wlss"), d)


def test_c11_continuity_asymptotics(criterion):
    with criterion(11, "operator norm blow-up as the angle closes") as d:
        M = sp.span([[1.0, 0.0]])
        worst_cos = worst_norm = 0.0
        for k in range(1, 7):
            t = 10.0 ** -k
            N = sp.span([[np.cos(t), np.sin(t)]])
            rep = dc.continuity_report(M, N)
            assert sp.friedrichs_cosine(M, N) == pytest.approx(abs(np.cos(t)), abs=1e-10)
            # 1/sqrt(1 - cos^2) written without cancellation
            exact = 1.0 / np.sin(t)
            worst_cos = max(worst_cos, abs(rep.cosine - np.cos(t)))
            worst_norm = max(worst_norm, abs(rep.op_norm - exact) / exact)
            assert rep.op_norm == pytest.approx(exact, rel=1e-6)
            assert rep.criterion_ok
        d.append(f"cosine error {worst_cos:.1e}, relative norm error {worst_norm:.1e}")


def test_c12_determinism(criterion):
    with criterion(12, "byte-identical verify reports") as d:
        argv = [sys.executable, "-m", "mvrel.cli", "verify", "--seed", "0"]
        a = subprocess.run(argv, capture_output=True)
        b = subprocess.run(argv, capture_output=True)
        d.append(f"{len(a.stdout)} bytes, exit {a.returncode}")
        assert a.stdout and a.stdout == b.stdout
        assert a.returncode == b.returncode == 0
