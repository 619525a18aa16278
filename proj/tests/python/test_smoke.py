import json
import math
import os
import subprocess

import pytest

import l2twist

SMYTH2 = 3 * math.sqrt(3) / (4 * math.pi) * 0.7813024128964862  # L(chi_-3, 2)


def circle(**extra):
    job = {
        "group": {"kind": "abelian", "rank": 1},
        "ranks": [1, 1],
        "boundaries": [{"rows": 1, "cols": 1, "entries": [["z-1"]]}],
    }
    job.update(extra)
    return job


def test_exact_mahler_golden_ratio():
    r = l2twist.mahler("z^2-z-1")
    assert r["method"] == "exact-univariate"
    assert r["value"] == pytest.approx(math.log((1 + math.sqrt(5)) / 2), abs=1e-12)


def test_quadrature_matches_smyth():
    r = l2twist.mahler("1+x+y", method="quadrature", quadrature_n=512)
    assert r["value"] == pytest.approx(SMYTH2, abs=1e-4)


def test_lead_uses_last_coordinate_first():
    assert l2twist.lead("x+2y^2") == 2
    assert l2twist.canonical_polynomial("2*z - 1") == l2twist.mahler("2z-1")["polynomial"]


def test_fkdet_zero_determinant():
    job = {"group": {"kind": "abelian", "rank": 1}, "matrix": {"rows": 1, "cols": 1, "entries": [["0"]]}}
    assert l2twist.fkdet(job)["value"] == -math.inf


def test_circle_torsion_curve():
    ts = [0.5, 1.0, 2.0, 3.0]
    curve = l2twist.torsion(circle(), t=ts)
    rho = [p["rho"] for p in curve["points"]]
    assert rho == pytest.approx([math.log(max(t, 1.0)) for t in ts], abs=1e-12)
    assert l2twist.degree(circle())["deg"] == pytest.approx(1.0, abs=1e-9)


def test_invalid_input_raises():
    with pytest.raises(ValueError):
        l2twist.mahler("1+")
    with pytest.raises(l2twist.DimensionMismatch):
        l2twist.fkdet({"group": {"kind": "abelian", "rank": 1}, "matrix": {"rows": 2, "cols": 1, "entries": [["1"]]}})


@pytest.mark.skipif("L2TWIST_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_agrees_with_module(tmp_path):
    job = tmp_path / "circle.json"
    job.write_text(json.dumps(circle(t=[2.0])))
    out = subprocess.run([os.environ["L2TWIST_CLI"], "torsion", "-i", str(job)],
                         capture_output=True, text=True, check=True)
    cli = json.loads(out.stdout)["points"][0]["rho"]
    assert cli == pytest.approx(l2twist.torsion(circle(), t=[2.0])["points"][0]["rho"], abs=0)
