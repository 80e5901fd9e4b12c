import json
import math

import pytest

import qcf

SMALL = {
    "grid": {"n": [16, 16]},
    "model": {"kind": "qc_planar"},
    "hamiltonian": {"couplings": [{"matrix": "sigma_z", "v": 0.4}], "eos": {"kind": "polytropic", "kappa": 0.5}},
    "initial": {"quantum": {"theta": 1.2, "radius": 0.9}, "c": 1.0},
    "integrator": {"dt": 0.01, "steps": 5},
    "snapshots": {"every": 5},
}


def test_version():
    assert qcf.version()


def test_check_config_roundtrip():
    assert qcf.check_config(SMALL)["grid"]["n"] == [16, 16]
    assert qcf.check_config(json.dumps(SMALL))["model"]["kind"] == "qc_planar"


def test_bad_config_raises_with_kind():
    bad = dict(SMALL, surplus=1)
    with pytest.raises(qcf.QcfError) as e:
        qcf.check_config(bad)
    assert e.value.kind == "config-error"
    assert "surplus" in str(e.value)


def test_run_and_read_back(tmp_path):
    r = qcf.run(SMALL, tmp_path)
    assert r["status"] == "completed"
    assert r["steps"] == 5
    t, mass = qcf.series(tmp_path, "mass")
    assert len(t) == 6
    assert all(abs(m - mass[0]) <= 1e-12 * mass[0] for m in mass)
    table = qcf.invariants(tmp_path)
    assert table["t"][-1] == pytest.approx(0.05)
    snap = qcf.read_snapshot(str(tmp_path / "snapshots" / "snap_00000005.bin"))
    assert snap["D"].shape == (256,)
    assert math.isfinite(float(snap["D"].sum()))
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["status"] == "completed"


def test_unknown_quantity(tmp_path):
    qcf.run(dict(SMALL, integrator={"dt": 0.01, "steps": 1}), tmp_path)
    with pytest.raises(qcf.QcfError, match="available"):
        qcf.series(tmp_path, "nope")


def test_verify_algebra():
    ok, log = qcf.verify("algebra")
    assert ok
    assert "pauli_algebra" in log


def test_format_double():
    assert qcf.format_double(0.1) == "0.1"
    assert qcf.format_double(float("nan")) == "nan"
