import json
import subprocess
import sys

import numpy as np
import pytest

from topofield import io as fio
from topofield.beltrami import build_beltrami_mode
from topofield.grids import GridSpec3, VectorField3


def run_cli(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "topofield.cli", *args],
                          capture_output=True, text=True, cwd=cwd)


def test_field_file_roundtrip(tmp_path):
    g = GridSpec3.cube(8, 4.0, centered=True)
    b = build_beltrami_mode((1, 0, 0), 1, 1.0, GridSpec3.cube(8, 4.0,
                                                              centered=True))
    path = tmp_path / "f.field"
    fio.write_field(str(path), g, VectorField3.zeros(g), b, {"kind": "t"})
    g2, e2, b2, header = fio.read_field(str(path))
    assert g2 == g
    assert np.allclose(b2.components, b.components)
    assert header["kind"] == "t"


def test_report_roundtrip(tmp_path):
    path = tmp_path / "r.report"
    vals = {"alpha": 1.0 / 3.0, "count": 7}
    fio.write_report(str(path), vals)
    back = fio.read_report(str(path))
    assert back["alpha"] == 1.0 / 3.0  # 17 significant digits round-trip
    assert back["count"] == 7


def test_usage_errors_exit_2(tmp_path):
    assert run_cli("build", "--kind", "wat", "--out", str(tmp_path)
                   ).returncode == 2
    assert run_cli("build", "--kind", "hopfion", "--grid", "8x8x8",
                   "--out", str(tmp_path)).returncode == 2
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "hopfion", "bogus_key": 1}))
    assert run_cli("build", "--config", str(cfg), "--out",
                   str(tmp_path)).returncode == 2


def test_io_errors_exit_3(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "from-file",
                               "input": str(tmp_path / "missing.field")}))
    r = run_cli("diagnose", "--config", str(cfg), "--out", str(tmp_path))
    assert r.returncode == 3


def test_build_diagnose_pipeline(tmp_path):
    out = tmp_path / "run"
    r = run_cli("build", "--kind", "hopfion", "--grid", "16,16,16",
                "--box", "12,12,12", "--out", str(out))
    assert r.returncode == 0, r.stderr
    assert (out / "hopfion.field").exists()
    # the divergence gate is truncation-limited at this resolution
    r = run_cli("diagnose", "--kind", "hopfion", "--grid", "16,16,16",
                "--box", "12,12,12", "--out", str(out), "--tol", "div=0.5")
    assert r.returncode == 0, r.stderr
    rep = fio.read_report(str(out / "diagnostics.report"))
    assert rep["null_dot"] < 1e-10
    assert rep["null_norm"] < 1e-10


def test_build_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        r = run_cli("build", "--kind", "beltrami", "--grid", "8,8,8",
                    "--out", str(d))
        assert r.returncode == 0, r.stderr
    assert (a / "beltrami.field").read_bytes() == \
        (b / "beltrami.field").read_bytes()


def test_diagnose_gate_failure(tmp_path):
    # constant parallel E = B is maximally non-null: the gate must trip
    g = GridSpec3.cube(8, 4.0)
    ones = VectorField3.from_closure(
        g, lambda x, y, z: (np.zeros_like(x), np.zeros_like(x),
                            np.ones_like(x)))
    path = tmp_path / "bad.field"
    fio.write_field(str(path), g, ones, ones, {"kind": "test"})
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "from-file", "input": str(path)}))
    r = run_cli("diagnose", "--config", str(cfg), "--out", str(tmp_path))
    assert r.returncode == 1
    assert "null" in r.stderr
    # the report is still written for post-mortem inspection
    assert (tmp_path / "diagnostics.report").exists()
    # loosening the tolerance clears the gate
    r = run_cli("diagnose", "--config", str(cfg), "--out", str(tmp_path),
                "--tol", "null=10", "--tol", "div=10")
    assert r.returncode == 0, r.stderr


def test_trace_torus_linking(tmp_path):
    out = tmp_path / "tr"
    r = run_cli("trace", "--kind", "torus", "--out", str(out),
                "--seed", "1.5,0,0", "--seed", "1.3,0,0.3")
    assert r.returncode == 0, r.stderr
    rec = json.loads((out / "trace.json").read_text())
    assert (out / "line-0.csv").exists() and (out / "line-1.csv").exists()
    assert len(rec["lines"]) == 2


def test_relax_beltrami_instant(tmp_path):
    out = tmp_path / "rx"
    r = run_cli("relax", "--kind", "beltrami", "--grid", "16,16,16",
                "--out", str(out))
    assert r.returncode == 0, r.stderr
    rep = fio.read_report(str(out / "relax.report"))
    assert rep["ratio_error"] < 1e-9
    assert (out / "relax-trace.csv").exists()
    assert (out / "relaxed.field").exists()


def test_relax_zero_helicity_rejected(tmp_path):
    g = GridSpec3.cube(16, 8.0)
    vp = build_beltrami_mode((1, 0, 0), +1, 1.0, g)
    vm = build_beltrami_mode((1, 0, 0), -1, 1.0, g)
    mix = VectorField3(g, vp.components + vm.components,
                       divergence_free=True)
    path = tmp_path / "zh.field"
    fio.write_field(str(path), g, VectorField3.zeros(g), mix, {"kind": "t"})
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "from-file", "input": str(path)}))
    r = run_cli("relax", "--config", str(cfg), "--out", str(tmp_path))
    assert r.returncode == 1
    assert "helicity" in r.stderr


def test_report_aggregates(tmp_path):
    out = tmp_path / "agg"
    assert run_cli("diagnose", "--kind", "beltrami", "--grid", "8,8,8",
                   "--out", str(out)).returncode == 0
    r = run_cli("report", "--out", str(out))
    assert r.returncode == 0, r.stderr
    summary = json.loads((out / "summary.json").read_text())
    assert "diagnostics" in summary
