"""End-to-end CLI checks driven through subprocess."""

import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("RSO2STAT_CLI")
SCENARIOS = os.environ.get("RSO2STAT_SCENARIOS")

pytestmark = pytest.mark.skipif(CLI is None, reason="RSO2STAT_CLI not set")


def run(*args, check=False):
    return subprocess.run([CLI, *args], capture_output=True, text=True, check=check)


@pytest.fixture()
def session_files(tmp_path):
    import rso2stat as rs

    pre = rs.PeriodSpec(mean=17.0, sd=3.0, n_points=70)
    post = rs.PeriodSpec(mean=23.0, sd=3.0, n_points=90)
    session, _ = rs.generate_session(pre, post, rs.ResidualSpec(source_length=400), 15.0, 1800.0,
                                     1, rs.RngStream(13), "demo")
    rows = ["time_s,rso2"]
    for seg in (session.pre, session.post):
        rows += [f"{t},{v}" for t, v in zip(seg.times, seg.values)]
    csv = tmp_path / "session.csv"
    csv.write_text("\n".join(rows) + "\n")
    meta = tmp_path / "meta.json"
    meta.write_text(json.dumps({
        "subject_id": "demo",
        "transfusion_start_s": session.window.start_s,
        "transfusion_end_s": session.window.end_s,
        "detection_limit": 15.0,
    }))
    return csv, meta


def test_version_exits_zero():
    result = run("version")
    assert result.returncode == 0
    assert "rso2stat" in result.stdout


def test_usage_error_is_exit_2():
    assert run("analyze").returncode == 2
    assert run("bogus-subcommand").returncode == 2


def test_validate(tmp_path):
    good = tmp_path / "good.toml"
    good.write_text("M = 10\nG = 200\n[smoother]\nmax_interior_knots = 30\n")
    assert run("validate", "--config", str(good)).returncode == 0

    bad = tmp_path / "bad.toml"
    bad.write_text("M = 1\n")
    result = run("validate", "--config", str(bad))
    assert result.returncode == 2
    assert "'M'" in result.stderr

    malformed = tmp_path / "broken.toml"
    malformed.write_text("M = \n")
    result = run("validate", "--config", str(malformed))
    assert result.returncode == 2
    assert "line 1" in result.stderr


def test_analyze_end_to_end(tmp_path, session_files):
    csv, meta = session_files
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"M": 4, "M_test": 3, "G": 150, "B_boot": 60}))
    out = tmp_path / "out"
    result = run("analyze", "--session", str(csv), "--meta", str(meta), "--config", str(cfg),
                 "--seed", "21", "--out", str(out))
    assert result.returncode == 0

    report = json.loads((out / "report.json").read_text())
    record = report["sessions"][0]
    assert record["subject_id"] == "demo"
    assert record["mauc"]["delta"] > 2.0
    assert record["mauc"]["p_value"] < 0.1
    assert (out / "report.csv").read_text().startswith("subject_id,")
    assert (out / "curve_demo.csv").exists()

    # rerun with the same seed: byte-identical report
    out2 = tmp_path / "out2"
    run("analyze", "--session", str(csv), "--meta", str(meta), "--config", str(cfg),
        "--seed", "21", "--out", str(out2), check=True)
    assert (out / "report.json").read_bytes() == (out2 / "report.json").read_bytes()


def test_analyze_all_sessions_failing_is_exit_1(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("time_s,rso2\n0,zz\n")
    meta = tmp_path / "meta.json"
    meta.write_text(json.dumps({"subject_id": "x", "transfusion_start_s": 1,
                                "transfusion_end_s": 2}))
    out = tmp_path / "out"
    result = run("analyze", "--session", str(bad), "--meta", str(meta), "--out", str(out))
    assert result.returncode == 1
    report = json.loads((out / "report.json").read_text())
    assert "error" in report["sessions"][0]


@pytest.mark.skipif(SCENARIOS is None, reason="RSO2STAT_SCENARIOS not set")
def test_simulate_bundled_scenario_shape(tmp_path):
    # run the bundled table1 scenario at a reduced replication count
    doc_path = Path(SCENARIOS) / "table1.toml"
    text = doc_path.read_text().replace("n_reps = 500", "n_reps = 4")
    small = tmp_path / "table1_small.toml"
    small.write_text(text)
    out = tmp_path / "sim"
    result = run("simulate", "--scenario", str(small), "--out", str(out))
    assert result.returncode == 0
    lines = (out / "table1.csv").read_text().strip().splitlines()
    assert len(lines) == 1 + 9  # header + 3 cases x 3 rows
    summary = json.loads((out / "table1_summary.json").read_text())
    assert summary["scenario"]["kind"] == "table1"


def test_simulate_missing_scenario_is_exit_2(tmp_path):
    assert run("simulate", "--scenario", str(tmp_path / "nope.toml"),
               "--out", str(tmp_path)).returncode == 2
