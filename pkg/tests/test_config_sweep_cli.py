import csv
import io
import json
import math
import re

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import K_STEP, packet
from ghvortex import cli
from ghvortex.barriers import Delta, Rect, Step
from ghvortex.config import ScenarioConfig, SweepSpec, Tolerances
from ghvortex.errors import InvalidParameter
from ghvortex.figures import (
    DENSE_POINTS, SPARSE_POINTS, canonical_config, emit_figure_dataset, open_grid,
)
from ghvortex.grid import QuadratureGrid
from ghvortex.shifts_numeric import ScatterMode
from ghvortex.sweep import COLUMNS, evaluate_point, rows_to_csv, run_sweep
from ghvortex.validation import CheckResult, ValidationReport


def step_config(start=10.0, end=30.0, n=5, **kw):
    return ScenarioConfig(Step(1.0), packet(K_STEP, 628, ell=1), SweepSpec(start, end, n), **kw)


def read_csv(text):
    lines = text.splitlines()
    header = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    return header, list(csv.DictReader(io.StringIO("\n".join(body))))


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

barriers = st.one_of(
    st.builds(Step, st.floats(0.0, 5.0)),
    st.builds(Delta, st.floats(0.0, 5.0)),
    st.builds(Rect, st.floats(0.0, 5.0), st.floats(0.1, 10.0)),
)


@settings(max_examples=40, deadline=None)
@given(barriers, st.floats(0.5, 5.0), st.floats(50.0, 1000.0), st.floats(0.3, 2.0),
       st.integers(-4, 4), st.floats(0.0, 80.0), st.floats(0.0, 80.0), st.integers(1, 50),
       st.sampled_from(["exact", "taylor"]), st.sampled_from(["full", "simplified"]),
       st.sampled_from([None, 0.01]))
def test_config_round_trip(b, k0, k0d, gamma, ell, a, c, n, amp, kin, band):
    cfg = ScenarioConfig(b, packet(k0, k0d, gamma, ell), SweepSpec(a, c, n),
                         ScatterMode(amp, kin), QuadratureGrid(129, 129, 7.0),
                         "out.csv", Tolerances(singular_band=band))
    again = ScenarioConfig.from_json(cfg.to_json())
    assert again == cfg
    assert again.sha256() == cfg.sha256()


def test_config_states_units_and_degrees():
    d = json.loads(step_config().to_json())
    assert "hbar = m = 1" in d["units"] and "degrees" in d["units"]
    assert d["sweep"] == {"start_deg": 10.0, "end_deg": 30.0, "n_points": 5}


def test_config_load_from_file(tmp_path):
    cfg = step_config()
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    assert ScenarioConfig.load(path) == cfg


@pytest.mark.parametrize("mutate", [
    lambda d: d.pop("barrier"),
    lambda d: d["barrier"].update(kind="well"),
    lambda d: d["barrier"].update(V0=-1.0),
    lambda d: d["packet"].update(gamma=0.0),
    lambda d: d["packet"].update(surprise=1),
    lambda d: d["sweep"].update(n_points=0),
    lambda d: d["sweep"].update(end_deg=90.0),
    lambda d: d["mode"].update(amplitude="magic"),
    lambda d: d["grid"].update(nx=64),
    lambda d: d["tolerances"].update(leakage_limit=-1.0),
])
def test_invalid_configuration_rejected(mutate):
    d = step_config().to_dict()
    mutate(d)
    with pytest.raises(InvalidParameter):
        ScenarioConfig.from_dict(d)


def test_invalid_json_rejected():
    with pytest.raises(InvalidParameter):
        ScenarioConfig.from_json("{not json")
    with pytest.raises(InvalidParameter):
        ScenarioConfig.from_json("[1, 2]")


def test_grazing_guard_checked_before_computation():
    cfg = step_config(89.9999999, 89.9999999, 1)
    with pytest.raises(InvalidParameter):
        cfg.validate()


def test_sweep_angles():
    assert np.array_equal(SweepSpec(5.0).angles_deg(), [5.0])
    assert np.allclose(SweepSpec(10.0, 30.0, 5).angles_deg(), [10, 15, 20, 25, 30])


# --------------------------------------------------------------------------
# sweeps
# --------------------------------------------------------------------------

def test_single_point_sweep_equals_point_evaluation():
    cfg = step_config(20.0, 20.0, 1)
    rows = run_sweep(cfg)
    assert len(rows) == 1
    one = evaluate_point(cfg, 20.0)
    assert rows_to_csv(rows, cfg) == rows_to_csv([one], cfg)


def test_sweep_row_contents():
    cfg = step_config(20.0, 60.0, 3)
    rows = run_sweep(cfg)
    assert [r["theta_deg"] for r in rows] == [20.0, 40.0, 60.0]
    r20, _, r60 = rows
    assert r20["status"] == "ok" and r20["t_present"] and r20["R2"] + r20["T2"] == pytest.approx(1)
    # total reflection: no transmitted channel, |R|^2 = 1
    assert not r60["t_present"] and r60["R2"] == pytest.approx(1.0) and r60["T2"] == 0.0
    assert math.isnan(r60["num_t_Y"]) and r60["status"] == "ok"
    assert r20["ana_r_Y_total"] == pytest.approx(
        r20["ana_r_Y_gaussian"] + r20["ana_r_Y_vortex"] + r20["ana_r_Y_correction"])
    assert r20["num_r_Y"] == pytest.approx(r20["ana_r_Y_total"], rel=0.02)


def test_singular_rows_are_flagged_not_dropped():
    rows = run_sweep(step_config(39.9, 39.9, 1))
    assert len(rows) == 1 and rows[0]["singular"]


def test_per_point_errors_recorded_in_status():
    cfg = step_config(39.8, 39.8, 1, mode=ScatterMode("exact", "full"))
    row = run_sweep(cfg)[0]
    assert "EvanescentLeakage" in row["status"]
    assert math.isfinite(row["num_r_Y"])


def test_csv_format():
    cfg = step_config(10.0, 30.0, 3)
    text = rows_to_csv(run_sweep(cfg), cfg)
    header, rows = read_csv(text)
    assert any(cfg.sha256() in h for h in header)
    assert any("hbar = m = 1" in h for h in header)
    assert list(rows[0].keys()) == list(COLUMNS)
    # 15 significant digits
    digits = re.sub(r"[-.]|e.*", "", rows[0]["ana_r_Y_total"]).lstrip("0")
    assert len(digits) <= 15
    assert float(rows[0]["ana_r_Y_total"]) == pytest.approx(
        run_sweep(cfg)[0]["ana_r_Y_total"], rel=1e-14)


def test_sweep_is_deterministic_across_thread_counts():
    cfg = step_config(5.0, 85.0, 12)
    one = rows_to_csv(run_sweep(cfg, threads=1), cfg)
    many = rows_to_csv(run_sweep(cfg, threads=4), cfg)
    again = rows_to_csv(run_sweep(cfg, threads=3), cfg)
    assert one == many == again


# --------------------------------------------------------------------------
# figure datasets
# --------------------------------------------------------------------------

def test_figure_grid_is_open_interval():
    g = open_grid(30)
    assert g[0] > 0 and g[-1] < 90 and len(g) == 30


@pytest.mark.parametrize("fid", ["4", "7"])
def test_shift_figure_row_counts(fid, tmp_path):
    csv_path, gp_path = emit_figure_dataset(fid, str(tmp_path))
    header, rows = read_csv(open(csv_path).read())
    series = [r["series"] for r in rows]
    assert series.count("analytic") == DENSE_POINTS and series.count("numeric") == SPARSE_POINTS
    thetas = [float(r["theta_deg"]) for r in rows]
    assert 0 < min(thetas) and max(thetas) < 90
    assert "plot" in open(gp_path).read()


def test_figure_4_parameters():
    cfg = canonical_config("4")
    p = cfg.packet
    assert p.E0 / cfg.barrier.V0 == pytest.approx(1.7)
    assert p.k0 * p.delta == pytest.approx(628) and p.gamma == 0.4 and p.ell == 1
    assert cfg.mode == ScatterMode("taylor", "simplified")
    assert canonical_config("7").mode.kinematics == "full"


def test_figure_2a_reflection_real_below_critical_angle(tmp_path):
    csv_path, _ = emit_figure_dataset("2a", str(tmp_path))
    header, rows = read_csv(open(csv_path).read())
    assert len(rows) == DENSE_POINTS
    crit = math.degrees(math.acos(math.sqrt(1 / 1.7)))
    below = [r for r in rows if float(r["theta_deg"]) < crit]
    above = [r for r in rows if float(r["theta_deg"]) > crit]
    assert below and all(float(r["im_R"]) == 0.0 for r in below)
    assert all(float(r["im_T"]) == 0.0 for r in below)
    assert any(abs(float(r["im_R"])) > 0.1 for r in above)


def test_figure_2d_shows_total_transmission(tmp_path):
    csv_path, _ = emit_figure_dataset("2d", str(tmp_path))
    _, rows = read_csv(open(csv_path).read())
    T2 = np.array([float(r["T2"]) for r in rows])
    R2 = np.array([float(r["R2"]) for r in rows])
    assert T2.max() > 0.999
    assert np.allclose(R2 + T2, 1.0, atol=1e-12)


def test_figure_7_differs_from_simplified(tmp_path):
    csv_path, _ = emit_figure_dataset("7", str(tmp_path))
    _, rows = read_csv(open(csv_path).read())
    worst = 0.0
    for r in rows:
        if r["series"] != "analytic" or r["t_present"] != "1" or r["singular"] == "1":
            continue
        for q in ("Y", "xi", "kY", "dkX"):
            full, simp = float(r[f"ana_t_{q}_total"]), float(r[f"simplified_t_{q}"])
            worst = max(worst, abs(full - simp) / max(abs(simp), 1e-4))
    assert worst > 0.05


def test_unknown_figure():
    with pytest.raises(InvalidParameter):
        emit_figure_dataset("3")


# --------------------------------------------------------------------------
# command line
# --------------------------------------------------------------------------

@pytest.fixture
def config_file(tmp_path):
    def make(cfg):
        path = tmp_path / "scenario.json"
        path.write_text(cfg.to_json())
        return str(path)
    return make


def test_cli_single(config_file, tmp_path, capsys):
    path = config_file(step_config(20.0, 20.0, 1))
    assert cli.main(["single", "--config", path]) == 0
    header, rows = read_csv(capsys.readouterr().out)
    assert len(rows) == 1 and rows[0]["status"] == "ok"
    out = tmp_path / "o.csv"
    assert cli.main(["single", "--config", path, "--out", str(out), "--grid", "129x129"]) == 0
    assert read_csv(out.read_text())[1][0]["num_r_Y"] != rows[0]["num_r_Y"]


def test_cli_sweep_threads_byte_identical(config_file, tmp_path):
    path = config_file(step_config(5.0, 60.0, 8))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["sweep", "--config", path, "--out", str(a)]) == 0
    assert cli.main(["sweep", "--config", path, "--out", str(b), "--threads", "4"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cli_mode_overrides(config_file, tmp_path):
    path = config_file(step_config(20.0, 20.0, 1))
    out = tmp_path / "o.csv"
    assert cli.main(["single", "--config", path, "--out", str(out),
                     "--mode", "exact", "--kinematics", "full"]) == 0
    header, _ = read_csv(out.read_text())
    cfg_line = next(h for h in header if h.startswith("# config:"))
    assert '"amplitude":"exact"' in cfg_line and '"kinematics":"full"' in cfg_line


def test_cli_figure(tmp_path, capsys):
    assert cli.main(["figure", "--figure", "2b", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "fig_2b.csv").exists() and (tmp_path / "fig_2b.gp").exists()


@pytest.mark.parametrize("argv", [
    [], ["bogus"], ["single"], ["sweep", "--config", "/nonexistent.json"],
    ["figure", "--figure", "9"], ["validate", "--level", "slow"],
])
def test_cli_usage_errors(argv, capsys):
    assert cli.main(argv) == 1


def test_cli_invalid_config_is_usage_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"barrier": {"kind": "step", "V0": -1}}')
    assert cli.main(["single", "--config", str(path)]) == 1


def test_cli_single_rejects_sweep_config(config_file):
    assert cli.main(["single", "--config", config_file(step_config())]) == 1


def test_cli_numerical_error_exit_code(config_file, capsys):
    path = config_file(step_config(39.8, 39.8, 1))
    assert cli.main(["single", "--config", path, "--mode", "exact"]) == 3
    assert "EvanescentLeakage" in capsys.readouterr().err


def test_cli_validate_exit_codes(monkeypatch, tmp_path, capsys):
    def fake(ok):
        def run(level, progress=None):
            rep = ValidationReport(level)
            rep.checks.append(CheckResult("stub", ok, "detail", 0.0))
            progress(rep.checks[0])
            return rep
        return run

    monkeypatch.setattr(cli, "validate_suite", fake(True))
    assert cli.main(["validate"]) == 0
    monkeypatch.setattr(cli, "validate_suite", fake(False))
    out = tmp_path / "report.txt"
    assert cli.main(["validate", "--out", str(out)]) == 2
    assert "FAIL" in out.read_text()


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "ghvortex", "--help"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and "validate" in res.stdout
