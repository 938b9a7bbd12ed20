import json
import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biphoton import PathLabel, cross_correlation, slit_wavepacket, wavepacket_negativity
from biphoton.cli import main
from biphoton.experiments import (SCENARIOS, Scenario, ScenarioError, SweepAxis, builtin,
                                  observables, pmap, run_scenario, worker_count)
from biphoton.params import ConfigError
from biphoton.results import EmitError, ResultSet, emit, parse_csv, render, timestamp, to_csv

GOLDEN = Path(__file__).parent / "data" / "table1_golden.csv"

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


# ----------------------------------------------------------------- results

@given(st.lists(finite, min_size=1, max_size=30), st.lists(finite, min_size=1, max_size=30))
def test_csv_round_trip(a, b):
    n = min(len(a), len(b))
    rs = ResultSet({"a_mm": a[:n], "b": b[:n]}, {"scenario": "custom", "note": "x"})
    back = parse_csv(to_csv(rs))
    assert back.names == rs.names
    for k in rs.names:
        np.testing.assert_array_equal(back.columns[k], rs.columns[k])
    assert back.metadata == rs.metadata


def test_csv_keeps_nan():
    rs = ResultSet({"x": [1.0, 2.0], "y": [math.nan, 3.0]})
    assert np.isnan(parse_csv(to_csv(rs)).columns["y"][0])


def test_result_set_validation():
    with pytest.raises(ValueError):
        ResultSet({"x": [1, 2], "y": [1]})
    for fmt in ("csv", "json", "svg"):
        with pytest.raises(ValueError):
            render(ResultSet({}), fmt)
        with pytest.raises(ValueError):
            render(ResultSet({"x": [], "y": []}), fmt)
    with pytest.raises(ValueError):
        render(ResultSet({"x": [1.0]}), "xml")
    with pytest.raises(ValueError):
        render(ResultSet({"x": [1.0]}), "svg")


def test_json_and_svg(tmp_path):
    rs = ResultSet({"x": [0.0, 1.0, 2.0], "y": [1.0, math.nan, 0.5], "z": [0, 1, 4]},
                   {"scenario": "custom"})
    data = json.loads(render(rs, "json"))
    assert data["columns"]["y"] == [1.0, None, 0.5]
    assert data["metadata"]["scenario"] == "custom"
    svg = render(rs, "svg")
    assert svg.startswith("<svg") and svg.count("<polyline") == 3  # y breaks at the NaN
    out = emit(rs, "svg", tmp_path / "sub" / "p.svg")
    assert out.read_text() == svg


def test_emit_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(EmitError):
        emit(ResultSet({"x": [1.0]}), "csv", blocker / "out.csv")


def test_timestamp_honours_source_date_epoch(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "86400")
    assert timestamp() == "1970-01-02T00:00:00+00:00"


# ----------------------------------------------------------------- scenarios

def test_sweep_axis():
    ax = SweepAxis("z_tau", 0.0, 0.1, 5)
    assert ax.header == "z_tau_mm" and len(ax.values()) == 5
    with pytest.raises(ConfigError):
        SweepAxis("colour", 0, 1, 3)
    with pytest.raises(ConfigError):
        SweepAxis("z", 0, 1, 0)
    with pytest.raises(ConfigError):
        builtin("fig99")


def test_worker_count(monkeypatch):
    monkeypatch.setenv("BIPHOTON_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("BIPHOTON_THREADS", "zero")
    with pytest.raises(ConfigError):
        worker_count()


@pytest.mark.parametrize("threads", ["1", "4"])
def test_pmap_order(monkeypatch, threads):
    monkeypatch.setenv("BIPHOTON_THREADS", threads)
    assert pmap(lambda x: x * x, range(20)) == [x * x for x in range(20)]


@pytest.mark.parametrize("sid", SCENARIOS)
def test_every_scenario_runs(sid):
    start = time.perf_counter()
    rs = run_scenario(builtin(sid))
    assert time.perf_counter() - start < 10
    assert len(rs) > 0 and rs.metadata["scenario"] == sid
    assert "params" in rs.metadata and "geometry" in rs.metadata


def test_fig4_columns():
    rs = run_scenario(builtin("fig4"))
    assert rs.names == ["beta_um", "e_n", "zeta_rad"]
    assert "note" in rs.metadata
    assert np.all(np.diff(rs.columns["e_n"]) > 0)


def test_table1_schema_matches_golden():
    rs = run_scenario(builtin("table1"))
    golden = parse_csv(GOLDEN.read_text())
    assert rs.names == ["r_mm", "beta1_um", "gouy_diff_rad", "e_n"] == golden.names
    np.testing.assert_array_equal(rs.columns["beta1_um"], [10, 15, 20, 30, 36, 40, 45, 50])
    for k in golden.names:
        np.testing.assert_allclose(rs.columns[k], golden.columns[k], rtol=1e-9, equal_nan=True)
    assert {k for k in golden.metadata if k != "timestamp"} <= set(rs.metadata)


def test_custom_single_row_equals_direct_calls(table_source, table_geometry):
    rs = run_scenario(Scenario("custom", table_source, table_geometry))
    assert len(rs) == 1
    direct = observables(table_source, table_geometry)
    uu = slit_wavepacket(table_source, table_geometry, PathLabel.UU)
    assert rs.row(0)["e_n"] == direct["e_n"] == wavepacket_negativity(uu)
    assert rs.row(0)["rho_uu"] == cross_correlation(uu).rho


def test_custom_sweep(table_source, table_geometry):
    rs = run_scenario(Scenario("custom", table_source, table_geometry,
                               SweepAxis("beta1", 10e-6, 50e-6, 5)))
    np.testing.assert_allclose(rs.columns["beta1_um"], [10, 20, 30, 40, 50])
    assert len(rs) == 5


def test_scenario_errors_carry_context(table_source, table_geometry):
    from dataclasses import replace
    s = Scenario("table1", table_source, replace(table_geometry, z_tau=1e-9))
    with pytest.raises(ScenarioError, match="table1"):
        run_scenario(s)


# ----------------------------------------------------------------- CLI

def run_cli(args, **env):
    full = {**os.environ, **env}
    return subprocess.run([sys.executable, "-m", "biphoton", *args], capture_output=True,
                          text=True, env=full, timeout=120)


@pytest.mark.parametrize("verb", ["gouy", "negativity", "correlations", "table1"])
def test_verbs(verb, capsys):
    assert main([verb]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# ")


@pytest.mark.parametrize("verb", ["pattern", "visibility"])
def test_pattern_verbs(verb, capsys):
    assert main([verb, "--grid", "101", "--normalization", "unit"]) == 0
    lines = [ln for ln in capsys.readouterr().out.splitlines() if not ln.startswith("#")]
    assert len(lines) == 102


def test_sweep_verb(capsys):
    assert main(["sweep", "--var", "z_tau", "--start", "10mm", "--stop", "70mm", "--num", "4"]) == 0
    assert "z_tau_mm" in capsys.readouterr().out
    assert main(["sweep", "--var", "colour", "--start", "0", "--stop", "1"]) == 2


def test_table1_overrides(capsys):
    assert main(["table1", "--n", "-2", "--target", "0.12mm"]) == 0
    rows = parse_csv(capsys.readouterr().out)
    assert np.all(rows.columns["r_mm"] > 0)


def test_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"nonsense": 1}))
    assert main(["gouy", "--config", str(cfg)]) == 2
    assert main(["pattern", "--grid", "1"]) == 2
    blocker = tmp_path / "f"
    blocker.write_text("")
    assert main(["gouy", "--out", str(blocker / "x.csv")]) == 4
    assert main(["table1", "--n", "3"]) == 3
    far = tmp_path / "far.json"
    far.write_text(json.dumps({"z_tau": "1e-12"}))
    assert main(["table1", "--config", str(far)]) == 3


def test_formats(tmp_path):
    for fmt in ("csv", "json", "svg"):
        out = tmp_path / f"t.{fmt}"
        assert main(["scenario", "fig2-top", "--format", fmt, "--out", str(out)]) == 0
        assert out.stat().st_size > 0


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"sigma": "11.4um", "beta1": "50um", "beta2": "5um"}))
    assert main(["scenario", "custom", "--config", str(cfg)]) == 0
    assert '"beta1": 5e-05' in capsys.readouterr().out


def test_scenario_determinism_in_subprocess():
    a = run_cli(["scenario", "table1"], SOURCE_DATE_EPOCH="0")
    b = run_cli(["scenario", "table1"], SOURCE_DATE_EPOCH="0", BIPHOTON_THREADS="1")
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_version():
    r = run_cli(["--version"])
    assert r.returncode == 0 and "0.1.0" in r.stdout
