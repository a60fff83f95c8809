import csv
import json
import math
import subprocess
import sys

import pytest

from conftest import cos_q
from stochzeno.cli import main

BASE = """
m = 100
n_runs = {n_runs}
seed = 5

[hamiltonian]
kind = "rabi"
delta_h = "2.5 kHz"

[initial_state]
basis = 0

[distribution]
atoms = [{{ mu = "2 us", weight = {p1} }}, {{ mu = "{mu2} us", weight = {p2} }}]
"""


def write_config(tmp_path, extra="", mu2=10, p1=0.8, n_runs=300, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(BASE.format(mu2=mu2, p1=p1, p2=round(1 - p1, 12), n_runs=n_runs) + extra)
    return path


def read_csv(path):
    lines = path.read_text().splitlines()
    if lines and lines[0].startswith("#"):
        lines = lines[1:]
    return list(csv.DictReader(lines))


def run_cli(*argv):
    return main([str(a) for a in argv])


DECAY_SWEEP = '\n[sweep]\nvariable = "mu"\nstart = "0 us"\nstop = "25 us"\nstep = "0.25 us"\n'
MU2_SWEEP = '\n[sweep]\nvariable = "mu2"\nstart = "2 us"\nstop = "25 us"\nstep = "1 us"\n'


def test_decay_table(tmp_path):
    cfg = write_config(tmp_path, DECAY_SWEEP)
    assert run_cli("decay", "--config", cfg, "--out", tmp_path) == 0
    rows = read_csv(tmp_path / "decay.csv")
    assert list(rows[0]) == ["mu_us", "q", "P"]
    assert len(rows) == 101
    by_mu = {float(r["mu_us"]): r for r in rows}
    assert float(by_mu[0.0]["q"]) == 1.0 and float(by_mu[0.0]["P"]) == 1.0
    assert float(by_mu[2.0]["P"]) == pytest.approx(cos_q(2e-6) ** 100, rel=1e-12)
    assert float(by_mu[2.0]["P"]) == pytest.approx(0.906, abs=1e-3)
    assert float(by_mu[9.0]["P"]) == pytest.approx(0.14, abs=0.01)


def test_sweep_table(tmp_path):
    cfg = write_config(tmp_path, MU2_SWEEP)
    assert run_cli("sweep", "--config", cfg, "--out", tmp_path) == 0
    rows = read_csv(tmp_path / "sweep.csv")
    assert list(rows[0]) == ["mu2_us", "P_g", "P_a", "ensemble", "D", "zeno_parameter"]
    first = rows[0]
    assert float(first["P_g"]) == pytest.approx(float(first["P_a"]), rel=1e-12)
    assert float(first["P_g"]) == pytest.approx(0.906, abs=1e-3)
    ten = next(r for r in rows if float(r["mu2_us"]) == 10.0)
    assert float(ten["P_g"]) == pytest.approx(0.563, abs=1e-3)
    assert float(ten["P_a"]) == pytest.approx(0.742, abs=1e-3)
    for r in rows:
        assert float(r["P_a"]) >= float(r["P_g"]) - 1e-12


def test_sweep_weight_one_is_flat(tmp_path):
    cfg = write_config(tmp_path, MU2_SWEEP, p1=1.0)
    assert run_cli("sweep", "--config", cfg, "--out", tmp_path) == 0
    rows = read_csv(tmp_path / "sweep.csv")
    values = {(r["P_g"], r["P_a"]) for r in rows}
    assert len(values) == 1


def test_histogram_outputs(tmp_path):
    cfg = write_config(tmp_path)
    assert run_cli("histogram", "--config", cfg, "--out", tmp_path) == 0
    hist = read_csv(tmp_path / "histogram.csv")
    assert list(hist[0]) == ["bin_left", "bin_right", "count", "frequency", "exact_mass",
                             "gaussian_mass", "rate_J"]
    assert sum(int(r["count"]) for r in hist) == 300
    assert sum(float(r["exact_mass"]) for r in hist) == pytest.approx(1.0, abs=1e-10)
    overlay = read_csv(tmp_path / "overlay.csv")
    assert len(overlay) == 101
    meta = json.loads((tmp_path / "histogram_meta.json").read_text())
    assert meta["markers"]["geometric"] == pytest.approx(0.563, abs=1e-3)
    assert meta["markers"]["arithmetic"] == pytest.approx(0.742, abs=1e-3)
    lo, hi = meta["mode_bin"]
    assert lo <= meta["markers"]["geometric"] <= hi
    assert not (lo <= meta["markers"]["arithmetic"] <= hi)
    assert len(meta["fingerprint"]) == 64


def test_histogram_zeno_markers_share_a_bin(tmp_path):
    cfg = write_config(tmp_path, mu2=2)
    assert run_cli("histogram", "--config", cfg, "--out", tmp_path) == 0
    hist = read_csv(tmp_path / "histogram.csv")
    occupied = [r for r in hist if int(r["count"]) > 0]
    assert len(occupied) == 1
    meta = json.loads((tmp_path / "histogram_meta.json").read_text())
    lo, hi = float(occupied[0]["bin_left"]), float(occupied[0]["bin_right"])
    for value in meta["markers"].values():
        assert lo <= value <= hi


def test_histogram_degenerate_law_exit_3(tmp_path):
    # a full Rabi period apart: distinct intervals with identical q
    period_us = 1e6 / 5000.0
    cfg = write_config(tmp_path, mu2=2 + period_us)
    assert run_cli("histogram", "--config", cfg, "--out", tmp_path) == 3


def test_histogram_zero_hamiltonian_exit_3(tmp_path):
    path = tmp_path / "zero.toml"
    path.write_text("""
n_runs = 10
[hamiltonian]
kind = "matrix"
units = "kHz"
matrix = [[0, 0], [0, 0]]
[initial_state]
basis = 0
[distribution]
atoms = [{ mu = "1 us", weight = 0.5 }, { mu = "3 us", weight = 0.5 }]
""")
    assert run_cli("histogram", "--config", path, "--out", tmp_path) == 3
    assert run_cli("analyze", "--config", path, "--out", tmp_path) == 0
    report = json.loads((tmp_path / "analyze.json").read_text())
    for key in ("geometric", "arithmetic", "ensemble"):
        assert report["statistics"][key] == 1.0


def test_analyze_bimodal_2_10(tmp_path):
    cfg = write_config(tmp_path)
    assert run_cli("analyze", "--config", cfg, "--out", tmp_path) == 0
    report = json.loads((tmp_path / "analyze.json").read_text())
    assert report["schema_version"] == 1
    assert report["zeno_regime"] == "outside"
    assert report["delta_q_exact"] == pytest.approx(0.2755, abs=5e-5)
    assert report["delta_q_fourth_order"] == pytest.approx(0.449, abs=5e-4)
    assert report["statistics"]["discrepancy"] == pytest.approx(0.2408, abs=5e-5)


def test_analyze_deep_zeno(tmp_path):
    cfg = write_config(tmp_path, mu2=2.1, p1=0.5)
    path = cfg.read_text().replace('mu = "2 us"', 'mu = "0.2 us"').replace('"2.1 us"', '"0.21 us"')
    cfg.write_text(path)
    assert run_cli("analyze", "--config", cfg, "--out", tmp_path) == 0
    report = json.loads((tmp_path / "analyze.json").read_text())
    assert report["zeno_regime"] == "strict"
    assert report["statistics"]["discrepancy"] < 1e-3


def test_analyze_round_trip(tmp_path):
    cfg = write_config(tmp_path)
    first, second = tmp_path / "a", tmp_path / "b"
    assert run_cli("analyze", "--config", cfg, "--out", first, "--no-header-timestamp") == 0
    assert run_cli("analyze", "--config", first / "analyze.json", "--out", second,
                   "--no-header-timestamp") == 0
    a = json.loads((first / "analyze.json").read_text())
    b = json.loads((second / "analyze.json").read_text())
    assert a == b


def test_histogram_round_trip_via_report(tmp_path):
    cfg = write_config(tmp_path)
    assert run_cli("analyze", "--config", cfg, "--out", tmp_path / "r") == 0
    for src, out in ((cfg, "a"), (tmp_path / "r" / "analyze.json", "b")):
        assert run_cli("histogram", "--config", src, "--out", tmp_path / out,
                       "--no-header-timestamp") == 0
    for name in ("histogram.csv", "overlay.csv", "histogram_meta.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_rerun_byte_identical(tmp_path):
    cfg = write_config(tmp_path)
    for out in ("a", "b"):
        assert run_cli("histogram", "--config", cfg, "--out", tmp_path / out,
                       "--no-header-timestamp", "--threads", 2 if out == "b" else 1) == 0
    for name in ("histogram.csv", "overlay.csv", "histogram_meta.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_timestamp_header_by_default(tmp_path):
    cfg = write_config(tmp_path, DECAY_SWEEP)
    assert run_cli("decay", "--config", cfg, "--out", tmp_path) == 0
    assert (tmp_path / "decay.csv").read_text().startswith("# generated ")
    assert run_cli("decay", "--config", cfg, "--out", tmp_path, "--no-header-timestamp") == 0
    assert (tmp_path / "decay.csv").read_text().startswith("mu_us,q,P\n")


def test_seed_override_changes_histogram(tmp_path):
    cfg = write_config(tmp_path)
    assert run_cli("histogram", "--config", cfg, "--out", tmp_path / "a") == 0
    assert run_cli("histogram", "--config", cfg, "--out", tmp_path / "b", "--seed", 6) == 0
    a = json.loads((tmp_path / "a" / "histogram_meta.json").read_text())
    b = json.loads((tmp_path / "b" / "histogram_meta.json").read_text())
    assert a["fingerprint"] != b["fingerprint"]
    assert b["seed"] == 6


def test_json_format(tmp_path):
    cfg = write_config(tmp_path, DECAY_SWEEP)
    assert run_cli("decay", "--config", cfg, "--out", tmp_path, "--format", "json") == 0
    doc = json.loads((tmp_path / "decay.json").read_text())
    assert doc["columns"] == ["mu_us", "q", "P"]
    assert doc["rows"][0] == [0.0, 1.0, 1.0]


def test_full_precision_floats(tmp_path):
    cfg = write_config(tmp_path, DECAY_SWEEP)
    run_cli("decay", "--config", cfg, "--out", tmp_path, "--no-header-timestamp")
    from stochzeno.cli import decay_rows
    from stochzeno.config import load_config
    expected = decay_rows(load_config(cfg))
    for row, (mu, q, P) in zip(read_csv(tmp_path / "decay.csv"), expected):
        assert (float(row["mu_us"]), float(row["q"]), float(row["P"])) == (mu, q, P)


@pytest.mark.parametrize("extra,field", [
    ("\nbogus = 1\n", "distribution"),
    ('\n[zeno]\nstrict = 0.01\nwhatever = 2\n', "zeno"),
])
def test_unknown_keys_exit_2(tmp_path, capsys, extra, field):
    cfg = write_config(tmp_path, extra)
    assert run_cli("analyze", "--config", cfg, "--out", tmp_path) == 2
    assert field in capsys.readouterr().err


def test_unknown_root_key_exit_2(tmp_path, capsys):
    cfg = write_config(tmp_path)
    cfg.write_text("bogus = 1\n" + cfg.read_text())
    assert run_cli("analyze", "--config", cfg, "--out", tmp_path) == 2
    assert "<root>" in capsys.readouterr().err


def test_missing_units_exit_2(tmp_path, capsys):
    cfg = write_config(tmp_path)
    cfg.write_text(cfg.read_text().replace('"2.5 kHz"', '"2.5"'))
    assert run_cli("analyze", "--config", cfg, "--out", tmp_path) == 2
    assert "hamiltonian.delta_h" in capsys.readouterr().err
    cfg.write_text(cfg.read_text().replace('"2.5"', "2.5"))
    assert run_cli("analyze", "--config", cfg, "--out", tmp_path) == 2


def test_config_errors_exit_2(tmp_path):
    assert run_cli("analyze", "--config", tmp_path / "missing.toml") == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("m = [\n")
    assert run_cli("analyze", "--config", bad) == 2
    cfg = write_config(tmp_path)
    assert run_cli("decay", "--config", cfg, "--out", tmp_path) == 2  # no sweep
    assert run_cli("analyze", "--config", cfg, "--threads", 0) == 2
    assert run_cli("analyze", "--config", cfg, "--seed", -3) == 2


def test_module_entry_point(tmp_path):
    cfg = write_config(tmp_path)
    proc = subprocess.run([sys.executable, "-m", "stochzeno", "analyze", "--config", str(cfg),
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "analyze.json" in proc.stdout
