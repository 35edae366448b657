"""End-to-end checks of the console entry points via main(argv)."""

import csv
import json

import numpy as np
import pytest

from multivital.cli import main
from multivital.io import read_trace_table

RATE = 250.0  # Hz, synthetic accelerometer rate


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    """A small simulated cube plus the config that produced it."""
    root = tmp_path_factory.mktemp("cli")
    doc = {
        "chirp": {
            "fc_hz": 77.0e9,
            "prt_s": 70.0e-6,
            "t_frame_s": 0.05,
            "n_adc": 256,
            "fs_hz": 5.0e6,
            "k_chirp_hz_per_s": 65.998e12,
            "n_frames": 16,
        },
        "geometry": "ti-cascade",
        "scene": {
            "points": [{
                "position_m": [0.0, 0.5, 0.0],
                "motion": {
                    "kind": "sinusoid",
                    "direction": [0.0, 1.0, 0.0],
                    "amplitude_m": 0.5e-3,
                    "frequency_hz": 1.2,
                },
            }],
            "seed": 3,
            "mode": "plane-wave",
        },
        "pipeline": {"n_fft_range": 256, "n_fft_azimuth": 256},
    }
    cfg = root / "run.json"
    cfg.write_text(json.dumps(doc))
    cube = root / "cube.mvdc"
    assert main(["simulate", "--config", str(cfg), "--out", str(cube)]) == 0
    return {"root": root, "cfg": cfg, "cube": cube}


def _write_accel_csv(path, freqs=(2.0, 1.5, 2.5), region="A"):
    """8 s of sinusoidal acceleration on all three axes of one region."""
    n = int(8.0 * RATE)
    t = np.arange(n) / RATE
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s", f"{region}_ax", f"{region}_ay", f"{region}_az", "ecg"])
        for i in range(n):
            row = [t[i]] + [0.1 * np.sin(2 * np.pi * f * t[i]) for f in freqs] + [0.0]
            writer.writerow([repr(float(v)) for v in row])


def test_usage_errors_exit_2(capsys):
    assert main([]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["simulate", "--config", "x"]) == 2  # missing --out
    capsys.readouterr()


def test_missing_cube_reports_io_error(workdir, tmp_path, capsys):
    rc = main([
        "process", "--cube", str(tmp_path / "nope.mvdc"),
        "--config", str(workdir["cfg"]), "--out", str(tmp_path / "t.csv"),
    ])
    assert rc == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "io"
    assert "message" in err


def test_bad_config_name_reports_config_error(tmp_path, capsys):
    rc = main(["simulate", "--config", "no-such", "--out", str(tmp_path / "c.mvdc")])
    assert rc == 1
    assert json.loads(capsys.readouterr().err)["error"] == "config"


def test_simulate_deterministic_unless_reseeded(workdir, tmp_path, capsys):
    a = tmp_path / "a.mvdc"
    b = tmp_path / "b.mvdc"
    c = tmp_path / "c.mvdc"
    cfg = str(workdir["cfg"])
    assert main(["simulate", "--config", cfg, "--out", str(a)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(b)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(c), "--seed", "99"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()
    assert "wrote" in capsys.readouterr().out


def test_process_writes_readable_traces(workdir, tmp_path, capsys):
    out = tmp_path / "traces.csv"
    rc = main([
        "process", "--cube", str(workdir["cube"]),
        "--config", str(workdir["cfg"]), "--out", str(out),
    ])
    assert rc == 0
    table = read_trace_table(str(out))
    assert list(table) == ["A"]
    assert len(table["A"]["displacement_mm"]) == 16
    assert "subject at" in capsys.readouterr().out


def test_process_near_field_flag_and_angle_map(workdir, tmp_path, capsys):
    out = tmp_path / "traces.csv"
    amap = tmp_path / "map.csv"
    rc = main([
        "process", "--cube", str(workdir["cube"]),
        "--config", str(workdir["cfg"]), "--out", str(out),
        "--near-field", "on", "--angle-map", str(amap),
    ])
    assert rc == 0
    lines = amap.read_text().splitlines()
    assert lines[0].startswith("azimuth_deg\\elevation_deg,")
    assert len(lines) > 10
    first_row = lines[1].split(",")
    float(first_row[0])  # azimuth in degrees
    assert all(float(v) >= 0.0 for v in first_row[1:])  # power
    capsys.readouterr()


def test_scg_subcommand(workdir, tmp_path, capsys):
    accel = tmp_path / "accel.csv"
    out = tmp_path / "disp.csv"
    _write_accel_csv(accel)
    assert main(["scg", "--in", str(accel), "--out", str(out)]) == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows, "no displacement rows written"
    assert set(rows[0]) == {"time_s", "region", "axis", "displacement_mm", "ecg"}
    assert {r["axis"] for r in rows} == {"x", "y", "z"}
    assert {r["region"] for r in rows} == {"A"}
    float(rows[0]["displacement_mm"])
    # the table reads back under the shared trace schema, keyed region.axis
    table = read_trace_table(str(out))
    assert set(table) == {"A.x", "A.y", "A.z"}
    capsys.readouterr()


def test_scg_cutoff_override(tmp_path, capsys):
    accel = tmp_path / "accel.csv"
    out = tmp_path / "disp.csv"
    _write_accel_csv(accel)
    assert main(["scg", "--in", str(accel), "--out", str(out),
                 "--cutoff", "0.8"]) == 0
    assert out.exists()
    capsys.readouterr()


def test_compare_self_is_perfect(workdir, tmp_path, capsys):
    traces = tmp_path / "traces.csv"
    report = tmp_path / "report.json"
    assert main(["process", "--cube", str(workdir["cube"]),
                 "--config", str(workdir["cfg"]), "--out", str(traces)]) == 0
    rc = main(["compare", "--radar", str(traces), "--ref", str(traces),
               "--out", str(report)])
    assert rc == 0
    doc = json.loads(report.read_text())
    entry = doc["regions"]["A"]
    assert entry["rho"] == 1.0
    assert entry["lag_samples"] == 0
    assert entry["delta_f_max_hz"] == 0.0
    assert "lowest rho" in capsys.readouterr().out


def test_compare_pairs_region_with_scg_axes(workdir, tmp_path, capsys):
    traces = tmp_path / "traces.csv"
    accel = tmp_path / "accel.csv"
    disp = tmp_path / "disp.csv"
    report = tmp_path / "report.json"
    assert main(["process", "--cube", str(workdir["cube"]),
                 "--config", str(workdir["cfg"]), "--out", str(traces)]) == 0
    _write_accel_csv(accel)
    assert main(["scg", "--in", str(accel), "--out", str(disp)]) == 0
    rc = main(["compare", "--radar", str(traces), "--ref", str(disp),
               "--out", str(report)])
    assert rc == 0
    doc = json.loads(report.read_text())
    assert set(doc["regions"]) == {"A.x", "A.y", "A.z"}
    for entry in doc["regions"].values():
        assert 0.0 <= entry["rho"] <= 1.0
    capsys.readouterr()


def test_compare_without_overlap_fails(workdir, tmp_path, capsys):
    traces = tmp_path / "traces.csv"
    other = tmp_path / "other.csv"
    report = tmp_path / "report.json"
    assert main(["process", "--cube", str(workdir["cube"]),
                 "--config", str(workdir["cfg"]), "--out", str(traces)]) == 0
    # same schema, disjoint region id
    other.write_text(traces.read_text().replace(",A,", ",P,"))
    rc = main(["compare", "--radar", str(traces), "--ref", str(other),
               "--out", str(report)])
    assert rc == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "processing"
    assert "overlap" in err["message"]


def test_e2e_writes_expected_files(workdir, tmp_path, capsys):
    out = tmp_path / "run"
    rc = main(["e2e", "--config", str(workdir["cfg"]), "--out", str(out)])
    assert rc == 0
    for name in ("cube.mvdc", "traces.csv", "truth.csv", "report.json"):
        assert (out / name).exists(), name
    doc = json.loads((out / "report.json").read_text())
    assert set(doc["subject"]) == {
        "range_bin", "range_m", "azimuth_peak_deg", "elevation_peak_deg",
    }
    entry = doc["regions"]["A"]
    for key in ("dominant_frequency_hz", "peak_to_peak_phase_rad",
                "peak_to_peak_displacement_mm", "rho", "lag_samples",
                "delta_f_max_hz", "rate_hz"):
        assert key in entry, key
    # 0.5 m boresight target: range within a bin, high truth correlation
    assert abs(doc["subject"]["range_m"] - 0.5) < 0.05
    assert entry["rho"] > 0.9
    assert "wrote" in capsys.readouterr().out
