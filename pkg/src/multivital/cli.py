"""Command-line entry points: simulate, process, scg, compare, e2e.

Exit codes: 0 on success, 1 for data/processing errors (a JSON object with
"error" and "message" goes to stderr), 2 for usage errors (argparse).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io as _io
import json
import os
import sys

import numpy as np

from ._util import atomic_write_text
from .config import derive_waveform
from .errors import MultivitalError, ProcessingError
from .io import (
    export_angle_map,
    export_traces,
    load_cube,
    read_trace_table,
    save_cube,
    trace_rate_hz,
    write_report,
)
from .metrics import compare_traces
from .pipeline import make_angle_map, run_pipeline
from .runconfig import load_run_config
from .scg import FilterSpec, load_scg_csv, scg_to_displacement
from .simulate import simulate
from .vitals import DisplacementTrace, dominant_frequency


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multivital",
        description="FMCW MIMO radar vital-sign simulation and processing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize a raw data cube from a scene config")
    p.add_argument("--config", required=True, help="config file path or bundled name")
    p.add_argument("--out", required=True, help="output cube path (.mvdc)")
    p.add_argument("--seed", type=int, default=None, help="override the scene seed")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("process", help="recover per-region displacement traces from a cube")
    p.add_argument("--cube", required=True, help="input .mvdc cube")
    p.add_argument("--config", required=True, help="config file path or bundled name")
    p.add_argument("--out", required=True, help="output trace CSV path")
    p.add_argument("--near-field", choices=("on", "off"), default=None,
                   dest="near_field",
                   help="override the config's junction-compensation setting")
    p.add_argument("--angle-map", default=None, dest="angle_map",
                   help="also write a frame-0 angle map CSV to this path")
    p.set_defaults(func=_cmd_process)

    p = sub.add_parser("scg", help="integrate accelerometer channels to displacement")
    p.add_argument("--in", dest="infile", required=True, help="accelerometer CSV")
    p.add_argument("--out", required=True, help="output displacement CSV path")
    p.add_argument("--cutoff", type=float, default=None,
                   help="high-pass cutoff in Hz (default 0.5)")
    p.set_defaults(func=_cmd_scg)

    p = sub.add_parser("compare", help="correlation and frequency metrics between trace tables")
    p.add_argument("--radar", required=True, help="radar trace CSV")
    p.add_argument("--ref", required=True, help="reference trace CSV")
    p.add_argument("--out", required=True, help="output report JSON path")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("e2e", help="simulate, process, and compare against ground truth")
    p.add_argument("--config", required=True, help="config file path or bundled name")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_e2e)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except MultivitalError as exc:
        _fail(exc.code, str(exc))
        return 1
    except FileNotFoundError as exc:
        _fail("io", f"file not found: {exc.filename or exc}")
        return 1
    except OSError as exc:
        _fail("io", str(exc))
        return 1


def _fail(code: str, message: str) -> None:
    json.dump({"error": code, "message": message}, sys.stderr)
    sys.stderr.write("\n")


def _cmd_simulate(args) -> int:
    cfg = load_run_config(args.config)
    scene = cfg.scene
    if args.seed is not None:
        scene = dataclasses.replace(scene, seed=args.seed)
    cube = simulate(scene, cfg.chirp, cfg.geometry)
    save_cube(cube, args.out)
    n_frames, n_tx, n_rx, n_adc = cube.samples.shape
    print(f"wrote {args.out}: {n_frames} frames, {n_tx}x{n_rx} channels, "
          f"{n_adc} samples")
    return 0


def _cmd_process(args) -> int:
    cfg = load_run_config(args.config)
    cube = load_cube(args.cube, geometry=cfg.geometry)
    near = None if args.near_field is None else args.near_field == "on"
    result = run_pipeline(cube, cfg.pipeline, layout=cfg.layout, near_field=near)
    export_traces(result.traces, args.out)
    if args.angle_map:
        export_angle_map(
            make_angle_map(cube, cfg.pipeline, cfg.layout, near), args.angle_map
        )
    print(f"subject at {result.range_m:.3f} m (bin {result.range_bin}), "
          f"azimuth peak {np.degrees(result.azimuth_peak_rad):.2f} deg; "
          f"wrote {len(result.traces)} trace(s) to {args.out}")
    return 0


def _cmd_scg(args) -> int:
    channels, ecg, _ = load_scg_csv(args.infile)
    spec = FilterSpec() if args.cutoff is None else FilterSpec(cutoff=args.cutoff)
    traces = []
    for ch in channels:
        traces.extend(scg_to_displacement(ch, spec))
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["time_s", "region", "axis", "displacement_mm", "ecg"])
    for tr in traces:
        for i in range(len(tr.displacement)):
            writer.writerow([
                repr(i / tr.fs),
                tr.region,
                tr.axis,
                repr(float(tr.displacement[i])),
                repr(float(ecg[i])) if ecg is not None and i < len(ecg) else "",
            ])
    atomic_write_text(args.out, buf.getvalue())
    print(f"wrote {len(traces)} trace(s) to {args.out}")
    return 0


def _paired_tables(radar_tbl: dict, ref_tbl: dict) -> tuple[dict, dict]:
    """Match radar regions to reference keys, including per-axis SCG keys.

    A radar region "A" pairs with a reference "A" or with "A.x"/"A.y"/"A.z";
    per-axis pairs keep the axis suffix in the output key.
    """
    radar_m: dict[str, tuple[np.ndarray, float]] = {}
    ref_m: dict[str, tuple[np.ndarray, float]] = {}
    for rid, entry in radar_tbl.items():
        rate = trace_rate_hz(entry["time_s"])
        for key in ref_tbl:
            if key != rid and not key.startswith(rid + "."):
                continue
            ref_entry = ref_tbl[key]
            radar_m[key] = (entry["displacement_mm"], rate)
            ref_m[key] = (ref_entry["displacement_mm"], trace_rate_hz(ref_entry["time_s"]))
    if not radar_m:
        raise ProcessingError("no overlapping regions between the two trace tables")
    return radar_m, ref_m


def _cmd_compare(args) -> int:
    radar_tbl = read_trace_table(args.radar)
    ref_tbl = read_trace_table(args.ref)
    radar_m, ref_m = _paired_tables(radar_tbl, ref_tbl)
    report = compare_traces(radar_m, ref_m)
    write_report({"regions": report.to_dict()}, args.out)
    worst = min(rc.rho for rc in report.regions.values())
    print(f"compared {len(report.regions)} region(s), lowest rho {worst:.3f}; "
          f"wrote {args.out}")
    return 0


def _truth_traces(cfg, region_ids) -> list[DisplacementTrace]:
    """Ground-truth displacement per region from the scene's own motion."""
    frame_rate = cfg.chirp.frame_rate
    times = np.arange(cfg.chirp.n_frames) / frame_rate
    wl = derive_waveform(cfg.chirp).wavelength
    traces = []
    for rid, point in zip(region_ids, cfg.scene.points):
        d = point.radial_displacement(times)  # m
        traces.append(DisplacementTrace(
            region=rid,
            t0=0.0,
            frame_rate=frame_rate,
            displacement=d * 1000.0,
            phase=4.0 * np.pi * d / wl,
        ))
    return traces


def _cmd_e2e(args) -> int:
    cfg = load_run_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    names = {"cube": "cube.mvdc", "traces": "traces.csv",
             "truth": "truth.csv", "report": "report.json"}
    names.update(cfg.outputs)
    paths = {k: os.path.join(args.out, v) for k, v in names.items()}

    cube = simulate(cfg.scene, cfg.chirp, cfg.geometry)
    save_cube(cube, paths["cube"])
    result = run_pipeline(cube, cfg.pipeline, layout=cfg.layout)
    export_traces(result.traces, paths["traces"])

    region_ids = list(result.region_angles)
    doc: dict = {
        "subject": {
            "range_bin": result.range_bin,
            "range_m": result.range_m,
            "azimuth_peak_deg": float(np.degrees(result.azimuth_peak_rad)),
            "elevation_peak_deg": float(np.degrees(result.elevation_peak_rad)),
        },
        "regions": {},
        "files": {"cube": paths["cube"], "traces": paths["traces"]},
    }
    for tr in result.traces:
        doc["regions"][tr.region] = {
            "dominant_frequency_hz": dominant_frequency(tr, cfg.pipeline.band),
            "peak_to_peak_phase_rad": float(np.ptp(tr.phase)),
            "peak_to_peak_displacement_mm": float(np.ptp(tr.displacement)),
        }

    if len(cfg.scene.points) == len(region_ids):
        truth = _truth_traces(cfg, region_ids)
        export_traces(truth, paths["truth"])
        doc["files"]["truth"] = paths["truth"]
        frame_rate = cfg.chirp.frame_rate
        radar_m = {t.region: (t.displacement, frame_rate) for t in result.traces}
        ref_m = {t.region: (t.displacement, frame_rate) for t in truth}
        report = compare_traces(radar_m, ref_m, cfg.pipeline.band)
        for rid, rc in report.to_dict().items():
            doc["regions"][rid].update(rc)

    write_report(doc, paths["report"])
    first = doc["regions"][region_ids[0]]
    print(f"subject at {result.range_m:.3f} m; region {region_ids[0]}: "
          f"{first['dominant_frequency_hz']:.3f} Hz, "
          f"{first['peak_to_peak_phase_rad']:.3f} rad peak to peak; "
          f"wrote {paths['report']}")
    return 0
