"""Command-line interface: single-point evaluation, parameter sweeps with CSV
output, and preset figure packs with gnuplot scripts.

Determinism contract: identical configuration produces byte-identical CSV
output, including under parallel sweep execution — grid points are pure
functions of the configuration and rows are written in grid order.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys

import numpy as np

from .errors import ModelError
from .params import default_config, from_config
from .pipeline import evaluate_point

CSV_COLUMNS = [
    "detuning_mhz", "rate_a_mhz", "rate_b_mhz", "density_per_m3",
    "s_plus_m2", "s_minus_m2", "sigma_plus_ratio", "sigma_minus_ratio",
    "sens_full", "sens_intensity", "sens_phase", "sens_psn",
    "regime", "status",
]

SWEEP_PARAMS = {
    "detuning": "detuning_a_mhz",
    "rate": None,                 # sets rate_a_mhz and rate_b_mhz together
    "rate_A": "rate_a_mhz",
    "rate_B": "rate_b_mhz",
    "density": "density_per_m3",
}

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE = 0, 1, 2


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return "%.12g" % value


def _error_json(exc: Exception) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc)})


# ---------------------------------------------------------------------------
# configuration plumbing
# ---------------------------------------------------------------------------

def _load_config(args) -> dict:
    config = default_config()
    if args.config:
        with open(args.config) as handle:
            loaded = json.load(handle)
        if not isinstance(loaded, dict):
            raise ValueError("config file must contain a JSON object")
        config.update(loaded)
    for item in args.set or []:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        config[key] = value
    return config


def _apply_axis(config: dict, param: str, value: float) -> dict:
    out = dict(config)
    if param == "rate":
        out["rate_a_mhz"] = value
        out["rate_b_mhz"] = value
    else:
        out[SWEEP_PARAMS[param]] = value
    return out


def _grid(spec: str):
    """Parse an axis spec 'param,scale,min,max,count' into (param, values)."""
    parts = spec.split(",")
    if len(parts) != 5:
        raise ValueError(
            "axis spec must be param,scale,min,max,count "
            "(e.g. detuning,linear,-100,100,201)")
    param, scale = parts[0], parts[1]
    if param not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {param!r}; "
                         f"choose from {sorted(SWEEP_PARAMS)}")
    low, high, count = float(parts[2]), float(parts[3]), int(parts[4])
    if count < 2:
        raise ValueError("axis count must be at least 2")
    if not low < high:
        raise ValueError("axis min must be below max")
    if scale == "linear":
        values = np.linspace(low, high, count)
    elif scale == "log":
        if low <= 0:
            raise ValueError("log axis requires min > 0")
        values = np.geomspace(low, high, count)
    else:
        raise ValueError(f"axis scale must be linear or log, got {scale!r}")
    return param, values


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _evaluate_row(task):
    """Worker entry: evaluate one grid point into a CSV row (dict)."""
    config, route = task
    row = {
        "detuning_mhz": config["detuning_a_mhz"],
        "rate_a_mhz": config["rate_a_mhz"],
        "rate_b_mhz": config["rate_b_mhz"],
        "density_per_m3": config["density_per_m3"],
    }
    try:
        result = evaluate_point(from_config(config), route=route)
    except ModelError as exc:
        for column in CSV_COLUMNS[4:12]:
            row[column] = float("nan")
        row["regime"] = "Unclassified"
        row["status"] = f"error:{type(exc).__name__}"
        return row
    report = result.report
    row.update({
        "s_plus_m2": result.s_plus,
        "s_minus_m2": result.s_minus,
        "sigma_plus_ratio": report.diagnostics["sigma_plus_ratio"],
        "sigma_minus_ratio": report.diagnostics["sigma_minus_ratio"],
        "sens_full": report.rel_full,
        "sens_intensity": report.rel_intensity,
        "sens_phase": report.rel_phase,
        "sens_psn": report.rel_psn,
        "regime": report.regime,
        "status": "ok",
    })
    return row


def run_point(config: dict, route: str) -> dict:
    """Evaluate one configuration into a flat record."""
    result = evaluate_point(from_config(config), route=route)
    report = result.report
    record = {
        "s_plus_m2": result.s_plus,
        "s_minus_m2": result.s_minus,
        "sigma_plus_ratio": report.diagnostics["sigma_plus_ratio"],
        "sigma_minus_ratio": report.diagnostics["sigma_minus_ratio"],
        "sens_full": report.rel_full,
        "sens_intensity": report.rel_intensity,
        "sens_phase": report.rel_phase,
        "sens_psn": report.rel_psn,
        "regime": report.regime,
        "spectral_gap": result.spectral_gap,
        "fit_residual": result.expansion.fit_residual,
        "route": result.route,
    }
    if result.route_deviation is not None:
        record["route_deviation"] = result.route_deviation
    return record


def run_sweep(config: dict, axes, route: str, workers: int | None = None):
    """Evaluate a 1D or 2D grid; yields rows in deterministic grid order."""
    grids = [_grid(axis) for axis in axes]
    points = []
    if len(grids) == 1:
        param, values = grids[0]
        for value in values:
            points.append(_apply_axis(config, param, float(value)))
    else:
        (p1, v1), (p2, v2) = grids
        for a in v1:
            for b in v2:
                points.append(
                    _apply_axis(_apply_axis(config, p1, float(a)), p2, float(b)))
    tasks = [(point, route) for point in points]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(tasks) < 2:
        return [_evaluate_row(task) for task in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate_row, tasks, chunksize=1))


def write_csv(rows, stream):
    stream.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(row[c]) for c in CSV_COLUMNS) + "\n")


# ---------------------------------------------------------------------------
# figure packs
# ---------------------------------------------------------------------------

FIGURE_IDS = ("fig1c", "fig2", "fig3")

_GNUPLOT_HEADER = "set datafile separator ','\nset key autotitle columnhead\n"


def _write_rows(path, rows):
    with open(path, "w") as handle:
        write_csv(rows, handle)


def emit_figure_pack(figure_id: str, config: dict, out_dir: str,
                     workers: int | None = None):
    """Write preset sweep CSVs plus a gnuplot script for one figure."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    if figure_id == "fig1c":
        rows = run_sweep(config, ["rate,log,1e-6,1e2,25"], "full", workers)
        path = os.path.join(out_dir, "fig1c_sensitivity_vs_rate.csv")
        _write_rows(path, rows)
        written.append(path)
        script = os.path.join(out_dir, "fig1c.gp")
        with open(script, "w") as handle:
            handle.write(_GNUPLOT_HEADER)
            handle.write("set logscale xy\n"
                         "set xlabel 'reaction rate (MHz)'\n"
                         "set ylabel 'relative sensitivity'\n")
            handle.write(
                f"plot '{path}' using 2:9 with lines, "
                f"'' using 2:10 with lines, '' using 2:11 with lines, "
                f"'' using 2:12 with points\n")
        written.append(script)

    elif figure_id == "fig2":
        rows = run_sweep(config, ["detuning,linear,-100,100,101"],
                         "full", workers)
        columns = [("cross_section_plus", "s_plus_m2", 5),
                   ("cross_section_minus", "s_minus_m2", 6),
                   ("variance_ratio_plus", "sigma_plus_ratio", 7),
                   ("variance_ratio_minus", "sigma_minus_ratio", 8),
                   ("sensitivity", "sens_full", 9)]
        paths = {}
        for name, column, _ in columns:
            path = os.path.join(out_dir, f"fig2_{name}.csv")
            with open(path, "w") as handle:
                handle.write(f"detuning_mhz,{column}\n")
                for row in rows:
                    handle.write(f"{_fmt(row['detuning_mhz'])},"
                                 f"{_fmt(row[column])}\n")
            paths[name] = path
            written.append(path)
        script = os.path.join(out_dir, "fig2.gp")
        with open(script, "w") as handle:
            handle.write(_GNUPLOT_HEADER)
            handle.write("set xlabel 'detuning (MHz)'\n")
            for name, path in paths.items():
                handle.write(f"plot '{path}' using 1:2 with lines\npause -1\n")
        written.append(script)

    elif figure_id == "fig3":
        script_lines = [_GNUPLOT_HEADER,
                        "set logscale xy\n"
                        "set xlabel 'reaction rate (MHz)'\n"
                        "set ylabel 'relative sensitivity'\n"]
        plots = []
        for detuning in (20.0, 40.0, 100.0):
            cfg = dict(config, detuning_a_mhz=detuning)
            rows = run_sweep(cfg, ["rate,log,1e-6,1e2,25"], "full", workers)
            path = os.path.join(out_dir,
                                f"fig3_detuning_{int(detuning)}mhz.csv")
            _write_rows(path, rows)
            written.append(path)
            plots.append(f"'{path}' using 2:9 with lines")
        script = os.path.join(out_dir, "fig3.gp")
        with open(script, "w") as handle:
            handle.writelines(script_lines)
            handle.write("plot " + ", ".join(plots) + "\n")
        written.append(script)

    else:
        raise ValueError(f"unknown figure id {figure_id!r}")
    return written


# ---------------------------------------------------------------------------
# argument parsing and entry point
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="spectrosens",
        description="Sensitivity bounds for spectrophotometric concentration "
                    "measurements of reacting molecules.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a configuration key")
        p.add_argument("--route", choices=["full", "adiabatic", "both"],
                       default="full")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)

    point = sub.add_parser("point", help="evaluate a single configuration")
    common(point)

    sweep = sub.add_parser("sweep", help="evaluate a 1D/2D parameter grid")
    common(sweep)
    sweep.add_argument("--axis1", required=True,
                       metavar="PARAM,SCALE,MIN,MAX,COUNT")
    sweep.add_argument("--axis2", metavar="PARAM,SCALE,MIN,MAX,COUNT")

    figures = sub.add_parser("figures", help="emit preset figure data packs")
    common(figures)
    figures.add_argument("figure_id", choices=FIGURE_IDS)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(_error_json(exc), file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "point":
            record = run_point(config, args.route)
            text = json.dumps(record, indent=2, default=float) + "\n"
            if args.out:
                with open(args.out, "w") as handle:
                    handle.write(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK

        if args.command == "sweep":
            axes = [args.axis1] + ([args.axis2] if args.axis2 else [])
            try:
                rows = run_sweep(config, axes, args.route, args.workers)
            except ValueError as exc:
                print(_error_json(exc), file=sys.stderr)
                return EXIT_USAGE
            if args.out:
                with open(args.out, "w") as handle:
                    write_csv(rows, handle)
            else:
                write_csv(rows, sys.stdout)
            failed = any(row["status"] != "ok" for row in rows)
            return EXIT_COMPUTE if failed else EXIT_OK

        if args.command == "figures":
            out_dir = args.out or "."
            emit_figure_pack(args.figure_id, config, out_dir, args.workers)
            return EXIT_OK
    except ModelError as exc:
        print(_error_json(exc), file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(_error_json(exc), file=sys.stderr)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
