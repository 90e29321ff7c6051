"""Command-line front end: ``ssie2d {solve,sweep,convergence,validate}``.

Every subcommand reads an INI scenario (see :mod:`ssie2d.scenario`), writes
plot-ready CSV files with a header row naming columns and units, and exits
nonzero with a one-line JSON error report on stderr when anything fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import acceptance, oracle, solver
from .geometry import GeometryError
from .operators import Medium, SingularOperatorError
from .scenario import ConfigError, Scenario, load_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------
def fmt(value) -> str:
    """Deterministic CSV cell: floats at 17 significant digits, missing values empty."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "" if math.isnan(value) else f"{float(value):.17g}"
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


# ---------------------------------------------------------------------------
# One solve plus its evaluation
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class PointResult:
    frequency: float
    solution: solver.BoundarySolution
    grid: solver.FieldGrid | None
    rcs: solver.RcsCurve
    metrics: dict


def _mie(scenario: Scenario, obj: Medium, frequency: float):
    g = scenario.geometry
    return oracle.mie_coefficients(g.radius, obj, scenario.background, frequency,
                                   amplitude=scenario.amplitude, angle=math.radians(scenario.angle_deg),
                                   center=g.center)


def load_reference_file(path, frequency: float, points: np.ndarray) -> np.ndarray:
    """Reference E_z from a fields CSV (x_m, y_m, re_Ez_V_per_m, im_Ez_V_per_m[, frequency_hz])."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read reference file: {exc}", "reference.file") from None
    needed = {"x_m", "y_m", "re_Ez_V_per_m", "im_Ez_V_per_m"}
    if not rows or not needed <= set(rows[0]):
        raise ConfigError(f"reference file needs columns {sorted(needed)}", "reference.file")
    if "frequency_hz" in rows[0]:
        rows = [r for r in rows if math.isclose(float(r["frequency_hz"]), frequency, rel_tol=1e-9)]
    xy = np.array([[float(r["x_m"]), float(r["y_m"])] for r in rows]).reshape(-1, 2)
    if xy.shape != points.shape or not np.allclose(xy, points, rtol=0.0, atol=1e-9):
        raise ConfigError(f"reference points do not match the scenario grid at {frequency:g} Hz",
                          "reference.file")
    return np.array([complex(float(r["re_Ez_V_per_m"]), float(r["im_Ez_V_per_m"])) for r in rows])


def evaluate_point(scenario: Scenario, frequency: float, obj: Medium | None = None,
                   max_seg_len: float | None = None, with_grid: bool = True) -> PointResult:
    """Solve one configuration and collect diagnostics and error metrics."""
    t0 = time.perf_counter()
    obj = scenario.obj if obj is None else obj
    contour = scenario.contour(max_seg_len)
    sol = solver.solve(contour, obj, scenario.wave(frequency), scenario.cfie())
    angles = np.linspace(0.0, 2 * np.pi, scenario.rcs_angles, endpoint=False)
    rcs = solver.scattering_width(solver.far_field(sol, angles), scenario.amplitude, angles)
    d = sol.diagnostics
    metrics = {
        "frequency_hz": frequency,
        "eps_r": obj.eps_r,
        "max_seg_len_m": scenario.max_seg_len if max_seg_len is None else max_seg_len,
        "n_segments": int(d["n_segments"]),
        "cond_cfie": d["cond_cfie"],
        "residual_cfie": d["residual_cfie"],
        "cond_P": d["cond_P"][0],
        "cond_P_hat": d["cond_P_hat"][0],
        "cond_layer": d["cond_layer"],
        "resonant_rank": d["resonant_rank"][0],
        "scattering_width_m": solver.scattering_cross_width(sol),
        "extinction_width_m": solver.extinction_width(sol) if obj.is_lossless and scenario.background.is_lossless else None,
        "max_rel": None,
        "rms": None,
        "rcs_curve_error": None,
    }
    grid = None
    if with_grid:
        grid = solver.field_grid(sol, center=scenario.center, extent=scenario.grid_extent,
                                 spacing=scenario.grid_spacing)
        reference = None
        if scenario.reference == "mie":
            reference = oracle.mie_field(_mie(scenario, obj, frequency), grid.points)
        elif scenario.reference == "file":
            reference = load_reference_file(scenario.reference_file, frequency, grid.points)
        if reference is not None:
            metrics.update(solver.error_metrics(reference, grid.values, grid.mask))
    if scenario.reference == "mie":
        mie_rcs = oracle.mie_scattering_width(_mie(scenario, obj, frequency), angles)
        metrics["rcs_curve_error"] = solver.curve_error(mie_rcs.sigma, rcs.sigma)
    metrics["wall_seconds"] = time.perf_counter() - t0
    return PointResult(frequency, sol, grid, rcs, metrics)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------
BOUNDARY_HEADER = ["frequency_hz", "segment", "x_m", "y_m", "re_E_V_per_m", "im_E_V_per_m",
                   "re_Js_A_per_m", "im_Js_A_per_m"]
FIELDS_HEADER = ["frequency_hz", "x_m", "y_m", "re_Ez_V_per_m", "im_Ez_V_per_m", "region", "mask"]
RCS_HEADER = ["frequency_hz", "angle_deg", "sigma_m", "sigma_db"]


def cmd_solve(scenario: Scenario, out_dir: Path) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    boundary_rows, field_rows, rcs_rows, results = [], [], [], []
    for f in scenario.frequencies:
        res = evaluate_point(scenario, f)
        sol = res.solution
        mids = np.concatenate([c.midpoints for c in sol.contours])
        for j, (m, e, js) in enumerate(zip(mids, sol.E, sol.J_s)):
            boundary_rows.append([f, j, m[0], m[1], e.real, e.imag, js.real, js.imag])
        g = res.grid
        for p, v, r, ok in zip(g.points, g.values, g.region, g.mask):
            field_rows.append([f, p[0], p[1], v.real, v.imag, r, bool(ok)])
        for a, s, db in zip(res.rcs.angles, res.rcs.sigma, res.rcs.sigma_db):
            rcs_rows.append([f, math.degrees(a), s, db])
        results.append(res.metrics)
    write_csv(out_dir / "boundary.csv", BOUNDARY_HEADER, boundary_rows)
    write_csv(out_dir / "fields.csv", FIELDS_HEADER, field_rows)
    write_csv(out_dir / "rcs.csv", RCS_HEADER, rcs_rows)
    summary = {"command": "solve", "scenario": scenario_summary(scenario), "results": results}
    write_json(out_dir / "summary.json", summary)
    return summary


def scenario_summary(scenario: Scenario) -> dict:
    d = asdict(scenario)
    d.pop("source_path", None)
    return d


# ---------------------------------------------------------------------------
# sweep and convergence (independent points, optionally in parallel)
# ---------------------------------------------------------------------------
SWEEP_HEADER = ["parameter", "value", "frequency_hz", "eps_r", "n_segments", "rms_field_error",
                "max_rel_field_error", "rcs_curve_error", "scattering_width_m", "extinction_width_m",
                "cond_cfie", "cond_P_hat", "cond_layer", "status", "message"]


def _sweep_task(task) -> dict:
    scenario, parameter, value = task
    try:
        if parameter == "eps_r":
            obj = replace(scenario.obj, eps_r=value)
            m = evaluate_point(scenario, scenario.frequencies[0], obj=obj).metrics
        else:
            m = evaluate_point(scenario, value).metrics
        return {**m, "status": "ok", "message": ""}
    except Exception as exc:  # per-point failures are recorded, not raised
        logger.warning("sweep point %s=%g failed: %s", parameter, value, exc)
        return {"status": "error", "message": f"{type(exc).__name__}: {exc}"}


def _run_tasks(func, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, tasks))


def cmd_sweep(scenario: Scenario, out_dir: Path, workers: int = 1) -> dict:
    if scenario.sweep_parameter is None or not scenario.sweep_values:
        raise ConfigError("a sweep needs [sweep] parameter and values", "sweep.values")
    out_dir.mkdir(parents=True, exist_ok=True)
    param = scenario.sweep_parameter
    tasks = [(scenario, param, v) for v in scenario.sweep_values]
    results = _run_tasks(_sweep_task, tasks, workers)
    rows = []
    for v, r in zip(scenario.sweep_values, results):
        rows.append([param, v, r.get("frequency_hz"), r.get("eps_r"), r.get("n_segments"), r.get("rms"),
                     r.get("max_rel"), r.get("rcs_curve_error"), r.get("scattering_width_m"),
                     r.get("extinction_width_m"), r.get("cond_cfie"), r.get("cond_P_hat"),
                     r.get("cond_layer"), r["status"], r["message"]])
    # timings stay out of the CSV so that identical scenarios give identical bytes
    write_csv(out_dir / "sweep.csv", SWEEP_HEADER, rows)
    failed = sum(r["status"] != "ok" for r in results)
    summary = {"command": "sweep", "parameter": param, "points": len(rows), "failed": failed,
               "scenario": scenario_summary(scenario),
               "results": [{"value": v, **r} for v, r in zip(scenario.sweep_values, results)]}
    write_json(out_dir / "summary.json", summary)
    return summary


CONVERGENCE_HEADER = ["max_seg_len_m", "n_segments", "rms_vs_reference", "max_rel_vs_reference",
                      "successive_rms", "monotone", "status", "message"]


def _convergence_task(task) -> dict:
    scenario, mesh = task
    try:
        res = evaluate_point(scenario, scenario.frequencies[0], max_seg_len=mesh)
        return {**res.metrics, "values": res.grid.values, "mask": res.grid.mask, "status": "ok", "message": ""}
    except Exception as exc:
        logger.warning("convergence mesh %g failed: %s", mesh, exc)
        return {"status": "error", "message": f"{type(exc).__name__}: {exc}"}


def convergence_table(meshes, results, has_reference: bool) -> list[list]:
    """Rows with successive differences and a monotonicity flag per mesh after the first."""
    rows, previous = [], None
    prev_err = None
    for mesh, r in zip(meshes, results):
        successive = None
        if r["status"] == "ok" and previous is not None and previous["status"] == "ok":
            mask = r["mask"] & previous["mask"]
            successive = solver.error_metrics(r["values"], previous["values"], mask)["rms"]
        err = r.get("rms") if has_reference else successive
        monotone = None
        if err is not None and prev_err is not None:
            monotone = err < prev_err
        rows.append([mesh, r.get("n_segments"), r.get("rms"), r.get("max_rel"), successive, monotone,
                     r["status"], r["message"]])
        if err is not None:
            prev_err = err
        previous = r
    return rows


def cmd_convergence(scenario: Scenario, out_dir: Path, workers: int = 1) -> dict:
    meshes = scenario.meshes
    if len(meshes) < 2:
        raise ConfigError("need at least 2 mesh sizes", "convergence.meshes")
    if any(b >= a for a, b in zip(meshes, meshes[1:])):
        raise ConfigError("mesh sizes must be strictly descending", "convergence.meshes")
    out_dir.mkdir(parents=True, exist_ok=True)
    results = _run_tasks(_convergence_task, [(scenario, m) for m in meshes], workers)
    rows = convergence_table(meshes, results, scenario.reference != "none")
    write_csv(out_dir / "convergence.csv", CONVERGENCE_HEADER, rows)
    flags = [r[5] for r in rows if r[5] is not None]
    monotone = all(flags)  # vacuous with a single comparison
    if not monotone:
        logger.warning("convergence study is not monotone")
    summary = {"command": "convergence", "meshes": list(meshes), "monotone": monotone,
               "failed": sum(r["status"] != "ok" for r in results),
               "scenario": scenario_summary(scenario),
               "results": [{k: v for k, v in r.items() if k not in ("values", "mask")} for r in results]}
    write_json(out_dir / "summary.json", summary)
    return summary


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------
def cmd_validate(out_dir: Path | None) -> tuple[bool, dict]:
    results = acceptance.run_all()
    print(acceptance.format_table(results))
    payload = {"command": "validate", "passed": all(r.passed for r in results),
               "criteria": [r.as_dict() for r in results]}
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        write_json(out_dir / "validate.json", payload)
    return payload["passed"], payload


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="scenario INI file")
    common.add_argument("--out", type=Path, help="output directory (overrides [output] directory)")
    common.add_argument("--workers", type=int, default=1, help="parallel worker processes for sweeps")
    common.add_argument("--alpha", type=float, help="override the CFIE blending weight")
    common.add_argument("--quadrature-order", type=int, help="override the Gauss order per segment")
    common.add_argument("-v", "--verbose", action="count", default=0, help="more logging (-vv for debug)")
    parser = argparse.ArgumentParser(prog="ssie2d", description="2D TM scattering by penetrable cylinders.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve a scenario and write fields, RCS and a summary")
    sub.add_parser("sweep", parents=[common], help="permittivity or frequency sweep")
    sub.add_parser("convergence", parents=[common], help="mesh-refinement study")
    sub.add_parser("validate", parents=[common], help="run the acceptance suite")
    return parser


def _error(kind: str, message: str, code: int, **extra) -> int:
    print(json.dumps({"status": "error", "kind": kind, "message": message, **extra},
                     sort_keys=True, default=_json_default), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1", "workers")
        if args.command == "validate":
            passed, payload = cmd_validate(args.out)
            if not passed:
                failed = [c["key"] for c in payload["criteria"] if not c["passed"]]
                return _error("acceptance", "acceptance criteria failed", EXIT_FAILURE, failed=failed)
            return EXIT_OK
        if args.config is None:
            raise ConfigError(f"{args.command} needs --config")
        scenario = load_scenario(args.config)
        scenario = scenario.with_overrides(alpha=args.alpha, quadrature_order=args.quadrature_order)
        out_dir = args.out if args.out is not None else Path(scenario.output_dir)
        if args.command == "solve":
            result = cmd_solve(scenario, out_dir)
        elif args.command == "sweep":
            result = cmd_sweep(scenario, out_dir, args.workers)
        else:
            result = cmd_convergence(scenario, out_dir, args.workers)
        print(json.dumps({"status": "ok", "command": args.command, "out": str(out_dir)}, sort_keys=True))
        if result.get("failed"):
            return _error("partial", f"{result['failed']} point(s) failed; see the CSV status column",
                          EXIT_FAILURE, out=str(out_dir))
        return EXIT_OK
    except ConfigError as exc:
        return _error("config", str(exc), EXIT_CONFIG, where=exc.where, line=exc.line)
    except SingularOperatorError as exc:
        return _error("singular", str(exc), EXIT_FAILURE, condition=exc.condition, context=exc.context)
    except (GeometryError, ValueError, ArithmeticError) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_FAILURE)


if __name__ == "__main__":
    sys.exit(main())
