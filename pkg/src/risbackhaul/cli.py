"""Command-line front end.

Exit codes: 0 ok, 1 validation issue, 2 parse failure, 3 unreachable target,
4 output I/O failure. A JSON run report goes to stderr on every successful
run; results go to stdout or the output directory.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .geojson import convert_feature_collection
from .geometry import Location, Point, point_in_polygon
from .heatmap import GridSpec, evaluate_grid, export_grid
from .planner import Planner, format_path_record
from .scenario import Scenario, ScenarioParseError, ScenarioValidationError, load_scenario

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_UNREACHABLE, EXIT_IO = 0, 1, 2, 3, 4


@dataclass
class RunReport:
    command: str
    buildings: int = 0
    ris: int = 0
    nodes: int = 0
    edges: int = 0
    wall_ms: float = 0.0
    warnings: list[str] = field(default_factory=list)

    def emit(self) -> None:
        print(json.dumps(asdict(self), sort_keys=True), file=sys.stderr)


class _Fail(Exception):
    def __init__(self, code: int, lines: list[str]):
        self.code = code
        self.lines = lines


def _load(path: str) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Fail(EXIT_PARSE, [f"cannot read {path}: {exc}"]) from None
    try:
        return load_scenario(text)
    except ScenarioParseError as exc:
        raise _Fail(EXIT_PARSE, [f"parse error: {exc}"]) from None
    except ScenarioValidationError as exc:
        raise _Fail(EXIT_INVALID, [str(i) for i in exc.issues]) from None


def _planner(s: Scenario, use_ris: bool, report: RunReport) -> Planner:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        planner = Planner(s, use_ris=use_ris)
    report.warnings.extend(str(w.message) for w in caught)
    report.buildings = len(s.buildings)
    report.ris = len(planner.panels)
    report.nodes = len(planner.graph.nodes)
    report.edges = len(planner.graph.edges)
    return planner


def cmd_validate(args) -> int:
    _load(args.scenario)
    return EXIT_OK


def cmd_plan(args) -> int:
    report = RunReport("plan")
    t0 = time.perf_counter()
    s = _load(args.scenario)
    target = Point(*args.target)
    for b in s.buildings:
        if point_in_polygon(target, b) is not Location.OUTSIDE:
            raise _Fail(EXIT_INVALID, [f"target.position: target inside building {b.id}"])
    planner = _planner(s, args.enable_ris, report)
    if args.edges_out:
        _write(Path(args.edges_out), planner.visibility.edge_list())
    rec = planner.plan(target, args.n)
    print(format_path_record(rec))
    report.wall_ms = round((time.perf_counter() - t0) * 1e3, 3)
    report.emit()
    return EXIT_OK if rec.covered else EXIT_UNREACHABLE


def _default_grid(s: Scenario) -> GridSpec:
    xs = [v[0] for b in s.buildings for v in b.footprint] + [s.mbs[0]]
    ys = [v[1] for b in s.buildings for v in b.footprint] + [s.mbs[1]]
    w, h = max(xs) - min(xs), max(ys) - min(ys)
    side = max(w, h, 1.0)
    cell = side / 100.0
    pad = 0.05 * side
    return GridSpec(Point(min(xs) - pad, min(ys) - pad), max(w + 2 * pad, cell), max(h + 2 * pad, cell), cell)


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _Fail(EXIT_IO, [f"cannot write {path}: {exc}"]) from None


def cmd_heatmap(args) -> int:
    report = RunReport("heatmap")
    t0 = time.perf_counter()
    s = _load(args.scenario)
    if args.grid:
        x, y, w, h, cell = args.grid
        try:
            spec = GridSpec(Point(x, y), w, h, cell)
        except ValueError as exc:
            raise _Fail(EXIT_INVALID, [f"grid: {exc}"]) from None
    else:
        spec = _default_grid(s)
    planner = _planner(s, True, report)
    grid = evaluate_grid(s, spec, n_max=args.n, planner=planner)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise _Fail(EXIT_IO, [f"cannot create {out}: {exc}"]) from None
    _write(out / f"throughput.{args.format}", export_grid(grid, args.format, "bottleneck"))
    _write(out / f"hops.{args.format}", export_grid(grid, args.format, "hops"))
    report.wall_ms = round((time.perf_counter() - t0) * 1e3, 3)
    report.emit()
    return EXIT_OK


def cmd_convert_geojson(args) -> int:
    report = RunReport("convert-geojson")
    t0 = time.perf_counter()
    try:
        doc = json.loads(Path(args.input).read_text(encoding="utf-8"))
        scen, warns = convert_feature_collection(doc)
    except (OSError, ValueError, KeyError, TypeError, IndexError) as exc:
        raise _Fail(EXIT_PARSE, [f"parse error: {exc}"]) from None
    for w in warns:
        print(f"warning: {w}", file=sys.stderr)
    _write(Path(args.output), json.dumps(scen, indent=2) + "\n")
    report.buildings = len(scen["buildings"])
    report.warnings = warns
    report.wall_ms = round((time.perf_counter() - t0) * 1e3, 3)
    report.emit()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="risbackhaul", description="Drone and RIS backhaul planner")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a scenario document")
    v.add_argument("scenario")
    v.set_defaults(func=cmd_validate)

    pl = sub.add_parser("plan", help="plan the backhaul path to one access point")
    pl.add_argument("scenario")
    pl.add_argument("--target", nargs=2, type=float, metavar=("X", "Y"), required=True)
    ris = pl.add_mutually_exclusive_group()
    ris.add_argument("--enable-ris", dest="enable_ris", action="store_true", default=True)
    ris.add_argument("--disable-ris", dest="enable_ris", action="store_false")
    pl.add_argument("--n", type=int, default=None, help="drone budget (default: scenario n)")
    pl.add_argument("--edges-out", default=None, help="also write the visibility edge list here")
    pl.set_defaults(func=cmd_plan)

    hm = sub.add_parser("heatmap", help="sweep a grid of access-point locations")
    hm.add_argument("scenario")
    hm.add_argument(
        "--grid",
        nargs=5,
        type=float,
        metavar=("X", "Y", "W", "H", "CELL"),
        default=None,
        help="grid origin, size and cell (default: scene bounds + 5%%, 100 cells on the long side)",
    )
    hm.add_argument("--format", choices=("csv", "pgm"), default="csv")
    hm.add_argument("--out", default="heatmap_out")
    hm.add_argument("--n", type=int, default=None)
    hm.set_defaults(func=cmd_heatmap)

    cg = sub.add_parser("convert-geojson", help="GeoJSON footprints to a scenario skeleton")
    cg.add_argument("input")
    cg.add_argument("output")
    cg.set_defaults(func=cmd_convert_geojson)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as fail:
        for line in fail.lines:
            print(line)
        return fail.code


if __name__ == "__main__":
    sys.exit(main())
