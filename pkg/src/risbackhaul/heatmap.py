"""Grid sweeps of access-point locations and their raster exports."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .geometry import Location, Point, point_in_polygon
from .planner import Planner
from .scenario import Scenario


@dataclass(frozen=True)
class GridSpec:
    origin: Point
    width_m: float
    height_m: float
    cell_m: float

    def __post_init__(self):
        if not self.cell_m > 0:
            raise ValueError("cell_m must be positive")
        if self.width_m < self.cell_m or self.height_m < self.cell_m:
            raise ValueError("grid must span at least one cell in each direction")

    @property
    def cols(self) -> int:
        return math.ceil(self.width_m / self.cell_m - 1e-9)

    @property
    def rows(self) -> int:
        return math.ceil(self.height_m / self.cell_m - 1e-9)

    def center(self, row: int, col: int) -> Point:
        """Centre of a cell, clipped to the grid for the last partial cell."""
        x0 = col * self.cell_m
        y0 = row * self.cell_m
        x1 = min(x0 + self.cell_m, self.width_m)
        y1 = min(y0 + self.cell_m, self.height_m)
        return Point(self.origin[0] + 0.5 * (x0 + x1), self.origin[1] + 0.5 * (y0 + y1))


@dataclass(frozen=True)
class Cell:
    x: float
    y: float
    covered: bool
    drone_count: int = 0
    bottleneck_bps: float = 0.0
    in_building: bool = False


@dataclass(frozen=True)
class CoverageGrid:
    spec: GridSpec
    cells: tuple[Cell, ...]  # row-major, row 0 at the grid origin

    @property
    def covered_count(self) -> int:
        return sum(c.covered for c in self.cells)

    def cell(self, row: int, col: int) -> Cell:
        return self.cells[row * self.spec.cols + col]


def evaluate_grid(
    s: Scenario,
    spec: GridSpec,
    n_max: int | None = None,
    use_ris: bool = True,
    planner: Planner | None = None,
) -> CoverageGrid:
    planner = planner or Planner(s, use_ris=use_ris)
    boxes = [b.bbox for b in s.buildings]
    cells = []
    for row in range(spec.rows):
        for col in range(spec.cols):
            p = spec.center(row, col)
            if any(
                x0 <= p.x <= x1 and y0 <= p.y <= y1 and point_in_polygon(p, b) is not Location.OUTSIDE
                for b, (x0, y0, x1, y1) in zip(s.buildings, boxes)
            ):
                cells.append(Cell(p.x, p.y, False, in_building=True))
                continue
            rec = planner.plan(p, n_max)
            cells.append(Cell(p.x, p.y, rec.covered, rec.drone_count, rec.bottleneck_bps))
    return CoverageGrid(spec, tuple(cells))


def _g(v: float) -> str:
    return format(v, ".6g")


def _covered_flag(c: Cell) -> str:
    # -1 marks a cell whose centre falls inside a footprint
    return "-1" if c.in_building else ("1" if c.covered else "0")


def export_grid(g: CoverageGrid, fmt: str, quantity: str = "bottleneck") -> str:
    """Serialize a grid as CSV or plain PGM (P2).

    CSV carries the full record per cell for ``quantity='bottleneck'`` and
    ``x,y,hops`` for ``quantity='hops'``. PGM rasters are written north-up
    and scaled linearly over the grid's own range; footprint cells are 0.
    """
    if quantity not in ("bottleneck", "hops"):
        raise ValueError(f"unsupported quantity {quantity!r}")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if quantity == "hops":
            w.writerow(["x", "y", "hops"])
            for c in g.cells:
                w.writerow([_g(c.x), _g(c.y), c.drone_count])
        else:
            w.writerow(["x", "y", "covered", "hops", "bottleneck_mbps"])
            for c in g.cells:
                w.writerow([_g(c.x), _g(c.y), _covered_flag(c), c.drone_count, _g(c.bottleneck_bps / 1e6)])
        return buf.getvalue()
    if fmt == "pgm":
        return _pgm(g, quantity)
    raise ValueError(f"unsupported format {fmt!r}")


def _pgm(g: CoverageGrid, quantity: str) -> str:
    vals = [c.bottleneck_bps if quantity == "bottleneck" else float(c.drone_count) for c in g.cells]
    free = [v for v, c in zip(vals, g.cells) if not c.in_building]
    lo, hi = (min(free), max(free)) if free else (0.0, 0.0)
    rows, cols = g.spec.rows, g.spec.cols

    def level(v: float, c: Cell) -> int:
        if c.in_building or not c.covered:
            return 0
        if hi > lo:
            return int(round(255 * (v - lo) / (hi - lo)))
        return 255 if hi > 0 else 0

    lines = ["P2", f"{cols} {rows}", "255"]
    for row in reversed(range(rows)):
        lines.append(" ".join(str(level(vals[row * cols + k], g.cells[row * cols + k])) for k in range(cols)))
    return "\n".join(lines) + "\n"


def parse_grid_csv(text: str) -> list[dict]:
    """Rows of an exported CSV as dicts with typed fields."""
    out = []
    for r in csv.DictReader(io.StringIO(text)):
        flag = int(r["covered"])
        out.append(
            {
                "x": float(r["x"]),
                "y": float(r["y"]),
                "covered": flag == 1,
                "in_building": flag == -1,
                "hops": int(r["hops"]),
                "bottleneck_mbps": float(r["bottleneck_mbps"]),
            }
        )
    return out


def parse_pgm(text: str) -> tuple[int, int, list[list[int]]]:
    tokens = text.split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM")
    cols, rows, _ = int(tokens[1]), int(tokens[2]), int(tokens[3])
    px = [int(t) for t in tokens[4:]]
    return cols, rows, [px[r * cols : (r + 1) * cols] for r in range(rows)]
