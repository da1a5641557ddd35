"""Random street-grid scenes for property tests and experiments."""

from __future__ import annotations

import math

import numpy as np

from .geometry import Location, Point, Segment, point_in_polygon, signed_area
from .scenario import Building, RadioParams, RisPanel, Scenario, outward_normal_of


def _rect(x0, y0, x1, y1) -> list[Point]:
    return [Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)]


def _shape_in_cell(rng: np.random.Generator, x0, y0, x1, y1, snap: bool) -> list[Point]:
    w, h = x1 - x0, y1 - y0
    kind = rng.integers(3)
    if kind == 0:
        ax, bx = sorted(rng.uniform(0, 1, 2))
        ay, by = sorted(rng.uniform(0, 1, 2))
        ax, bx = ax * 0.4, 0.6 + bx * 0.4
        ay, by = ay * 0.4, 0.6 + by * 0.4
        pts = _rect(x0 + ax * w, y0 + ay * h, x0 + bx * w, y0 + by * h)
    elif kind == 1:
        # L-shape: rectangle with one corner notch
        cx, cy = rng.uniform(0.35, 0.65, 2)
        pts = [
            Point(x0, y0),
            Point(x1, y0),
            Point(x1, y0 + cy * h),
            Point(x0 + cx * w, y0 + cy * h),
            Point(x0 + cx * w, y1),
            Point(x0, y1),
        ]
    else:
        k = int(rng.integers(3, 8))
        angs = np.sort(rng.uniform(0, 2 * math.pi, k))
        cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        rad = rng.uniform(0.3, 0.5, k)
        pts = [Point(cx + r * w * math.cos(a), cy + r * h * math.sin(a)) for a, r in zip(angs, rad)]
    if snap:
        pts = [Point(float(round(p.x)), float(round(p.y))) for p in pts]
    dedup = []
    for p in pts:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def _valid_ring(pts) -> bool:
    from .scenario import _simple_polygon_issues

    if len(pts) < 3 or abs(signed_area(pts)) < 1.0:
        return False
    if signed_area(pts) < 0:
        pts = pts[::-1]
    return not _simple_polygon_issues(Building("x", tuple(pts)))


def random_buildings(
    rng: np.random.Generator,
    n_polygons: int,
    extent: float = 400.0,
    grid: int = 7,
    street: float = 12.0,
    snap: bool = False,
) -> list[Building]:
    """Up to ``n_polygons`` disjoint footprints, one per street-grid block."""
    cell = extent / grid
    blocks = [(i, j) for i in range(grid) for j in range(grid)]
    order = rng.permutation(len(blocks))
    out: list[Building] = []
    for k in order:
        if len(out) >= n_polygons:
            break
        i, j = blocks[k]
        x0, y0 = i * cell + street / 2, j * cell + street / 2
        x1, y1 = (i + 1) * cell - street / 2, (j + 1) * cell - street / 2
        pts = _shape_in_cell(rng, x0, y0, x1, y1, snap)
        if not _valid_ring(pts):
            continue
        if signed_area(pts) < 0:
            pts = pts[::-1]
        out.append(Building(f"b{len(out)}", tuple(pts)))
    return out


def random_free_points(rng, buildings, n: int, extent: float = 400.0, snap: bool = False) -> list[Point]:
    pts: list[Point] = []
    while len(pts) < n:
        x, y = rng.uniform(0, extent, 2)
        if snap:
            x, y = float(round(x)), float(round(y))
        p = Point(float(x), float(y))
        if all(point_in_polygon(p, b) is Location.OUTSIDE for b in buildings):
            pts.append(p)
    return pts


def random_panels(rng, buildings, count: int, start: int = 0) -> list[RisPanel]:
    """Panels mounted at the middle of randomly chosen walls."""
    walls = [(b, e) for b in buildings for e in b.edges if math.dist(e.a, e.b) > 4.0]
    picks = rng.choice(len(walls), size=min(count, len(walls)), replace=False)
    panels = []
    for k, w in enumerate(picks):
        b, e = walls[int(w)]
        # a 2 m panel centred on the wall
        mx, my = 0.5 * (e.a[0] + e.b[0]), 0.5 * (e.a[1] + e.b[1])
        L = math.dist(e.a, e.b)
        ux, uy = (e.b[0] - e.a[0]) / L, (e.b[1] - e.a[1]) / L
        wall = Segment(Point(mx - ux, my - uy), Point(mx + ux, my + uy))
        panels.append(RisPanel(f"ris{start + k}", wall, Point(mx, my), outward_normal_of(e)))
    return panels


def random_scenario(
    rng: np.random.Generator,
    n_polygons: int = 20,
    n_panels: int = 0,
    drone_budget_n: int = 3,
    extent: float = 400.0,
    radio: RadioParams | None = None,
) -> Scenario:
    buildings = random_buildings(rng, n_polygons, extent=extent)
    (mbs,) = random_free_points(rng, buildings, 1, extent=extent)
    panels = random_panels(rng, buildings, n_panels) if n_panels else []
    return Scenario(
        buildings=tuple(buildings),
        mbs=mbs,
        ris_panels=tuple(panels),
        radio=radio or RadioParams(),
        drone_budget_n=drone_budget_n,
    )
