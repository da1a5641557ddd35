"""Planar predicates used by the visibility and planning layers.

Everything here works in a local metric frame (meters). Orientation tests
compare the cross product against a tolerance scaled by the operand lengths,
so collinearity is judged on the sine of the angle rather than on absolute
coordinates.
"""

from __future__ import annotations

import math
import warnings
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

ORIENT_EPS = 1e-12
BOUNDARY_TOL = 1e-9


class Point(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point
    b: Point


class Location(Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


class DegenerateVertexWarning(UserWarning):
    """A polygon vertex was too close to collinear (or too sharp) to inflate."""


def _ring(poly) -> Sequence[Point]:
    return poly.footprint if hasattr(poly, "footprint") else poly


def cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def orient(a: Point, b: Point, c: Point) -> int:
    """Sign of the turn a -> b -> c; 0 when collinear within tolerance."""
    ux, uy = b[0] - a[0], b[1] - a[1]
    vx, vy = c[0] - a[0], c[1] - a[1]
    cr = ux * vy - uy * vx
    tol = ORIENT_EPS * (abs(ux) + abs(uy)) * (abs(vx) + abs(vy))
    if abs(cr) <= tol:
        return 0
    return 1 if cr > 0 else -1


def distance(p: Point, q: Point) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


def segments_properly_intersect(s1: Segment, s2: Segment) -> bool:
    """True iff the segments cross at a point interior to both.

    Shared endpoints, T-junctions and collinear overlap are not proper
    crossings.
    """
    a, b = s1
    c, d = s2
    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    if o1 == 0 or o2 == 0 or o1 == o2:
        return False
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    return o3 != 0 and o4 != 0 and o3 != o4


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    dx, dy = b[0] - a[0], b[1] - a[1]
    den = dx * dx + dy * dy
    if den == 0.0:
        return distance(p, a)
    t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / den
    t = min(1.0, max(0.0, t))
    return math.hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy))


def point_in_polygon(p: Point, poly) -> Location:
    """Even-odd classification with a 1e-9 m boundary band."""
    ring = _ring(poly)
    n = len(ring)
    px, py = p
    inside = False
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        if point_segment_distance(p, a, b) <= BOUNDARY_TOL:
            return Location.BOUNDARY
        if (a[1] > py) != (b[1] > py):
            x_at = a[0] + (py - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
            if px < x_at:
                inside = not inside
    return Location.INSIDE if inside else Location.OUTSIDE


def polygon_edges(poly) -> list[Segment]:
    ring = _ring(poly)
    return [Segment(ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring))]


def signed_area(ring: Sequence[Point]) -> float:
    s = 0.0
    n = len(ring)
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def bbox(ring: Sequence[Point]) -> tuple[float, float, float, float]:
    xs = [v[0] for v in ring]
    ys = [v[1] for v in ring]
    return min(xs), min(ys), max(xs), max(ys)


def _on_segment_param(p: Point, q: Point, v: Point) -> float | None:
    """Parameter of v along p->q if v lies on the closed segment, else None."""
    if orient(p, q, v) != 0:
        return None
    dx, dy = q[0] - p[0], q[1] - p[1]
    t = ((v[0] - p[0]) * dx + (v[1] - p[1]) * dy) / (dx * dx + dy * dy)
    if -BOUNDARY_TOL <= t <= 1.0 + BOUNDARY_TOL:
        return min(1.0, max(0.0, t))
    return None


def segment_blocked_by(p: Point, q: Point, poly) -> bool:
    """True iff the open segment (p, q) meets the interior of ``poly``.

    A proper crossing with any edge blocks outright. Otherwise the segment is
    split at every point where it touches the boundary, and each open piece
    is classified by its midpoint.
    """
    ring = _ring(poly)
    n = len(ring)
    ts = [0.0, 1.0]
    for i in range(n):
        a = ring[i]
        b = ring[(i + 1) % n]
        if segments_properly_intersect(Segment(a, b), Segment(p, q)):
            return True
        t = _on_segment_param(p, q, a)
        if t is not None:
            ts.append(t)
    ts.sort()
    dx, dy = q[0] - p[0], q[1] - p[1]
    for t0, t1 in zip(ts, ts[1:]):
        if t1 - t0 <= 1e-12:
            continue
        tm = 0.5 * (t0 + t1)
        mid = Point(p[0] + tm * dx, p[1] + tm * dy)
        if point_in_polygon(mid, ring) is Location.INSIDE:
            return True
    return False


def line_of_sight(p: Point, q: Point, buildings) -> bool:
    """True iff the open segment (p, q) avoids every building interior.

    Grazing along a wall or touching a corner does not block.
    """
    minx, maxx = min(p[0], q[0]), max(p[0], q[0])
    miny, maxy = min(p[1], q[1]), max(p[1], q[1])
    for b in buildings:
        bx0, by0, bx1, by1 = b.bbox if hasattr(b, "bbox") else bbox(_ring(b))
        if bx0 > maxx or bx1 < minx or by0 > maxy or by1 < miny:
            continue
        if segment_blocked_by(p, q, b):
            return False
    return True


def is_convex_vertex(prev: Point, v: Point, nxt: Point) -> bool:
    """Convexity for a counter-clockwise ring."""
    return orient(prev, v, nxt) > 0


def inflate_corners(poly, eps: float) -> list[Point]:
    """Candidate relay sites just outside each convex corner.

    Each site is the intersection of the two incident walls offset outward
    by ``eps``, i.e. it sits on the exterior angle bisector and keeps ``eps``
    clearance from both walls. Reflex corners yield nothing.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    ring = list(_ring(poly))
    if signed_area(ring) < 0:
        ring.reverse()
    n = len(ring)
    out: list[Point] = []
    for i in range(n):
        prev, v, nxt = ring[i - 1], ring[i], ring[(i + 1) % n]
        turn = orient(prev, v, nxt)
        if turn < 0:
            continue
        u1 = _unit(v[0] - prev[0], v[1] - prev[1])
        u2 = _unit(nxt[0] - v[0], nxt[1] - v[1])
        # bisector of the exterior angle: away from both incident edges
        bx, by = u1[0] - u2[0], u1[1] - u2[1]
        norm = math.hypot(bx, by)
        # sin of half the interior angle
        half_sin = 0.5 * math.hypot(u1[0] + u2[0], u1[1] + u2[1])
        if turn == 0 or norm < 1e-6 or half_sin < 1e-6:
            warnings.warn(
                f"vertex {i} at ({v[0]:.3f}, {v[1]:.3f}) is degenerate; skipped",
                DegenerateVertexWarning,
                stacklevel=2,
            )
            continue
        scale = eps / half_sin
        c = Point(v[0] + bx / norm * scale, v[1] + by / norm * scale)
        if point_in_polygon(c, ring) is not Location.OUTSIDE or segment_blocked_by(c, v, ring):
            warnings.warn(
                f"inflated corner of vertex {i} falls back into the footprint; skipped",
                DegenerateVertexWarning,
                stacklevel=2,
            )
            continue
        out.append(c)
    return out


def _unit(x: float, y: float) -> tuple[float, float]:
    n = math.hypot(x, y)
    return x / n, y / n


class EdgeArrays:
    """Building edges packed into arrays for batched sight-line tests."""

    def __init__(self, buildings):
        self.buildings = list(buildings)
        a, b = [], []
        for bld in self.buildings:
            ring = _ring(bld)
            for i in range(len(ring)):
                a.append(ring[i])
                b.append(ring[(i + 1) % len(ring)])
        self.a = np.asarray(a, dtype=float).reshape(-1, 2)
        self.b = np.asarray(b, dtype=float).reshape(-1, 2)
        self.boxes = [bbox(_ring(bld)) for bld in self.buildings]

    def on_boundary(self, p: Point) -> bool:
        tol = BOUNDARY_TOL
        return any(
            x0 - tol <= p[0] <= x1 + tol
            and y0 - tol <= p[1] <= y1 + tol
            and point_in_polygon(p, bld) is Location.BOUNDARY
            for bld, (x0, y0, x1, y1) in zip(self.buildings, self.boxes)
        )


def _orient_arr(ax, ay, bx, by, cx, cy):
    # same arithmetic as orient(), broadcast
    ux, uy = bx - ax, by - ay
    vx, vy = cx - ax, cy - ay
    cr = ux * vy - uy * vx
    tol = ORIENT_EPS * (np.abs(ux) + np.abs(uy)) * (np.abs(vx) + np.abs(vy))
    return np.where(np.abs(cr) <= tol, 0, np.sign(cr)).astype(np.int8)


def line_of_sight_many(p: Point, targets, edges: EdgeArrays) -> np.ndarray:
    """Vectorized ``line_of_sight(p, t, buildings)`` for many targets.

    Rays that touch a vertex or end on a wall are re-checked with the exact
    scalar test, so the result equals the scalar predicate.
    """
    q = np.asarray(targets, dtype=float).reshape(-1, 2)
    n = len(q)
    if n == 0 or len(edges.a) == 0:
        return np.ones(n, dtype=bool)
    px, py = float(p[0]), float(p[1])
    tx, ty = q[:, :1], q[:, 1:]
    ax, ay = edges.a[:, 0][None, :], edges.a[:, 1][None, :]
    bx, by = edges.b[:, 0][None, :], edges.b[:, 1][None, :]
    s1 = _orient_arr(px, py, tx, ty, ax, ay)
    s2 = _orient_arr(px, py, tx, ty, bx, by)
    s3 = _orient_arr(ax, ay, bx, by, px, py)
    s4 = _orient_arr(ax, ay, bx, by, tx, ty)
    proper = (s1 * s2 < 0) & (s3 * s4 < 0)
    blocked = proper.any(axis=1)

    # vertex on the closed segment (p, t]
    dx, dy = tx - px, ty - py
    dd = dx * dx + dy * dy
    with np.errstate(divide="ignore", invalid="ignore"):
        sa = ((ax - px) * dx + (ay - py) * dy) / dd
    on_ray = (s1 == 0) & (sa > 0) & (sa <= 1.0 + BOUNDARY_TOL)
    # target on a wall, or origin on a wall
    on_wall = (s4 == 0) & (s1 * s2 <= 0)
    ambiguous = ~blocked & (on_ray.any(axis=1) | on_wall.any(axis=1))
    if edges.on_boundary(p):
        ambiguous = ~blocked
    visible = ~blocked
    same = (q[:, 0] == px) & (q[:, 1] == py)
    visible[same] = False
    for k in np.flatnonzero(ambiguous & ~same):
        visible[k] = line_of_sight(p, Point(float(q[k, 0]), float(q[k, 1])), edges.buildings)
    return visible
