"""Visibility graph over relay sites via a rotational plane sweep.

For each origin the sweep visits obstacle vertices and target nodes in
azimuth order, keeping the building edges that straddle the current ray in
an ordered container keyed by distance along that ray. A target is hidden
when the nearest straddling edge crosses the ray before reaching it.

Rays that pass exactly through an obstacle vertex, or that end on a wall,
are resolved with the exact segment test from :mod:`geometry`; the sweep
only commits on the unambiguous cases.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from sortedcontainers import SortedList

from .geometry import (
    Location,
    Point,
    Segment,
    distance,
    line_of_sight,
    orient,
    point_in_polygon,
    segment_blocked_by,
    segments_properly_intersect,
)

TWO_PI = 2.0 * math.pi
_RAY_BAND = 1e-9
_ANGLE_WINDOW = 1e-9


class NodeKind(Enum):
    MBS = "MBS"
    DRS_CANDIDATE = "DRS_CANDIDATE"
    AP_TARGET = "AP_TARGET"
    RIS = "RIS"


@dataclass(frozen=True)
class VisNode:
    id: str
    pos: Point
    kind: NodeKind


@dataclass
class VisibilityGraph:
    nodes: list[VisNode]
    edges: dict[tuple[str, str], float] = field(default_factory=dict)

    def neighbors(self, node_id: str) -> list[str]:
        out = []
        for a, b in self.edges:
            if a == node_id:
                out.append(b)
            elif b == node_id:
                out.append(a)
        return out

    def adjacency(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def edge_list(self) -> str:
        """One ``id_a id_b length_m`` line per edge, sorted."""
        return "".join(f"{a} {b} {d:.6f}\n" for (a, b), d in sorted(self.edges.items()))


@dataclass
class SweepStats:
    """Counters for status-structure work done by the sweep."""

    comparisons: int = 0
    inserts: int = 0
    removes: int = 0
    exact_fallbacks: int = 0

    @property
    def operations(self) -> int:
        return self.comparisons + self.inserts + self.removes


def _edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


def _angle(o: Point, p: Point) -> float:
    a = math.atan2(p[1] - o[1], p[0] - o[0])
    return a + TWO_PI if a < 0 else a


class _Ray:
    """Shared sweep state: origin and current ray direction."""

    __slots__ = ("ox", "oy", "dx", "dy", "stats")

    def __init__(self, o: Point, stats: SweepStats):
        self.ox, self.oy = o
        self.dx, self.dy = 1.0, 0.0
        self.stats = stats

    def aim(self, p: Point) -> None:
        self.dx, self.dy = p[0] - self.ox, p[1] - self.oy

    def param(self, e: "_Edge") -> float:
        """Distance along the ray to the line of ``e``, in units of |dir|."""
        ex, ey = e.bx - e.ax, e.by - e.ay
        den = self.dx * ey - self.dy * ex
        num = (e.ax - self.ox) * ey - (e.ay - self.oy) * ex
        if den == 0.0:
            dd = self.dx * self.dx + self.dy * self.dy
            ta = ((e.ax - self.ox) * self.dx + (e.ay - self.oy) * self.dy) / dd
            tb = ((e.bx - self.ox) * self.dx + (e.by - self.oy) * self.dy) / dd
            return min(ta, tb)
        return num / den


class _Edge:
    __slots__ = ("ax", "ay", "bx", "by", "idx", "ray", "seg", "start", "end")

    def __init__(self, seg: Segment, idx: int, ray: _Ray, start: Point, end: Point):
        (self.ax, self.ay), (self.bx, self.by) = seg
        self.seg = seg
        self.start = start
        self.end = end
        self.idx = idx
        self.ray = ray

    def __lt__(self, other: "_Edge") -> bool:
        if self is other:
            return False
        ray = self.ray
        ray.stats.comparisons += 1
        t1 = ray.param(self)
        t2 = ray.param(other)
        if abs(t1 - t2) > 1e-12 * max(abs(t1), abs(t2), 1e-300):
            return t1 < t2
        tie = _tie_order(self, other, Point(ray.ox, ray.oy))
        if tie:
            return tie < 0
        m1 = (0.5 * (self.ax + self.bx) - ray.ox) ** 2 + (0.5 * (self.ay + self.by) - ray.oy) ** 2
        m2 = (0.5 * (other.ax + other.bx) - ray.ox) ** 2 + (0.5 * (other.ay + other.by) - ray.oy) ** 2
        if m1 != m2:
            return m1 < m2
        return self.idx < other.idx


def _one_side(line: _Edge, e: _Edge) -> int:
    """Side of ``line`` holding ``e`` if ``e`` does not straddle it, else 0."""
    a, b = line.seg
    s1 = orient(a, b, e.seg.a)
    s2 = orient(a, b, e.seg.b)
    if s1 * s2 < 0:
        return 0
    return s1 or s2


def _tie_order(e1: _Edge, e2: _Edge, o: Point) -> int:
    """Order two edges that meet the current ray at the same point.

    Two non-crossing edges through a common point are separated by at least
    one of their supporting lines; whichever edge lies wholly on the origin's
    side of the other's line is the nearer one.
    """
    s = _one_side(e2, e1)
    if s:
        return -1 if s == orient(*e2.seg, o) else 1
    s = _one_side(e1, e2)
    if s:
        return 1 if s == orient(*e1.seg, o) else -1
    return 0


def _obstacle_edges(buildings) -> list[Segment]:
    segs = []
    for b in buildings:
        fp = b.footprint
        segs.extend(Segment(fp[i], fp[(i + 1) % len(fp)]) for i in range(len(fp)))
    return segs


def visible_from(
    origin: VisNode,
    others: Sequence[VisNode],
    buildings,
    stats: SweepStats | None = None,
) -> set[str]:
    """Ids of ``others`` in raw line of sight of ``origin``.

    Nodes coincident with the origin are never reported. RIS serving-side
    restrictions are not applied here.
    """
    stats = stats if stats is not None else SweepStats()
    o = origin.pos
    ray = _Ray(o, stats)

    hosts = [b for b in buildings if point_in_polygon(o, b) is Location.BOUNDARY]

    # (angle, phase, dist2, payload); phase 0 removal, 1 query, 2 insertion
    events: list[tuple[float, int, float, int]] = []
    edges: list[_Edge] = []
    initial: list[_Edge] = []
    vertices: list[Point] = []
    for b in buildings:
        vertices.extend(b.footprint)
    for idx, seg in enumerate(_obstacle_edges(buildings)):
        turn = orient(o, seg.a, seg.b)
        if turn == 0:
            # collinear with the origin: only blocks rays along its own line,
            # which always pass through a vertex and are settled exactly
            continue
        start, end = (seg.a, seg.b) if turn > 0 else (seg.b, seg.a)
        a0, a1 = _angle(o, start), _angle(o, end)
        if a0 == a1:
            continue
        e = _Edge(seg, len(edges), ray, start, end)
        edges.append(e)
        events.append((a1, 0, 0.0, e.idx))
        events.append((a0, 2, 0.0, e.idx))
        if a0 > a1:
            initial.append(e)

    targets: list[tuple[VisNode, float]] = []
    for node in others:
        if node.id == origin.id:
            continue
        d2 = (node.pos[0] - o[0]) ** 2 + (node.pos[1] - o[1]) ** 2
        if d2 == 0.0:
            continue
        k = len(targets)
        targets.append((node, d2))
        events.append((_angle(o, node.pos), 1, d2, k))

    events.sort()

    vangles = sorted((_angle(o, v), i) for i, v in enumerate(vertices) if v != o)
    vkeys = [a for a, _ in vangles]

    status = SortedList()
    for e in initial:
        stats.inserts += 1
        status.add(e)

    visible: set[str] = set()
    for ang, phase, _, payload in events:
        if phase == 0:
            e = edges[payload]
            ray.aim(e.end)
            stats.removes += 1
            try:
                status.remove(e)
            except ValueError:
                # ordering broke down on a degenerate input; fall back to a scan
                for i, cand in enumerate(status):
                    if cand is e:
                        del status[i]
                        break
        elif phase == 2:
            e = edges[payload]
            ray.aim(e.start)
            stats.inserts += 1
            status.add(e)
        else:
            node, d2 = targets[payload]
            t = node.pos
            ray.aim(t)
            verdict = _classify(o, t, ray, status, vertices, vangles, vkeys, ang)
            if verdict is None:
                stats.exact_fallbacks += 1
                verdict = line_of_sight(o, t, buildings)
            elif verdict and hosts:
                verdict = not any(segment_blocked_by(o, t, h) for h in hosts)
            if verdict:
                visible.add(node.id)
    return visible


def _classify(o, t, ray, status, vertices, vangles, vkeys, ang) -> bool | None:
    """Sweep verdict for one target: True/False, or None when ambiguous."""
    if _vertex_on_ray(o, t, vertices, vangles, vkeys, ang):
        return None
    if not status:
        return True
    front = status[0]
    tf = ray.param(front)
    if tf > 1.0 + _RAY_BAND:
        return True
    if tf < 1.0 - _RAY_BAND and segments_properly_intersect(front.seg, Segment(o, t)):
        return False
    return None


def _vertex_on_ray(o, t, vertices, vangles, vkeys, ang) -> bool:
    """Whether some obstacle vertex lies on the closed segment (o, t]."""
    lo = bisect_left(vkeys, ang - _ANGLE_WINDOW)
    hi = bisect_right(vkeys, ang + _ANGLE_WINDOW)
    cand = list(range(lo, hi))
    # the window may wrap across the positive x-axis
    if ang - _ANGLE_WINDOW < 0:
        cand += range(bisect_left(vkeys, ang - _ANGLE_WINDOW + TWO_PI), len(vkeys))
    if ang + _ANGLE_WINDOW >= TWO_PI:
        cand += range(0, bisect_right(vkeys, ang + _ANGLE_WINDOW - TWO_PI))
    dx, dy = t[0] - o[0], t[1] - o[1]
    dd = dx * dx + dy * dy
    for k in cand:
        v = vertices[vangles[k][1]]
        if orient(o, t, v) != 0:
            continue
        s = ((v[0] - o[0]) * dx + (v[1] - o[1]) * dy) / dd
        if 0.0 < s <= 1.0 + _RAY_BAND:
            return True
    return False


def build_visibility_graph(
    nodes: Sequence[VisNode],
    buildings,
    stats: SweepStats | None = None,
) -> VisibilityGraph:
    """Sweep from every node; each pair is decided once, from its earlier node."""
    _check_unique(nodes)
    g = VisibilityGraph(list(nodes))
    pos = {n.id: n.pos for n in nodes}
    for i, origin in enumerate(nodes):
        later = nodes[i + 1 :]
        if not later:
            continue
        for vid in visible_from(origin, later, buildings, stats):
            g.edges[_edge_key(origin.id, vid)] = distance(origin.pos, pos[vid])
    g.edges = dict(sorted(g.edges.items()))
    return g


def visibility_oracle(nodes: Sequence[VisNode], buildings) -> VisibilityGraph:
    """All-pairs exact line-of-sight; quadratic, for cross-checking only."""
    _check_unique(nodes)
    g = VisibilityGraph(list(nodes))
    for i, p in enumerate(nodes):
        for q in nodes[i + 1 :]:
            if p.pos == q.pos:
                continue
            if line_of_sight(p.pos, q.pos, buildings):
                g.edges[_edge_key(p.id, q.id)] = distance(p.pos, q.pos)
    g.edges = dict(sorted(g.edges.items()))
    return g


def _check_unique(nodes: Iterable[VisNode]) -> None:
    seen = set()
    for n in nodes:
        if n.id in seen:
            raise ValueError(f"duplicate node id {n.id!r}")
        seen.add(n.id)
