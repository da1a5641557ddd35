"""Backhaul graph assembly, penalized shortest paths and coverage.

Relays sit at inflated building corners. A hop is either a direct LoS link
or a reflection off one RIS panel; a reflection is still one hop, so RIS
mounts never appear in a node sequence. Edge cost is path loss plus a fixed
per-hop penalty, and infeasible hops are simply not in the graph.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .channel import Direct, HopBudget, ViaRis, hop_budget
from .geometry import EdgeArrays, Location, Point, distance, inflate_corners, line_of_sight_many, point_in_polygon
from .scenario import RisPanel, Scenario
from .visibility import NodeKind, VisNode, build_visibility_graph

MBS_ID = "MBS"


@dataclass(frozen=True)
class BackhaulEdge:
    u: str
    v: str
    kind: str  # "direct" or "via_ris"
    legs: tuple[float, ...]  # (d,) for direct, (d_u_to_ris, d_ris_to_v) for via_ris
    pl_db: float
    cost: float
    budget: HopBudget
    ris_id: str | None = None

    def other(self, node: str) -> str:
        return self.v if node == self.u else self.u

    @property
    def sort_key(self) -> tuple:
        return (self.cost, self.kind != "direct", self.ris_id or "")


@dataclass
class BackhaulGraph:
    nodes: dict[str, Point] = field(default_factory=dict)
    adj: dict[str, list[BackhaulEdge]] = field(default_factory=dict)

    def add_node(self, node_id: str, pos: Point) -> None:
        self.nodes[node_id] = pos
        self.adj.setdefault(node_id, [])

    def add_edge(self, e: BackhaulEdge) -> None:
        self.adj[e.u].append(e)
        self.adj[e.v].append(e)

    @property
    def edges(self) -> list[BackhaulEdge]:
        seen = {}
        for lst in self.adj.values():
            for e in lst:
                seen[id(e)] = e
        return list(seen.values())


@dataclass(frozen=True)
class BackhaulPath:
    nodes: tuple[str, ...]
    hops: tuple[BackhaulEdge, ...]
    total_cost: float

    @property
    def drone_count(self) -> int:
        return len(self.hops)

    @property
    def bottleneck_bps(self) -> float:
        return min(h.budget.capacity_bps for h in self.hops)


@dataclass(frozen=True)
class CoverageRecord:
    target: Point
    covered: bool
    drone_count: int = 0
    bottleneck_bps: float = 0.0
    path: BackhaulPath | None = None


@dataclass(frozen=True)
class CoverageSet:
    records: tuple[CoverageRecord, ...]

    @property
    def size(self) -> int:
        return sum(r.covered for r in self.records)


def _make_edge(u, v, kind: Direct | ViaRis, radio, ris_id=None) -> BackhaulEdge | None:
    b = hop_budget(kind, radio)
    if not b.feasible:
        return None
    legs = (kind.d,) if isinstance(kind, Direct) else (kind.d1, kind.d2)
    return BackhaulEdge(
        u, v, "direct" if ris_id is None else "via_ris", legs, b.pl_db, b.pl_db + radio.hop_penalty_db, b, ris_id
    )


def candidate_sites(s: Scenario) -> list[VisNode]:
    """MBS plus inflated convex corners that are clear of every footprint."""
    nodes = [VisNode(MBS_ID, s.mbs, NodeKind.MBS)]
    for bi, b in enumerate(s.buildings):
        for k, c in enumerate(inflate_corners(b, s.clearance_m)):
            if all(point_in_polygon(c, o) is Location.OUTSIDE for o in s.buildings):
                nodes.append(VisNode(f"c{bi}.{k}", c, NodeKind.DRS_CANDIDATE))
    return nodes


def ris_nodes(panels: Iterable[RisPanel]) -> list[VisNode]:
    return [VisNode(f"ris:{r.id}", r.mount, NodeKind.RIS) for r in panels]


def target_id(k: int) -> str:
    return f"T{k}"


def _graph_from_visibility(s: Scenario, hop_nodes: Sequence[VisNode], vis) -> BackhaulGraph:
    g = BackhaulGraph()
    for n in hop_nodes:
        g.add_node(n.id, n.pos)
    for (a, b), d in vis.edges.items():
        if a not in g.nodes or b not in g.nodes or d == 0.0:
            continue
        e = _make_edge(a, b, Direct(d), s.radio)
        if e:
            g.add_edge(e)
    adj = vis.adjacency()
    for r in s.ris_panels:
        served = sorted(n for n in adj[f"ris:{r.id}"] if n in g.nodes and r.serves(g.nodes[n]))
        legs = {n: distance(g.nodes[n], r.mount) for n in served}
        for i, u in enumerate(served):
            for v in served[i + 1 :]:
                e = _make_edge(u, v, ViaRis(legs[u], legs[v], r), s.radio, r.id)
                if e:
                    g.add_edge(e)
    return g


def assemble_backhaul_graph(s: Scenario, targets: Sequence[Point]) -> BackhaulGraph:
    """Feasible direct and via-RIS hops among MBS, corner sites and targets."""
    sites = candidate_sites(s)
    tnodes = [VisNode(target_id(k), p, NodeKind.AP_TARGET) for k, p in enumerate(targets)]
    vis = build_visibility_graph(sites + tnodes + ris_nodes(s.ris_panels), s.buildings)
    return _graph_from_visibility(s, sites + tnodes, vis)


def _dijkstra(graph: BackhaulGraph, src: str):
    """Labels (cost, node sequence, hop edges) for every node reachable from src.

    Ties on cost go to the lexicographically smaller node sequence.
    """
    best: dict[str, tuple[float, tuple[str, ...], tuple[BackhaulEdge, ...]]] = {}
    # entries: (cost, node sequence, per-hop edge keys, hops); the edge keys
    # separate parallel edges so the hop tuples are never compared
    heap = [(0.0, (src,), (), ())]
    while heap:
        cost, seq, _, hops = heapq.heappop(heap)
        node = seq[-1]
        if node in best:
            continue
        best[node] = (cost, seq, hops)
        for e in sorted(graph.adj[node], key=lambda e: e.sort_key):
            if e.cost < 0:
                raise ValueError(f"negative edge cost on {e.u}-{e.v}")
            nxt = e.other(node)
            if nxt in best:
                continue
            nh = hops + (e,)
            heapq.heappush(heap, (cost + e.cost, seq + (nxt,), tuple(h.sort_key for h in nh), nh))
    return best


def shortest_backhaul_path(graph: BackhaulGraph, src: str, dst: str, n_max: int) -> BackhaulPath | None:
    """Cheapest MBS-to-target path, or None if none exists or it needs more than ``n_max`` drones."""
    for n in (src, dst):
        if n not in graph.nodes:
            raise ValueError(f"unknown node id {n!r}")
    if src == dst:
        return None
    label = _dijkstra(graph, src).get(dst)
    if label is None:
        return None
    cost, seq, hops = label
    path = BackhaulPath(seq, hops, cost)
    return path if path.drone_count <= n_max else None


class Planner:
    """Reusable planning state for one scenario.

    The graph over MBS and corner sites, and the shortest-path tree from the
    MBS, are computed once; each target is then attached as a sink using
    only its own visibility.
    """

    def __init__(self, s: Scenario, use_ris: bool = True):
        self.scenario = s
        self.panels = tuple(s.ris_panels) if use_ris else ()
        base = replace(s, ris_panels=self.panels)
        self.sites = candidate_sites(s)
        self.rnodes = ris_nodes(self.panels)
        self.visibility = build_visibility_graph(self.sites + self.rnodes, s.buildings)
        self.graph = _graph_from_visibility(base, self.sites, self.visibility)
        self.labels = _dijkstra(self.graph, MBS_ID)

        self.reached = [n for n in self.sites if n.id in self.labels]
        self._reached_xy = np.array([n.pos for n in self.reached], dtype=float).reshape(-1, 2)
        self._mounts_xy = np.array([r.mount for r in self.panels], dtype=float).reshape(-1, 2)
        self._edges = EdgeArrays(s.buildings)
        self._paths: dict[tuple[Point, str], BackhaulPath | None] = {}
        adj = self.visibility.adjacency()
        # per panel: served sites that already have a route from the MBS
        self.ris_sources: dict[str, list[tuple[str, float]]] = {}
        for r in self.panels:
            self.ris_sources[r.id] = sorted(
                (n, distance(self.graph.nodes[n], r.mount))
                for n in adj[f"ris:{r.id}"]
                if n in self.labels and r.serves(self.graph.nodes[n])
            )

    def best_path(self, target: Point, tid: str = "T0") -> BackhaulPath | None:
        """Cheapest path to ``target`` ignoring the drone budget (memoized)."""
        key = (Point(float(target[0]), float(target[1])), tid)
        if key not in self._paths:
            self._paths[key] = self._search(key[0], tid)
        return self._paths[key]

    def _search(self, target: Point, tid: str) -> BackhaulPath | None:
        radio = self.scenario.radio
        best = None
        seen = line_of_sight_many(target, self._reached_xy, self._edges)
        for k in np.flatnonzero(seen):
            u = self.reached[k]
            d = distance(u.pos, target)
            if d > 0.0:
                best = _better(best, self.labels[u.id], _make_edge(u.id, tid, Direct(d), radio))
        seen = line_of_sight_many(target, self._mounts_xy, self._edges)
        for k in np.flatnonzero(seen):
            r = self.panels[k]
            if not r.serves(target):
                continue
            d2 = distance(r.mount, target)
            for src, d1 in self.ris_sources[r.id]:
                best = _better(best, self.labels[src], _make_edge(src, tid, ViaRis(d1, d2, r), radio, r.id))
        if best is None:
            return None
        cost, seq, hops = best
        return BackhaulPath(seq, hops, cost)

    def plan(self, target: Point, n_max: int | None = None, tid: str = "T0") -> CoverageRecord:
        n_max = self.scenario.drone_budget_n if n_max is None else n_max
        path = self.best_path(target, tid)
        if path is None or path.drone_count > n_max:
            return CoverageRecord(target, False)
        return CoverageRecord(target, True, path.drone_count, path.bottleneck_bps, path)


def _better(best, label, e: BackhaulEdge | None):
    if e is None:
        return best
    cost, seq, hops = label
    cand = (cost + e.cost, seq + (e.v,), hops + (e,))
    if best is None:
        return cand
    if (cand[0], cand[1]) < (best[0], best[1]):
        return cand
    if (cand[0], cand[1]) == (best[0], best[1]) and e.sort_key < best[2][-1].sort_key:
        return cand
    return best


def coverage_set(s: Scenario, targets: Sequence[Point], n_max: int | None = None, use_ris: bool = True) -> CoverageSet:
    """Coverage record for each target, evaluated one access point at a time."""
    planner = Planner(s, use_ris=use_ris)
    return CoverageSet(tuple(planner.plan(p, n_max, target_id(k)) for k, p in enumerate(targets)))


def format_path_record(rec: CoverageRecord) -> str:
    """Single-line ``key=value`` export of one target's plan."""
    g = lambda v: format(v, ".6g")  # noqa: E731
    if rec.covered:
        seq = ",".join(rec.path.nodes)
        flags = ",".join("1" if h.kind == "via_ris" else "0" for h in rec.path.hops)
    else:
        seq = flags = "-"
    return (
        f"target_x={g(rec.target[0])} target_y={g(rec.target[1])} covered={int(rec.covered)} "
        f"hops={rec.drone_count} bottleneck_mbps={g(rec.bottleneck_bps / 1e6)} "
        f"node_sequence={seq} via_ris_flags={flags}"
    )


def parse_path_record(line: str) -> dict[str, str]:
    return dict(tok.split("=", 1) for tok in line.split())
