"""Scenario data model, validation and JSON (de)serialization."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any

from .geometry import (
    Location,
    Point,
    Segment,
    bbox,
    orient,
    point_in_polygon,
    point_segment_distance,
    segments_properly_intersect,
    signed_area,
)

ON_WALL_TOL = 1e-6
NORMAL_TOL = 1e-9


class ScenarioParseError(ValueError):
    """The scenario document is not well-formed."""


class ScenarioValidationError(ValueError):
    """The scenario document parsed but violates model invariants."""

    def __init__(self, issues: list["Issue"]):
        self.issues = issues
        super().__init__("; ".join(str(i) for i in issues))


@dataclass(frozen=True)
class Issue:
    entity: str
    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.entity}.{self.field}: {self.rule}"


@dataclass(frozen=True)
class Building:
    id: str
    footprint: tuple[Point, ...]

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        return bbox(self.footprint)

    @property
    def edges(self) -> list[Segment]:
        fp = self.footprint
        return [Segment(fp[i], fp[(i + 1) % len(fp)]) for i in range(len(fp))]


@dataclass(frozen=True)
class RisPanel:
    id: str
    wall: Segment
    mount: Point
    outward_normal: tuple[float, float]
    elements_m: int = 3
    gain_bf_db: float = 15.0

    def serves(self, p: Point) -> bool:
        """Whether ``p`` is strictly on the reflecting side of the wall line."""
        a, b = self.wall
        side = orient(a, b, p)
        tip = Point(a[0] + self.outward_normal[0], a[1] + self.outward_normal[1])
        return side != 0 and side == orient(a, b, tip)


@dataclass(frozen=True)
class RadioParams:
    """Link-budget constants. Defaults are the 38 GHz setup used throughout."""

    pl_ref_db: float = 39.0
    d0_m: float = 5.0
    alpha: float = 2.13
    beta: float = 2.13
    tx_power_dbm: float = 20.0
    tx_power_max_dbm: float = 20.0
    noise_dbm: float = -131.0
    g_tx_dbi: float = 0.0
    g_rx_dbi: float = 0.0
    eta: float = 0.82
    b_eff_hz: float = 18.72e6
    snr_min_db: float = 41.0
    hop_penalty_db: float = 1000.0
    normalize_by_d0: bool = True
    carrier_ghz: float = 38.0  # metadata only


@dataclass(frozen=True)
class Scenario:
    buildings: tuple[Building, ...]
    mbs: Point
    ris_panels: tuple[RisPanel, ...] = ()
    radio: RadioParams = field(default_factory=RadioParams)
    drone_budget_n: int = 3
    clearance_m: float = 0.5

    def with_panels(self, panels) -> "Scenario":
        return replace(self, ris_panels=tuple(panels))


def _finite(p) -> bool:
    return all(math.isfinite(c) for c in p)


def _simple_polygon_issues(b: Building) -> list[Issue]:
    fp = b.footprint
    n = len(fp)
    issues = []
    if n < 3:
        return [Issue(f"building {b.id}", "footprint", "needs at least 3 vertices")]
    if not all(_finite(v) for v in fp):
        return [Issue(f"building {b.id}", "footprint", "non-finite coordinate")]
    for i in range(n):
        if fp[i] == fp[(i + 1) % n]:
            issues.append(Issue(f"building {b.id}", "footprint", f"vertex {i} repeats its successor"))
    if issues:
        return issues
    if signed_area(fp) <= 0:
        issues.append(Issue(f"building {b.id}", "footprint", "vertices not counter-clockwise"))
    edges = b.edges
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                # adjacent edges may only share their common vertex
                shared = edges[i].b if j == i + 1 else edges[i].a
                other_i = edges[i].a if j == i + 1 else edges[i].b
                other_j = edges[j].b if j == i + 1 else edges[j].a
                if (
                    orient(other_i, shared, other_j) == 0
                    and (other_j[0] - shared[0]) * (other_i[0] - shared[0])
                    + (other_j[1] - shared[1]) * (other_i[1] - shared[1])
                    > 0
                ):
                    issues.append(Issue(f"building {b.id}", "footprint", f"edges {i} and {j} fold back"))
                continue
            if _segments_touch(edges[i], edges[j]):
                issues.append(Issue(f"building {b.id}", "footprint", f"edges {i} and {j} intersect"))
    return issues


def _segments_touch(s1: Segment, s2: Segment) -> bool:
    if segments_properly_intersect(s1, s2):
        return True
    return (
        point_segment_distance(s1.a, *s2) <= ON_WALL_TOL
        or point_segment_distance(s1.b, *s2) <= ON_WALL_TOL
        or point_segment_distance(s2.a, *s1) <= ON_WALL_TOL
        or point_segment_distance(s2.b, *s1) <= ON_WALL_TOL
    )


def _boxes_overlap(b1, b2) -> bool:
    return not (b1[0] > b2[2] or b2[0] > b1[2] or b1[1] > b2[3] or b2[1] > b1[3])


def _overlap_issues(buildings) -> list[Issue]:
    issues = []
    boxes = [b.bbox for b in buildings]
    for i, bi in enumerate(buildings):
        for j in range(i + 1, len(buildings)):
            bj = buildings[j]
            if not _boxes_overlap(boxes[i], boxes[j]):
                continue
            crossing = any(segments_properly_intersect(e, f) for e in bi.edges for f in bj.edges)
            nested = any(point_in_polygon(v, bj) is Location.INSIDE for v in bi.footprint) or any(
                point_in_polygon(v, bi) is Location.INSIDE for v in bj.footprint
            )
            if crossing or nested:
                issues.append(Issue(f"building {bi.id}", "footprint", f"overlaps building {bj.id}"))
    return issues


def host_edge(panel: RisPanel, buildings) -> tuple[Building, Segment] | None:
    """Building edge whose extent contains both wall endpoints."""
    for b in buildings:
        for e in b.edges:
            if all(point_segment_distance(p, *e) <= ON_WALL_TOL for p in panel.wall):
                return b, e
    return None


def outward_normal_of(edge: Segment) -> tuple[float, float]:
    # right-hand normal of a counter-clockwise edge
    dx, dy = edge.b[0] - edge.a[0], edge.b[1] - edge.a[1]
    n = math.hypot(dx, dy)
    return (dy / n, -dx / n)


def validate_scenario(s: Scenario) -> list[Issue]:
    """Every violated invariant, each tagged with entity, field and rule."""
    issues: list[Issue] = []
    ids = set()
    for b in s.buildings:
        if b.id in ids:
            issues.append(Issue(f"building {b.id}", "id", "duplicate id"))
        ids.add(b.id)
        issues.extend(_simple_polygon_issues(b))
    if not issues:
        issues.extend(_overlap_issues(s.buildings))

    if not _finite(s.mbs):
        issues.append(Issue("mbs", "position", "non-finite coordinate"))
    else:
        for b in s.buildings:
            if len(b.footprint) >= 3 and point_in_polygon(s.mbs, b) is not Location.OUTSIDE:
                issues.append(Issue("mbs", "position", f"mbs inside building {b.id}"))

    ris_ids = set()
    for r in s.ris_panels:
        ent = f"ris {r.id}"
        if r.id in ris_ids:
            issues.append(Issue(ent, "id", "duplicate id"))
        ris_ids.add(r.id)
        if r.wall.a == r.wall.b:
            issues.append(Issue(ent, "wall", "zero-length wall"))
            continue
        if point_segment_distance(r.mount, *r.wall) > ON_WALL_TOL:
            issues.append(Issue(ent, "mount", "mount is not on its wall"))
        nx, ny = r.outward_normal
        if abs(math.hypot(nx, ny) - 1.0) > NORMAL_TOL:
            issues.append(Issue(ent, "outward_normal", "not unit length"))
        if r.elements_m < 1:
            issues.append(Issue(ent, "elements_m", "must be >= 1"))
        if r.gain_bf_db < 0:
            issues.append(Issue(ent, "gain_bf_db", "must be >= 0"))
        host = host_edge(r, s.buildings)
        if host is None:
            issues.append(Issue(ent, "wall", "does not lie on any building edge"))
            continue
        out = outward_normal_of(host[1])
        if nx * out[0] + ny * out[1] <= NORMAL_TOL:
            issues.append(Issue(ent, "outward_normal", f"points into building {host[0].id}"))

    rp = s.radio
    checks = [
        ("tx_power_dbm", rp.tx_power_dbm <= rp.tx_power_max_dbm, "exceeds tx_power_max_dbm"),
        ("eta", 0 < rp.eta <= 1, "must be in (0, 1]"),
        ("b_eff_hz", rp.b_eff_hz > 0, "must be positive"),
        ("d0_m", rp.d0_m > 0, "must be positive"),
        ("alpha", rp.alpha > 0, "must be positive"),
        ("beta", rp.beta > 0, "must be positive"),
        ("hop_penalty_db", rp.hop_penalty_db >= 0, "must be >= 0"),
    ]
    for name, ok, rule in checks:
        if not ok:
            issues.append(Issue("radio", name, rule))
    if s.drone_budget_n < 1:
        issues.append(Issue("scenario", "n", "drone budget must be >= 1"))
    if not s.clearance_m > 0:
        issues.append(Issue("scenario", "clearance_m", "must be positive"))
    return issues


# --- document I/O -----------------------------------------------------------

_RADIO_FIELDS = {f.name: f for f in fields(RadioParams)}


def _point(v, what: str) -> Point:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ScenarioParseError(f"{what}: expected [x, y], got {v!r}")
    try:
        return Point(float(v[0]), float(v[1]))
    except (TypeError, ValueError) as exc:
        raise ScenarioParseError(f"{what}: {exc}") from None


def _normalize_ring(pts: list[Point]) -> tuple[Point, ...]:
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts = pts[:-1]
    if len(pts) >= 3 and signed_area(pts) < 0:
        pts = pts[::-1]
    return tuple(pts)


def scenario_from_dict(doc: dict[str, Any]) -> Scenario:
    """Build a Scenario from a parsed document without validating it."""
    if not isinstance(doc, dict):
        raise ScenarioParseError("top level must be an object")
    try:
        buildings = []
        for k, raw in enumerate(doc.get("buildings", [])):
            bid = str(raw.get("id", f"b{k}"))
            ring = [_point(v, f"building {bid}") for v in raw["footprint"]]
            buildings.append(Building(bid, _normalize_ring(ring)))
        if "mbs" not in doc:
            raise ScenarioParseError("missing 'mbs'")
        mbs = _point(doc["mbs"], "mbs")

        radio_raw = doc.get("radio", {}) or {}
        unknown = set(radio_raw) - set(_RADIO_FIELDS)
        if unknown:
            raise ScenarioParseError(f"unknown radio fields: {sorted(unknown)}")
        radio_kw = {}
        for k, v in radio_raw.items():
            radio_kw[k] = bool(v) if k == "normalize_by_d0" else float(v)
        radio = RadioParams(**radio_kw)

        panels = []
        for k, raw in enumerate(doc.get("ris", [])):
            rid = str(raw.get("id", f"ris{k}"))
            wall = Segment(*(_point(v, f"ris {rid} wall") for v in raw["wall"]))
            mount = _point(raw["mount"], f"ris {rid} mount") if raw.get("mount") is not None else Point(
                0.5 * (wall.a[0] + wall.b[0]), 0.5 * (wall.a[1] + wall.b[1])
            )
            if raw.get("normal") is not None:
                normal = tuple(float(c) for c in raw["normal"])
            else:
                host = host_edge(RisPanel(rid, wall, mount, (1.0, 0.0)), buildings)
                normal = outward_normal_of(host[1]) if host else (0.0, 0.0)
            panels.append(
                RisPanel(
                    rid,
                    wall,
                    mount,
                    normal,
                    elements_m=int(raw.get("m", 3)),
                    gain_bf_db=float(raw.get("gain_bf_db", 15.0)),
                )
            )
        return Scenario(
            buildings=tuple(buildings),
            mbs=mbs,
            ris_panels=tuple(panels),
            radio=radio,
            drone_budget_n=int(doc.get("n", 3)),
            clearance_m=float(doc.get("clearance_m", 0.5)),
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise ScenarioParseError(f"malformed scenario: {exc!r}") from None


def load_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document.

    Raises ScenarioParseError for malformed input and ScenarioValidationError
    (carrying every issue) when invariants fail.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(str(exc)) from None
    s = scenario_from_dict(doc)
    issues = validate_scenario(s)
    if issues:
        raise ScenarioValidationError(issues)
    return s


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    return {
        "buildings": [{"id": b.id, "footprint": [list(v) for v in b.footprint]} for b in s.buildings],
        "mbs": list(s.mbs),
        "ris": [
            {
                "id": r.id,
                "wall": [list(r.wall.a), list(r.wall.b)],
                "mount": list(r.mount),
                "normal": list(r.outward_normal),
                "m": r.elements_m,
                "gain_bf_db": r.gain_bf_db,
            }
            for r in s.ris_panels
        ],
        "radio": asdict(s.radio),
        "n": s.drone_budget_n,
        "clearance_m": s.clearance_m,
    }


def dump_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2)
