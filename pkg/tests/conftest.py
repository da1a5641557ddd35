import warnings
from pathlib import Path

import pytest
from hypothesis import settings

from risbackhaul.geometry import DegenerateVertexWarning, Point, Segment
from risbackhaul.scenario import Building, RadioParams, RisPanel, Scenario

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

DEMO = Path(__file__).resolve().parents[1] / "src" / "risbackhaul" / "data" / "demo_scenario.json"


def rect(bid, x0, y0, x1, y1):
    return Building(bid, (Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)))


def corridor_scenario(with_ris=True, flipped=False, n=1):
    """A street with a block (B) splitting it; a panel on the south wall (A).

    MBS at (10, 10) and target at (90, 10) see the panel at (50, 0) under
    block B but not each other.
    """
    a = rect("A", 0, -20, 100, 0)
    b = rect("B", 40, 5, 60, 100)
    panels = ()
    if with_ris:
        normal = (0.0, -1.0) if flipped else (0.0, 1.0)
        panels = (RisPanel("r1", Segment(Point(51, 0), Point(49, 0)), Point(50, 0), normal),)
    return Scenario((a, b), Point(10, 10), panels, RadioParams(), n)


CORRIDOR_TARGET = Point(90, 10)


@pytest.fixture
def corridor():
    return corridor_scenario()


@pytest.fixture
def open_field():
    return Scenario((), Point(0, 0), (), RadioParams(), 1)


@pytest.fixture
def demo_path():
    return DEMO


def random_vis_instance(rng, n_polygons, n_nodes, snap=False, extent=400.0):
    """Buildings plus up to ``n_nodes`` nodes: corner sites, wall points and free points."""
    from risbackhaul.geometry import inflate_corners
    from risbackhaul.synth import random_buildings, random_free_points
    from risbackhaul.visibility import NodeKind, VisNode

    bs = random_buildings(rng, n_polygons, extent=extent, snap=snap)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateVertexWarning)
        pool = [c for b in bs for c in inflate_corners(b, 0.5)]
    pool += [v for b in bs for v in b.footprint]  # raw vertices: grazing rays
    pool += [Point(0.5 * (e.a[0] + e.b[0]), 0.5 * (e.a[1] + e.b[1])) for b in bs for e in b.edges]
    picks = rng.choice(len(pool), size=min(len(pool), n_nodes // 2), replace=False)
    pts = [pool[int(k)] for k in picks]
    pts += random_free_points(rng, bs, n_nodes - len(pts), extent=extent, snap=snap)
    seen, nodes = set(), []
    for k, p in enumerate(pts):
        if p not in seen:
            seen.add(p)
            nodes.append(VisNode(f"n{k:02d}", p, NodeKind.DRS_CANDIDATE))
    return bs, nodes


def degenerate_instances():
    """Hand-built layouts full of collinear corners, shared walls and grazing rays."""
    from risbackhaul.visibility import NodeKind, VisNode

    def nodes_of(pts):
        return [VisNode(f"v{k:02d}", Point(*p), NodeKind.DRS_CANDIDATE) for k, p in enumerate(pts)]

    out = []
    # a row of equal squares: every corner collinear with many others
    row = [rect(f"r{i}", 10 * i, 0, 10 * i + 5, 5) for i in range(4)]
    out.append((row, nodes_of([(x, y) for x in range(-5, 45, 5) for y in (0, 5, -5, 10)])))
    # two squares sharing a wall, nodes on the shared wall and its extension
    pair = [rect("a", 0, 0, 10, 10), rect("b", 10, 0, 20, 10)]
    out.append((pair, nodes_of([(10, -5), (10, 0), (10, 5), (10, 10), (10, 15), (0, 0), (20, 10), (-5, 5), (25, 5), (0, 10), (20, 0)])))
    # checkerboard touching at corners only
    board = [rect(f"k{i}{j}", 10 * i, 10 * j, 10 * i + 10, 10 * j + 10) for i in range(3) for j in range(3) if (i + j) % 2 == 0]
    out.append((board, nodes_of([(x, y) for x in range(-5, 40, 5) for y in range(-5, 40, 5) if (x // 10 + y // 10) % 2 == 1 or x % 10 == 0 or y % 10 == 0])))
    # L-shape with a node in the notch and nodes collinear with the reflex corner
    ell = [Building("L", (Point(0, 0), Point(4, 0), Point(4, 2), Point(2, 2), Point(2, 4), Point(0, 4)))]
    out.append((ell, nodes_of([(3, 3), (2, 2), (4, 4), (1, 5), (5, 1), (6, 2), (2, 6), (0, 6), (6, 0), (-1, -1), (3, 2), (2, 3)])))
    return out
