"""Multi-hop mmWave backhaul planning with drone relays and wall-mounted RIS."""

from .channel import HopBudget, capacity_bps, hop_budget, pl_direct_db, pl_ris_db, snr_db
from .geometry import Point, Segment, line_of_sight, point_in_polygon, segments_properly_intersect
from .heatmap import CoverageGrid, GridSpec, evaluate_grid, export_grid
from .planner import (
    BackhaulPath,
    Planner,
    assemble_backhaul_graph,
    coverage_set,
    shortest_backhaul_path,
)
from .scenario import Building, RadioParams, RisPanel, Scenario, load_scenario, validate_scenario
from .visibility import VisNode, build_visibility_graph, visibility_oracle, visible_from

__all__ = [
    "BackhaulPath",
    "Building",
    "CoverageGrid",
    "GridSpec",
    "HopBudget",
    "Planner",
    "Point",
    "RadioParams",
    "RisPanel",
    "Scenario",
    "Segment",
    "VisNode",
    "assemble_backhaul_graph",
    "build_visibility_graph",
    "capacity_bps",
    "coverage_set",
    "evaluate_grid",
    "export_grid",
    "hop_budget",
    "line_of_sight",
    "load_scenario",
    "pl_direct_db",
    "pl_ris_db",
    "point_in_polygon",
    "segments_properly_intersect",
    "shortest_backhaul_path",
    "snr_db",
    "validate_scenario",
    "visibility_oracle",
    "visible_from",
]
