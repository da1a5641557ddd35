"""GeoJSON building footprints to a local-meters scenario skeleton.

Coordinates are projected with a spherical azimuthal-equidistant projection
centred on the mean of all outer-ring vertices. Interior rings (courtyards)
are dropped: sub-rooftop drones cannot use them anyway.
"""

from __future__ import annotations

import math
from typing import Any

EARTH_RADIUS_M = 6371008.8


def aeqd_forward(lon: float, lat: float, lon0: float, lat0: float) -> tuple[float, float]:
    """Spherical azimuthal-equidistant projection about (lon0, lat0), meters."""
    phi, lam = math.radians(lat), math.radians(lon)
    phi0, lam0 = math.radians(lat0), math.radians(lon0)
    dlam = lam - lam0
    cos_c = math.sin(phi0) * math.sin(phi) + math.cos(phi0) * math.cos(phi) * math.cos(dlam)
    c = math.acos(max(-1.0, min(1.0, cos_c)))
    k = 1.0 if c == 0.0 else c / math.sin(c)
    x = EARTH_RADIUS_M * k * math.cos(phi) * math.sin(dlam)
    y = EARTH_RADIUS_M * k * (math.cos(phi0) * math.sin(phi) - math.sin(phi0) * math.cos(phi) * math.cos(dlam))
    return x, y


def _outer_rings(geom: dict, fid: str, warn) -> list[list]:
    gtype = geom.get("type") if geom else None
    if gtype == "Polygon":
        polys = [geom["coordinates"]]
    elif gtype == "MultiPolygon":
        polys = geom["coordinates"]
    else:
        warn(f"feature {fid}: geometry type {gtype} is not polygonal; skipped")
        return []
    rings = []
    for poly in polys:
        if not poly:
            continue
        if len(poly) > 1:
            warn(f"feature {fid}: {len(poly) - 1} interior ring(s) dropped")
        rings.append(poly[0])
    return rings


def convert_feature_collection(doc: dict[str, Any]) -> tuple[dict[str, Any], list[str]]:
    """Scenario document (as a dict) plus warnings for a FeatureCollection.

    MBS sits at the projection centre as a placeholder; RIS and radio
    sections are left for the user to fill in.
    """
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise ValueError("input is not a GeoJSON FeatureCollection")
    warnings: list[str] = []
    rings: list[tuple[str, list]] = []
    for k, feat in enumerate(doc.get("features", [])):
        props = feat.get("properties") or {}
        fid = str(feat.get("id") or props.get("id") or props.get("osm_id") or f"b{k}")
        parts = _outer_rings(feat.get("geometry"), fid, warnings.append)
        for j, ring in enumerate(parts):
            rings.append((fid if len(parts) == 1 else f"{fid}_{j}", ring))

    if not rings:
        warnings.append("no polygon features; scenario has zero buildings")
        return {"buildings": [], "mbs": [0.0, 0.0], "ris": [], "radio": {}, "n": 3, "clearance_m": 0.5}, warnings

    verts = [v for _, ring in rings for v in (ring[:-1] if ring[0] == ring[-1] else ring)]
    lon0 = sum(v[0] for v in verts) / len(verts)
    lat0 = sum(v[1] for v in verts) / len(verts)
    buildings = []
    for fid, ring in rings:
        if ring[0] == ring[-1]:
            ring = ring[:-1]
        pts = [list(aeqd_forward(v[0], v[1], lon0, lat0)) for v in ring]
        buildings.append({"id": fid, "footprint": [[round(x, 3), round(y, 3)] for x, y in pts]})
    warnings.append("mbs placed at the projection centre as a placeholder")
    return {
        "buildings": buildings,
        "mbs": [0.0, 0.0],
        "ris": [],
        "radio": {},
        "n": 3,
        "clearance_m": 0.5,
        "projection": {"type": "aeqd", "lon0": lon0, "lat0": lat0},
    }, warnings
