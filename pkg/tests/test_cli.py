import json
import os

import pytest

from risbackhaul.cli import main
from risbackhaul.heatmap import parse_grid_csv, parse_pgm
from risbackhaul.planner import parse_path_record
from risbackhaul.scenario import dump_scenario

from .conftest import corridor_scenario

OPEN_FIELD = {"buildings": [], "mbs": [50, 50], "n": 1}
BOXED = {"buildings": [{"id": "box", "footprint": [[0, 0], [10, 0], [10, 10], [0, 10]]}], "mbs": [20, 5], "n": 2}


@pytest.fixture
def write(tmp_path):
    def _write(name, content):
        p = tmp_path / name
        p.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(p)

    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_ok(capsys, write):
    code, out, err = run(capsys, "validate", write("s.json", BOXED))
    assert code == 0 and out == ""


def test_validate_mbs_in_building(capsys, write):
    code, out, _ = run(capsys, "validate", write("s.json", dict(BOXED, mbs=[5, 5])))
    assert code == 1
    assert out.strip().splitlines() == ["mbs.position: mbs inside building box"]


@pytest.mark.parametrize("text", ['{"buildings": [', ""])
def test_validate_truncated(capsys, write, text):
    assert run(capsys, "validate", write("s.json", text))[0] == 2


def test_validate_missing_file(capsys, tmp_path):
    assert run(capsys, "validate", str(tmp_path / "nope.json"))[0] == 2


def test_plan_open_field(capsys, write):
    code, out, err = run(capsys, "plan", write("s.json", OPEN_FIELD), "--target", "100", "50")
    assert code == 0
    rec = parse_path_record(out.strip())
    assert rec["covered"] == "1" and rec["hops"] == "1"
    assert rec["node_sequence"] == "MBS,T0"
    report = json.loads(err.strip().splitlines()[-1])
    assert report["command"] == "plan" and report["buildings"] == 0


def test_plan_corridor_ris_switch(capsys, write):
    path = write("c.json", dump_scenario(corridor_scenario(n=1)))
    code, out, _ = run(capsys, "plan", path, "--target", "90", "10", "--disable-ris")
    assert code == 3 and parse_path_record(out.strip())["covered"] == "0"
    code, out, _ = run(capsys, "plan", path, "--target", "90", "10", "--enable-ris")
    rec = parse_path_record(out.strip())
    assert code == 0 and rec["hops"] == "1" and rec["via_ris_flags"] == "1"


def test_plan_budget_override(capsys, write):
    path = write("c.json", dump_scenario(corridor_scenario(with_ris=False, n=1)))
    assert run(capsys, "plan", path, "--target", "90", "10")[0] == 3
    assert run(capsys, "plan", path, "--target", "90", "10", "--n", "3")[0] == 0


def test_plan_target_in_building(capsys, write):
    code, out, _ = run(capsys, "plan", write("s.json", BOXED), "--target", "5", "5")
    assert code == 1 and "inside building box" in out


def test_plan_edge_list(capsys, write, tmp_path):
    edges = tmp_path / "edges.txt"
    code, _, _ = run(capsys, "plan", write("s.json", BOXED), "--target", "30", "5", "--edges-out", str(edges))
    assert code == 0
    lines = edges.read_text().splitlines()
    assert lines == sorted(lines) and all(len(line.split()) == 3 for line in lines)


def test_heatmap_open_field_csv(capsys, write, tmp_path):
    out = tmp_path / "hm"
    code, _, _ = run(capsys, "heatmap", write("s.json", OPEN_FIELD), "--grid", "0", "0", "100", "100", "10", "--out", str(out))
    assert code == 0
    rows = parse_grid_csv((out / "throughput.csv").read_text())
    assert len(rows) == 100 and all(r["covered"] and r["hops"] == 1 for r in rows)
    assert (out / "hops.csv").read_text().startswith("x,y,hops\n")


def test_heatmap_pgm_header(capsys, write, tmp_path):
    out = tmp_path / "hm"
    code, _, _ = run(capsys, "heatmap", write("s.json", BOXED), "--grid", "-10", "-10", "40", "30", "5", "--format", "pgm", "--out", str(out))
    assert code == 0
    text = (out / "throughput.pgm").read_text()
    assert text.startswith("P2\n8 6\n255\n")
    cols, rows, px = parse_pgm(text)
    assert (cols, rows) == (8, 6) and len(px) == 6


def test_heatmap_twice_identical(capsys, write, tmp_path):
    path = write("c.json", dump_scenario(corridor_scenario(n=2)))
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        for fmt in ("csv", "pgm"):
            assert run(capsys, "heatmap", path, "--grid", "0", "0", "100", "60", "5", "--format", fmt, "--out", str(out))[0] == 0
        outs.append({f: (out / f).read_bytes() for f in sorted(os.listdir(out))})
    assert outs[0] == outs[1] and len(outs[0]) == 4


def test_heatmap_bad_grid(capsys, write, tmp_path):
    code, _, _ = run(capsys, "heatmap", write("s.json", OPEN_FIELD), "--grid", "0", "0", "10", "10", "0", "--out", str(tmp_path))
    assert code == 1


def test_heatmap_unwritable(capsys, write, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code, _, _ = run(capsys, "heatmap", write("s.json", OPEN_FIELD), "--grid", "0", "0", "20", "20", "10", "--out", str(blocker / "sub"))
    assert code == 4


def square_feature(fid, lon, lat, size=1e-4, hole=False):
    ring = [[lon, lat], [lon + size, lat], [lon + size, lat + size], [lon, lat + size], [lon, lat]]
    coords = [ring]
    if hole:
        h = size / 4
        coords.append([[lon + h, lat + h], [lon + h, lat + 2 * h], [lon + 2 * h, lat + 2 * h], [lon + 2 * h, lat + h], [lon + h, lat + h]])
    return {"type": "Feature", "id": fid, "properties": {}, "geometry": {"type": "Polygon", "coordinates": coords}}


def convert(capsys, write, tmp_path, features):
    src = write("in.geojson", {"type": "FeatureCollection", "features": features})
    dst = tmp_path / "out.json"
    code, out, err = run(capsys, "convert-geojson", src, str(dst))
    return code, (json.loads(dst.read_text()) if dst.exists() else None), err


def test_convert_square(capsys, write, tmp_path):
    code, doc, _ = convert(capsys, write, tmp_path, [square_feature("sq", 16.93, 52.41)])
    assert code == 0
    (b,) = doc["buildings"]
    assert b["id"] == "sq" and len(b["footprint"]) == 4
    xs = [p[0] for p in b["footprint"]]
    # 1e-4 deg of longitude at 52.41 N is about 6.8 m
    assert max(xs) - min(xs) == pytest.approx(6.78, abs=0.05)


def test_convert_hole_dropped(capsys, write, tmp_path):
    code, doc, err = convert(capsys, write, tmp_path, [square_feature("h", 16.93, 52.41, hole=True)])
    assert code == 0 and len(doc["buildings"]) == 1
    assert "interior ring" in err


def test_convert_empty(capsys, write, tmp_path):
    code, doc, err = convert(capsys, write, tmp_path, [])
    assert code == 0 and doc["buildings"] == []
    assert "zero buildings" in err


def test_convert_skips_points(capsys, write, tmp_path):
    pt = {"type": "Feature", "id": "p", "properties": {}, "geometry": {"type": "Point", "coordinates": [16.9, 52.4]}}
    code, doc, err = convert(capsys, write, tmp_path, [pt, square_feature("sq", 16.93, 52.41)])
    assert code == 0 and len(doc["buildings"]) == 1 and "not polygonal" in err


def test_convert_parse_failure(capsys, write, tmp_path):
    assert run(capsys, "convert-geojson", write("bad.geojson", "{nope"), str(tmp_path / "o.json"))[0] == 2
    assert run(capsys, "convert-geojson", write("fc.geojson", {"type": "Feature"}), str(tmp_path / "o.json"))[0] == 2


def test_converted_scenario_validates_after_placing_mbs(capsys, write, tmp_path):
    feats = [square_feature("a", 16.93, 52.41), square_feature("b", 16.9303, 52.41)]
    code, doc, _ = convert(capsys, write, tmp_path, feats)
    doc["mbs"] = [-50.0, -50.0]
    assert run(capsys, "validate", write("v.json", doc))[0] == 0
