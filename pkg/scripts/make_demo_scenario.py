"""Write the bundled demo scenario: a street grid around a market square.

The layout is synthetic (rectangular blocks, 10-12 m streets, a town-hall
block in the middle of the square). Two RIS panels face the square.
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "risbackhaul" / "data" / "demo_scenario.json"

BANDS = [(10, 70), (82, 140), (150, 250), (260, 318), (330, 390)]


def rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


def main():
    buildings = []
    for i, (x0, x1) in enumerate(BANDS):
        for j, (y0, y1) in enumerate(BANDS):
            if i == 2 and j == 2:
                continue  # the square
            bid = f"blk{i}{j}"
            if (i + j) % 3 == 0 and i != 2 and j != 2:
                # split long blocks by a 6 m passage
                mx = 0.5 * (x0 + x1)
                buildings.append({"id": bid + "a", "footprint": rect(x0, y0, mx - 3, y1)})
                buildings.append({"id": bid + "b", "footprint": rect(mx + 3, y0, x1, y1)})
            elif (i, j) == (3, 1):
                # L-shaped block with a courtyard notch
                buildings.append(
                    {
                        "id": bid,
                        "footprint": [[x0, y0], [x1, y0], [x1, y1], [0.5 * (x0 + x1), y1], [0.5 * (x0 + x1), 0.5 * (y0 + y1)], [x0, 0.5 * (y0 + y1)]],
                    }
                )
            else:
                buildings.append({"id": bid, "footprint": rect(x0, y0, x1, y1)})
    buildings.append({"id": "town_hall", "footprint": rect(180, 185, 220, 215)})

    doc = {
        "buildings": buildings,
        "mbs": [76.0, 3.0],
        "ris": [
            {"id": "ris_east", "wall": [[260, 195], [260, 205]], "m": 3, "gain_bf_db": 15},
            {"id": "ris_north", "wall": [[205, 260], [195, 260]], "m": 3, "gain_bf_db": 15},
        ],
        "radio": {},
        "n": 2,
        "clearance_m": 0.5,
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
