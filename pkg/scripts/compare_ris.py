"""Coverage of the demo town with 0, 1 and 2 RIS panels across drone budgets.

Prints one row per (panels, budget): covered cells, mean drones over covered
cells and median bottleneck throughput. Optionally writes the per-setting
throughput PGMs for side-by-side viewing.
"""

import argparse
import statistics
from pathlib import Path

from risbackhaul.geometry import Point
from risbackhaul.heatmap import GridSpec, evaluate_grid, export_grid
from risbackhaul.planner import Planner
from risbackhaul.scenario import load_scenario

DEMO = Path(__file__).resolve().parents[1] / "src" / "risbackhaul" / "data" / "demo_scenario.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default=str(DEMO))
    ap.add_argument("--cell", type=float, default=4.0)
    ap.add_argument("--budgets", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--pgm-dir", default=None)
    args = ap.parse_args()

    s = load_scenario(Path(args.scenario).read_text())
    xs = [v[0] for b in s.buildings for v in b.footprint]
    ys = [v[1] for b in s.buildings for v in b.footprint]
    side = max(max(xs), max(ys)) + 10
    spec = GridSpec(Point(0, 0), side, side, args.cell)

    print(f"{'panels':>6} {'N':>3} {'covered':>8} {'mean_drones':>11} {'median_mbps':>11}")
    for r in range(len(s.ris_panels) + 1):
        sub = s.with_panels(s.ris_panels[:r])
        planner = Planner(sub)
        for n in args.budgets:
            g = evaluate_grid(sub, spec, n_max=n, planner=planner)
            cov = [c for c in g.cells if c.covered]
            drones = statistics.mean(c.drone_count for c in cov) if cov else 0.0
            mbps = statistics.median(c.bottleneck_bps for c in cov) / 1e6 if cov else 0.0
            print(f"{r:>6} {n:>3} {len(cov):>8} {drones:>11.3f} {mbps:>11.1f}")
            if args.pgm_dir:
                out = Path(args.pgm_dir)
                out.mkdir(parents=True, exist_ok=True)
                (out / f"throughput_r{r}_n{n}.pgm").write_text(export_grid(g, "pgm"))


if __name__ == "__main__":
    main()
