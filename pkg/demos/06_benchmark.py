"""
Seeded experiment batches and artifacts
=======================================

A Scenario bundles everything a run needs: world, robots, queries, roadmap
spec, cost model, planner parameters. Batches cross roadmap seeds with run
seeds, never abort on individual failures, and are bit-reproducible; the
artifacts are a per-event CSV of incumbent improvements and an SVG of the
solution paths.
"""

import os
from dataclasses import replace

from tensorplan import emit_csv, emit_svg, load_bundled, run_experiment, run_one

out_dir = "/tmp/tensorplan_demo"
os.makedirs(out_dir, exist_ok=True)

scenario = load_bundled("two_disk_swap")

# A small paired batch: 3 roadmap draws, one run each, budget trimmed so
# the demo stays quick. Params live on the scenario; replace() to adjust.
quick = replace(scenario,
                params=replace(scenario.params, iteration_budget=10_000))
report = run_experiment(quick, "drrt-star", seeds=[0], roadmap_seeds=[0, 1, 2])
print(f"{report.algorithm} on {report.scenario_name}: "
      f"success {report.success_ratio:.2f}, "
      f"median normalized cost {report.median_normalized_cost():.4f}")

# One CSV row per incumbent improvement, seeds labeled "<roadmap>-<run>".
csv_path = os.path.join(out_dir, "drrt_star_events.csv")
emit_csv(report, csv_path)
with open(csv_path) as fh:
    lines = fh.read().splitlines()
print(f"{csv_path}: {len(lines) - 1} events")
print("  " + lines[0])
print("  " + lines[1])

# Single runs return the trajectory itself; render it to SVG. Start disks
# are filled, goal circles hollow, obstacles gray.
result, trajectory = run_one(quick, "drrt-star", roadmap_seed=0, seed=0)
svg_path = os.path.join(out_dir, "two_disk_swap.svg")
emit_svg(quick, trajectory, svg_path)
print(f"{svg_path}: {os.path.getsize(svg_path)} bytes, "
      f"cost {trajectory.cost:.3f} vs lower bound {result.lower_bound:.3f}")

# The perimeter fixtures scale the same protocol up to 6 robots; see the
# command line (build-roadmaps / plan / bench / render) for the same flow
# without writing any Python.
names = ["perimeter_crossing_r3", "perimeter_crossing_r6"]
for name in names:
    sc = load_bundled(name)
    print(f"{name}: {len(sc.robots)} robots, "
          f"{len(sc.environment.obstacles)} obstacles")
