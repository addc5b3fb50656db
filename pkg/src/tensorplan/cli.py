"""Command line front end.

Four subcommands cover the benchmark workflow: build-roadmaps materializes
the per-robot graphs a scenario would sample, plan runs one algorithm once
and writes the trajectory, bench runs a seeded batch and writes the CSV,
render draws a stored trajectory as SVG.

Exit codes: 0 on success, 2 when inputs fail validation (bad scenario or
trajectory file, bad flag values), 3 when plan finds no trajectory.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from tensorplan.bench import (
    ALGORITHMS,
    build_scenario_roadmaps,
    emit_csv,
    emit_svg,
    load_scenario,
    load_trajectory,
    optimistic_lower_bound,
    run_experiment,
    run_one,
    save_trajectory,
    scenario_radius,
)
from tensorplan.roadmap import save_roadmap, shortest_path
from tensorplan.tensorgraph import parse_cost_model


def _parse_seed_list(text: str) -> list[int]:
    """'0,3,7' and '0-4' forms, mixed; '0-4,9' -> [0,1,2,3,4,9]."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1) if not part.startswith("-") else (part, "")
            lo_i, hi_i = int(lo), int(hi)
            if hi_i < lo_i:
                raise ValueError(f"empty seed range {part!r}")
            out.extend(range(lo_i, hi_i + 1))
        else:
            out.append(int(part))
    if not out:
        raise ValueError(f"no seeds in {text!r}")
    return out


def _apply_overrides(scenario, args):
    params = scenario.params
    updates = {}
    if getattr(args, "iteration_budget", None) is not None:
        updates["iteration_budget"] = args.iteration_budget
    if getattr(args, "n_it", None) is not None:
        updates["n_it"] = args.n_it
    if getattr(args, "goal_bias", None) is not None:
        updates["goal_bias"] = args.goal_bias
    if updates:
        params = replace(params, **updates)
        scenario = replace(scenario, params=params)
    if getattr(args, "cost", None) is not None:
        scenario = replace(scenario, cost=parse_cost_model(args.cost))
    return scenario


def _add_common_planner_flags(sub) -> None:
    sub.add_argument("--iteration-budget", type=int, default=None,
                     help="expansion budget override")
    sub.add_argument("--n-it", type=int, default=None,
                     help="expansions between goal-connection attempts")
    sub.add_argument("--goal-bias", type=float, default=None,
                     help="probability of sampling the goal configuration")
    sub.add_argument("--cost", default=None,
                     help="cost model override (sum | max | euclidean)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensorplan",
        description="Multi-robot motion planning over per-robot roadmaps.")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("build-roadmaps",
                          help="sample a scenario's per-robot roadmaps")
    sub.add_argument("--scenario", required=True, help="scenario JSON path")
    sub.add_argument("--roadmap-seed", type=int, default=0)
    sub.add_argument("--out", required=True, help="output directory")

    sub = subs.add_parser("plan", help="run one planner once")
    sub.add_argument("--scenario", required=True, help="scenario JSON path")
    sub.add_argument("--algorithm", choices=ALGORITHMS, default="drrt-star")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--roadmap-seed", type=int, default=0)
    sub.add_argument("--out", default=None, help="trajectory JSON path")
    sub.add_argument("--svg", default=None, help="also render the result")
    _add_common_planner_flags(sub)

    sub = subs.add_parser("bench", help="run a seeded batch, write CSV")
    sub.add_argument("--scenario", required=True, help="scenario JSON path")
    sub.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    sub.add_argument("--seeds", default=None,
                     help="run seeds, e.g. 0-4 (default 0-4)")
    sub.add_argument("--roadmap-seeds", default=None,
                     help="roadmap seeds, e.g. 0-9 (default 0-9)")
    sub.add_argument("--csv", default=None, help="per-event CSV path")
    _add_common_planner_flags(sub)

    sub = subs.add_parser("render", help="draw a stored trajectory as SVG")
    sub.add_argument("--scenario", required=True, help="scenario JSON path")
    sub.add_argument("--trajectory", required=True, help="trajectory JSON path")
    sub.add_argument("--out", required=True, help="SVG output path")
    return parser


def _cmd_build_roadmaps(args) -> int:
    scenario = load_scenario(args.scenario)
    roadmaps = build_scenario_roadmaps(scenario, args.roadmap_seed)
    os.makedirs(args.out, exist_ok=True)
    for i, rm in enumerate(roadmaps):
        path = os.path.join(args.out, f"{scenario.name}_robot{i}.json")
        save_roadmap(rm, path)
        n_edges = sum(len(nbrs) for nbrs in rm.adjacency) // 2
        route = shortest_path(rm, rm.start_id, rm.goal_id)
        status = f"start-goal route {route[1]:.4f}" if route else "start-goal disconnected"
        print(f"robot {i}: {len(rm)} vertices, {n_edges} edges, {status} -> {path}")
    lb = optimistic_lower_bound(scenario, roadmaps)
    print(f"optimistic lower bound: {lb:.6f} "
          f"(connection radius {scenario_radius(scenario)})")
    return 0


def _cmd_plan(args) -> int:
    scenario = _apply_overrides(load_scenario(args.scenario), args)
    result, trajectory = run_one(scenario, args.algorithm,
                                 roadmap_seed=args.roadmap_seed, seed=args.seed)
    if result.error is not None:
        print(f"planning failed: {result.error}", file=sys.stderr)
        return 3
    if trajectory is None:
        print(f"no trajectory within {scenario.params.iteration_budget} "
              f"expansions", file=sys.stderr)
        return 3
    print(f"{args.algorithm}: cost {trajectory.cost:.6f} "
          f"(lower bound {result.lower_bound:.6f}, "
          f"normalized {result.normalized_cost:.4f}) "
          f"first solution at iteration {result.first_iteration}, "
          f"{result.elapsed_s:.2f}s")
    if args.out:
        save_trajectory(trajectory, args.out)
        print(f"trajectory -> {args.out}")
    if args.svg:
        emit_svg(scenario, trajectory, args.svg)
        print(f"rendering -> {args.svg}")
    return 0


def _cmd_bench(args) -> int:
    scenario = _apply_overrides(load_scenario(args.scenario), args)
    seeds = _parse_seed_list(args.seeds) if args.seeds else None
    roadmap_seeds = (_parse_seed_list(args.roadmap_seeds)
                     if args.roadmap_seeds else None)
    report = run_experiment(scenario, args.algorithm, seeds=seeds,
                            roadmap_seeds=roadmap_seeds)
    n = len(report.results)
    print(f"{scenario.name} / {args.algorithm}: {n} runs, "
          f"success {report.success_ratio:.2f}, "
          f"median normalized cost {report.median_normalized_cost():.4f}, "
          f"median first iteration {report.median_first_iteration()}")
    failures = [r for r in report.results if r.error]
    for r in failures:
        print(f"  run {r.roadmap_seed}-{r.seed}: {r.error}", file=sys.stderr)
    if args.csv:
        emit_csv(report, args.csv)
        print(f"events -> {args.csv}")
    return 0


def _cmd_render(args) -> int:
    scenario = load_scenario(args.scenario)
    trajectory = load_trajectory(args.trajectory)
    if len(trajectory.robot_paths) != len(scenario.robots):
        raise ValueError(
            f"trajectory has {len(trajectory.robot_paths)} robots, "
            f"scenario has {len(scenario.robots)}")
    emit_svg(scenario, trajectory, args.out)
    print(f"rendering -> {args.out}")
    return 0


_COMMANDS = {
    "build-roadmaps": _cmd_build_roadmaps,
    "plan": _cmd_plan,
    "bench": _cmd_bench,
    "render": _cmd_render,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
