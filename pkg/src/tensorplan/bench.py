"""Scenario files, seeded experiment batches, and artifact emission.

A Scenario bundles everything a run needs: the workspace, the robots, the
query, how to obtain per-robot roadmaps, the cost model, and planner knobs.
Scenarios live in versioned JSON so fixtures stay diff-able and language
neutral. run_experiment executes one algorithm over a seed grid and folds
the outcomes into an ExperimentReport; emit_csv and emit_svg write the
artifacts the benchmark figures are built from.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
import time
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Sequence

import numpy as np

from tensorplan.baselines import (
    composite_prm_star,
    composite_rrt_star,
    implicit_astar,
)
from tensorplan.geometry2d import (
    DiskRobot,
    Environment,
    pair_static_clear,
    point_free,
)
from tensorplan.planners import (
    PlannerParams,
    RunTrace,
    Trajectory,
    ao_drrt,
    drrt,
    drrt_star,
)
from tensorplan.roadmap import Roadmap, build_prm, load_roadmap, shortest_path, star_radius
from tensorplan.tensorgraph import CostModel, TensorSpace

SCENARIO_VERSION = 1
TRAJECTORY_VERSION = 1

ALGORITHMS = (
    "drrt",
    "ao-drrt",
    "drrt-star",
    "implicit-astar",
    "composite-prm-star",
    "composite-rrt-star",
)

# planner params a scenario file may set; seeds are always chosen per run
_PARAM_KEYS = tuple(f.name for f in fields(PlannerParams) if f.name != "seed")


@dataclass
class Scenario:
    """One benchmark problem: world, robots, query, roadmap recipe, knobs.

    Roadmaps come either from (roadmap_n, roadmap_eta) — sampled fresh per
    roadmap seed with the standard connection radius — or from explicit
    per-robot roadmap files; exactly one of the two must be given.
    """

    name: str
    environment: Environment
    robots: tuple[DiskRobot, ...]
    starts: tuple[tuple[float, float], ...]
    goals: tuple[tuple[float, float], ...]
    roadmap_n: Optional[int] = None
    roadmap_eta: Optional[float] = None
    roadmap_files: Optional[tuple[str, ...]] = None
    cost: CostModel = CostModel.SUM
    params: PlannerParams = field(default_factory=PlannerParams)

    def __post_init__(self) -> None:
        self.robots = tuple(self.robots)
        self.starts = tuple((float(x), float(y)) for x, y in self.starts)
        self.goals = tuple((float(x), float(y)) for x, y in self.goals)
        self.cost = CostModel(self.cost)
        n = len(self.robots)
        if n < 1:
            raise ValueError("scenario needs at least one robot")
        if len(self.starts) != n or len(self.goals) != n:
            raise ValueError(
                f"{n} robots but {len(self.starts)} starts and {len(self.goals)} goals")
        for label, configs in (("start", self.starts), ("goal", self.goals)):
            for i, q in enumerate(configs):
                if not point_free(self.environment, self.robots[i], q):
                    raise ValueError(
                        f"{label} of robot {i} at {q} is not collision-free")
            for i in range(n):
                for j in range(i + 1, n):
                    if not pair_static_clear(self.robots[i], self.robots[j],
                                             configs[i], configs[j]):
                        raise ValueError(
                            f"{label}s of robots {i} and {j} are closer than "
                            f"their radius sum")
        if (self.roadmap_files is None) == (self.roadmap_n is None):
            raise ValueError(
                "exactly one of roadmap_n and roadmap_files must be set")
        if self.roadmap_files is not None:
            self.roadmap_files = tuple(str(p) for p in self.roadmap_files)
            if len(self.roadmap_files) != n:
                raise ValueError(
                    f"{n} robots but {len(self.roadmap_files)} roadmap files")
        else:
            if self.roadmap_n < 2:
                raise ValueError(f"roadmap_n must be >= 2, got {self.roadmap_n}")
            if self.roadmap_eta is None or self.roadmap_eta <= 0.0:
                raise ValueError("roadmap_eta must be positive when sampling")


def scenario_to_dict(scenario: Scenario) -> dict:
    env = scenario.environment
    if scenario.roadmap_files is not None:
        roadmap: dict = {"files": list(scenario.roadmap_files)}
    else:
        roadmap = {"n": scenario.roadmap_n, "eta": scenario.roadmap_eta}
    params = {k: getattr(scenario.params, k) for k in _PARAM_KEYS}
    return {
        "version": SCENARIO_VERSION,
        "name": scenario.name,
        "environment": {
            "bounds": list(env.bounds),
            "obstacles": [[list(p) for p in poly] for poly in env.obstacles],
        },
        "robots": [robot.radius for robot in scenario.robots],
        "starts": [list(q) for q in scenario.starts],
        "goals": [list(q) for q in scenario.goals],
        "roadmap": roadmap,
        "cost": scenario.cost.value,
        "params": params,
    }


def scenario_from_dict(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ValueError("scenario document must be a JSON object")
    required = {"version", "name", "environment", "robots", "starts", "goals",
                "roadmap", "cost"}
    allowed = required | {"params"}
    for k in required:
        if k not in data:
            raise ValueError(f"scenario is missing key {k!r}")
    for k in data:
        if k not in allowed:
            raise ValueError(f"unknown scenario key {k!r}")
    if data["version"] != SCENARIO_VERSION:
        raise ValueError(
            f"unsupported scenario version {data['version']!r}; "
            f"this build reads version {SCENARIO_VERSION}")
    env_doc = data["environment"]
    environment = Environment(
        bounds=tuple(env_doc["bounds"]),
        obstacles=tuple(tuple(tuple(p) for p in poly)
                        for poly in env_doc.get("obstacles", ())),
    )
    roadmap = data["roadmap"]
    for k in roadmap:
        if k not in ("n", "eta", "files"):
            raise ValueError(f"unknown roadmap key {k!r}")
    params_doc = dict(data.get("params", {}))
    if "seed" in params_doc:
        raise ValueError("scenario params must not fix a seed; "
                         "seeds are chosen per run")
    for k in params_doc:
        if k not in _PARAM_KEYS:
            raise ValueError(f"unknown planner parameter {k!r}")
    return Scenario(
        name=str(data["name"]),
        environment=environment,
        robots=tuple(DiskRobot(r) for r in data["robots"]),
        starts=tuple(tuple(q) for q in data["starts"]),
        goals=tuple(tuple(q) for q in data["goals"]),
        roadmap_n=roadmap.get("n"),
        roadmap_eta=roadmap.get("eta"),
        roadmap_files=tuple(roadmap["files"]) if "files" in roadmap else None,
        cost=CostModel(data["cost"]),
        params=PlannerParams(**params_doc),
    )


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")


def load_scenario(path) -> Scenario:
    """Parse and invariant-check a scenario file.

    Syntax errors surface with the line number; invariant violations name
    the offending robot or robot pair.
    """
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: line {e.lineno}: {e.msg}") from None
    try:
        return scenario_from_dict(data)
    except ValueError as e:
        raise ValueError(f"{path}: {e}") from None


# ----------------------------------------------------------------- roadmaps

def scenario_radius(scenario: Scenario) -> Optional[float]:
    """Connection radius the scenario's sampled roadmaps use (None for files)."""
    if scenario.roadmap_n is None:
        return None
    return star_radius(scenario.roadmap_n, 2, scenario.environment.area(),
                       scenario.roadmap_eta)


def build_scenario_roadmaps(scenario: Scenario,
                            roadmap_seed: int) -> tuple[Roadmap, ...]:
    """One roadmap per robot for the given roadmap seed.

    Sampled mode derives one child seed per robot from (roadmap_seed, robot
    index), so batches are reproducible and robots never share samples.
    File mode ignores the seed and loads the stored roadmaps.
    """
    if scenario.roadmap_files is not None:
        return tuple(load_roadmap(p) for p in scenario.roadmap_files)
    radius = scenario_radius(scenario)
    out = []
    for i, robot in enumerate(scenario.robots):
        child = np.random.SeedSequence((int(roadmap_seed), i))
        out.append(build_prm(scenario.environment, robot, scenario.roadmap_n,
                             radius, scenario.starts[i], scenario.goals[i],
                             seed=int(child.generate_state(1)[0])))
    return tuple(out)


def make_tensor_space(scenario: Scenario,
                      roadmaps: Sequence[Roadmap]) -> TensorSpace:
    return TensorSpace(env=scenario.environment, robots=scenario.robots,
                       roadmaps=tuple(roadmaps), cost=scenario.cost)


def optimistic_lower_bound(scenario: Scenario,
                           roadmaps: Sequence[Roadmap]) -> float:
    """Cost-model aggregate of the per-robot shortest paths, ignoring
    robot-robot interaction; infinite if any robot is disconnected.

    Benchmark costs are normalized by this number. It equals the composite
    heuristic at the start vertex by construction.
    """
    lengths = []
    for rm in roadmaps:
        sp = shortest_path(rm, rm.start_id, rm.goal_id)
        if sp is None:
            return math.inf
        lengths.append(sp[1])
    model = CostModel(scenario.cost)
    if model is CostModel.SUM:
        return float(sum(lengths))
    if model is CostModel.MAX:
        return float(max(lengths))
    return math.sqrt(sum(c * c for c in lengths))


# -------------------------------------------------------------- experiments

@dataclass
class RunResult:
    """Outcome of one (roadmap seed, run seed) execution.

    error is None for clean runs, including clean failures to find a path;
    it records exceptions (unsolvable roadmap batches, guard refusals) so a
    batch never aborts.
    """

    algorithm: str
    roadmap_seed: int
    seed: int
    success: bool
    best_cost: float
    normalized_cost: float
    lower_bound: float
    first_iteration: Optional[int]
    first_elapsed_s: Optional[float]
    elapsed_s: float
    trace: RunTrace
    error: Optional[str] = None


@dataclass
class ExperimentReport:
    """All runs of one algorithm on one scenario, plus the usual aggregates.

    Product-graph algorithms can never beat the optimistic bound, so their
    normalized costs stay >= 1 up to rounding. The composite-space baselines
    are not confined to the per-robot roadmaps and may dip below 1.
    """

    scenario_name: str
    algorithm: str
    results: list[RunResult] = field(default_factory=list)
    # filled only when run_experiment(..., keep_trajectories=True); one entry
    # per result, None for unsuccessful runs
    trajectories: Optional[list] = None

    @property
    def success_ratio(self) -> float:
        if not self.results:
            return 0.0
        return sum(r.success for r in self.results) / len(self.results)

    @property
    def normalized_costs(self) -> list[float]:
        return [r.normalized_cost for r in self.results if r.success]

    @property
    def first_iterations(self) -> list[int]:
        return [r.first_iteration for r in self.results
                if r.success and r.first_iteration is not None]

    def median_normalized_cost(self) -> float:
        vals = self.normalized_costs
        return statistics.median(vals) if vals else math.inf

    def mean_normalized_cost(self) -> float:
        vals = self.normalized_costs
        return statistics.mean(vals) if vals else math.inf

    def median_first_iteration(self) -> float:
        vals = self.first_iterations
        return statistics.median(vals) if vals else math.inf


def _run_tree_planner(fn, scenario, ts, seed):
    params = replace(scenario.params, seed=int(seed))
    return fn(ts, ts.start_vertex(), ts.goal_vertex(), params)


def _chain_trajectory(ts: TensorSpace, waypoints, cost: float) -> Trajectory:
    # same packaging as the tree planners, from a bare vertex chain
    robot_paths = []
    lengths = []
    for i in range(ts.n_robots):
        pts = np.array([ts.pts[i][w[i]] for w in waypoints], dtype=float)
        robot_paths.append(pts)
        lengths.append(float(np.sum(np.hypot(*(pts[1:] - pts[:-1]).T)))
                       if len(pts) > 1 else 0.0)
    return Trajectory(robot_paths=robot_paths, cost=float(cost),
                      per_robot_lengths=lengths, waypoints=list(waypoints))


def _run_one(scenario: Scenario, algorithm: str, roadmaps, lower_bound: float,
             roadmap_seed: int, seed: int) -> tuple[RunResult, Optional[Trajectory]]:
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; "
                         f"expected one of {ALGORITHMS}")
    t0 = time.perf_counter()
    trace = RunTrace()
    traj: Optional[Trajectory] = None
    error = None
    try:
        if not math.isfinite(lower_bound):
            raise RuntimeError(
                "a robot's roadmap has no start-goal route for this seed")
        if algorithm in ("drrt", "ao-drrt", "drrt-star"):
            fn = {"drrt": drrt, "ao-drrt": ao_drrt, "drrt-star": drrt_star}[algorithm]
            ts = make_tensor_space(scenario, roadmaps)
            traj, trace = _run_tree_planner(fn, scenario, ts, seed)
        elif algorithm == "implicit-astar":
            ts = make_tensor_space(scenario, roadmaps)
            rec = implicit_astar(ts, ts.start_vertex(), ts.goal_vertex())
            if rec is not None:
                elapsed = time.perf_counter() - t0
                trace = RunTrace(events=[(rec.expanded, elapsed, rec.cost)],
                                 success=True, expansions=rec.expanded)
                traj = _chain_trajectory(ts, rec.waypoints, rec.cost)
        elif algorithm == "composite-prm-star":
            if scenario.roadmap_n is None:
                raise RuntimeError(
                    "composite-prm-star needs a sampled roadmap spec to size "
                    "its composite graph")
            n_composite = scenario.roadmap_n ** len(scenario.robots)
            traj = composite_prm_star(
                scenario.environment, scenario.robots, n_composite,
                int(roadmap_seed), scenario.starts, scenario.goals,
                cost=scenario.cost, eta=scenario.roadmap_eta)
            if traj is not None:
                elapsed = time.perf_counter() - t0
                trace = RunTrace(events=[(n_composite, elapsed, traj.cost)],
                                 success=True, expansions=n_composite)
        elif algorithm == "composite-rrt-star":
            params = replace(scenario.params, seed=int(seed))
            step = roadmaps[0].radius_used
            traj, trace = composite_rrt_star(
                scenario.environment, scenario.robots, params,
                scenario.starts, scenario.goals, cost=scenario.cost,
                step=step, eta=scenario.roadmap_eta or 1.0)
    except Exception as e:  # guard refusals, unsolvable draws: record, go on
        error = str(e)
    elapsed = time.perf_counter() - t0
    best = traj.cost if traj is not None else math.inf
    normalized = best / lower_bound if math.isfinite(best) else math.inf
    result = RunResult(
        algorithm=algorithm,
        roadmap_seed=int(roadmap_seed),
        seed=int(seed),
        success=traj is not None,
        best_cost=best,
        normalized_cost=normalized,
        lower_bound=lower_bound,
        first_iteration=trace.first_iteration,
        first_elapsed_s=trace.events[0][1] if trace.events else None,
        elapsed_s=elapsed,
        trace=trace,
        error=error,
    )
    return result, traj


def run_one(scenario: Scenario, algorithm: str, roadmap_seed: int = 0,
            seed: int = 0) -> tuple[RunResult, Optional[Trajectory]]:
    """Single run, returning the trajectory alongside the result record."""
    roadmaps = build_scenario_roadmaps(scenario, roadmap_seed)
    lb = optimistic_lower_bound(scenario, roadmaps)
    return _run_one(scenario, algorithm, roadmaps, lb, roadmap_seed, seed)


def run_experiment(scenario: Scenario, algorithm: str,
                   seeds: Optional[Sequence[int]] = None,
                   roadmap_seeds: Optional[Sequence[int]] = None,
                   keep_trajectories: bool = False) -> ExperimentReport:
    """Run one algorithm over the (roadmap seed x run seed) grid.

    Defaults follow the benchmark protocol: 10 roadmap seeds crossed with
    5 run seeds. Roadmaps are built once per roadmap seed and shared across
    run seeds. Per-run exceptions are recorded on the result, never raised,
    so one unsolvable draw cannot abort a batch. Results are a deterministic
    function of (scenario, algorithm, seed lists); only wall-clock fields
    vary between repetitions. keep_trajectories retains every solution
    path (None where the run failed) for post-hoc validation at the price
    of holding them all in memory.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; "
                         f"expected one of {ALGORITHMS}")
    seeds = list(range(5)) if seeds is None else [int(s) for s in seeds]
    roadmap_seeds = (list(range(10)) if roadmap_seeds is None
                     else [int(s) for s in roadmap_seeds])
    report = ExperimentReport(scenario_name=scenario.name, algorithm=algorithm)
    if keep_trajectories:
        report.trajectories = []
    for rs in roadmap_seeds:
        try:
            roadmaps = build_scenario_roadmaps(scenario, rs)
            lb = optimistic_lower_bound(scenario, roadmaps)
        except Exception as e:
            for s in seeds:
                report.results.append(RunResult(
                    algorithm=algorithm, roadmap_seed=rs, seed=s,
                    success=False, best_cost=math.inf,
                    normalized_cost=math.inf, lower_bound=math.inf,
                    first_iteration=None, first_elapsed_s=None,
                    elapsed_s=0.0, trace=RunTrace(), error=str(e)))
                if keep_trajectories:
                    report.trajectories.append(None)
            continue
        for s in seeds:
            result, trajectory = _run_one(scenario, algorithm, roadmaps,
                                          lb, rs, s)
            report.results.append(result)
            if keep_trajectories:
                report.trajectories.append(trajectory)
    return report


# ---------------------------------------------------------------- artifacts

def _fmt(x: float) -> str:
    return repr(float(x))


def emit_csv(report: ExperimentReport, path) -> None:
    """One row per incumbent event, in run order.

    Header is (algorithm, seed, iteration, elapsed_s, best_cost,
    normalized_cost); the seed column is "<roadmap seed>-<run seed>".
    Only elapsed_s varies between identical reruns.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "seed", "iteration", "elapsed_s",
                         "best_cost", "normalized_cost"])
        for res in report.results:
            label = f"{res.roadmap_seed}-{res.seed}"
            for iteration, elapsed, cost in res.trace.events:
                writer.writerow([
                    res.algorithm, label, iteration, _fmt(elapsed),
                    _fmt(cost), _fmt(cost / res.lower_bound),
                ])


_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd",
               "#ff7f0e", "#17becf", "#8c564b", "#e377c2")


def emit_svg(scenario: Scenario, trajectory: Trajectory, path) -> None:
    """Draw bounds, obstacles, and one polyline per robot path.

    Geometry is written in world coordinates (polyline points are the
    trajectory waypoints verbatim); a group transform flips the y axis so
    the page shows y growing upward. Start markers are filled disks at
    true robot size, goal markers are hollow.
    """
    env = scenario.environment
    xmin, ymin, xmax, ymax = env.bounds
    w = xmax - xmin
    h = ymax - ymin
    margin = 0.03 * max(w, h)
    stroke = 0.008 * max(w, h)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(xmin - margin)} {_fmt(ymin - margin)} '
        f'{_fmt(w + 2 * margin)} {_fmt(h + 2 * margin)}" '
        f'width="640" height="{int(640 * (h + 2 * margin) / (w + 2 * margin))}">',
        f'<g transform="translate(0 {_fmt(ymin + ymax)}) scale(1 -1)">',
        f'<rect x="{_fmt(xmin)}" y="{_fmt(ymin)}" width="{_fmt(w)}" '
        f'height="{_fmt(h)}" fill="white" stroke="black" '
        f'stroke-width="{_fmt(stroke)}"/>',
    ]
    for poly in env.obstacles:
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in poly)
        lines.append(f'<polygon points="{pts}" fill="#9aa0a6"/>')
    for i, pts in enumerate(trajectory.robot_paths):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in np.asarray(pts))
        lines.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="{_fmt(stroke)}"/>')
    for i, robot in enumerate(scenario.robots):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        sx, sy = scenario.starts[i]
        gx, gy = scenario.goals[i]
        lines.append(f'<circle cx="{_fmt(sx)}" cy="{_fmt(sy)}" '
                     f'r="{_fmt(robot.radius)}" fill="{color}" '
                     f'fill-opacity="0.55"/>')
        lines.append(f'<circle cx="{_fmt(gx)}" cy="{_fmt(gy)}" '
                     f'r="{_fmt(robot.radius)}" fill="none" stroke="{color}" '
                     f'stroke-width="{_fmt(stroke)}"/>')
    lines.append("</g>")
    lines.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def trajectory_to_dict(trajectory: Trajectory) -> dict:
    return {
        "version": TRAJECTORY_VERSION,
        "cost": trajectory.cost,
        "per_robot_lengths": list(trajectory.per_robot_lengths),
        "robot_paths": [np.asarray(p).tolist() for p in trajectory.robot_paths],
        "waypoints": ([list(v) for v in trajectory.waypoints]
                      if trajectory.waypoints is not None else None),
    }


def trajectory_from_dict(data: dict) -> Trajectory:
    if data.get("version") != TRAJECTORY_VERSION:
        raise ValueError(f"unsupported trajectory version {data.get('version')!r}")
    waypoints = data.get("waypoints")
    return Trajectory(
        robot_paths=[np.array(p, dtype=float) for p in data["robot_paths"]],
        cost=float(data["cost"]),
        per_robot_lengths=[float(v) for v in data["per_robot_lengths"]],
        waypoints=None if waypoints is None else [tuple(v) for v in waypoints],
    )


def save_trajectory(trajectory: Trajectory, path) -> None:
    with open(path, "w") as fh:
        json.dump(trajectory_to_dict(trajectory), fh, indent=2)
        fh.write("\n")


def load_trajectory(path) -> Trajectory:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: line {e.lineno}: {e.msg}") from None
    return trajectory_from_dict(data)
