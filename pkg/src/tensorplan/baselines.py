"""Reference planners the tree search is measured against.

implicit_astar runs an exact best-first search over the same implicit
product graph the tree planners explore, and certifies optimal costs for
the benchmarks. The composite baselines ignore the per-robot roadmaps
entirely and treat all robots as a single point in R^(2R): PRM* samples
and connects one explicit roadmap there, RRT* grows a rewiring tree with
a fixed steering step. Every composite edge is a simultaneous straight
motion, validated per robot against obstacles and pairwise by sweeps.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from tensorplan.geometry2d import (
    DiskRobot,
    Environment,
    pair_motion_clear,
    pair_static_clear,
    point_free,
    segment_free,
)
from tensorplan.planners import (
    INCUMBENT_SLACK,
    PlannerParams,
    RunTrace,
    Trajectory,
)
from tensorplan.roadmap import SamplingBudgetError, star_radius
from tensorplan.tensorgraph import (
    CompositeVertex,
    CostModel,
    TensorSpace,
    composite_heuristic,
    edge_cost,
    tensor_adjacency_iter,
    validate_tensor_edge,
)

# Explicit composite construction is meant for very few robots; beyond
# 8 joint dimensions the vertex-pair work explodes, so refuse outright.
COMPOSITE_DIM_CAP = 8

# Upper bound on within-radius vertex pairs the explicit PRM will consider.
COMPOSITE_PAIR_CAP = 5_000_000


@dataclass(frozen=True)
class AStarRecord:
    """Result of an exact product-graph search.

    waypoints is the optimal vertex sequence; consecutive entries are
    validated tensor edges. cost is minimal under the space's cost model.
    """

    expanded: int
    cost: float
    waypoints: list


def _check_vertex(ts: TensorSpace, name: str, v: Sequence[int]) -> CompositeVertex:
    if len(v) != ts.n_robots:
        raise ValueError(f"{name} names {len(v)} robots, space has {ts.n_robots}")
    for i, vi in enumerate(v):
        if not 0 <= vi < len(ts.roadmaps[i]):
            raise ValueError(f"{name}[{i}] = {vi} outside roadmap {i}")
    return tuple(int(vi) for vi in v)


def implicit_astar(ts: TensorSpace, start: Sequence[int], target: Sequence[int],
                   use_heuristic: bool = True) -> Optional[AStarRecord]:
    """Exact shortest path between two vertices of the implicit product graph.

    Adjacency is enumerated lazily and every improving edge is validated by
    the same pairwise sweep the tree planners use. The queue orders entries
    by (f, h, vertex): ties prefer the smaller remaining estimate and then
    resolve deterministically. A vertex whose cost-to-come improves after it
    was expanded is simply pushed again; this reopening is free insurance
    because consistency of the aggregated heuristic is only obvious for the
    additive model. Returns None when the two vertices are disconnected.

    With use_heuristic=False the search degrades to plain uniform-cost
    search and must return the same cost.
    """
    start = _check_vertex(ts, "start", start)
    target = _check_vertex(ts, "target", target)

    def h_of(v: CompositeVertex) -> float:
        return composite_heuristic(ts, v) if use_heuristic else 0.0

    h0 = h_of(start)
    if not math.isfinite(h0):
        # some robot cannot reach its goal on its own roadmap
        return None

    g: dict[CompositeVertex, float] = {start: 0.0}
    parent: dict[CompositeVertex, Optional[CompositeVertex]] = {start: None}
    heap: list[tuple[float, float, CompositeVertex, float]] = [(h0, h0, start, 0.0)]
    expanded = 0
    while heap:
        _, _, v, gv = heapq.heappop(heap)
        if gv > g[v]:
            continue  # superseded by a cheaper push
        if v == target:
            chain = []
            cur: Optional[CompositeVertex] = v
            while cur is not None:
                chain.append(cur)
                cur = parent[cur]
            chain.reverse()
            return AStarRecord(expanded=expanded, cost=gv, waypoints=chain)
        expanded += 1
        for u in tensor_adjacency_iter(ts, v):
            ng = gv + edge_cost(ts, v, u)
            if ng >= g.get(u, math.inf):
                continue  # not improving; skip the expensive sweep
            if not validate_tensor_edge(ts, v, u):
                continue
            hu = h_of(u)
            if not math.isfinite(hu):
                continue
            g[u] = ng
            parent[u] = v
            heapq.heappush(heap, (ng + hu, hu, u, ng))
    return None


# ------------------------------------------------------ composite space

Config = tuple[tuple[float, float], ...]


def _as_config(robots: tuple[DiskRobot, ...], q, name: str) -> Config:
    if len(q) != len(robots):
        raise ValueError(f"{name} names {len(q)} robots, expected {len(robots)}")
    return tuple((float(p[0]), float(p[1])) for p in q)


def _composite_point_free(env: Environment, robots: tuple[DiskRobot, ...],
                          cfg: Config) -> bool:
    for robot, p in zip(robots, cfg):
        if not point_free(env, robot, p):
            return False
    for i in range(len(robots)):
        for j in range(i + 1, len(robots)):
            if not pair_static_clear(robots[i], robots[j], cfg[i], cfg[j]):
                return False
    return True


def _composite_motion_free(env: Environment, robots: tuple[DiskRobot, ...],
                           a: Config, b: Config) -> bool:
    for robot, pa, pb in zip(robots, a, b):
        if not segment_free(env, robot, pa, pb):
            return False
    for i in range(len(robots)):
        for j in range(i + 1, len(robots)):
            if not pair_motion_clear(robots[i], robots[j],
                                     a[i], b[i], a[j], b[j]):
                return False
    return True


def _step_cost(model: CostModel, a: Config, b: Config) -> float:
    """Aggregate of the per-robot straight-line lengths of one composite step."""
    if model is CostModel.SUM:
        return sum(math.hypot(pb[0] - pa[0], pb[1] - pa[1])
                   for pa, pb in zip(a, b))
    if model is CostModel.MAX:
        return max(math.hypot(pb[0] - pa[0], pb[1] - pa[1])
                   for pa, pb in zip(a, b))
    return math.sqrt(sum((pb[0] - pa[0]) ** 2 + (pb[1] - pa[1]) ** 2
                         for pa, pb in zip(a, b)))


def _package(chain: list[Config], total_cost: float) -> Trajectory:
    n_robots = len(chain[0])
    robot_paths = []
    lengths = []
    for i in range(n_robots):
        pts = np.array([cfg[i] for cfg in chain], dtype=float)
        robot_paths.append(pts)
        lengths.append(float(np.sum(np.hypot(*(pts[1:] - pts[:-1]).T))) if len(pts) > 1 else 0.0)
    return Trajectory(robot_paths=robot_paths, cost=total_cost,
                      per_robot_lengths=lengths, waypoints=None)


def composite_prm_star(env: Environment, robots: Sequence[DiskRobot],
                       n_composite: int, seed: Optional[int],
                       S, T, cost: CostModel = CostModel.SUM,
                       eta: float = 1.0,
                       max_pairs: int = COMPOSITE_PAIR_CAP) -> Optional[Trajectory]:
    """PRM* constructed explicitly in the joint configuration space.

    Samples n_composite uniform collision-free composite configurations,
    adds the query endpoints, connects every pair within the 2R-dimensional
    connection radius (measure bound: bounds area to the R-th power) whose
    simultaneous straight motion is valid, and runs Dijkstra start to goal.
    Returns None when the two endpoints end up in different components.

    Refuses more than COMPOSITE_DIM_CAP joint dimensions, and aborts before
    building edges when the within-radius pair count exceeds max_pairs;
    both guards exist because memory grows with the square of the vertex
    count here, unlike anything on the per-robot side.
    """
    robots = tuple(robots)
    n_robots = len(robots)
    if n_robots == 0:
        raise ValueError("need at least one robot")
    dim = 2 * n_robots
    if dim > COMPOSITE_DIM_CAP:
        raise ValueError(
            f"{n_robots} robots give a {dim}-dimensional composite space; "
            f"explicit construction is capped at {COMPOSITE_DIM_CAP}")
    if n_composite < 0:
        raise ValueError(f"n_composite must be >= 0, got {n_composite}")
    model = CostModel(cost)
    s_cfg = _as_config(robots, S, "start")
    t_cfg = _as_config(robots, T, "goal")
    for name, cfg in (("start", s_cfg), ("goal", t_cfg)):
        if not _composite_point_free(env, robots, cfg):
            raise ValueError(f"{name} composite configuration is not collision-free")

    rng = np.random.default_rng(seed)
    xmin, ymin, xmax, ymax = env.bounds
    configs: list[Config] = [s_cfg, t_cfg]
    failures = 0
    budget = 100 * n_composite
    while len(configs) < n_composite + 2:
        cfg = tuple((rng.uniform(xmin, xmax), rng.uniform(ymin, ymax))
                    for _ in range(n_robots))
        if _composite_point_free(env, robots, cfg):
            configs.append(cfg)
        else:
            failures += 1
            if failures > budget:
                raise SamplingBudgetError(failures, len(configs) - 2, n_composite)

    m = len(configs)
    radius = star_radius(m, dim, env.area() ** n_robots, eta)
    rows = np.array([[c for p in cfg for c in p] for cfg in configs])
    kd = cKDTree(rows)
    n_close = int(kd.count_neighbors(kd, radius))
    n_pairs = (n_close - m) // 2
    if n_pairs > max_pairs:
        raise RuntimeError(
            f"{n_pairs} candidate edges exceed the cap of {max_pairs}; "
            "lower n_composite or raise max_pairs explicitly")

    pairs = kd.query_pairs(radius, output_type="ndarray")
    order = np.lexsort((pairs[:, 1], pairs[:, 0])) if len(pairs) else []
    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(m)]
    for u, v in pairs[order]:
        u, v = int(u), int(v)
        if _composite_motion_free(env, robots, configs[u], configs[v]):
            w = _step_cost(model, configs[u], configs[v])
            adjacency[u].append((v, w))
            adjacency[v].append((u, w))

    dist = [math.inf] * m
    prev = [-1] * m
    dist[0] = 0.0
    heap = [(0.0, 0)]
    while heap:
        dv, v = heapq.heappop(heap)
        if dv > dist[v]:
            continue
        if v == 1:
            break
        for u, w in adjacency[v]:
            nd = dv + w
            if nd < dist[u]:
                dist[u] = nd
                prev[u] = v
                heapq.heappush(heap, (nd, u))
    if not math.isfinite(dist[1]):
        return None
    chain_ids = []
    cur = 1
    while cur != -1:
        chain_ids.append(cur)
        cur = prev[cur]
    chain_ids.reverse()
    return _package([configs[i] for i in chain_ids], dist[1])


class _CompositeTree:
    """Rewiring tree over raw composite configurations.

    Same bookkeeping as the planners' search tree, minus everything tied to
    roadmap vertices: rows live in a growing matrix for norms-trick nearest
    and range queries, and reparenting propagates costs through an explicit
    children structure.
    """

    def __init__(self, root_row: np.ndarray):
        dim = len(root_row)
        cap = 1024
        self._mat = np.zeros((cap, dim), dtype=float)
        self._norms = np.zeros(cap, dtype=float)
        self.parent = [-1]
        self.edge_c = [0.0]
        self.cost = [0.0]
        self.children: list[list[int]] = [[]]
        self._mat[0] = root_row
        self._norms[0] = float(root_row @ root_row)
        self.n = 1

    def row(self, i: int) -> np.ndarray:
        return self._mat[i]

    def add(self, row: np.ndarray, parent: int, edge_cost_in: float) -> int:
        i = self.n
        if i == len(self._mat):
            self._mat = np.vstack([self._mat, np.zeros_like(self._mat)])
            self._norms = np.concatenate([self._norms, np.zeros_like(self._norms)])
        self._mat[i] = row
        self._norms[i] = float(row @ row)
        self.parent.append(parent)
        self.edge_c.append(edge_cost_in)
        self.cost.append(self.cost[parent] + edge_cost_in)
        self.children.append([])
        self.children[parent].append(i)
        self.n = i + 1
        return i

    def scores(self, row: np.ndarray) -> np.ndarray:
        """Squared distances minus the query norm; order-equivalent to distance."""
        m = self.n
        return self._norms[:m] - 2.0 * (self._mat[:m] @ row)

    def nearest(self, row: np.ndarray) -> int:
        return int(np.argmin(self.scores(row)))

    def within(self, row: np.ndarray, radius: float) -> np.ndarray:
        bound = radius * radius - float(row @ row)
        return np.nonzero(self.scores(row) <= bound)[0]

    def is_descendant(self, node: int, ancestor: int) -> bool:
        while node != -1:
            if node == ancestor:
                return True
            node = self.parent[node]
        return False

    def reparent(self, child: int, new_parent: int, edge_cost_in: float) -> None:
        old = self.parent[child]
        if old != -1:
            self.children[old].remove(child)
        self.parent[child] = new_parent
        self.edge_c[child] = edge_cost_in
        self.children[new_parent].append(child)
        stack = [child]
        while stack:
            i = stack.pop()
            self.cost[i] = self.cost[self.parent[i]] + self.edge_c[i]
            stack.extend(self.children[i])


def composite_rrt_star(env: Environment, robots: Sequence[DiskRobot],
                       params: PlannerParams, S, T,
                       cost: CostModel = CostModel.SUM,
                       step: Optional[float] = None,
                       eta: float = 1.0) -> tuple[Optional[Trajectory], RunTrace]:
    """RRT* run directly in the joint configuration space.

    Each iteration steers a fixed step from the nearest tree node toward a
    uniform composite sample (the goal configuration with probability
    goal_bias), picks the cheapest validated parent inside the shrinking
    connection radius (never wider than the steering step), rewires that
    neighborhood, and tries to link the new node to the goal whenever it
    lands within one step of it. The incumbent
    improves both through better goal parents and through rewiring upstream
    of the goal node; each strict improvement appends a trace event.

    iteration_budget counts steer attempts; n_it plays no role here. step
    defaults to the connection radius a 50-sample per-robot roadmap would
    use, which keeps edge granularity comparable to the tree planners.
    Returns (None, trace) when the budget runs out before the first link.
    """
    robots = tuple(robots)
    n_robots = len(robots)
    if n_robots == 0:
        raise ValueError("need at least one robot")
    model = CostModel(cost)
    s_cfg = _as_config(robots, S, "start")
    t_cfg = _as_config(robots, T, "goal")
    for name, cfg in (("start", s_cfg), ("goal", t_cfg)):
        if not _composite_point_free(env, robots, cfg):
            raise ValueError(f"{name} composite configuration is not collision-free")
    if step is None:
        step = star_radius(50, 2, env.area(), eta)
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step}")

    dim = 2 * n_robots
    mu = env.area() ** n_robots
    rng = np.random.default_rng(params.seed)
    xmin, ymin, xmax, ymax = env.bounds
    t0 = time.perf_counter()
    trace = RunTrace()
    goal_row = np.array([c for p in t_cfg for c in p], dtype=float)
    tree = _CompositeTree(np.array([c for p in s_cfg for c in p], dtype=float))
    configs: list[Config] = [s_cfg]

    if s_cfg == t_cfg:
        trace.success = True
        trace.events.append((0, 0.0, 0.0))
        return _package([s_cfg], 0.0), trace

    goal_id = -1
    best = math.inf

    def try_goal_link(from_id: int) -> None:
        nonlocal goal_id
        if float(np.linalg.norm(tree.row(from_id) - goal_row)) > step:
            return
        c = _step_cost(model, configs[from_id], t_cfg)
        if goal_id != -1 and tree.cost[from_id] + c >= tree.cost[goal_id]:
            return
        if not _composite_motion_free(env, robots, configs[from_id], t_cfg):
            return
        if goal_id == -1:
            goal_id = tree.add(goal_row, from_id, c)
            configs.append(t_cfg)
        else:
            tree.reparent(goal_id, from_id, c)

    for it in range(1, params.iteration_budget + 1):
        trace.expansions = it
        if rng.random() < params.goal_bias:
            sample = goal_row
        else:
            sample = np.empty(dim)
            sample[0::2] = rng.uniform(xmin, xmax, n_robots)
            sample[1::2] = rng.uniform(ymin, ymax, n_robots)
        near = tree.nearest(sample)
        delta = sample - tree.row(near)
        d = float(np.linalg.norm(delta))
        if d == 0.0:
            continue
        new_row = tree.row(near) + delta * (min(step, d) / d)
        new_cfg = tuple((float(new_row[2 * i]), float(new_row[2 * i + 1]))
                        for i in range(n_robots))
        if not _composite_point_free(env, robots, new_cfg):
            continue

        # standard shrinking radius, capped at the steering step
        r_k = min(star_radius(max(tree.n, 2), dim, mu, eta), step)
        near_ids = tree.within(new_row, r_k)
        cands = {int(i) for i in near_ids}
        cands.add(near)
        if goal_id != -1:
            cands.discard(goal_id)  # the goal never feeds new nodes
        ranked = []
        for i in cands:
            c = _step_cost(model, configs[i], new_cfg)
            ranked.append((tree.cost[i] + c, i, c))
        ranked.sort()
        new_id = -1
        for _, i, c in ranked:
            if _composite_motion_free(env, robots, configs[i], new_cfg):
                new_id = tree.add(new_row, i, c)
                configs.append(new_cfg)
                break
        if new_id == -1:
            continue

        for i in sorted(cands):
            if i == tree.parent[new_id]:
                continue
            c = _step_cost(model, new_cfg, configs[i])
            if tree.cost[new_id] + c >= tree.cost[i]:
                continue
            if tree.is_descendant(new_id, i):
                continue
            if _composite_motion_free(env, robots, new_cfg, configs[i]):
                tree.reparent(i, new_id, c)

        try_goal_link(new_id)
        if goal_id != -1 and tree.cost[goal_id] < best - INCUMBENT_SLACK:
            best = tree.cost[goal_id]
            trace.success = True
            trace.events.append((it, time.perf_counter() - t0, best))
            if params.stop_at_first:
                break

    if goal_id == -1:
        return None, trace
    chain_ids = []
    cur = goal_id
    while cur != -1:
        chain_ids.append(cur)
        cur = tree.parent[cur]
    chain_ids.reverse()
    return _package([configs[i] for i in chain_ids], tree.cost[goal_id]), trace
