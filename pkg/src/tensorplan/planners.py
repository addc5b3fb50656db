"""Tree planners over the implicit tensor-product roadmap.

Three variants share one machinery: a feasibility-only planner that returns
its first solution, an anytime variant that keeps improving an incumbent by
single-edge rewiring, and an informed anytime variant that additionally
picks best parents among all composite neighbors, rewires neighborhoods,
prunes against the incumbent, and greedily promotes children toward the
goal between random exploration steps.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from tensorplan.geometry2d import pair_static_clear, point_free
from tensorplan.tensorgraph import (
    CompositeVertex,
    CostModel,
    TensorSpace,
    adjacency_product_size,
    composite_heuristic,
    direction_oracle,
    edge_cost,
    informed_oracle,
    is_tensor_edge,
    tensor_adjacency_iter,
    validate_tensor_edge,
)

INCUMBENT_SLACK = 1e-12


@dataclass
class PlannerParams:
    """Shared planner knobs.

    iteration_budget counts expansions; n_it is the number of expansions
    between attempts to connect the tree to the target. stop_at_first makes
    the anytime planners return at their first solution (success semantics
    at a fixed budget are unchanged). audit_every > 0 runs a full tree audit
    each that many expansions and is meant for instrumented test runs.
    """

    n_it: int = 50
    iteration_budget: int = 10_000
    goal_bias: float = 0.05
    seed: Optional[int] = None
    connect_k: int = 16
    stop_at_first: bool = False
    audit_every: int = 0
    focused_filter: bool = False
    focused_retries: int = 32

    def __post_init__(self) -> None:
        if self.n_it < 1:
            raise ValueError("n_it must be >= 1")
        if self.iteration_budget < 0:
            raise ValueError("iteration_budget must be >= 0")
        if not (0.0 <= self.goal_bias < 1.0):
            raise ValueError("goal_bias must be in [0, 1)")
        if self.connect_k < 1:
            raise ValueError("connect_k must be >= 1")


@dataclass
class Trajectory:
    """A coordinated polyline motion, one waypoint row per composite step.

    robot_paths holds one (L, 2) array per robot. waypoints carries the
    underlying composite roadmap vertices for planners that live on the
    tensor graph, and None for planners in raw composite space. cost is the
    sum over steps of the per-edge cost aggregate.
    """

    robot_paths: list
    cost: float
    per_robot_lengths: list
    waypoints: Optional[list] = None

    @property
    def n_steps(self) -> int:
        return len(self.robot_paths[0]) - 1


@dataclass
class RunTrace:
    """Incumbent history of one planner run.

    events holds (iteration, elapsed seconds, best cost) rows appended
    whenever the incumbent strictly improves; iteration counts expansions.
    audits counts completed mid-run tree audits (instrumented mode only).
    """

    events: list = field(default_factory=list)
    success: bool = False
    expansions: int = 0
    audits: int = 0

    @property
    def first_iteration(self) -> Optional[int]:
        return self.events[0][0] if self.events else None

    @property
    def final_cost(self) -> float:
        return self.events[-1][2] if self.events else math.inf


class SearchTree:
    """Rooted tree over composite vertices with cost-to-come bookkeeping.

    Vertex configurations are mirrored into a growing float matrix so
    nearest-neighbor queries stay exact linear scans at BLAS speed, and the
    per-robot vertex ids into an int matrix for adjacency mask scans.
    """

    def __init__(self, ts: TensorSpace, root: CompositeVertex):
        self.ts = ts
        dim = 2 * ts.n_robots
        cap = 1024
        self._mat = np.zeros((cap, dim), dtype=float)
        self._norms = np.zeros(cap, dtype=float)
        self._vids = np.zeros((cap, ts.n_robots), dtype=np.int32)
        self.verts: list[CompositeVertex] = []
        self.ids: dict[CompositeVertex, int] = {}
        self.parent: list[int] = []
        self.edge_c: list[float] = []
        self.cost: list[float] = []
        self.h_cache: list[float] = []
        self.children: list[list[int]] = []
        self.add(root, -1, 0.0)

    def __len__(self) -> int:
        return len(self.verts)

    def __contains__(self, v: CompositeVertex) -> bool:
        return v in self.ids

    def add(self, v: CompositeVertex, parent_id: int, edge_cost_in: float) -> int:
        if v in self.ids:
            raise ValueError(f"vertex {v} already in tree")
        nid = len(self.verts)
        if nid == len(self._mat):
            self._mat = np.concatenate([self._mat, np.zeros_like(self._mat)])
            self._norms = np.concatenate([self._norms, np.zeros_like(self._norms)])
            self._vids = np.concatenate([self._vids, np.zeros_like(self._vids)])
        row = self.ts.config_row(v)
        self._mat[nid] = row
        self._norms[nid] = float(np.dot(self._mat[nid], self._mat[nid]))
        self._vids[nid] = v
        self.verts.append(v)
        self.ids[v] = nid
        self.parent.append(parent_id)
        self.edge_c.append(edge_cost_in)
        self.cost.append(0.0 if parent_id < 0 else self.cost[parent_id] + edge_cost_in)
        self.h_cache.append(composite_heuristic(self.ts, v))
        self.children.append([])
        if parent_id >= 0:
            self.children[parent_id].append(nid)
        return nid

    def nearest_id(self, row: Sequence[float]) -> int:
        m = len(self.verts)
        q = np.asarray(row, dtype=float)
        # argmin |x - q|^2 = argmin |x|^2 - 2 x.q; ties fall to the first
        # (lowest insertion order) minimum
        scores = self._norms[:m] - self._mat[:m] @ (2.0 * q)
        return int(np.argmin(scores))

    def k_nearest_ids(self, row: Sequence[float], k: int) -> list[int]:
        m = len(self.verts)
        q = np.asarray(row, dtype=float)
        scores = self._norms[:m] - self._mat[:m] @ (2.0 * q)
        if m <= k:
            order = np.argsort(scores, kind="stable")
            return [int(i) for i in order]
        part = np.argpartition(scores, k - 1)[:k]
        part = part[np.lexsort((part, scores[part]))]
        return [int(i) for i in part]

    def is_descendant(self, node_id: int, ancestor_id: int) -> bool:
        cur = node_id
        while cur >= 0:
            if cur == ancestor_id:
                return True
            cur = self.parent[cur]
        return False

    def reparent(self, child_id: int, new_parent_id: int, edge_cost_in: float) -> None:
        """Unconditional reparent plus eager cost propagation. Callers must
        have checked improvement, validation, and the cycle guard."""
        old = self.parent[child_id]
        if old >= 0:
            self.children[old].remove(child_id)
        self.parent[child_id] = new_parent_id
        self.edge_c[child_id] = edge_cost_in
        self.children[new_parent_id].append(child_id)
        stack = [child_id]
        while stack:
            n = stack.pop()
            base = self.cost[self.parent[n]] if self.parent[n] >= 0 else 0.0
            self.cost[n] = base + self.edge_c[n]
            stack.extend(self.children[n])


def rewire(ts: TensorSpace, tree: SearchTree, candidate_parent: CompositeVertex,
           child: CompositeVertex) -> bool:
    """Reparent child under candidate_parent when that strictly lowers the
    child's cost-to-come, the connecting edge is collision-free, and the
    child is not an ancestor of the candidate. Costs propagate eagerly."""
    pid = tree.ids[candidate_parent]
    cid = tree.ids[child]
    new_edge = edge_cost(ts, candidate_parent, child)
    if tree.cost[pid] + new_edge >= tree.cost[cid]:
        return False
    if tree.is_descendant(pid, cid):
        return False
    if not validate_tensor_edge(ts, candidate_parent, child):
        return False
    tree.reparent(cid, pid, new_edge)
    return True


def trace_path(ts: TensorSpace, tree: SearchTree, v: CompositeVertex) -> Trajectory:
    """Walk parents from v to the root and package the motion."""
    if v not in tree.ids:
        raise ValueError(f"vertex {v} not in tree")
    chain = []
    cur = tree.ids[v]
    while cur >= 0:
        chain.append(cur)
        cur = tree.parent[cur]
    chain.reverse()
    waypoints = [tree.verts[i] for i in chain]
    n_robots = ts.n_robots
    robot_paths = []
    lengths = []
    for i in range(n_robots):
        pts = np.array([ts.pts[i][w[i]] for w in waypoints], dtype=float)
        robot_paths.append(pts)
        lengths.append(float(np.sum(np.hypot(*(pts[1:] - pts[:-1]).T))) if len(pts) > 1 else 0.0)
    return Trajectory(robot_paths=robot_paths, cost=tree.cost[tree.ids[v]],
                      per_robot_lengths=lengths, waypoints=waypoints)


def random_composite_sample(ts: TensorSpace, rng: np.random.Generator,
                            goal_bias: float) -> list[tuple[float, float]]:
    """One uniform configuration per robot; with probability goal_bias a
    robot's sample is its goal configuration, emitted verbatim."""
    xmin, ymin, xmax, ymax = ts.env.bounds
    out = []
    for i in range(ts.n_robots):
        if rng.random() < goal_bias:
            out.append(ts.pts[i][ts.roadmaps[i].goal_id])
        else:
            out.append((rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)))
    return out


def nearest_tree_vertex(tree: SearchTree,
                        q: Sequence[Sequence[float]]) -> CompositeVertex:
    """Tree vertex whose configuration is closest to the composite sample
    (exact linear scan; ties resolve to the lowest insertion order)."""
    row = [c for pt in q for c in (float(pt[0]), float(pt[1]))]
    return tree.verts[tree.nearest_id(row)]


def connect_to_target(ts: TensorSpace, tree: SearchTree, target: CompositeVertex,
                      k: int = 16) -> Optional[Trajectory]:
    """Link the target through the cheapest validated parent among the k
    nearest tree vertices, or improve its incoming edge if already linked,
    then trace the result."""
    if _link_target(ts, tree, target, k) is None:
        return None
    return trace_path(ts, tree, target)


def _link_target(ts: TensorSpace, tree: SearchTree, target: CompositeVertex,
                 k: int, memo: Optional[tuple[set, set]] = None) -> Optional[int]:
    """Cheapest validated connection of the target to the current tree.

    Re-running the scan as the tree grows lets later, cheaper branches take
    over the final approach; if the first linking edge were kept for good it
    would cap solution quality no matter how much the tree improves. Edge
    validity against a fixed target never changes, so callers that rescan
    every batch pass a (passed, failed) id-set pair and each candidate edge
    is collision-checked at most once per run.
    """
    passed, failed = memo if memo is not None else (set(), set())
    row = ts.config_row(target)
    tid = tree.ids.get(target)
    current = tree.cost[tid] if tid is not None else math.inf
    cands = []
    for cid in tree.k_nearest_ids(row, k):
        if cid in failed:
            continue
        v = tree.verts[cid]
        if v == target or not is_tensor_edge(ts, v, target):
            continue
        c = edge_cost(ts, v, target)
        total = tree.cost[cid] + c
        if total < current - INCUMBENT_SLACK:
            cands.append((total, cid, c))
    cands.sort()
    for _, cid, c in cands:
        if tid is not None and tree.is_descendant(tid, cid):
            continue
        if cid in passed or validate_tensor_edge(ts, tree.verts[cid], target):
            passed.add(cid)
            if tid is None:
                return tree.add(target, cid, c)
            tree.reparent(tid, cid, c)
            return tid
        failed.add(cid)
    return tid


def audit_tree(ts: TensorSpace, tree: SearchTree, tol: float = 1e-9,
               check_collisions: bool = True) -> None:
    """Assert structural invariants; raises AssertionError on violation.

    Checks: unique vertices, parent/child symmetry, acyclicity, every stored
    edge is a tensor edge, cost-to-come telescopes within tol, and cached
    heuristics match recomputation. check_collisions additionally re-runs
    the collision validation of every stored edge; mid-run checkpoint audits
    skip that part, since re-checking every edge at every checkpoint would
    dwarf the planning work itself.
    """
    n = len(tree)
    assert len(tree.ids) == n, "duplicate vertices"
    assert tree.parent[0] == -1 and tree.cost[0] == 0.0, "malformed root"
    depth = [-1] * n
    depth[0] = 0
    for nid in range(1, n):
        pid = tree.parent[nid]
        assert 0 <= pid < n, f"node {nid} has invalid parent {pid}"
        assert nid in tree.children[pid], f"child link missing for {nid}"
        # walk to a node of known depth; a cycle would walk forever, so cap
        chain = []
        cur = nid
        while depth[cur] < 0:
            chain.append(cur)
            cur = tree.parent[cur]
            assert cur >= 0 and len(chain) <= n, f"cycle through node {nid}"
        for off, m in enumerate(reversed(chain)):
            depth[m] = depth[cur] + off + 1
        u, v = tree.verts[pid], tree.verts[nid]
        assert is_tensor_edge(ts, u, v), f"stored edge {u}->{v} not a tensor edge"
        if check_collisions:
            assert validate_tensor_edge(ts, u, v), f"stored edge {u}->{v} in collision"
        want = tree.cost[pid] + edge_cost(ts, u, v)
        assert abs(tree.cost[nid] - want) <= tol, \
            f"cost mismatch at {nid}: {tree.cost[nid]} vs {want}"
        assert tree.h_cache[nid] == composite_heuristic(ts, v)


# ----------------------------------------------------------------- internals

class _Run:
    """State shared by the planner loops."""

    def __init__(self, ts: TensorSpace, start: CompositeVertex,
                 target: CompositeVertex, params: PlannerParams):
        _check_query(ts, start, target)
        self.ts = ts
        self.start = start
        self.target = target
        self.params = params
        self.rng = np.random.default_rng(params.seed)
        self.tree = SearchTree(ts, start)
        self.trace = RunTrace()
        self.best: Optional[Trajectory] = None
        self.incumbent = math.inf
        self.link_memo: tuple[set, set] = (set(), set())
        self.t0 = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self.t0

    def sample(self) -> list[tuple[float, float]]:
        p = self.params
        q = random_composite_sample(self.ts, self.rng, p.goal_bias)
        if p.focused_filter and math.isfinite(self.incumbent):
            for _ in range(p.focused_retries):
                if self._through_bound(q) <= self.incumbent + INCUMBENT_SLACK:
                    break
                q = random_composite_sample(self.ts, self.rng, p.goal_bias)
        return q

    def _through_bound(self, q) -> float:
        # optimistic cost of any path forced through the sample: straight
        # line start -> sample -> goal per robot, aggregated like edge costs
        ts = self.ts
        parts = []
        for i in range(ts.n_robots):
            sx, sy = ts.pts[i][self.start[i]]
            gx, gy = ts.pts[i][ts.roadmaps[i].goal_id]
            qx, qy = float(q[i][0]), float(q[i][1])
            parts.append(math.hypot(qx - sx, qy - sy) + math.hypot(gx - qx, gy - qy))
        if ts.cost is CostModel.SUM:
            return sum(parts)
        if ts.cost is CostModel.MAX:
            return max(parts)
        return math.sqrt(sum(p * p for p in parts))

    def note_expansion(self) -> None:
        self.trace.expansions += 1
        p = self.params
        if p.audit_every and self.trace.expansions % p.audit_every == 0:
            audit_tree(self.ts, self.tree, check_collisions=False)
            self.trace.audits += 1

    def harvest(self) -> bool:
        """Refresh the target's connection and update the incumbent if it
        improved."""
        tid = _link_target(self.ts, self.tree, self.target,
                           self.params.connect_k, self.link_memo)
        if tid is None:
            return False
        cost = self.tree.cost[tid]
        if cost < self.incumbent - INCUMBENT_SLACK:
            self.incumbent = cost
            self.best = trace_path(self.ts, self.tree, self.target)
            self.trace.events.append((self.trace.expansions, self.elapsed(), cost))
            self.trace.success = True
            return True
        return False

    def finish(self) -> tuple[Optional[Trajectory], RunTrace]:
        return self.best, self.trace


def _check_query(ts: TensorSpace, start: CompositeVertex,
                 target: CompositeVertex) -> None:
    for name, v in (("start", start), ("target", target)):
        if len(v) != ts.n_robots:
            raise ValueError(f"{name} {v} does not index {ts.n_robots} robots")
        for i, vi in enumerate(v):
            if not (0 <= vi < len(ts.roadmaps[i])):
                raise ValueError(f"{name} id {vi} out of range for robot {i}")
            if not point_free(ts.env, ts.robots[i], ts.pts[i][vi]):
                raise ValueError(f"{name} configuration of robot {i} is not free")
    for i in range(ts.n_robots):
        for j in range(i + 1, ts.n_robots):
            if not pair_static_clear(ts.robots[i], ts.robots[j],
                                     ts.pts[i][start[i]], ts.pts[j][start[j]]):
                raise ValueError(f"robots {i} and {j} overlap at the start")


def _neighbors_in_tree(ts: TensorSpace, tree: SearchTree,
                       v: CompositeVertex) -> list[int]:
    """Ids of tree nodes adjacent to v in the product graph, ascending.

    Small neighborhoods enumerate the product and probe the vertex map;
    large ones scan the tree's id matrix with per-robot membership masks.
    Both orders coincide (ascending insertion id), so the route taken never
    changes planner behavior.
    """
    m = len(tree)
    prod = adjacency_product_size(ts, v)
    if prod <= 2048 or prod <= 4 * m:
        ids = tree.ids
        found = []
        for w in tensor_adjacency_iter(ts, v):
            nid = ids.get(w)
            if nid is not None:
                found.append(nid)
        found.sort()
        return found
    mask = None
    for i, vi in enumerate(v):
        member = np.zeros(len(ts.roadmaps[i]), dtype=bool)
        member[ts.adjself[i][vi]] = True
        col = member[tree._vids[:m, i]]
        mask = col if mask is None else (mask & col)
    own = tree.ids.get(v)
    if own is not None:
        mask[own] = False
    return [int(i) for i in np.nonzero(mask)[0]]


def _expand_directional(run: _Run, do_rewire: bool) -> None:
    """One expansion of the angle-guided planners."""
    ts = run.ts
    q_rand = run.sample()
    v_near = nearest_tree_vertex(run.tree, q_rand)
    v_new = direction_oracle(ts, v_near, q_rand, run.rng)
    run.note_expansion()
    if v_new == v_near:
        return
    nid = run.tree.ids.get(v_new)
    if nid is None:
        if validate_tensor_edge(ts, v_near, v_new):
            run.tree.add(v_new, run.tree.ids[v_near], edge_cost(ts, v_near, v_new))
    elif do_rewire:
        rewire(ts, run.tree, v_near, v_new)


def _expand_informed(run: _Run, v_last: Optional[int]) -> Optional[int]:
    """One expansion of the informed planner; returns the promoted child."""
    ts = run.ts
    tree = run.tree
    if v_last is None:
        q_rand = run.sample()
        v_near = nearest_tree_vertex(tree, q_rand)
    else:
        q_rand = ts.goal_config()
        v_near = tree.verts[v_last]
    v_new = informed_oracle(ts, v_near, q_rand, run.rng)
    run.note_expansion()

    neighbor_ids = _neighbors_in_tree(ts, tree, v_new)
    if not neighbor_ids:
        return None
    ranked = sorted(
        (tree.cost[nid] + edge_cost(ts, tree.verts[nid], v_new), nid)
        for nid in neighbor_ids
    )
    best_id = -1
    best_cost = math.inf
    for total, nid in ranked:
        if validate_tensor_edge(ts, tree.verts[nid], v_new):
            best_id = nid
            best_cost = total
            break
    if best_id < 0:
        return None

    existing = tree.ids.get(v_new)
    effective = best_cost if existing is None else min(best_cost, tree.cost[existing])
    if effective > run.incumbent:
        return None

    added = False
    if existing is None:
        new_id = tree.add(v_new, best_id, best_cost - tree.cost[best_id])
        added = True
    else:
        new_id = existing
        if best_cost < tree.cost[existing] and not tree.is_descendant(best_id, existing):
            # connecting edge already validated during the parent scan
            tree.reparent(existing, best_id, best_cost - tree.cost[best_id])

    # pull neighbors through v_new where that shortens them
    for nid in neighbor_ids:
        if nid == new_id:
            continue
        c = edge_cost(ts, v_new, tree.verts[nid])
        if tree.cost[new_id] + c < tree.cost[nid] \
                and not tree.is_descendant(new_id, nid) \
                and validate_tensor_edge(ts, v_new, tree.verts[nid]):
            tree.reparent(nid, new_id, c)

    if added and tree.h_cache[new_id] < tree.h_cache[best_id]:
        return new_id
    return None


# ------------------------------------------------------------------ planners

def drrt(ts: TensorSpace, start: CompositeVertex, target: CompositeVertex,
         params: PlannerParams) -> tuple[Optional[Trajectory], RunTrace]:
    """Feasibility planner: random expansion only, returns the first path."""
    run = _Run(ts, start, target, params)
    if start == target:
        run.harvest()
        return run.finish()
    budget = params.iteration_budget
    while run.trace.expansions < budget:
        batch = min(params.n_it, budget - run.trace.expansions)
        for _ in range(batch):
            _expand_directional(run, do_rewire=False)
        if run.harvest():
            break
    return run.finish()


def ao_drrt(ts: TensorSpace, start: CompositeVertex, target: CompositeVertex,
            params: PlannerParams) -> tuple[Optional[Trajectory], RunTrace]:
    """Anytime variant: duplicate expansions rewire instead of being
    discarded, and the run keeps improving its incumbent until the budget."""
    run = _Run(ts, start, target, params)
    if start == target:
        run.harvest()
        return run.finish()
    budget = params.iteration_budget
    while run.trace.expansions < budget:
        batch = min(params.n_it, budget - run.trace.expansions)
        for _ in range(batch):
            _expand_directional(run, do_rewire=True)
        run.harvest()
        if params.stop_at_first and run.best is not None:
            break
    return run.finish()


def drrt_star(ts: TensorSpace, start: CompositeVertex, target: CompositeVertex,
              params: PlannerParams) -> tuple[Optional[Trajectory], RunTrace]:
    """Informed anytime variant with best-parent selection, neighborhood
    rewiring, incumbent pruning, and greedy child promotion."""
    run = _Run(ts, start, target, params)
    if start == target:
        run.harvest()
        return run.finish()
    budget = params.iteration_budget
    v_last: Optional[int] = run.tree.ids[start]
    while run.trace.expansions < budget:
        batch = min(params.n_it, budget - run.trace.expansions)
        for _ in range(batch):
            v_last = _expand_informed(run, v_last)
        run.harvest()
        if params.stop_at_first and run.best is not None:
            break
    return run.finish()
