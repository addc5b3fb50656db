"""Implicit tensor product of per-robot roadmaps.

The composite graph has one vertex per tuple of per-robot roadmap vertices
and an edge whenever every robot either stays put or traverses one of its
own roadmap edges, all moving simultaneously. The graph is never stored;
adjacency is enumerated on demand and robot-robot collisions are checked
edge by edge.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence

import numpy as np

from tensorplan.geometry2d import DiskRobot, Environment
from tensorplan.roadmap import HeuristicTable, Roadmap, heuristic_table

CompositeVertex = tuple[int, ...]

_CCD_CACHE_CAP = 2_000_000


class CostModel(str, Enum):
    """How per-robot motion lengths combine into one path cost.

    Costs accumulate per edge: an edge contributes the aggregate of its
    per-robot segment lengths, and a path costs the sum of its edges.
    """

    SUM = "sum-of-lengths"
    MAX = "max-of-lengths"
    EUCLIDEAN = "composite-euclidean"


_COST_ALIASES = {
    "sum": CostModel.SUM,
    "max": CostModel.MAX,
    "euclidean": CostModel.EUCLIDEAN,
}


def parse_cost_model(name: str) -> CostModel:
    try:
        return CostModel(name)
    except ValueError:
        pass
    try:
        return _COST_ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown cost model {name!r}; expected one of "
                         f"{[m.value for m in CostModel]}") from None


@dataclass
class TensorSpace:
    """Shared context for planning over the implicit product graph.

    Bundles the environment, the robots, one roadmap and one distance-to-goal
    table per robot, and the cost model. Per-robot lookups used in inner
    loops (plain-tuple coordinates, neighbor sets, edge lengths) are
    precomputed here once.
    """

    env: Environment
    robots: tuple[DiskRobot, ...]
    roadmaps: tuple[Roadmap, ...]
    cost: CostModel = CostModel.SUM
    heuristics: tuple[HeuristicTable, ...] = ()

    def __post_init__(self) -> None:
        self.robots = tuple(self.robots)
        self.roadmaps = tuple(self.roadmaps)
        if len(self.robots) == 0:
            raise ValueError("need at least one robot")
        if len(self.robots) != len(self.roadmaps):
            raise ValueError(f"{len(self.robots)} robots but "
                             f"{len(self.roadmaps)} roadmaps")
        if not self.heuristics:
            self.heuristics = tuple(heuristic_table(rm) for rm in self.roadmaps)
        self.cost = CostModel(self.cost)

        self.pts: list[list[tuple[float, float]]] = []
        self.nbrs: list[list[list[int]]] = []
        self.nbr_sets: list[list[frozenset[int]]] = []
        self.adjself: list[list[list[int]]] = []
        self.elen: list[list[dict[int, float]]] = []
        self.h: list[list[float]] = []
        for rm, table in zip(self.roadmaps, self.heuristics):
            pts = [(float(x), float(y)) for x, y in rm.coords]
            nbrs = [[u for u, _ in row] for row in rm.adjacency]
            self.pts.append(pts)
            self.nbrs.append(nbrs)
            self.nbr_sets.append([frozenset(row) for row in nbrs])
            self.adjself.append([[v] + row for v, row in enumerate(nbrs)])
            self.elen.append([dict(row) for row in rm.adjacency])
            self.h.append([float(d) for d in table.dist_to_goal])
        self.radius_sum = [[a.radius + b.radius for b in self.robots]
                           for a in self.robots]
        self._guided: list[Optional[list[int]]] = [None] * len(self.robots)
        self._ccd_cache: dict[tuple, bool] = {}

    # ------------------------------------------------------------- vertices

    @property
    def n_robots(self) -> int:
        return len(self.robots)

    def start_vertex(self) -> CompositeVertex:
        return tuple(rm.start_id for rm in self.roadmaps)

    def goal_vertex(self) -> CompositeVertex:
        return tuple(rm.goal_id for rm in self.roadmaps)

    def vertex_config(self, v: CompositeVertex) -> tuple[tuple[float, float], ...]:
        return tuple(self.pts[i][vi] for i, vi in enumerate(v))

    def config_row(self, v: CompositeVertex) -> list[float]:
        """Flat [x0, y0, x1, y1, ...] used by nearest-neighbor scans."""
        row = []
        for i, vi in enumerate(v):
            x, y = self.pts[i][vi]
            row.append(x)
            row.append(y)
        return row

    def goal_config(self) -> tuple[tuple[float, float], ...]:
        return tuple(self.pts[i][rm.goal_id]
                     for i, rm in enumerate(self.roadmaps))

    def _guided_row(self, i: int) -> list[int]:
        # per-vertex argmin of dist-to-goal over the self-inclusive
        # neighborhood, memoized once per robot
        row = self._guided[i]
        if row is None:
            h = self.h[i]
            row = []
            for members in self.adjself[i]:
                best = members[0]
                best_h = h[best]
                for u in members[1:]:
                    if h[u] < best_h:
                        best = u
                        best_h = h[u]
                row.append(best)
            self._guided[i] = row
        return row


def adjacency_product_size(ts: TensorSpace, v: CompositeVertex) -> int:
    """Number of composite neighbors of v (product of self-inclusive
    per-robot neighborhood sizes, minus v itself)."""
    size = 1
    for i, vi in enumerate(v):
        size *= len(ts.adjself[i][vi])
    return size - 1


def tensor_adjacency_iter(ts: TensorSpace,
                          v: CompositeVertex) -> Iterator[CompositeVertex]:
    """Lazily enumerate the composite neighbors of v in odometer order."""
    for tup in itertools.product(*(ts.adjself[i][vi] for i, vi in enumerate(v))):
        if tup != v:
            yield tup


def tensor_adj(ts: TensorSpace, v: CompositeVertex) -> list[CompositeVertex]:
    """Composite neighbors of v. Materializes the full product; callers in
    large spaces should iterate tensor_adjacency_iter instead."""
    return list(tensor_adjacency_iter(ts, v))


def is_tensor_edge(ts: TensorSpace, u: CompositeVertex,
                   v: CompositeVertex) -> bool:
    """True iff u != v and every robot stays or moves along a roadmap edge."""
    if u == v:
        return False
    for i in range(ts.n_robots):
        if u[i] != v[i] and v[i] not in ts.nbr_sets[i][u[i]]:
            return False
    return True


def edge_cost(ts: TensorSpace, u: CompositeVertex, v: CompositeVertex) -> float:
    """Cost of the composite edge (u, v) under the space's cost model."""
    model = ts.cost
    if model is CostModel.SUM:
        total = 0.0
        for i in range(ts.n_robots):
            if u[i] != v[i]:
                total += ts.elen[i][u[i]][v[i]]
        return total
    if model is CostModel.MAX:
        worst = 0.0
        for i in range(ts.n_robots):
            if u[i] != v[i]:
                length = ts.elen[i][u[i]][v[i]]
                if length > worst:
                    worst = length
        return worst
    total = 0.0
    for i in range(ts.n_robots):
        if u[i] != v[i]:
            length = ts.elen[i][u[i]][v[i]]
            total += length * length
    return math.sqrt(total)


def composite_heuristic(ts: TensorSpace, v: CompositeVertex) -> float:
    """Aggregated per-robot distance-to-goal: an optimistic estimate of the
    remaining cost that ignores robot-robot interactions."""
    model = ts.cost
    if model is CostModel.SUM:
        total = 0.0
        for i, vi in enumerate(v):
            total += ts.h[i][vi]
        return total
    if model is CostModel.MAX:
        worst = 0.0
        for i, vi in enumerate(v):
            if ts.h[i][vi] > worst:
                worst = ts.h[i][vi]
        return worst
    total = 0.0
    for i, vi in enumerate(v):
        hv = ts.h[i][vi]
        total += hv * hv
    return math.sqrt(total)


def validate_tensor_edge(ts: TensorSpace, u: CompositeVertex,
                         v: CompositeVertex) -> bool:
    """True iff every robot pair stays clear throughout the simultaneous
    linear motion from u's configurations to v's.

    Per-robot obstacle clearance is a roadmap-edge property and is already
    guaranteed for tensor edges; only robot-robot interactions are checked.
    """
    n = ts.n_robots
    pts = ts.pts
    cache = ts._ccd_cache
    for i in range(n):
        ui, vi = u[i], v[i]
        ai = pts[i][ui]
        bi = pts[i][vi]
        for j in range(i + 1, n):
            uj, vj = u[j], v[j]
            gap = ts.radius_sum[i][j]
            aj = pts[j][uj]
            bj = pts[j][vj]
            if ui == vi and uj == vj:
                # both parked: plain static clearance, not worth caching
                dx = ai[0] - aj[0]
                dy = ai[1] - aj[1]
                if dx * dx + dy * dy < gap * gap:
                    return False
                continue
            # min distance is invariant under reversing both motions
            if (ui, uj) <= (vi, vj):
                key = (i, j, ui, vi, uj, vj)
            else:
                key = (i, j, vi, ui, vj, uj)
            clear = cache.get(key)
            if clear is None:
                dx = ai[0] - aj[0]
                dy = ai[1] - aj[1]
                rx = (bi[0] - ai[0]) - (bj[0] - aj[0])
                ry = (bi[1] - ai[1]) - (bj[1] - aj[1])
                rr = rx * rx + ry * ry
                if rr > 0.0:
                    t = -(dx * rx + dy * ry) / rr
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                    dx += t * rx
                    dy += t * ry
                clear = dx * dx + dy * dy >= gap * gap
                if len(cache) < _CCD_CACHE_CAP:
                    cache[key] = clear
            if not clear:
                return False
    return True


def direction_oracle(ts: TensorSpace, v_near: CompositeVertex,
                     q_rand: Sequence[Sequence[float]],
                     rng: np.random.Generator) -> CompositeVertex:
    """Per robot, pick the roadmap neighbor whose outgoing ray makes the
    smallest angle with the ray toward that robot's sampled point.

    The vertex itself is excluded (the angle is undefined); angle ties break
    toward the lowest vertex id. If the sample coincides with the robot's
    current configuration the neighbor is drawn uniformly at random, and an
    isolated vertex simply stays.
    """
    out = []
    for i, vi in enumerate(v_near):
        nbrs = ts.nbrs[i][vi]
        if not nbrs:
            out.append(vi)
            continue
        px, py = ts.pts[i][vi]
        dx = float(q_rand[i][0]) - px
        dy = float(q_rand[i][1]) - py
        if dx == 0.0 and dy == 0.0:
            out.append(nbrs[int(rng.integers(len(nbrs)))])
            continue
        dn = math.hypot(dx, dy)
        best = -1
        best_cos = -math.inf
        for u in nbrs:
            ux, uy = ts.pts[i][u]
            ex = ux - px
            ey = uy - py
            en = math.hypot(ex, ey)
            if en == 0.0:
                continue
            c = (dx * ex + dy * ey) / (dn * en)
            if c > best_cos:
                best_cos = c
                best = u
        out.append(best if best >= 0 else vi)
    return tuple(out)


def informed_oracle(ts: TensorSpace, v_near: CompositeVertex,
                    q_rand: Sequence[Sequence[float]],
                    rng: np.random.Generator) -> CompositeVertex:
    """Per robot: if the sampled point is exactly that robot's goal
    configuration, step to the neighborhood member (self included) closest
    to the goal by roadmap distance; otherwise pick a uniformly random
    member of the self-inclusive neighborhood."""
    out = []
    for i, vi in enumerate(v_near):
        gx, gy = ts.pts[i][ts.roadmaps[i].goal_id]
        if float(q_rand[i][0]) == gx and float(q_rand[i][1]) == gy:
            out.append(ts._guided_row(i)[vi])
        else:
            members = ts.adjself[i][vi]
            out.append(members[int(rng.integers(len(members)))])
    return tuple(out)
