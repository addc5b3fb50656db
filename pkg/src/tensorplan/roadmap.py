"""Per-robot probabilistic roadmaps with asymptotically-optimal connectivity.

A roadmap is built for one robot in isolation: uniform free samples plus the
robot's start and goal, connected by every collision-free edge shorter than
the connection radius. The radius follows the standard PRM* rule, so each
roadmap individually converges to optimal per-robot paths as n grows.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from tensorplan.geometry2d import DiskRobot, Environment, point_free, segment_free

ROADMAP_FORMAT_VERSION = 1


class SamplingBudgetError(RuntimeError):
    """Raised when rejection sampling burns its failure budget."""

    def __init__(self, attempts: int, accepted: int, wanted: int):
        self.attempts = attempts
        super().__init__(
            f"rejection sampling failed {attempts} times while accepting "
            f"{accepted}/{wanted} samples; free space may be too small"
        )


def unit_ball_volume(d: int) -> float:
    """Lebesgue measure of the unit ball in R^d."""
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def star_radius(n, d: int, mu: float, eta: float):
    """Connection radius r*(n) = gamma (log n / n)^(1/d) with the constant
    gamma = (1 + eta) 2 (1/d)^(1/d) (mu / zeta_d)^(1/d).

    mu is the free-space measure (an upper bound such as the bounds area is
    fine), zeta_d the unit-ball volume. Accepts a scalar or array n.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if mu <= 0.0:
        raise ValueError(f"mu must be positive, got {mu}")
    if eta <= 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    n_arr = np.asarray(n)
    if (n_arr < 2).any():
        raise ValueError("n must be at least 2")
    gamma = (1.0 + eta) * 2.0 * (1.0 / d) ** (1.0 / d) \
        * (mu / unit_ball_volume(d)) ** (1.0 / d)
    r = gamma * (np.log(n_arr) / n_arr) ** (1.0 / d)
    return float(r) if np.isscalar(n) or n_arr.ndim == 0 else r


@dataclass(frozen=True)
class Roadmap:
    """Embedded graph for a single robot.

    coords[v] is the configuration of vertex v; adjacency[v] lists
    (neighbor, edge length) pairs in ascending neighbor order. start_id and
    goal_id index the query endpoints (0 and 1 as built).
    """

    coords: np.ndarray
    adjacency: tuple[tuple[tuple[int, float], ...], ...]
    start_id: int
    goal_id: int
    radius_used: float
    seed: Optional[int] = None

    def __len__(self) -> int:
        return len(self.coords)

    def edges(self):
        """Yield each undirected edge once as (u, v, length) with u < v."""
        for u, nbrs in enumerate(self.adjacency):
            for v, length in nbrs:
                if u < v:
                    yield u, v, length


@dataclass(frozen=True)
class HeuristicTable:
    """Exact distance-to-goal for every roadmap vertex (inf if unreachable)."""

    dist_to_goal: np.ndarray


def build_prm(env: Environment, robot: DiskRobot, n: int, radius: float,
              start: Sequence[float], goal: Sequence[float],
              seed: Optional[int] = None) -> Roadmap:
    """Sample n free configurations, add start and goal, connect all pairs
    within `radius` whose straight motion is collision-free.

    Vertex 0 is the start, vertex 1 the goal, samples follow in draw order.
    Rejection sampling raises SamplingBudgetError after 100 * n failures.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if radius <= 0.0:
        raise ValueError(f"radius must be positive, got {radius}")
    for name, q in (("start", start), ("goal", goal)):
        if not point_free(env, robot, q):
            raise ValueError(f"{name} configuration {tuple(q)} is not collision-free")

    rng = np.random.default_rng(seed)
    xmin, ymin, xmax, ymax = env.bounds
    pts = [(float(start[0]), float(start[1])), (float(goal[0]), float(goal[1]))]
    failures = 0
    budget = 100 * n
    while len(pts) < n + 2:
        x = rng.uniform(xmin, xmax)
        y = rng.uniform(ymin, ymax)
        if point_free(env, robot, (x, y)):
            pts.append((x, y))
        else:
            failures += 1
            if failures > budget:
                raise SamplingBudgetError(failures, len(pts) - 2, n)

    m = len(pts)
    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(m)]
    for u in range(m):
        ux, uy = pts[u]
        for v in range(u + 1, m):
            length = math.hypot(pts[v][0] - ux, pts[v][1] - uy)
            if length <= radius and segment_free(env, robot, pts[u], pts[v]):
                adjacency[u].append((v, length))
                adjacency[v].append((u, length))

    return Roadmap(
        coords=np.array(pts, dtype=float),
        adjacency=tuple(tuple(nbrs) for nbrs in adjacency),
        start_id=0,
        goal_id=1,
        radius_used=float(radius),
        seed=seed,
    )


def adj_self(roadmap: Roadmap, v: int) -> list[int]:
    """Vertex ids reachable in one hop, including v itself (listed first)."""
    return [v] + [u for u, _ in roadmap.adjacency[v]]


def _dijkstra(roadmap: Roadmap, source: int,
              target: Optional[int] = None) -> tuple[list[float], list[int]]:
    n = len(roadmap)
    dist = [math.inf] * n
    prev = [-1] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if u == target:
            break
        for v, w in roadmap.adjacency[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, prev


def heuristic_table(roadmap: Roadmap) -> HeuristicTable:
    """Exact shortest-path distance from every vertex to the roadmap goal.

    One goal-rooted run suffices because only the goal row is ever consumed.
    """
    dist, _ = _dijkstra(roadmap, roadmap.goal_id)
    return HeuristicTable(dist_to_goal=np.array(dist, dtype=float))


def shortest_path(roadmap: Roadmap, from_id: int,
                  to_id: int) -> Optional[tuple[list[int], float]]:
    """Vertex path and length from from_id to to_id, or None if disconnected."""
    dist, prev = _dijkstra(roadmap, from_id, target=to_id)
    if math.isinf(dist[to_id]):
        return None
    path = [to_id]
    while path[-1] != from_id:
        path.append(prev[path[-1]])
    path.reverse()
    return path, dist[to_id]


# ------------------------------------------------------------- serialization

def roadmap_to_dict(roadmap: Roadmap) -> dict:
    return {
        "version": ROADMAP_FORMAT_VERSION,
        "kind": "roadmap",
        "seed": roadmap.seed,
        "radius": roadmap.radius_used,
        "start_id": roadmap.start_id,
        "goal_id": roadmap.goal_id,
        "vertices": [[float(x), float(y)] for x, y in roadmap.coords],
        "edges": [[u, v, length] for u, v, length in roadmap.edges()],
    }


def roadmap_from_dict(data: dict) -> Roadmap:
    if data.get("kind") != "roadmap":
        raise ValueError(f"not a roadmap document: kind={data.get('kind')!r}")
    if data.get("version") != ROADMAP_FORMAT_VERSION:
        raise ValueError(f"unsupported roadmap format version {data.get('version')!r}")
    coords = np.array(data["vertices"], dtype=float)
    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(len(coords))]
    for u, v, length in data["edges"]:
        adjacency[int(u)].append((int(v), float(length)))
        adjacency[int(v)].append((int(u), float(length)))
    for nbrs in adjacency:
        nbrs.sort(key=lambda item: item[0])
    return Roadmap(
        coords=coords,
        adjacency=tuple(tuple(nbrs) for nbrs in adjacency),
        start_id=int(data["start_id"]),
        goal_id=int(data["goal_id"]),
        radius_used=float(data["radius"]),
        seed=data.get("seed"),
    )


def save_roadmap(roadmap: Roadmap, path) -> None:
    Path(path).write_text(json.dumps(roadmap_to_dict(roadmap)))


def load_roadmap(path) -> Roadmap:
    return roadmap_from_dict(json.loads(Path(path).read_text()))
