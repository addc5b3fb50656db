"""
The implicit product graph
==========================

A composite vertex assigns one roadmap vertex to every robot; a composite
edge lets each robot either stay put or cross one of its own roadmap edges,
all simultaneously. With R robots of n vertices each the product graph has
n^R vertices, so it is never materialized: adjacency is enumerated lazily
from the per-robot lists, and robot-robot collision checks run only when an
edge is actually considered.
"""

from tensorplan import (
    DiskRobot,
    Environment,
    TensorSpace,
    build_prm,
    composite_heuristic,
    edge_cost,
    is_tensor_edge,
    star_radius,
    tensor_adj,
    validate_tensor_edge,
)
from tensorplan.tensorgraph import adjacency_product_size

env = Environment(bounds=(0.0, 0.0, 10.0, 10.0))
robots = (DiskRobot(0.4), DiskRobot(0.4))

# Two tiny per-robot roadmaps, heading in opposite directions.
radius = star_radius(30, 2, env.area(), eta=1.5)
rms = tuple(
    build_prm(env, robots[i], 30, radius, start=s, goal=g, seed=11 + i)
    for i, (s, g) in enumerate((((1, 1), (9, 9)), ((9, 1), (1, 9))))
)
ts = TensorSpace(env, robots, rms)

S, T = ts.start_vertex(), ts.goal_vertex()
print(f"start {S} -> goal {T}")
print(f"explicit product graph would hold {len(rms[0]) ** 2} vertices")

# Lazy adjacency: every combination of (stay | cross one roadmap edge),
# minus the vertex itself. No collision checking yet.
nbrs = tensor_adj(ts, S)
assert len(nbrs) == adjacency_product_size(ts, S)
print(f"neighbors of start: {len(nbrs)} "
      f"(from {len(ts.adjself[0][S[0]])} x {len(ts.adjself[1][S[1]])} "
      f"per-robot moves)")

# Edge membership is purely combinatorial ...
print("first neighbor is an edge:", is_tensor_edge(ts, S, nbrs[0]))

# ... while validation runs the simultaneous-motion collision checks.
ok = [v for v in nbrs if validate_tensor_edge(ts, S, v)]
print(f"validated neighbors of start: {len(ok)}/{len(nbrs)}")

# Edge cost aggregates per-robot segment lengths (sum by default), and the
# composite heuristic aggregates per-robot distance-to-goal tables; it is a
# lower bound on any path through the product graph.
v = ok[0]
print(f"edge cost start->{v}: {edge_cost(ts, S, v):.3f}")
print(f"heuristic at start:  {composite_heuristic(ts, S):.3f}")
print(f"heuristic at goal:   {composite_heuristic(ts, T):.3f}")
