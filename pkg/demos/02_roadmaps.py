"""
Per-robot probabilistic roadmaps
================================

Each robot gets its own roadmap: uniform free-space samples plus the start
and goal, connected to every neighbor within the shrinking radius
r(n) = gamma (log n / n)^(1/d). The radius formula is the whole story: too
small and the graph falls apart, large enough and shortest paths through it
approach the true optima.
"""

from tensorplan import (
    DiskRobot,
    Environment,
    build_prm,
    load_roadmap,
    save_roadmap,
    shortest_path,
    star_radius,
)

env = Environment(
    bounds=(0.0, 0.0, 10.0, 10.0),
    obstacles=(((4.0, 0.0), (6.0, 0.0), (6.0, 7.0), (4.0, 7.0)),),
)
robot = DiskRobot(0.3)

# The radius scales with the free-space measure (bounds area here) and the
# slack eta; doubling the sample count shrinks it.
for n in (50, 100, 200):
    print(f"n={n:4d}  r={star_radius(n, 2, env.area(), eta=1.0):.3f}")

# Build a 100-sample roadmap routing around the wall. Sampling is seeded,
# so the same call reproduces the same graph bit for bit.
radius = star_radius(100, 2, env.area(), eta=1.0)
rm = build_prm(env, robot, 100, radius, start=(1.0, 1.0), goal=(9.0, 1.0),
               seed=7)
edges = sum(len(nbrs) for nbrs in rm.adjacency) // 2
print(f"{len(rm)} vertices, {edges} edges, radius {rm.radius_used:.3f}")

# Start and goal are always vertices 0 and 1.
route = shortest_path(rm, rm.start_id, rm.goal_id)
assert route is not None
ids, length = route
print(f"shortest start->goal: {length:.3f} through {len(ids)} vertices")
print("detour over the wall top:", " -> ".join(
    f"({rm.coords[i][0]:.1f},{rm.coords[i][1]:.1f})" for i in ids[:4]), "...")

# Roadmaps serialize to plain JSON and come back identical.
save_roadmap(rm, "/tmp/demo_roadmap.json")
again = load_roadmap("/tmp/demo_roadmap.json")
assert again.adjacency == rm.adjacency
print("JSON round trip: identical adjacency")
