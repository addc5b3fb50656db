"""
Exact and composite-space baselines
===================================

Three reference points put the tree planners in context:

* implicit_astar      -- exact optimum over the product graph of the given
                         roadmaps; the gold standard every tensor-graph
                         planner is normalized against.
* composite_prm_star  -- one explicit roadmap in the joint 2R-dimensional
                         space; exact within its own samples but the sample
                         count it needs explodes with R.
* composite_rrt_star  -- RRT* run directly in the joint space; no roadmaps
                         at all, so it may even beat the per-robot-roadmap
                         optimum, but it scales poorly with R.
"""

from tensorplan import (
    PlannerParams,
    build_scenario_roadmaps,
    composite_prm_star,
    composite_rrt_star,
    implicit_astar,
    load_bundled,
    make_tensor_space,
)

scenario = load_bundled("two_disk_swap")
roadmaps = build_scenario_roadmaps(scenario, roadmap_seed=0)
ts = make_tensor_space(scenario, roadmaps)

# Exact product-graph optimum via A* with the aggregated per-robot
# distance-to-goal heuristic. The record counts node expansions.
rec = implicit_astar(ts, ts.start_vertex(), ts.goal_vertex())
assert rec is not None
print(f"implicit A*: optimum {rec.cost:.3f} after {rec.expanded} expansions")

# Heuristic off: same cost, far more expansions (plain Dijkstra ordering).
blind = implicit_astar(ts, ts.start_vertex(), ts.goal_vertex(),
                       use_heuristic=False)
print(f"no heuristic: same optimum {blind.cost:.3f}, "
      f"{blind.expanded} expansions ({blind.expanded / rec.expanded:.0f}x)")

# Composite PRM*: 900 samples in the 4-dimensional joint space of the two
# disks. Costs land near the per-robot-roadmap optimum.
traj = composite_prm_star(scenario.environment, scenario.robots, 900, 0,
                          scenario.starts, scenario.goals, eta=1.0)
assert traj is not None
print(f"composite PRM*: cost {traj.cost:.3f} over {traj.n_steps} segments")

# Composite RRT*: anytime, asymptotically optimal, roadmap-free.
params = PlannerParams(iteration_budget=20_000, goal_bias=0.05, seed=0)
traj, trace = composite_rrt_star(scenario.environment, scenario.robots,
                                 params, scenario.starts, scenario.goals)
assert traj is not None
print(f"composite RRT*: cost {traj.cost:.3f} after "
      f"{trace.expansions} iterations, {len(trace.events)} improvements")
print(f"product-graph optimum for comparison: {rec.cost:.3f}")
