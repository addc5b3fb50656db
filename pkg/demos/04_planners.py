"""
Three tree planners, one product graph
======================================

All three planners grow a single tree through the implicit product graph,
differing only in how they pick the next move:

* drrt       -- pure Voronoi expansion toward random samples; finds some
                solution and stops improving.
* ao_drrt    -- anytime restarts of the same expansion with branch-and-bound
                pruning against the incumbent; cost creeps down over time.
* drrt_star  -- informed expansion (heuristic-guided moves), rewiring, and
                child promotion; finds a first solution almost immediately
                and converges toward the roadmap optimum.
"""

from tensorplan import (
    PlannerParams,
    ao_drrt,
    build_scenario_roadmaps,
    drrt,
    drrt_star,
    load_bundled,
    make_tensor_space,
)

# The bundled two-robot fixture: opposite corners of a 10x10 world, each
# goal tucked inside a walled room whose door faces away from the start.
scenario = load_bundled("two_disk_swap")
roadmaps = build_scenario_roadmaps(scenario, roadmap_seed=0)
ts = make_tensor_space(scenario, roadmaps)
S, T = ts.start_vertex(), ts.goal_vertex()

params = PlannerParams(n_it=5, iteration_budget=20_000, goal_bias=0.05, seed=0)
for name, planner in (("drrt", drrt), ("ao_drrt", ao_drrt),
                      ("drrt_star", drrt_star)):
    trajectory, trace = planner(ts, S, T, params)
    assert trajectory is not None
    first_it, _, first_cost = trace.events[0]
    print(f"{name:9s} first solution: cost {first_cost:7.3f} "
          f"at expansion {first_it:5d}; "
          f"final {trajectory.cost:7.3f} after {len(trace.events)} improvements")

# The anytime traces are strictly decreasing; drrt's single event just
# records its one solution.
_, trace = drrt_star(ts, S, T, params)
costs = [c for _, _, c in trace.events]
assert all(b < a for a, b in zip(costs, costs[1:]))
print("\ndrrt_star incumbent:", " > ".join(f"{c:.2f}" for c in costs[:6]),
      "..." if len(costs) > 6 else "")

# Trees can be audited mid-run (cost bookkeeping, acyclicity, edge validity)
# by setting audit_every; planners then self-check at that cadence.
audited = PlannerParams(n_it=5, iteration_budget=5_000, seed=0,
                        audit_every=1_000)
_, trace = drrt_star(ts, S, T, audited)
print(f"audited run: {trace.audits} mid-run tree audits passed")
