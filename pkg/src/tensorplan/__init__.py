"""Multi-robot motion planning on implicit tensor-product roadmaps."""

from tensorplan.geometry2d import (
    DiskRobot,
    Environment,
    pair_motion_clear,
    pair_static_clear,
    point_free,
    segment_free,
)
from tensorplan.roadmap import (
    Roadmap,
    SamplingBudgetError,
    build_prm,
    heuristic_table,
    load_roadmap,
    save_roadmap,
    shortest_path,
    star_radius,
)
from tensorplan.tensorgraph import (
    CostModel,
    TensorSpace,
    composite_heuristic,
    edge_cost,
    is_tensor_edge,
    parse_cost_model,
    tensor_adj,
    validate_tensor_edge,
)
from tensorplan.planners import (
    PlannerParams,
    RunTrace,
    SearchTree,
    Trajectory,
    ao_drrt,
    audit_tree,
    drrt,
    drrt_star,
)
from tensorplan.baselines import (
    composite_prm_star,
    composite_rrt_star,
    implicit_astar,
)
from tensorplan.bench import (
    ExperimentReport,
    RunResult,
    Scenario,
    build_scenario_roadmaps,
    emit_csv,
    emit_svg,
    load_scenario,
    load_trajectory,
    make_tensor_space,
    optimistic_lower_bound,
    run_experiment,
    run_one,
    save_scenario,
    save_trajectory,
)
from tensorplan.scenarios import build_scenario, load_bundled

__all__ = [
    "CostModel",
    "DiskRobot",
    "Environment",
    "ExperimentReport",
    "PlannerParams",
    "Roadmap",
    "RunResult",
    "RunTrace",
    "SamplingBudgetError",
    "Scenario",
    "SearchTree",
    "TensorSpace",
    "Trajectory",
    "ao_drrt",
    "audit_tree",
    "build_prm",
    "build_scenario",
    "build_scenario_roadmaps",
    "composite_heuristic",
    "composite_prm_star",
    "composite_rrt_star",
    "drrt",
    "drrt_star",
    "edge_cost",
    "emit_csv",
    "emit_svg",
    "heuristic_table",
    "implicit_astar",
    "is_tensor_edge",
    "load_bundled",
    "load_roadmap",
    "load_scenario",
    "load_trajectory",
    "make_tensor_space",
    "optimistic_lower_bound",
    "pair_motion_clear",
    "pair_static_clear",
    "parse_cost_model",
    "point_free",
    "run_experiment",
    "run_one",
    "save_roadmap",
    "save_scenario",
    "save_trajectory",
    "segment_free",
    "shortest_path",
    "star_radius",
    "tensor_adj",
    "validate_tensor_edge",
]

__version__ = "0.1.0"
