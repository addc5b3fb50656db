import json
import math
import re

import numpy as np
import pytest

from tensorplan.geometry2d import DiskRobot, Environment
from tensorplan.planners import PlannerParams
from tensorplan.roadmap import Roadmap, save_roadmap, shortest_path
from tensorplan.tensorgraph import CostModel, composite_heuristic
from tensorplan.bench import (
    ALGORITHMS,
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
    scenario_from_dict,
    scenario_radius,
    scenario_to_dict,
)

from test_planners import SWAP_ENV


def swap_scenario(**overrides):
    fields = dict(
        name="swap",
        environment=SWAP_ENV,
        robots=(DiskRobot(0.2), DiskRobot(0.2)),
        starts=((0.0, 0.0), (9.0, 9.0)),
        goals=((9.0, 9.0), (0.0, 0.0)),
        roadmap_n=25,
        roadmap_eta=1.5,
        cost=CostModel.SUM,
        params=PlannerParams(n_it=10, iteration_budget=1500, goal_bias=0.05),
    )
    fields.update(overrides)
    return Scenario(**fields)


# ------------------------------------------------------------------ scenario

def test_scenario_rejects_count_mismatch():
    with pytest.raises(ValueError, match="2 robots but 1 starts"):
        swap_scenario(starts=((0.0, 0.0),))


def test_scenario_rejects_blocked_start_naming_robot():
    with pytest.raises(ValueError, match="start of robot 1"):
        swap_scenario(starts=((0.0, 0.0), (5.0, 5.0)))  # inside the center block


def test_scenario_rejects_close_starts_naming_pair():
    with pytest.raises(ValueError, match="robots 0 and 1"):
        swap_scenario(starts=((0.0, 0.0), (0.3, 0.1)))


def test_scenario_rejects_close_goals():
    with pytest.raises(ValueError, match="goals of robots 0 and 1"):
        swap_scenario(goals=((9.0, 9.0), (9.1, 9.2)))


def test_scenario_roadmap_spec_exclusive():
    with pytest.raises(ValueError, match="exactly one"):
        swap_scenario(roadmap_files=("a.json", "b.json"))
    with pytest.raises(ValueError, match="exactly one"):
        swap_scenario(roadmap_n=None)


def test_scenario_requires_positive_eta_and_enough_samples():
    with pytest.raises(ValueError, match="roadmap_n"):
        swap_scenario(roadmap_n=1)
    with pytest.raises(ValueError, match="roadmap_eta"):
        swap_scenario(roadmap_eta=None)
    with pytest.raises(ValueError, match="roadmap_eta"):
        swap_scenario(roadmap_eta=-1.0)


def test_scenario_dict_round_trip():
    sc = swap_scenario()
    again = scenario_from_dict(json.loads(json.dumps(scenario_to_dict(sc))))
    assert again == sc


def test_scenario_file_round_trip(tmp_path):
    sc = swap_scenario(cost=CostModel.MAX)
    path = tmp_path / "sc.json"
    save_scenario(sc, path)
    assert load_scenario(path) == sc


def test_scenario_rejects_unknown_keys():
    doc = scenario_to_dict(swap_scenario())
    doc["extra"] = 1
    with pytest.raises(ValueError, match="unknown scenario key 'extra'"):
        scenario_from_dict(doc)


def test_scenario_rejects_unknown_and_reserved_params():
    doc = scenario_to_dict(swap_scenario())
    doc["params"] = {"seed": 3}
    with pytest.raises(ValueError, match="seed"):
        scenario_from_dict(doc)
    doc["params"] = {"nit": 5}
    with pytest.raises(ValueError, match="unknown planner parameter"):
        scenario_from_dict(doc)


def test_scenario_rejects_missing_key_and_bad_version():
    doc = scenario_to_dict(swap_scenario())
    doc.pop("robots")
    with pytest.raises(ValueError, match="missing key 'robots'"):
        scenario_from_dict(doc)
    doc2 = scenario_to_dict(swap_scenario())
    doc2["version"] = 99
    with pytest.raises(ValueError, match="version"):
        scenario_from_dict(doc2)


def test_load_scenario_reports_parse_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n"version": 1,\n"name": oops\n}\n')
    with pytest.raises(ValueError, match=r"line 3"):
        load_scenario(path)


# ------------------------------------------------------------------ roadmaps

def test_build_scenario_roadmaps_deterministic_and_distinct():
    sc = swap_scenario()
    a = build_scenario_roadmaps(sc, 4)
    b = build_scenario_roadmaps(sc, 4)
    for rm_a, rm_b in zip(a, b):
        assert np.array_equal(rm_a.coords, rm_b.coords)
        assert rm_a.adjacency == rm_b.adjacency
    # per-robot child seeds differ, so the sampled interiors differ
    assert not np.array_equal(a[0].coords[2:], a[1].coords[2:])


def test_scenario_radius_matches_and_files_mode_none(tmp_path):
    sc = swap_scenario()
    rms = build_scenario_roadmaps(sc, 0)
    assert all(rm.radius_used == scenario_radius(sc) for rm in rms)
    paths = []
    for i, rm in enumerate(rms):
        p = tmp_path / f"rm{i}.json"
        save_roadmap(rm, p)
        paths.append(str(p))
    sc_files = swap_scenario(roadmap_n=None, roadmap_eta=None,
                             roadmap_files=tuple(paths))
    assert scenario_radius(sc_files) is None
    loaded = build_scenario_roadmaps(sc_files, 123)  # seed is ignored
    for rm, orig in zip(loaded, rms):
        assert np.array_equal(rm.coords, orig.coords)


def test_lower_bound_equals_heuristic_at_start_and_bounds():
    sc = swap_scenario()
    rms = build_scenario_roadmaps(sc, 1)
    lb = optimistic_lower_bound(sc, rms)
    ts = make_tensor_space(sc, rms)
    assert lb == composite_heuristic(ts, ts.start_vertex())
    straight = 2 * math.hypot(9.0, 9.0)
    assert lb >= straight
    assert lb <= 1.5 * straight


def test_lower_bound_cost_model_aggregation():
    sc = swap_scenario()
    rms = build_scenario_roadmaps(sc, 1)
    per_robot = [shortest_path(rm, rm.start_id, rm.goal_id)[1] for rm in rms]
    from dataclasses import replace
    assert optimistic_lower_bound(sc, rms) == pytest.approx(sum(per_robot))
    assert optimistic_lower_bound(replace(sc, cost=CostModel.MAX), rms) \
        == pytest.approx(max(per_robot))
    assert optimistic_lower_bound(replace(sc, cost=CostModel.EUCLIDEAN), rms) \
        == pytest.approx(math.hypot(*per_robot))


def _island_roadmap_file(tmp_path, name):
    # start and goal live on separate two-vertex islands
    rm = Roadmap(
        coords=np.array([[1.0, 1.0], [9.0, 9.0], [2.0, 1.0], [8.0, 9.0]]),
        adjacency=(((2, 1.0),), ((3, 1.0),), ((0, 1.0),), ((1, 1.0),)),
        start_id=0, goal_id=1, radius_used=1.5)
    p = tmp_path / name
    save_roadmap(rm, p)
    return str(p)


def test_lower_bound_infinite_when_disconnected(tmp_path):
    paths = (_island_roadmap_file(tmp_path, "a.json"),
             _island_roadmap_file(tmp_path, "b.json"))
    sc = swap_scenario(roadmap_n=None, roadmap_eta=None, roadmap_files=paths,
                       starts=((1.0, 1.0), (9.0, 9.0)),
                       goals=((9.0, 9.0), (1.0, 1.0)))
    rms = build_scenario_roadmaps(sc, 0)
    assert optimistic_lower_bound(sc, rms) == math.inf


# --------------------------------------------------------------- experiments

def test_run_experiment_rejects_unknown_algorithm():
    with pytest.raises(ValueError, match="unknown algorithm"):
        run_experiment(swap_scenario(), "a-star-ish")


def test_run_experiment_deterministic_modulo_wall_clock():
    sc = swap_scenario()
    a = run_experiment(sc, "drrt-star", seeds=[0, 1], roadmap_seeds=[0])
    b = run_experiment(sc, "drrt-star", seeds=[0, 1], roadmap_seeds=[0])
    assert len(a.results) == len(b.results) == 2
    for ra, rb in zip(a.results, b.results):
        assert ra.success == rb.success
        assert ra.best_cost == rb.best_cost
        assert ra.normalized_cost == rb.normalized_cost
        assert [(i, c) for i, _, c in ra.trace.events] \
            == [(i, c) for i, _, c in rb.trace.events]


def test_run_experiment_records_failures_without_aborting(tmp_path):
    paths = (_island_roadmap_file(tmp_path, "a.json"),
             _island_roadmap_file(tmp_path, "b.json"))
    sc = swap_scenario(roadmap_n=None, roadmap_eta=None, roadmap_files=paths,
                       starts=((1.0, 1.0), (9.0, 9.0)),
                       goals=((9.0, 9.0), (1.0, 1.0)))
    rep = run_experiment(sc, "drrt", seeds=[0, 1], roadmap_seeds=[0])
    assert len(rep.results) == 2
    assert rep.success_ratio == 0.0
    assert all(r.error is not None for r in rep.results)
    assert rep.median_normalized_cost() == math.inf


def test_run_experiment_prm_star_needs_sampling_spec(tmp_path):
    sc = swap_scenario()
    rms = build_scenario_roadmaps(sc, 0)
    paths = []
    for i, rm in enumerate(rms):
        p = tmp_path / f"rm{i}.json"
        save_roadmap(rm, p)
        paths.append(str(p))
    sc_files = swap_scenario(roadmap_n=None, roadmap_eta=None,
                             roadmap_files=tuple(paths))
    rep = run_experiment(sc_files, "composite-prm-star", seeds=[0],
                         roadmap_seeds=[0])
    assert rep.results[0].success is False
    assert "composite" in rep.results[0].error


def test_run_experiment_implicit_astar_single_event():
    sc = swap_scenario()
    rep = run_experiment(sc, "implicit-astar", seeds=[0], roadmap_seeds=[2])
    (res,) = rep.results
    assert res.success
    assert len(res.trace.events) == 1
    assert res.first_iteration == res.trace.expansions
    assert res.normalized_cost >= 1.0 - 1e-9


def test_run_one_returns_matching_trajectory():
    sc = swap_scenario()
    res, traj = run_one(sc, "drrt-star", roadmap_seed=0, seed=0)
    assert res.success and traj is not None
    assert traj.cost == res.best_cost


def test_report_aggregates_empty_and_mixed():
    rep = ExperimentReport(scenario_name="x", algorithm="drrt")
    assert rep.success_ratio == 0.0
    assert rep.median_normalized_cost() == math.inf
    assert rep.median_first_iteration() == math.inf
    from tensorplan.planners import RunTrace
    rep.results.append(RunResult(
        algorithm="drrt", roadmap_seed=0, seed=0, success=True, best_cost=10.0,
        normalized_cost=1.25, lower_bound=8.0, first_iteration=40,
        first_elapsed_s=0.1, elapsed_s=0.2,
        trace=RunTrace(events=[(40, 0.1, 10.0)], success=True, expansions=50)))
    rep.results.append(RunResult(
        algorithm="drrt", roadmap_seed=0, seed=1, success=False,
        best_cost=math.inf, normalized_cost=math.inf, lower_bound=8.0,
        first_iteration=None, first_elapsed_s=None, elapsed_s=0.2,
        trace=RunTrace()))
    assert rep.success_ratio == 0.5
    assert rep.median_normalized_cost() == 1.25
    assert rep.median_first_iteration() == 40


# ----------------------------------------------------------------- artifacts

def test_emit_csv_exact_header_and_rows(tmp_path):
    sc = swap_scenario()
    rep = run_experiment(sc, "ao-drrt", seeds=[0, 1], roadmap_seeds=[0])
    path = tmp_path / "out.csv"
    emit_csv(rep, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "algorithm,seed,iteration,elapsed_s,best_cost,normalized_cost"
    assert len(lines) - 1 == sum(len(r.trace.events) for r in rep.results)
    row = lines[1].split(",")
    assert row[0] == "ao-drrt"
    assert row[1] == "0-0"
    # repr round-trip: parsing the cell recovers the double bit for bit
    res = rep.results[0]
    assert float(row[4]) == res.trace.events[0][2]
    assert float(row[5]) == res.trace.events[0][2] / res.lower_bound


def test_emit_csv_empty_report_header_only(tmp_path):
    rep = ExperimentReport(scenario_name="x", algorithm="drrt")
    path = tmp_path / "empty.csv"
    emit_csv(rep, path)
    assert path.read_text().splitlines() == [
        "algorithm,seed,iteration,elapsed_s,best_cost,normalized_cost"]


def test_emit_svg_polyline_coordinates_exact(tmp_path):
    sc = swap_scenario()
    res, traj = run_one(sc, "drrt-star", roadmap_seed=1, seed=0)
    path = tmp_path / "traj.svg"
    emit_svg(sc, traj, path)
    content = path.read_text()
    polylines = re.findall(r'<polyline points="([^"]+)"', content)
    assert len(polylines) == len(sc.robots)
    for i, pts in enumerate(polylines):
        got = [tuple(float(c) for c in pair.split(","))
               for pair in pts.split()]
        want = [tuple(float(c) for c in q) for q in np.asarray(traj.robot_paths[i])]
        assert got == want
    assert content.count("<polygon") == len(sc.environment.obstacles)


def test_trajectory_file_round_trip(tmp_path):
    sc = swap_scenario()
    _, traj = run_one(sc, "drrt", roadmap_seed=0, seed=3)
    path = tmp_path / "t.json"
    save_trajectory(traj, path)
    again = load_trajectory(path)
    assert again.cost == traj.cost
    assert again.per_robot_lengths == traj.per_robot_lengths
    assert all(np.array_equal(p, q)
               for p, q in zip(again.robot_paths, traj.robot_paths))
    assert again.waypoints == [tuple(v) for v in traj.waypoints]


def test_trajectory_version_check(tmp_path):
    path = tmp_path / "t.json"
    path.write_text('{"version": 7}')
    with pytest.raises(ValueError, match="version"):
        load_trajectory(path)
