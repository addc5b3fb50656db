import json

import pytest

from tensorplan.cli import main, _parse_seed_list
from tensorplan.bench import (
    load_trajectory,
    save_scenario,
    scenario_to_dict,
)

from test_bench import swap_scenario


@pytest.fixture()
def scenario_path(tmp_path):
    path = tmp_path / "swap.json"
    save_scenario(swap_scenario(), path)
    return str(path)


def test_parse_seed_list_ranges_and_singletons():
    assert _parse_seed_list("0,3,7") == [0, 3, 7]
    assert _parse_seed_list("0-4") == [0, 1, 2, 3, 4]
    assert _parse_seed_list("2,5-7,1") == [2, 5, 6, 7, 1]
    assert _parse_seed_list("1,,2") == [1, 2]  # stray commas are tolerated
    with pytest.raises(ValueError):
        _parse_seed_list("4-2")
    with pytest.raises(ValueError):
        _parse_seed_list(",")


def test_build_roadmaps_writes_per_robot_files(tmp_path, scenario_path, capsys):
    out = tmp_path / "maps"
    assert main(["build-roadmaps", "--scenario", scenario_path,
                 "--out", str(out), "--roadmap-seed", "1"]) == 0
    files = sorted(p.name for p in out.iterdir())
    assert files == ["swap_robot0.json", "swap_robot1.json"]
    shown = capsys.readouterr().out
    assert "optimistic lower bound" in shown
    assert "robot 0:" in shown and "robot 1:" in shown


def test_plan_writes_trajectory_and_svg(tmp_path, scenario_path, capsys):
    traj_path = tmp_path / "t.json"
    svg_path = tmp_path / "t.svg"
    code = main(["plan", "--scenario", scenario_path,
                 "--algorithm", "drrt-star", "--seed", "0",
                 "--out", str(traj_path), "--svg", str(svg_path)])
    assert code == 0
    traj = load_trajectory(traj_path)
    assert traj.cost > 0
    assert svg_path.read_text().startswith("<svg")
    assert "normalized" in capsys.readouterr().out


def test_plan_budget_exhaustion_exits_3(scenario_path, capsys):
    code = main(["plan", "--scenario", scenario_path, "--algorithm", "drrt",
                 "--iteration-budget", "1"])
    assert code == 3
    assert "no trajectory within 1" in capsys.readouterr().err


def test_plan_overrides_reach_planner(tmp_path, scenario_path):
    # a generous budget with a tiny cadence still solves; exercise the flags
    code = main(["plan", "--scenario", scenario_path,
                 "--algorithm", "ao-drrt", "--n-it", "5",
                 "--goal-bias", "0.2", "--iteration-budget", "2000"])
    assert code == 0


def test_plan_malformed_scenario_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    doc = scenario_to_dict(swap_scenario())
    del doc["goals"]
    path.write_text(json.dumps(doc))
    assert main(["plan", "--scenario", str(path)]) == 2
    assert "missing key 'goals'" in capsys.readouterr().err


def test_plan_unparseable_scenario_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json\n")
    assert main(["plan", "--scenario", str(path)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_unknown_algorithm_rejected_by_parser(scenario_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["plan", "--scenario", scenario_path, "--algorithm", "dijkstra"])
    assert exc.value.code == 2
    assert "invalid choice" in capsys.readouterr().err


def test_bench_csv_and_run_count(tmp_path, scenario_path, capsys):
    csv_path = tmp_path / "runs.csv"
    code = main(["bench", "--scenario", scenario_path,
                 "--algorithm", "implicit-astar",
                 "--seeds", "0", "--roadmap-seeds", "0-2,5",
                 "--csv", str(csv_path)])
    assert code == 0
    shown = capsys.readouterr().out
    assert "4 runs" in shown
    assert "success 1.00" in shown
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "algorithm,seed,iteration,elapsed_s,best_cost,normalized_cost"
    assert len(lines) == 1 + 4  # implicit A* traces carry a single event


def test_bench_deterministic_csv_modulo_elapsed(tmp_path, scenario_path):
    def run(name):
        path = tmp_path / name
        main(["bench", "--scenario", scenario_path, "--algorithm", "ao-drrt",
              "--seeds", "0-1", "--roadmap-seeds", "0", "--csv", str(path)])
        rows = [line.split(",") for line in path.read_text().splitlines()]
        return [row[:3] + row[4:] for row in rows]  # drop elapsed_s column

    assert run("a.csv") == run("b.csv")


def test_render_matches_plan_svg(tmp_path, scenario_path):
    traj_path = tmp_path / "t.json"
    svg_a = tmp_path / "a.svg"
    svg_b = tmp_path / "b.svg"
    assert main(["plan", "--scenario", scenario_path, "--seed", "2",
                 "--out", str(traj_path), "--svg", str(svg_a)]) == 0
    assert main(["render", "--scenario", scenario_path,
                 "--trajectory", str(traj_path), "--out", str(svg_b)]) == 0
    assert svg_a.read_text() == svg_b.read_text()


def test_render_robot_count_mismatch_exits_2(tmp_path, scenario_path, capsys):
    traj_path = tmp_path / "t.json"
    assert main(["plan", "--scenario", scenario_path, "--seed", "0",
                 "--out", str(traj_path)]) == 0
    doc = json.loads(traj_path.read_text())
    doc["robot_paths"] = doc["robot_paths"][:1]
    doc["per_robot_lengths"] = doc["per_robot_lengths"][:1]
    traj_path.write_text(json.dumps(doc))
    assert main(["render", "--scenario", scenario_path,
                 "--trajectory", str(traj_path),
                 "--out", str(tmp_path / "x.svg")]) == 2
    assert "1 robots, scenario has 2" in capsys.readouterr().err
