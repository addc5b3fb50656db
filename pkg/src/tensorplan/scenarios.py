"""Bundled benchmark scenarios.

Two families ship with the package:

* two_disk_swap: two disks exchange opposite corners of a 10x10 workspace.
  Each corner sits inside a square room whose door is offset from the
  direct diagonal, so a planner must commit both robots to door crossings
  well before the goal region becomes visible to blind sampling.
* perimeter_crossing_r{3..6}: R disks start evenly spaced on a square ring
  near the workspace boundary and swap with their antipodal positions, all
  crossing the obstructed middle at once. Coupling grows with R, which is
  what the scalability comparisons sweep.

The JSON files under scenarios/ are generated from the builders here and
are the fixtures the command line and the benchmark suite load by name.
"""

from __future__ import annotations

from importlib import resources

from tensorplan.bench import Scenario, load_scenario, save_scenario
from tensorplan.geometry2d import DiskRobot, Environment
from tensorplan.planners import PlannerParams
from tensorplan.tensorgraph import CostModel

# A disk of radius 0.2 whose center may reach every point of [0, 10]^2
# needs bounds inflated by exactly that radius.
WORLD_BOUNDS = (-0.2, -0.2, 10.2, 10.2)
DISK_RADIUS = 0.2

# two_disk_swap geometry: interior side of each corner room, width of its
# door, and the wall slab thickness.
ROOM_SIDE = 2.4
DOOR_WIDTH = 1.4
WALL = 0.4

DESK_ROADMAP_N = 50
DESK_ETA = 2.0
DESK_GOAL_BIAS = 0.05
DESK_CONNECT_CADENCE = 5
DESK_BUDGET = 100_000

PERIMETER_ROADMAP_N = 50
PERIMETER_ETA = 1.0
PERIMETER_BUDGET = 100_000

BUNDLED = ("two_disk_swap", "perimeter_crossing_r3", "perimeter_crossing_r4",
           "perimeter_crossing_r5", "perimeter_crossing_r6")


def _rect(x0: float, y0: float, x1: float, y1: float):
    return ((x0, y0), (x1, y0), (x1, y1), (x0, y1))


def two_disk_swap() -> Scenario:
    """Two disks swap (0,0) and (9,9); each goal sits in a cornered room.

    Room A encloses (9,9) at the top right: a west wall and a south wall
    whose door opens at the bottom-right, away from the diagonal. Room B
    is its point mirror about (5,5) around (0,0). Four rectangles total.
    """
    xmin, ymin, xmax, ymax = WORLD_BOUNDS
    wx0 = xmax - ROOM_SIDE - WALL
    wy0 = ymax - ROOM_SIDE - WALL
    dx0 = xmax - DOOR_WIDTH
    env = Environment(WORLD_BOUNDS, obstacles=(
        _rect(wx0, wy0, wx0 + WALL, ymax),
        _rect(wx0, wy0, dx0, wy0 + WALL),
        _rect(10.0 - wx0 - WALL, ymin, 10.0 - wx0, 10.0 - wy0),
        _rect(10.0 - dx0, 10.0 - wy0 - WALL, 10.0 - wx0, 10.0 - wy0),
    ))
    return Scenario(
        name="two_disk_swap",
        environment=env,
        robots=(DiskRobot(DISK_RADIUS), DiskRobot(DISK_RADIUS)),
        starts=((0.0, 0.0), (9.0, 9.0)),
        goals=((9.0, 9.0), (0.0, 0.0)),
        roadmap_n=DESK_ROADMAP_N,
        roadmap_eta=DESK_ETA,
        cost=CostModel.SUM,
        params=PlannerParams(n_it=DESK_CONNECT_CADENCE,
                             iteration_budget=DESK_BUDGET,
                             goal_bias=DESK_GOAL_BIAS),
    )


_RING_LO = 0.5
_RING_HI = 9.5


def _ring_point(t: float) -> tuple[float, float]:
    """Point at fraction t of the square ring's perimeter, counterclockwise
    from the bottom-left corner."""
    side = _RING_HI - _RING_LO
    s = (t % 1.0) * 4.0 * side
    if s < side:
        return (_RING_LO + s, _RING_LO)
    s -= side
    if s < side:
        return (_RING_HI, _RING_LO + s)
    s -= side
    if s < side:
        return (_RING_HI - s, _RING_HI)
    s -= side
    return (_RING_LO, _RING_HI - s)


def perimeter_crossing(n_robots: int) -> Scenario:
    """R disks on the boundary ring swap with their antipodal positions.

    Every robot must cross the cluttered center at the same time, so the
    instances couple all robots while each per-robot roadmap stays easy.
    """
    if not 2 <= n_robots <= 8:
        raise ValueError(f"perimeter crossing supports 2..8 robots, got {n_robots}")
    env = Environment(WORLD_BOUNDS, obstacles=(
        _rect(4.2, 4.2, 5.8, 5.8),
        _rect(4.0, 1.2, 5.6, 2.0),
        _rect(3.8, 8.0, 5.4, 8.8),
        _rect(6.6, 3.4, 8.6, 4.2),
    ))
    starts = tuple(_ring_point(i / n_robots) for i in range(n_robots))
    goals = tuple(_ring_point(i / n_robots + 0.5) for i in range(n_robots))
    return Scenario(
        name=f"perimeter_crossing_r{n_robots}",
        environment=env,
        robots=tuple(DiskRobot(DISK_RADIUS) for _ in range(n_robots)),
        starts=starts,
        goals=goals,
        roadmap_n=PERIMETER_ROADMAP_N,
        roadmap_eta=PERIMETER_ETA,
        cost=CostModel.SUM,
        params=PlannerParams(n_it=DESK_CONNECT_CADENCE,
                             iteration_budget=PERIMETER_BUDGET),
    )


def build_scenario(name: str) -> Scenario:
    """Construct a bundled scenario from its builder (not its JSON file)."""
    if name == "two_disk_swap":
        return two_disk_swap()
    if name.startswith("perimeter_crossing_r"):
        return perimeter_crossing(int(name.rsplit("r", 1)[1]))
    raise ValueError(f"unknown scenario {name!r}; bundled: {BUNDLED}")


def bundled_scenario_path(name: str):
    """Filesystem path of a bundled scenario JSON."""
    if name not in BUNDLED:
        raise ValueError(f"unknown scenario {name!r}; bundled: {BUNDLED}")
    return resources.files("tensorplan") / "scenarios" / f"{name}.json"


def load_bundled(name: str) -> Scenario:
    return load_scenario(bundled_scenario_path(name))


def write_bundled(target_dir) -> None:
    """Regenerate the bundled JSON files from the builders."""
    import os
    os.makedirs(target_dir, exist_ok=True)
    for name in BUNDLED:
        save_scenario(build_scenario(name), os.path.join(target_dir, f"{name}.json"))
