"""Exact 2D collision predicates for disk robots among polygonal obstacles.

All queries are closed-form (no sampling). The free set is closed: a disk
touching an obstacle or the boundary at distance exactly equal to its radius
counts as free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

Point = tuple[float, float]


def point_segment_distance(px: float, py: float, ax: float, ay: float,
                           bx: float, by: float) -> float:
    """Distance from point (px, py) to segment (a, b)."""
    dx = bx - ax
    dy = by - ay
    dd = dx * dx + dy * dy
    if dd == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / dd
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _orient(ax: float, ay: float, bx: float, by: float,
            cx: float, cy: float) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True iff closed segments ab and cd share at least one point."""
    d1 = _orient(*c, *d, *a)
    d2 = _orient(*c, *d, *b)
    d3 = _orient(*a, *b, *c)
    d4 = _orient(*a, *b, *d)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and \
            d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True

    def on_seg(px, py, qx, qy, rx, ry):
        # r collinear with pq assumed; is r within the bounding box of pq
        return min(px, qx) <= rx <= max(px, qx) and min(py, qy) <= ry <= max(py, qy)

    if d1 == 0 and on_seg(*c, *d, *a):
        return True
    if d2 == 0 and on_seg(*c, *d, *b):
        return True
    if d3 == 0 and on_seg(*a, *b, *c):
        return True
    if d4 == 0 and on_seg(*a, *b, *d):
        return True
    return False


def segment_segment_distance(a: Point, b: Point, c: Point, d: Point) -> float:
    """Minimum distance between closed segments ab and cd."""
    if segments_intersect(a, b, c, d):
        return 0.0
    return min(
        point_segment_distance(a[0], a[1], c[0], c[1], d[0], d[1]),
        point_segment_distance(b[0], b[1], c[0], c[1], d[0], d[1]),
        point_segment_distance(c[0], c[1], a[0], a[1], b[0], b[1]),
        point_segment_distance(d[0], d[1], a[0], a[1], b[0], b[1]),
    )


def point_in_polygon(px: float, py: float,
                     polygon: Sequence[Point]) -> bool:
    """Crossing-number test. Boundary points may land on either side; callers
    that care about the boundary must combine this with a distance test."""
    inside = False
    n = len(polygon)
    j = n - 1
    for i in range(n):
        xi, yi = polygon[i]
        xj, yj = polygon[j]
        if (yi > py) != (yj > py):
            x_cross = xi + (py - yi) * (xj - xi) / (yj - yi)
            if px < x_cross:
                inside = not inside
        j = i
    return inside


def point_polygon_distance(px: float, py: float,
                           polygon: Sequence[Point]) -> float:
    """Distance from a point to a solid simple polygon (0 inside)."""
    best = math.inf
    n = len(polygon)
    j = n - 1
    for i in range(n):
        d = point_segment_distance(px, py, polygon[j][0], polygon[j][1],
                                   polygon[i][0], polygon[i][1])
        if d < best:
            best = d
        j = i
    if best > 0.0 and point_in_polygon(px, py, polygon):
        return 0.0
    return best


def segment_polygon_distance(a: Point, b: Point,
                             polygon: Sequence[Point]) -> float:
    """Distance from segment ab to a solid simple polygon (0 on overlap)."""
    # A segment overlapping the solid either crosses an edge or lies inside;
    # the inside case is caught by testing one endpoint.
    best = math.inf
    n = len(polygon)
    j = n - 1
    for i in range(n):
        d = segment_segment_distance(a, b, polygon[j], polygon[i])
        if d == 0.0:
            return 0.0
        if d < best:
            best = d
        j = i
    if point_in_polygon(a[0], a[1], polygon):
        return 0.0
    return best


def _as_polygon(vertices: Sequence[Sequence[float]]) -> tuple[Point, ...]:
    return tuple((float(x), float(y)) for x, y in vertices)


def _polygon_is_simple(poly: tuple[Point, ...]) -> bool:
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if a == b:
            return False
        for j in range(i + 1, n):
            # adjacent edges share a vertex by construction; skip them
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            c, d = poly[j], poly[(j + 1) % n]
            if segments_intersect(a, b, c, d):
                return False
    return True


@dataclass(frozen=True)
class Environment:
    """Axis-aligned workspace rectangle with solid polygonal obstacles.

    bounds is (xmin, ymin, xmax, ymax). Obstacle polygons must be simple,
    have at least 3 vertices, and lie within bounds.
    """

    bounds: tuple[float, float, float, float]
    obstacles: tuple[tuple[Point, ...], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        xmin, ymin, xmax, ymax = (float(v) for v in self.bounds)
        if not (xmin < xmax and ymin < ymax):
            raise ValueError(f"degenerate bounds {self.bounds}")
        object.__setattr__(self, "bounds", (xmin, ymin, xmax, ymax))
        polys = tuple(_as_polygon(p) for p in self.obstacles)
        for k, poly in enumerate(polys):
            if len(poly) < 3:
                raise ValueError(f"obstacle {k} has fewer than 3 vertices")
            if not _polygon_is_simple(poly):
                raise ValueError(f"obstacle {k} is not a simple polygon")
            for x, y in poly:
                if not (xmin <= x <= xmax and ymin <= y <= ymax):
                    raise ValueError(f"obstacle {k} vertex ({x}, {y}) outside bounds")
        object.__setattr__(self, "obstacles", polys)

    def area(self) -> float:
        xmin, ymin, xmax, ymax = self.bounds
        return (xmax - xmin) * (ymax - ymin)


@dataclass(frozen=True)
class DiskRobot:
    """A disk of positive radius translating in the plane."""

    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0.0):
            raise ValueError(f"radius must be positive, got {self.radius}")


def point_free(env: Environment, robot: DiskRobot,
               q: Sequence[float]) -> bool:
    """True iff the disk centered at q fits inside bounds and clears every
    obstacle by at least the radius (distance == radius counts free)."""
    x, y = float(q[0]), float(q[1])
    r = robot.radius
    xmin, ymin, xmax, ymax = env.bounds
    if not (xmin + r <= x <= xmax - r and ymin + r <= y <= ymax - r):
        return False
    for poly in env.obstacles:
        if point_polygon_distance(x, y, poly) < r:
            return False
    return True


def segment_free(env: Environment, robot: DiskRobot,
                 a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff point_free holds along the whole straight motion a -> b.

    Exact: bounds are convex so endpoint checks cover the interior, and
    obstacle clearance reduces to segment-to-polygon distance >= radius.
    """
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    r = robot.radius
    xmin, ymin, xmax, ymax = env.bounds
    if not (xmin + r <= ax <= xmax - r and ymin + r <= ay <= ymax - r):
        return False
    if not (xmin + r <= bx <= xmax - r and ymin + r <= by <= ymax - r):
        return False
    pa = (ax, ay)
    pb = (bx, by)
    for poly in env.obstacles:
        if segment_polygon_distance(pa, pb, poly) < r:
            return False
    return True


def pair_static_clear(robot_i: DiskRobot, robot_j: DiskRobot,
                      q_i: Sequence[float], q_j: Sequence[float]) -> bool:
    """True iff two stationary disks do not overlap (touching is clear)."""
    return math.hypot(q_i[0] - q_j[0], q_i[1] - q_j[1]) >= robot_i.radius + robot_j.radius


def moving_pair_min_distance(a_i: Sequence[float], b_i: Sequence[float],
                             a_j: Sequence[float], b_j: Sequence[float]) -> float:
    """Minimum center distance between two disks translating linearly and
    simultaneously, i from a_i to b_i and j from a_j to b_j, over t in [0, 1].

    The relative displacement is linear in t, so the squared distance is a
    quadratic minimized at t* = -(D . V) / (V . V), clamped to [0, 1].
    """
    dx = float(a_i[0]) - float(a_j[0])
    dy = float(a_i[1]) - float(a_j[1])
    vx = (float(b_i[0]) - float(a_i[0])) - (float(b_j[0]) - float(a_j[0]))
    vy = (float(b_i[1]) - float(a_i[1])) - (float(b_j[1]) - float(a_j[1]))
    vv = vx * vx + vy * vy
    if vv > 0.0:
        t = -(dx * vx + dy * vy) / vv
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        dx += t * vx
        dy += t * vy
    return math.hypot(dx, dy)


def pair_motion_clear(robot_i: DiskRobot, robot_j: DiskRobot,
                      a_i: Sequence[float], b_i: Sequence[float],
                      a_j: Sequence[float], b_j: Sequence[float]) -> bool:
    """True iff disks i and j stay clear of each other throughout the
    simultaneous linear motions a_i -> b_i and a_j -> b_j."""
    return moving_pair_min_distance(a_i, b_i, a_j, b_j) >= robot_i.radius + robot_j.radius
