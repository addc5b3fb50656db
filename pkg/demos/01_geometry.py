"""
Disk robots in a polygonal world
================================

The geometric layer answers exactly three questions: may a disk sit at a
point, may it slide along a segment, and may two disks slide along their
segments at the same time. Everything above (roadmaps, product graphs,
planners) is built from these three predicates.
"""

import numpy as np

from tensorplan import (
    DiskRobot,
    Environment,
    pair_motion_clear,
    pair_static_clear,
    point_free,
    segment_free,
)

# A 10x10 box with one square pillar in the middle. Obstacle polygons are
# counterclockwise vertex tuples; the bounds keep every robot center inside.
pillar = ((4.0, 4.0), (6.0, 4.0), (6.0, 6.0), (4.0, 6.0))
env = Environment(bounds=(0.0, 0.0, 10.0, 10.0), obstacles=(pillar,))
robot = DiskRobot(radius=0.5)

# Static placement: the disk must stay inside the bounds and keep its full
# radius away from every obstacle edge.
for q in [(2.0, 2.0), (3.6, 5.0), (0.3, 5.0)]:
    print(f"disk at {q}: {'free' if point_free(env, robot, q) else 'blocked'}")

# Sliding along a segment sweeps a capsule; passing the pillar needs half a
# disk of clearance.
print("slide (2,2)->(2,8):", segment_free(env, robot, (2.0, 2.0), (2.0, 8.0)))
print("slide (2,5)->(8,5):", segment_free(env, robot, (2.0, 5.0), (8.0, 5.0)))

# Two disks moving simultaneously and linearly: closed-form closest approach
# of the relative motion, no sampling involved.
a, b = DiskRobot(0.5), DiskRobot(0.5)
print("head-on swap:",
      pair_motion_clear(a, b, (2.0, 2.0), (8.0, 2.0), (8.0, 2.0), (2.0, 2.0)))
print("parallel march:",
      pair_motion_clear(a, b, (2.0, 2.0), (8.0, 2.0), (2.0, 3.5), (8.0, 3.5)))

# The static pair predicate is the degenerate case of the swept one.
print("touching at rest:", pair_static_clear(a, b, (0.0, 0.0), (1.0, 0.0)))
print("apart at rest:   ", pair_static_clear(a, b, (0.0, 0.0), (1.1, 0.0)))

# Predicates accept plain tuples or numpy rows interchangeably.
q = np.array([2.0, 2.0])
assert point_free(env, robot, q)
print("numpy inputs accepted")
