"""Random geometry cases shared by the geometry, oracle and acceptance tests."""
from __future__ import annotations

import math
import random

from kbga.geometry import ConvexPolygon, ObstacleGroup, Point, Rect, Segment, collide_segment_group

WORKSPACE = Rect(Point(0.0, 0.0), Point(50.0, 50.0))


def random_convex(rng: random.Random, cx: float, cy: float, r: float) -> list[tuple[float, float]]:
    """Vertices on a circle with well separated angles, counter-clockwise."""
    while True:
        n = rng.randint(3, 7)
        angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
        gaps = [(angles[(i + 1) % n] - angles[i]) % (2 * math.pi) for i in range(n)]
        if min(gaps) > 0.3 and max(gaps) < math.pi - 0.1:
            return [(cx + r * math.cos(a), cy + r * math.sin(a)) for a in angles]


def _attached(rng: random.Random, verts) -> list[tuple[float, float]]:
    """A convex piece sharing one edge of ``verts`` on its outside."""
    i = rng.randrange(len(verts))
    (px, py), (qx, qy) = verts[i], verts[(i + 1) % len(verts)]
    ex, ey = qx - px, qy - py
    length = math.hypot(ex, ey)
    nx, ny = ey / length, -ex / length  # outward for a CCW polygon
    h = rng.uniform(1.0, 6.0)
    s = rng.uniform(-0.3, 0.3) * length
    return [(qx, qy), (px, py), (px + nx * h + ex / length * s, py + ny * h + ey / length * s),
            (qx + nx * h + ex / length * s, qy + ny * h + ey / length * s)]


def random_group(rng: random.Random, workspace: Rect | None = None, wall: bool = False) -> ObstacleGroup:
    """One to three connected convex parts; ``wall`` glues the first part to the left edge."""
    if wall:
        y0, w, h = rng.uniform(5, 35), rng.uniform(4, 15), rng.uniform(4, 12)
        base = [(0.0, y0), (w, y0), (w, y0 + h), (0.0, y0 + h)]
    else:
        base = random_convex(rng, rng.uniform(15, 35), rng.uniform(15, 35), rng.uniform(2, 8))
    parts = [base]
    adjacency = []
    while len(parts) < 3 and rng.random() < 0.5:
        try:
            extra = ConvexPolygon(_attached(rng, ConvexPolygon(parts[-1]).vertices))
        except ValueError:
            break
        if workspace is not None and not all(workspace.contains(v) for v in extra.vertices):
            break
        parts.append(extra.vertices)
        adjacency.append((len(parts) - 2, len(parts) - 1))
    return ObstacleGroup.build("g", parts, adjacency, workspace=workspace)


def random_segment(rng: random.Random, group: ObstacleGroup, margin: float = 10.0) -> Segment:
    (x0, y0), (x1, y1) = group.mmg
    lo_x, hi_x = max(x0 - margin, 0.0), min(x1 + margin, 50.0)
    lo_y, hi_y = max(y0 - margin, 0.0), min(y1 + margin, 50.0)
    return Segment(Point(rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)),
                   Point(rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)))


def intersecting_case(rng: random.Random, wall_fraction: float = 0.25):
    """(segment, group, workspace) with the segment hitting the group."""
    while True:
        wall = rng.random() < wall_fraction
        group = random_group(rng, WORKSPACE, wall=wall)
        seg = random_segment(rng, group)
        if seg.length < 1.0:
            continue
        if collide_segment_group(seg, group, WORKSPACE).parts:
            return seg, group, WORKSPACE
