"""Bundled benchmark environments.

The layouts are hand-built analogues of classic planning test scenes: a
staggered-wall zig-zag, two U-shaped traps, a serpentine maze, clustered
and scattered random obstacles, plus two dynamic scenes. All live in a
100 x 100 workspace on a 100 x 100 grid.
"""
from __future__ import annotations

import copy
import functools
import math
import random
from typing import Callable

from .environment import Scenario, load_scenario

WORKSPACE = {"width": 100, "height": 100, "grid_cols": 100, "grid_rows": 100}


def _rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


def _doc(start, target, obstacles, name, schedule=None) -> dict:
    doc = {
        "name": name,
        "workspace": dict(WORKSPACE),
        "start": {"x": start[0], "y": start[1]},
        "target": {"x": target[0], "y": target[1]},
        "obstacles": obstacles,
    }
    if schedule is not None:
        doc["schedule"] = schedule
    return doc


def _box(id, x0, y0, x1, y1):
    return {"id": id, "parts": [_rect(x0, y0, x1, y1)], "adjacency": []}


def empty() -> dict:
    return _doc((10, 10), (90, 90), [], "empty")


def single_square() -> dict:
    return _doc((0, 50), (100, 50), [_box("square", 40, 40, 60, 60)], "single-square")


def zig_zag() -> dict:
    """Three thin staggered walls; the route weaves over, under, then over again."""
    walls = [
        _box("w1", 24.05, 0, 26.05, 72),
        _box("w2", 49.05, 28, 51.05, 100),
        _box("w3", 74.05, 0, 76.05, 72),
    ]
    return _doc((5, 50), (95, 50), walls, "zig-zag")


def _u_shape(id, x0, y0, x1, y1, t, opening):
    """U built from a base bar and two arms; ``opening`` is 'down' or 'up'."""
    if opening == "down":
        base = _rect(x0, y1 - t, x1, y1)
        left = _rect(x0, y0, x0 + t, y1 - t)
        right = _rect(x1 - t, y0, x1, y1 - t)
    else:
        base = _rect(x0, y0, x1, y0 + t)
        left = _rect(x0, y0 + t, x0 + t, y1)
        right = _rect(x1 - t, y0 + t, x1, y1)
    return {"id": id, "parts": [base, left, right], "adjacency": [[0, 1], [0, 2]]}


def double_u() -> dict:
    """Start sits in a U opening downwards, target in a U opening upwards."""
    obstacles = [
        _u_shape("u1", 18.5, 25.5, 52.5, 60.5, 4, "down"),
        _u_shape("u2", 52.5, 39.5, 86.5, 74.5, 4, "up"),
    ]
    return _doc((35, 45), (70, 60), obstacles, "double-u")


def maze() -> dict:
    """Five wall-attached bars with narrow openings alternating right and left."""
    walls = [
        _box("m1", 0, 15.2, 86, 19.2),
        _box("m2", 14, 31.8, 100, 35.8),
        _box("m3", 0, 48.5, 86, 52.5),
        _box("m4", 14, 65.2, 100, 69.2),
        _box("m5", 0, 81.8, 86, 85.8),
    ]
    return _doc((10, 3), (90, 97), walls, "maze")


def clustered() -> dict:
    """Four tight clusters of small blocks with open corridors between them."""
    obstacles = []
    centres = [(27.5, 27.5), (72.5, 27.5), (27.5, 72.5), (72.5, 72.5)]
    offsets = [(-9, -9), (2, -9), (-9, 2), (2, 2), (-3.5, -3.5)]
    k = 0
    for cx, cy in centres:
        for i, (dx, dy) in enumerate(offsets):
            size = 7.0
            x0, y0 = cx + dx, cy + dy
            if i == 4:
                # central diamond bridging the four blocks of a cluster
                obstacles.append({"id": f"c{k:02d}", "parts": [[
                    [x0 + 3.5, y0 - 1.0], [x0 + 8.0, y0 + 3.5], [x0 + 3.5, y0 + 8.0], [x0 - 1.0, y0 + 3.5]]],
                    "adjacency": []})
            else:
                obstacles.append(_box(f"c{k:02d}", x0, y0, x0 + size, y0 + size))
            k += 1
    return _doc((5, 5), (95, 95), obstacles, "clustered")


def _random_obstacles(count: int, seed: int = 2) -> list[dict]:
    return copy.deepcopy(_placed_obstacles(count, seed))


@functools.lru_cache(maxsize=None)
def _placed_obstacles(count: int, seed: int) -> list[dict]:
    """Non-overlapping random convex polygons, generated deterministically.

    The sequence does not depend on ``count``, so smaller sets are prefixes
    of larger ones. Rejection sampling gets slow as the square fills up, so
    results are cached.
    """
    rng = random.Random(seed)
    placed: list[tuple[float, float, float]] = []
    obstacles = []
    keep_clear = [(5.0, 5.0), (95.0, 95.0)]
    for _ in range(3_000_000):
        if len(obstacles) == count:
            return obstacles
        cx, cy = rng.uniform(8, 92), rng.uniform(8, 92)
        r = rng.uniform(4.0, 8.0)
        if any(math.hypot(cx - x, cy - y) < r + q + 2.0 for x, y, q in placed):
            continue
        if any(math.hypot(cx - x, cy - y) < r + 6 for x, y in keep_clear):
            continue
        n = rng.randint(3, 6)
        angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
        gaps = [(angles[(i + 1) % n] - angles[i]) % (2 * math.pi) for i in range(n)]
        if min(gaps) < 0.5 or max(gaps) > math.pi - 0.2:
            continue
        verts = [[round(cx + r * math.cos(a), 3), round(cy + r * math.sin(a), 3)] for a in angles]
        placed.append((cx, cy, r))
        obstacles.append({"id": f"o{len(obstacles) + 1:02d}", "parts": [verts], "adjacency": []})
    raise ValueError(f"could not place {count} obstacles")


def unstructured(count: int) -> Callable[[], dict]:
    def build() -> dict:
        return _doc((5, 5), (95, 95), _random_obstacles(count), f"unstructured-{count}")
    build.__name__ = f"unstructured_{count}"
    return build


def closing_door() -> dict:
    """A wall with two openings; a sliding door closes the right one and opens the left."""
    obstacles = [
        {"id": "wall", "parts": [_rect(0, 70, 30, 74), _rect(45, 70, 55, 74), _rect(70, 70, 100, 74)],
         "adjacency": []},
        _box("door", 30, 70, 45, 74),
    ]
    schedule = {"update_interval": 2, "robot_speed": 2, "events": [
        {"t": 0, "action": "move", "group_id": "door", "velocity": [1, 0], "until": 25},
    ]}
    return _doc((50, 5), (50, 95), obstacles, "closing-door", schedule)


def sudden_obstacle() -> dict:
    """Obstacles become known while the robot is under way.

    A blocks the route the robot is following, B shows up far from it, and
    the known block C disappears.
    """
    obstacles = [_box("C", 40.5, 60.5, 60.5, 70.5)]
    schedule = {"update_interval": 2, "robot_speed": 2, "events": [
        {"t": 6, "action": "appear", "group": _box("A", 25.5, 30.5, 75.5, 36.5)},
        {"t": 6, "action": "appear", "group": _box("B", 82.5, 10.5, 95.5, 20.5)},
        {"t": 10, "action": "remove", "group_id": "C"},
    ]}
    return _doc((50, 5), (50, 95), obstacles, "sudden-obstacle", schedule)


BUNDLED: dict[str, Callable[[], dict]] = {
    "empty": empty,
    "single-square": single_square,
    "zig-zag": zig_zag,
    "double-u": double_u,
    "maze": maze,
    "clustered": clustered,
    "unstructured-20": unstructured(20),
    "unstructured-30": unstructured(30),
    "unstructured-40": unstructured(40),
    "closing-door": closing_door,
    "sudden-obstacle": sudden_obstacle,
}


def names() -> list[str]:
    return list(BUNDLED)


def bundled_document(name: str) -> dict:
    try:
        return BUNDLED[name]()
    except KeyError:
        raise KeyError(f"unknown bundled environment {name!r}; choose from {', '.join(BUNDLED)}") from None


def load_bundled(name: str) -> Scenario:
    return load_scenario(bundled_document(name))
