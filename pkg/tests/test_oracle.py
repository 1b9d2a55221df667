import math

import pytest

from kbga.environment import load_environment
from kbga.geometry import ObstacleGroup, Point, Segment, collide_segment_group
from kbga.oracle import InfeasibleError, oracle_escape_distance, oracle_segment_collides, oracle_shortest_path
from kbga.scenarios import load_bundled

SQUARE = [(40, 40), (60, 40), (60, 60), (40, 60)]


def world(obstacles, start=(0, 50), target=(100, 50)):
    return load_environment({
        "workspace": {"width": 100, "height": 100, "grid_cols": 100, "grid_rows": 100},
        "start": {"x": start[0], "y": start[1]},
        "target": {"x": target[0], "y": target[1]},
        "obstacles": [{"id": f"o{i}", "parts": [list(map(list, p))]} for i, p in enumerate(obstacles)],
    })


def seg(ax, ay, bx, by):
    return Segment(Point(ax, ay), Point(bx, by))


@pytest.mark.parametrize("s, expected", [
    (seg(0, 50, 100, 50), True),
    (seg(0, 90, 100, 90), False),
    (seg(30, 70, 40, 60), True),   # touches a corner
])
def test_segment_collides(s, expected):
    assert oracle_segment_collides(s, ObstacleGroup.build("sq", [SQUARE])) is expected


def test_escape_union_dominates_parts():
    a = [(0, 0), (10, 0), (10, 10), (0, 10)]
    b = [(10, 0), (30, 0), (30, 4), (10, 4)]
    g = ObstacleGroup.build("ell", [a, b], [(0, 1)])
    s = seg(5, 2, 25, 2)
    union = oracle_escape_distance(s, g, [0, 1])
    single_a = oracle_escape_distance(s, ObstacleGroup.build("a", [a]), 0)
    single_b = oracle_escape_distance(s, ObstacleGroup.build("b", [b]), 0)
    assert union >= max(single_a, single_b) - 1e-9


def test_shortest_path_empty():
    assert oracle_shortest_path(world([])) == pytest.approx(100.0)


def test_shortest_path_single_square():
    # taut path over the two top corners, worked out by hand
    expected = 2 * math.hypot(40, 10) + 20
    assert expected == pytest.approx(102.4621, abs=1e-4)
    assert oracle_shortest_path(world([SQUARE])) == pytest.approx(expected, abs=1e-4)


def test_shortest_path_walled_off():
    cage = [[(80, 0), (85, 0), (85, 100), (80, 100)]]
    with pytest.raises(InfeasibleError):
        oracle_shortest_path(world(cage))


def test_shortest_path_lower_bounds_any_feasible_polyline():
    env = load_bundled("zig-zag").environment
    opt = oracle_shortest_path(env)
    assert opt >= math.dist(env.start, env.target)
    # a hand-made feasible route through the three wall gaps
    route = [env.start, (25.05, 75), (50.05, 25), (75.05, 75), env.target]
    for a, b in zip(route, route[1:]):
        assert all(not collide_segment_group(seg(*a, *b), g).parts for g in env.obstacles)
    assert opt <= sum(math.dist(a, b) for a, b in zip(route, route[1:]))
