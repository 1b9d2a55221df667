import math

import pytest

from kbga.dynamic import simulate, trajectory_collisions, walk
from kbga.environment import DynamicSchedule, load_environment
from kbga.ga import GaConfig
from kbga.geometry import Point, Segment, collide_segment_group
from kbga.scenarios import load_bundled

CFG = GaConfig(population_size=30)


def world(obstacles=(), start=(10, 10), target=(90, 90)):
    return load_environment({
        "workspace": {"width": 100, "height": 100, "grid_cols": 100, "grid_rows": 100},
        "start": {"x": start[0], "y": start[1]},
        "target": {"x": target[0], "y": target[1]},
        "obstacles": [{"id": f"o{i}", "parts": [list(map(list, p))]} for i, p in enumerate(obstacles)],
    })


def test_walk_follows_the_polyline():
    path = [(0, 0), (10, 0), (10, 10)]
    visited, passed = walk(path, 15)
    assert visited == [(10, (10, 0)), (15, (10, 5))] and passed == 1
    visited, passed = walk(path, 50)
    assert visited[-1] == (20, (10, 10)) and passed == 2


def test_collision_check_uses_the_active_snapshot():
    env = world([[(40, 40), (60, 40), (60, 60), (40, 60)]], start=(0, 50), target=(100, 50))
    free = world(start=(0, 50), target=(100, 50))
    traj = [(0.0, Point(0, 50)), (1.0, Point(100, 50))]
    assert trajectory_collisions(traj, [env]) == 1
    assert trajectory_collisions(traj, [free]) == 0


def test_static_empty_world_goes_straight():
    res = simulate(world(), DynamicSchedule((), update_interval=2, robot_speed=2), CFG.with_(rng_seed=3))
    assert res.reached and res.collisions == 0
    straight = math.dist((10, 10), (90, 90))
    assert res.total_path_length == pytest.approx(straight, rel=0.01)


def test_trajectory_invariants_and_determinism():
    sc = load_bundled("closing-door")
    a = simulate(sc.environment, sc.schedule, CFG.with_(rng_seed=5))
    b = simulate(sc.environment, sc.schedule, CFG.with_(rng_seed=5))
    assert a == b
    times = [t for t, _ in a.trajectory]
    assert all(t1 > t0 for t0, t1 in zip(times, times[1:]))
    assert a.trajectory[0][1] == sc.environment.start
    assert a.reached and a.collisions == 0
    assert math.dist(a.trajectory[-1][1], sc.environment.target) <= 1.0


def test_closing_door_replans():
    sc = load_bundled("closing-door")
    res = simulate(sc.environment, sc.schedule, CFG.with_(rng_seed=1))
    assert res.reached and res.collisions == 0
    assert res.arrival_time <= res.t_max
    # the plan changes shape while the door moves
    shapes = {len(s.path) for s in res.snapshots}
    assert len(shapes) > 1 or len({tuple(s.path[1:]) for s in res.snapshots}) > 1


def test_sudden_obstacle_is_avoided_next_tick():
    sc = load_bundled("sudden-obstacle")
    res = simulate(sc.environment, sc.schedule, CFG.with_(rng_seed=2))
    appear = min(e.time for e in sc.schedule.events if e.action == "appear")
    after = next(s for s in res.snapshots if s.t >= appear)
    new_ids = {g.id for g in after.env.obstacles} - {g.id for g in sc.environment.obstacles}
    assert after.feasible and new_ids
    for a, b in zip(after.path, after.path[1:]):
        seg = Segment(Point(*a), Point(*b))
        assert all(not collide_segment_group(seg, g).parts for g in after.env.obstacles if g.id in new_ids)
    assert res.reached and res.collisions == 0


def test_cost_non_increasing_while_nothing_moves():
    # the target is sealed off, so the robot waits and every tick keeps S and the version
    cage = [(80, 0), (85, 0), (85, 100), (80, 100)]
    env = world([cage])
    res = simulate(env, DynamicSchedule((), update_interval=2, robot_speed=2), CFG.with_(rng_seed=0), t_max=20)
    assert not res.reached
    assert {p for _, p in res.trajectory} == {env.start}
    pairs = list(zip(res.snapshots, res.snapshots[1:]))
    assert len(pairs) >= 5
    for s0, s1 in pairs:
        assert s0.env.start == s1.env.start and s0.env.version == s1.env.version
        assert s1.cost <= s0.cost


def test_cost_non_increasing_between_matching_ticks():
    sc = load_bundled("closing-door")
    res = simulate(sc.environment, sc.schedule, CFG.with_(rng_seed=4))
    for s0, s1 in zip(res.snapshots, res.snapshots[1:]):
        if s0.env.start == s1.env.start and s0.env.version == s1.env.version:
            assert s1.cost <= s0.cost


def test_auto_tick_budget_is_bounded():
    res = simulate(world(), DynamicSchedule((), update_interval=2, robot_speed=2), CFG.with_(rng_seed=1),
                   gens_per_tick=None)
    assert 1 <= res.gens_per_tick <= 50 and res.reached
