import copy
import json
import math

import pytest
from hypothesis import given, strategies as st

from kbga.environment import (DynamicSchedule, EnvironmentFileError, ScheduleError, advance_environment,
                              dump_scenario, environment_changed, load_environment, load_scenario)
from kbga.scenarios import bundled_document, names


def minimal(**extra):
    doc = {
        "workspace": {"width": 100, "height": 100, "grid_cols": 100, "grid_rows": 100},
        "start": {"x": 10, "y": 10},
        "target": {"x": 90, "y": 90},
        "obstacles": [],
    }
    doc.update(extra)
    return doc


def mover(velocity=(1, 0), until=None, t=0):
    ev = {"t": t, "action": "move", "group_id": "door", "velocity": list(velocity)}
    if until is not None:
        ev["until"] = until
    return minimal(
        obstacles=[{"id": "door", "parts": [[[30, 40], [40, 40], [40, 50], [30, 50]]]}],
        schedule={"update_interval": 2, "robot_speed": 2, "events": [ev]},
    )


def test_minimal_document():
    env = load_environment(minimal())
    assert env.obstacles == ()
    assert env.workspace.node_count == 10_000
    assert env.start == (10, 10) and env.target == (90, 90)


def test_concave_obstacle_as_two_parts():
    doc = minimal(obstacles=[{
        "id": "ell",
        "parts": [[[20, 20], [40, 20], [40, 25], [20, 25]], [[20, 25], [25, 25], [25, 40], [20, 40]]],
        "adjacency": [[0, 1]],
    }])
    g = load_environment(doc).obstacles[0]
    assert len(g.parts) == 2 and g.adjacency == {(0, 1)}


def test_json_text_and_file(tmp_path):
    text = json.dumps(minimal())
    assert load_environment(text).workspace.width == 100
    p = tmp_path / "env.json"
    p.write_text(text)
    assert load_environment(p).target == (90, 90)


@pytest.mark.parametrize("mutate, message, path", [
    (lambda d: d.update(start={"x": 45, "y": 45}), "start inside obstacle", ["start"]),
    (lambda d: d.update(target={"x": 150, "y": 45}), "target outside workspace", ["target"]),
    (lambda d: d["obstacles"][0]["parts"][0].reverse(), "counter-clockwise", ["obstacles", 0, "parts", 0]),
    (lambda d: d["obstacles"][0]["parts"][0].__setitem__(1, [140, 40]), "vertex outside workspace",
     ["obstacles", 0, "parts", 0]),
    (lambda d: d.update(colour="red"), "schema violation", []),
    (lambda d: d["workspace"].update(grid_cols=1), "schema violation", ["workspace", "grid_cols"]),
    (lambda d: d["obstacles"][0].update(adjacency=[[0, 3]]), "adjacency", ["obstacles", 0]),
])
def test_load_errors_carry_document_path(mutate, message, path):
    doc = minimal(obstacles=[{"id": "box", "parts": [[[40, 40], [50, 40], [50, 50], [40, 50]]]}])
    mutate(doc)
    with pytest.raises(EnvironmentFileError) as info:
        load_environment(doc)
    assert message in str(info.value)
    assert list(info.value.path[:len(path)]) == path


def test_wall_attached_override():
    doc = minimal(obstacles=[{"id": "w", "parts": [[[0, 40], [10, 40], [10, 50], [0, 50]]]}])
    assert load_environment(doc).obstacles[0].wall_attached == (True,)
    doc["obstacles"][0]["wall_attached"] = [False]
    assert load_environment(doc).obstacles[0].wall_attached == (False,)


def test_schedule_validation():
    doc = mover()
    doc["schedule"]["events"][0]["group_id"] = "ghost"
    with pytest.raises(EnvironmentFileError, match="unknown group_id"):
        load_scenario(doc)
    doc = mover()
    doc["schedule"]["update_interval"] = 0
    with pytest.raises(EnvironmentFileError):
        load_scenario(doc)
    with pytest.raises(ScheduleError):
        DynamicSchedule((), update_interval=1, robot_speed=0)


def test_no_events_in_window_is_a_no_op():
    sc = load_scenario(mover(t=10))
    env = advance_environment(sc.environment, sc.schedule, 0, 5)
    assert env is sc.environment
    assert not environment_changed(sc.environment, env)


def test_move_shifts_every_vertex():
    sc = load_scenario(mover())
    env = advance_environment(sc.environment, sc.schedule, 0, 2)
    before = sc.environment.obstacles[0].parts[0].vertices
    after = env.obstacles[0].parts[0].vertices
    assert all(b.x == pytest.approx(a.x + 2) and b.y == a.y for a, b in zip(before, after))
    assert environment_changed(sc.environment, env)
    assert env.obstacles[0].mmg.min.x == pytest.approx(32)


def test_move_stops_at_until_and_clamps_at_wall():
    sc = load_scenario(mover(until=3))
    env = advance_environment(sc.environment, sc.schedule, 0, 10)
    assert env.obstacles[0].mmg.min.x == pytest.approx(33)
    sc = load_scenario(mover(velocity=(10, 0)))
    env = advance_environment(sc.environment, sc.schedule, 0, 100)
    assert env.obstacles[0].mmg.max.x == pytest.approx(100)


def test_appear_and_remove():
    doc = minimal(
        obstacles=[{"id": "a", "parts": [[[30, 40], [40, 40], [40, 50], [30, 50]]]}],
        schedule={"update_interval": 2, "robot_speed": 2, "events": [
            {"t": 3, "action": "appear", "group": {"id": "b", "parts": [[[60, 60], [70, 60], [70, 70]]]}},
            {"t": 5, "action": "remove", "group_id": "a"},
        ]})
    sc = load_scenario(doc)
    env = advance_environment(sc.environment, sc.schedule, 2, 4)
    assert [g.id for g in env.obstacles] == ["a", "b"] and env.version == 1
    env = advance_environment(env, sc.schedule, 4, 6)
    assert [g.id for g in env.obstacles] == ["b"] and env.version == 2
    # later windows do not trip over the removed group
    assert advance_environment(env, sc.schedule, 6, 8) is env


@given(st.floats(0, 30), st.floats(0, 30), st.floats(0, 30))
def test_advance_is_interval_additive(a, b, c):
    a, b, c = sorted((a, b, c))
    sc = load_scenario(bundled_document("closing-door"))
    env = sc.environment
    two = advance_environment(advance_environment(env, sc.schedule, a, b), sc.schedule, b, c)
    one = advance_environment(env, sc.schedule, a, c)
    for g1, g2 in zip(one.obstacles, two.obstacles):
        for p1, p2 in zip(g1.parts, g2.parts):
            for v1, v2 in zip(p1.vertices, p2.vertices):
                assert math.isclose(v1.x, v2.x, abs_tol=1e-9) and math.isclose(v1.y, v2.y, abs_tol=1e-9)


@pytest.mark.parametrize("name", names())
def test_round_trip(name):
    doc = bundled_document(name)
    sc = load_scenario(doc)
    again = load_scenario(json.loads(json.dumps(dump_scenario(sc.environment, sc.schedule, sc.name))))
    assert again.environment.obstacles == sc.environment.obstacles
    assert again.environment.start == sc.environment.start
    assert again.schedule == sc.schedule
    # dumping is a fixed point after one pass
    assert dump_scenario(again.environment, again.schedule, again.name) == dump_scenario(
        sc.environment, sc.schedule, sc.name)
    assert copy.deepcopy(doc) == bundled_document(name)
