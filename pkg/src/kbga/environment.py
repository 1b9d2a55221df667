"""Workspace model, environment files and timed obstacle updates.

Environment documents are JSON objects::

    {
      "workspace": {"width": 100, "height": 100, "grid_cols": 100, "grid_rows": 100},
      "start": {"x": 10, "y": 10},
      "target": {"x": 90, "y": 90},
      "obstacles": [
        {"id": "wall", "parts": [[[x, y], ...], ...], "adjacency": [[0, 1]],
         "wall_attached": [true, false]}
      ],
      "schedule": {"update_interval": 2, "robot_speed": 2,
                   "events": [{"t": 0, "action": "move", "group_id": "door",
                               "velocity": [1, 0], "until": 30}]}
    }

Parts are convex and counter-clockwise; concave obstacles are supplied
already split into parts with an adjacency list.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Sequence

import jsonschema

from .geometry import EPS, GeometryError, ObstacleGroup, Point, Rect, point_in_convex, touches_boundary


class EnvironmentFileError(ValueError):
    """Invalid environment document; ``path`` locates the offending entry."""

    def __init__(self, message: str, path: Sequence[Any] = ()):
        self.path = tuple(path)
        where = "/".join(str(p) for p in self.path)
        super().__init__(f"{where}: {message}" if where else message)
        self.message = message


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class Workspace:
    width: float
    height: float
    grid_cols: int
    grid_rows: int

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError("workspace width and height must be positive")
        if self.grid_cols < 2 or self.grid_rows < 2:
            raise ValueError("grid needs at least 2 columns and 2 rows")

    @property
    def rect(self) -> Rect:
        return Rect(Point(0.0, 0.0), Point(float(self.width), float(self.height)))

    @property
    def cell_width(self) -> float:
        return self.width / self.grid_cols

    @property
    def cell_height(self) -> float:
        return self.height / self.grid_rows

    @property
    def node_count(self) -> int:
        return self.grid_cols * self.grid_rows


@dataclass(frozen=True)
class Environment:
    workspace: Workspace
    obstacles: tuple[ObstacleGroup, ...]
    start: Point
    target: Point
    version: int = 0

    def group(self, group_id: str) -> ObstacleGroup:
        for g in self.obstacles:
            if g.id == group_id:
                return g
        raise KeyError(f"unknown group_id {group_id!r}")

    def with_start(self, start: Sequence[float]) -> "Environment":
        """Same geometry with a new start point (re-anchoring keeps the version)."""
        return replace(self, start=Point(float(start[0]), float(start[1])))

    def with_grid(self, cols: int, rows: int) -> "Environment":
        return replace(self, workspace=replace(self.workspace, grid_cols=cols, grid_rows=rows))

    def blocked(self, p: Sequence[float]) -> bool:
        return any(point_in_convex(p, part) for g in self.obstacles for part in g.parts)


@dataclass(frozen=True)
class Event:
    time: float
    action: str  # "move" | "appear" | "remove"
    group_id: str | None = None
    velocity: Point | None = None
    until: float | None = None
    group: ObstacleGroup | None = None


@dataclass(frozen=True)
class DynamicSchedule:
    events: tuple[Event, ...] = ()
    update_interval: float = 2.0
    robot_speed: float = 2.0

    def __post_init__(self):
        if not self.update_interval > 0:
            raise ScheduleError("update_interval must be positive")
        if not self.robot_speed > 0:
            raise ScheduleError("robot_speed must be positive")
        last = 0.0
        for ev in self.events:
            if ev.time < 0 or ev.time < last:
                raise ScheduleError("event times must be non-negative and non-decreasing")
            last = ev.time


@dataclass(frozen=True)
class Scenario:
    environment: Environment
    schedule: DynamicSchedule | None = None
    name: str = ""


_POINT = {"type": "object", "required": ["x", "y"], "additionalProperties": False,
          "properties": {"x": {"type": "number"}, "y": {"type": "number"}}}
_VEC = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_GROUP = {
    "type": "object",
    "required": ["id", "parts"],
    "additionalProperties": False,
    "properties": {
        "id": {"type": ["string", "integer"]},
        "parts": {"type": "array", "minItems": 1,
                  "items": {"type": "array", "minItems": 3, "items": _VEC}},
        "adjacency": {"type": "array",
                      "items": {"type": "array", "items": {"type": "integer", "minimum": 0},
                                "minItems": 2, "maxItems": 2}},
        "wall_attached": {"type": "array", "items": {"type": "boolean"}},
    },
}
SCHEMA = {
    "type": "object",
    "required": ["workspace", "start", "target", "obstacles"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "workspace": {
            "type": "object",
            "required": ["width", "height", "grid_cols", "grid_rows"],
            "additionalProperties": False,
            "properties": {"width": {"type": "number", "exclusiveMinimum": 0},
                           "height": {"type": "number", "exclusiveMinimum": 0},
                           "grid_cols": {"type": "integer", "minimum": 2},
                           "grid_rows": {"type": "integer", "minimum": 2}},
        },
        "start": _POINT,
        "target": _POINT,
        "obstacles": {"type": "array", "items": _GROUP},
        "schedule": {
            "type": "object",
            "required": ["update_interval", "robot_speed", "events"],
            "additionalProperties": False,
            "properties": {
                "update_interval": {"type": "number", "exclusiveMinimum": 0},
                "robot_speed": {"type": "number", "exclusiveMinimum": 0},
                "events": {"type": "array", "items": {
                    "type": "object",
                    "required": ["t", "action"],
                    "additionalProperties": False,
                    "properties": {
                        "t": {"type": "number", "minimum": 0},
                        "action": {"enum": ["move", "appear", "remove"]},
                        "group_id": {"type": ["string", "integer"]},
                        "velocity": _VEC,
                        "until": {"type": "number"},
                        "group": _GROUP,
                    },
                }},
            },
        },
    },
}


def _read(document) -> dict:
    if isinstance(document, dict):
        return document
    if isinstance(document, (str, os.PathLike)) and os.path.exists(document):
        with open(document) as fh:
            return json.load(fh)
    if isinstance(document, str):
        return json.loads(document)
    raise EnvironmentFileError("unsupported document type")


def _group_from_doc(doc: dict, ws: Workspace, path: list) -> ObstacleGroup:
    parts = []
    for j, verts in enumerate(doc["parts"]):
        for k, (x, y) in enumerate(verts):
            if not (-EPS <= x <= ws.width + EPS and -EPS <= y <= ws.height + EPS):
                raise EnvironmentFileError("vertex outside workspace", path + ["parts", j, k])
        try:
            parts.append(_polygon(verts))
        except GeometryError as exc:
            raise EnvironmentFileError(str(exc), path + ["parts", j]) from None
    wall = doc.get("wall_attached")
    if wall is not None and len(wall) != len(parts):
        raise EnvironmentFileError("wall_attached must have one flag per part", path + ["wall_attached"])
    try:
        return ObstacleGroup.build(str(doc["id"]), parts, [tuple(a) for a in doc.get("adjacency", [])],
                                   workspace=ws.rect, wall_attached=wall)
    except GeometryError as exc:
        raise EnvironmentFileError(str(exc), path + ["adjacency"]) from None


def _polygon(verts):
    from .geometry import ConvexPolygon
    return ConvexPolygon(verts)


def _event_from_doc(doc: dict, ws: Workspace, path: list) -> Event:
    action = doc["action"]
    gid = doc.get("group_id")
    if action in ("move", "remove") and gid is None:
        raise EnvironmentFileError(f"{action} event needs group_id", path)
    if action == "move":
        if "velocity" not in doc:
            raise EnvironmentFileError("move event needs velocity", path)
        until = doc.get("until")
        if until is not None and until < doc["t"]:
            raise EnvironmentFileError("until precedes event time", path + ["until"])
        return Event(float(doc["t"]), action, str(gid), Point(*map(float, doc["velocity"])),
                     None if until is None else float(until))
    if action == "appear":
        if "group" not in doc:
            raise EnvironmentFileError("appear event needs group", path)
        group = _group_from_doc(doc["group"], ws, path + ["group"])
        return Event(float(doc["t"]), action, group.id, group=group)
    return Event(float(doc["t"]), action, str(gid))


def load_scenario(document) -> Scenario:
    """Validate a document (dict, JSON text or file path) into a :class:`Scenario`."""
    doc = _read(document)
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise EnvironmentFileError(f"schema violation: {err.message}", list(err.absolute_path))
    wdoc = doc["workspace"]
    ws = Workspace(float(wdoc["width"]), float(wdoc["height"]), int(wdoc["grid_cols"]), int(wdoc["grid_rows"]))
    groups = []
    seen = set()
    for i, gdoc in enumerate(doc["obstacles"]):
        g = _group_from_doc(gdoc, ws, ["obstacles", i])
        if g.id in seen:
            raise EnvironmentFileError(f"duplicate obstacle id {g.id!r}", ["obstacles", i, "id"])
        seen.add(g.id)
        groups.append(g)
    start = Point(float(doc["start"]["x"]), float(doc["start"]["y"]))
    target = Point(float(doc["target"]["x"]), float(doc["target"]["y"]))
    env = Environment(ws, tuple(groups), start, target)
    for key, p in (("start", start), ("target", target)):
        if not ws.rect.contains(p):
            raise EnvironmentFileError(f"{key} outside workspace", [key])
        if env.blocked(p):
            raise EnvironmentFileError(f"{key} inside obstacle", [key])

    schedule = None
    if "schedule" in doc:
        sdoc = doc["schedule"]
        events = []
        known = set(seen)
        last = 0.0
        for i, edoc in enumerate(sdoc["events"]):
            path = ["schedule", "events", i]
            ev = _event_from_doc(edoc, ws, path)
            if ev.time < last:
                raise EnvironmentFileError("event times must be non-decreasing", path + ["t"])
            last = ev.time
            if ev.action == "appear":
                known.add(ev.group_id)
            elif ev.group_id not in known:
                raise EnvironmentFileError(f"unknown group_id {ev.group_id!r}", path + ["group_id"])
            events.append(ev)
        schedule = DynamicSchedule(tuple(events), float(sdoc["update_interval"]), float(sdoc["robot_speed"]))
    return Scenario(env, schedule, doc.get("name", ""))


def load_environment(document) -> Environment:
    return load_scenario(document).environment


def _num(x: float):
    v = float(f"{x:.9g}")
    return int(v) if v.is_integer() and abs(v) < 1e15 else v


def _group_doc(g: ObstacleGroup, ws: Workspace) -> dict:
    doc = {"id": g.id, "parts": [[[_num(x), _num(y)] for x, y in p.vertices] for p in g.parts]}
    if g.adjacency:
        doc["adjacency"] = [list(a) for a in sorted(g.adjacency)]
    derived = tuple(touches_boundary(p, ws.rect) for p in g.parts)
    if derived != g.wall_attached:
        doc["wall_attached"] = list(g.wall_attached)
    return doc


def dump_scenario(env: Environment, schedule: DynamicSchedule | None = None, name: str = "") -> dict:
    """Inverse of :func:`load_scenario`; numbers are written with 9 significant digits."""
    ws = env.workspace
    doc: dict = {}
    if name:
        doc["name"] = name
    doc.update({
        "workspace": {"width": _num(ws.width), "height": _num(ws.height),
                      "grid_cols": ws.grid_cols, "grid_rows": ws.grid_rows},
        "start": {"x": _num(env.start.x), "y": _num(env.start.y)},
        "target": {"x": _num(env.target.x), "y": _num(env.target.y)},
        "obstacles": [_group_doc(g, ws) for g in env.obstacles],
    })
    if schedule is not None:
        events = []
        for ev in schedule.events:
            e: dict = {"t": _num(ev.time), "action": ev.action}
            if ev.action == "appear":
                e["group"] = _group_doc(ev.group, ws)
            else:
                e["group_id"] = ev.group_id
            if ev.action == "move":
                e["velocity"] = [_num(ev.velocity.x), _num(ev.velocity.y)]
                if ev.until is not None:
                    e["until"] = _num(ev.until)
            events.append(e)
        doc["schedule"] = {"update_interval": _num(schedule.update_interval),
                           "robot_speed": _num(schedule.robot_speed), "events": events}
    return doc


def dump_environment(env: Environment) -> dict:
    return dump_scenario(env)


def _clamped_shift(group: ObstacleGroup, dx: float, dy: float, ws: Rect) -> tuple[float, float]:
    (x0, y0), (x1, y1) = group.mmg
    dx = min(max(dx, ws.min[0] - x0), ws.max[0] - x1)
    dy = min(max(dy, ws.min[1] - y0), ws.max[1] - y1)
    return dx, dy


def advance_environment(env: Environment, schedule: DynamicSchedule, from_t: float, to_t: float) -> Environment:
    """Apply the schedule over the window ``(from_t, to_t]``.

    Moves translate their group by ``velocity * dt`` for the part of
    ``[t, until]`` inside the window, clamped so the group stays in the
    workspace. Appear and remove events fire when their time falls in the
    window. The version increases only if some geometry actually changed.
    """
    if from_t > to_t:
        raise ValueError("from_t must not exceed to_t")
    if from_t == to_t:
        return env
    known = {g.id for g in env.obstacles} | {ev.group_id for ev in schedule.events if ev.action == "appear"}
    known |= {ev.group_id for ev in schedule.events if ev.action == "remove" and ev.time <= from_t}
    for ev in schedule.events:
        if ev.action != "appear" and ev.group_id not in known:
            raise KeyError(f"unknown group_id {ev.group_id!r}")

    # break the window at every instant something starts or stops
    cuts = {from_t, to_t}
    for ev in schedule.events:
        for t in (ev.time, ev.until):
            if t is not None and from_t < t < to_t:
                cuts.add(t)
    cuts = sorted(cuts)
    groups = {g.id: g for g in env.obstacles}
    order = [g.id for g in env.obstacles]
    changed = False
    ws = env.workspace.rect
    for lo, hi in zip(cuts, cuts[1:]):
        for ev in schedule.events:
            if ev.action == "move" and ev.group_id in groups:
                start = max(lo, ev.time)
                stop = hi if ev.until is None else min(hi, ev.until)
                if stop > start:
                    dt = stop - start
                    g = groups[ev.group_id]
                    dx, dy = _clamped_shift(g, ev.velocity.x * dt, ev.velocity.y * dt, ws)
                    if dx != 0.0 or dy != 0.0:
                        groups[ev.group_id] = g.translated(dx, dy)
                        changed = True
        for ev in schedule.events:
            if ev.action == "move" or not (lo < ev.time <= hi):
                continue
            if ev.action == "appear":
                if ev.group_id not in groups:
                    order.append(ev.group_id)
                groups[ev.group_id] = ev.group
                changed = True
            elif ev.group_id in groups:
                del groups[ev.group_id]
                order.remove(ev.group_id)
                changed = True
    if not changed:
        return env
    return replace(env, obstacles=tuple(groups[i] for i in order), version=env.version + 1)


def environment_changed(old: Environment, new: Environment) -> bool:
    return old.version != new.version
