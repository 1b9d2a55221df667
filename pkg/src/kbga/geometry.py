"""Exact 2D primitives for segment-vs-obstacle collision and penetration depth.

Obstacles are closed regions: touching a boundary counts as a collision.
An arbitrarily shaped obstacle is an :class:`ObstacleGroup` made of convex
parts that share boundaries; each part and the whole group carry min-max
boxes used to cull segments before the exact separating-axis tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _kernels

EPS = 1e-9


class GeometryError(ValueError):
    """Raised for malformed polygons or misuse of a geometric operation."""


class Point(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point
    b: Point

    @property
    def length(self) -> float:
        return math.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1])

    def translated(self, dx: float, dy: float) -> "Segment":
        return Segment(Point(self.a[0] + dx, self.a[1] + dy), Point(self.b[0] + dx, self.b[1] + dy))


class Rect(NamedTuple):
    min: Point
    max: Point

    def contains(self, p: Sequence[float], tol: float = EPS) -> bool:
        return (self.min[0] - tol <= p[0] <= self.max[0] + tol
                and self.min[1] - tol <= p[1] <= self.max[1] + tol)

    def encloses(self, other: "Rect", tol: float = EPS) -> bool:
        return self.contains(other.min, tol) and self.contains(other.max, tol)

    def translated(self, dx: float, dy: float) -> "Rect":
        return Rect(Point(self.min[0] + dx, self.min[1] + dy), Point(self.max[0] + dx, self.max[1] + dy))


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


class ConvexPolygon:
    """Counter-clockwise convex polygon with cached outward edge normals.

    For edge ``i`` (from vertex ``i`` to ``i + 1``) the unit outward normal is
    ``normals[i]``; ``upper[i]`` and ``lower[i]`` are the largest and smallest
    projections of the vertices on it.
    """

    __slots__ = ("vertices", "normals", "upper", "lower", "box", "xy")

    def __init__(self, vertices: Iterable[Sequence[float]]):
        verts = tuple(Point(float(v[0]), float(v[1])) for v in vertices)
        n = len(verts)
        if n < 3:
            raise GeometryError("polygon needs at least 3 vertices")
        if not all(math.isfinite(c) for v in verts for c in v):
            raise GeometryError("non-finite vertex coordinate")
        for i in range(n):
            for j in range(i + 1, n):
                if abs(verts[i][0] - verts[j][0]) <= EPS and abs(verts[i][1] - verts[j][1]) <= EPS:
                    raise GeometryError(f"repeated vertex {verts[i]}")
        area2 = sum(verts[i][0] * verts[(i + 1) % n][1] - verts[(i + 1) % n][0] * verts[i][1] for i in range(n))
        if area2 <= 0:
            raise GeometryError("vertices must be in counter-clockwise order")
        for i in range(n):
            o, a, b = verts[i - 1], verts[i], verts[(i + 1) % n]
            scale = math.hypot(a[0] - o[0], a[1] - o[1]) * math.hypot(b[0] - a[0], b[1] - a[1])
            if _cross(o[0], o[1], a[0], a[1], b[0], b[1]) < -EPS * max(scale, 1.0):
                raise GeometryError(f"polygon is not convex at vertex {i}")

        normals = []
        upper = []
        lower = []
        for i in range(n):
            (x0, y0), (x1, y1) = verts[i], verts[(i + 1) % n]
            length = math.hypot(x1 - x0, y1 - y0)
            nx, ny = (y1 - y0) / length, (x0 - x1) / length
            proj = [nx * vx + ny * vy for vx, vy in verts]
            normals.append((nx, ny))
            upper.append(max(proj))
            lower.append(min(proj))
        self.vertices = verts
        self.normals = tuple(normals)
        self.upper = tuple(upper)
        self.lower = tuple(lower)
        xs = [v[0] for v in verts]
        ys = [v[1] for v in verts]
        self.box = Rect(Point(min(xs), min(ys)), Point(max(xs), max(ys)))
        self.xy = np.array(verts, dtype=float)

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __eq__(self, other):
        return isinstance(other, ConvexPolygon) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return f"ConvexPolygon({[tuple(v) for v in self.vertices]!r})"

    def translated(self, dx: float, dy: float) -> "ConvexPolygon":
        return ConvexPolygon((x + dx, y + dy) for x, y in self.vertices)


def min_max_box(poly: ConvexPolygon | Sequence[Sequence[float]]) -> Rect:
    verts = poly.vertices if isinstance(poly, ConvexPolygon) else poly
    xs = [v[0] for v in verts]
    ys = [v[1] for v in verts]
    return Rect(Point(min(xs), min(ys)), Point(max(xs), max(ys)))


def bounding_rect(rects: Iterable[Rect]) -> Rect:
    rects = list(rects)
    return Rect(Point(min(r.min[0] for r in rects), min(r.min[1] for r in rects)),
                Point(max(r.max[0] for r in rects), max(r.max[1] for r in rects)))


def segment_intersects_rect(seg: Segment, rect: Rect) -> bool:
    """Closed-region test of a segment against an axis-aligned box."""
    (ax, ay), (bx, by) = seg
    (x0, y0), (x1, y1) = rect
    if (ax < x0 - EPS and bx < x0 - EPS) or (ax > x1 + EPS and bx > x1 + EPS):
        return False
    if (ay < y0 - EPS and by < y0 - EPS) or (ay > y1 + EPS and by > y1 + EPS):
        return False
    dx, dy = bx - ax, by - ay
    length = math.hypot(dx, dy)
    if length <= EPS:
        return True
    tol = EPS * length
    pos = neg = False
    for cx, cy in ((x0, y0), (x1, y0), (x1, y1), (x0, y1)):
        s = dx * (cy - ay) - dy * (cx - ax)
        if s >= -tol:
            pos = True
        if s <= tol:
            neg = True
    return pos and neg


def point_in_convex(p: Sequence[float], poly: ConvexPolygon) -> bool:
    px, py = p[0], p[1]
    for (nx, ny), h in zip(poly.normals, poly.upper):
        if nx * px + ny * py > h + EPS:
            return False
    return True


def segment_intersects_convex(seg: Segment, poly: ConvexPolygon) -> bool:
    """Separating-axis test of a segment against a closed convex polygon.

    Axes are the polygon's edge normals plus the segment's normal; a segment
    lying wholly inside the polygon intersects it.
    """
    (ax, ay), (bx, by) = seg
    for (nx, ny), hi, lo in zip(poly.normals, poly.upper, poly.lower):
        pa = nx * ax + ny * ay
        pb = nx * bx + ny * by
        if (pa > hi + EPS and pb > hi + EPS) or (pa < lo - EPS and pb < lo - EPS):
            return False
    dx, dy = bx - ax, by - ay
    length = math.hypot(dx, dy)
    if length <= EPS:
        return True
    mx, my = -dy / length, dx / length
    c = mx * ax + my * ay
    above = below = False
    for vx, vy in poly.vertices:
        s = mx * vx + my * vy - c
        if s >= -EPS:
            above = True
        if s <= EPS:
            below = True
        if above and below:
            return True
    return False


def sat_depth(seg: Segment, poly: ConvexPolygon) -> float:
    """Minimum translation magnitude separating ``seg`` from one convex part.

    Zero when the segment only touches the boundary; meaningful only when the
    two intersect.
    """
    (ax, ay), (bx, by) = seg
    best = math.inf
    for (nx, ny), hi, lo in zip(poly.normals, poly.upper, poly.lower):
        pa = nx * ax + ny * ay
        pb = nx * bx + ny * by
        if pa < pb:
            d_out, d_in = hi - pa, pb - lo
        else:
            d_out, d_in = hi - pb, pa - lo
        if d_out < best:
            best = d_out
        if d_in < best:
            best = d_in
    dx, dy = bx - ax, by - ay
    length = math.hypot(dx, dy)
    if length > EPS:
        mx, my = -dy / length, dx / length
        c = mx * ax + my * ay
        proj = [mx * vx + my * vy for vx, vy in poly.vertices]
        d_pos = max(proj) - c
        d_neg = c - min(proj)
        if d_pos < best:
            best = d_pos
        if d_neg < best:
            best = d_neg
    return max(best, 0.0)


def min_escape_translation(seg: Segment, polys: Sequence[ConvexPolygon],
                           bounds: Rect | None = None) -> tuple[float, tuple[float, float]]:
    """Shortest translation freeing ``seg`` from every polygon in ``polys``.

    With ``bounds`` the translated segment must also stay inside that box;
    when no such translation exists the box is dropped. Returns
    ``(length, (tx, ty))``; the length is an infimum, so grazing gives 0.
    """
    return _min_escape_packed(seg, _pack(polys), bounds)


def _pack(polys: Sequence[ConvexPolygon]):
    xy = np.concatenate([p.xy for p in polys])
    offs = np.zeros(len(polys) + 1, dtype=np.int64)
    np.cumsum([len(p) for p in polys], out=offs[1:])
    return np.ascontiguousarray(xy[:, 0]), np.ascontiguousarray(xy[:, 1]), offs


def _min_escape_packed(seg: Segment, packed, bounds: Rect | None) -> tuple[float, tuple[float, float]]:
    (ax, ay), (bx, by) = seg
    xs, ys, offs = packed
    box = np.zeros(4)
    has_box = False
    if bounds is not None:
        lo_x = bounds.min[0] - min(ax, bx)
        hi_x = bounds.max[0] - max(ax, bx)
        lo_y = bounds.min[1] - min(ay, by)
        hi_y = bounds.max[1] - max(ay, by)
        if lo_x <= hi_x + EPS and lo_y <= hi_y + EPS:
            box[:] = (lo_x, lo_y, hi_x, hi_y)
            has_box = True
    length, tx, ty = _kernels.min_escape(float(ax), float(ay), float(bx), float(by),
                                         xs, ys, offs, has_box, box)
    if math.isinf(length):
        if has_box:
            return _min_escape_packed(seg, packed, None)
        raise GeometryError("no escaping translation found")
    return length, (tx, ty)


@dataclass(frozen=True)
class ObstacleGroup:
    """Connected convex parts forming one arbitrarily shaped obstacle."""

    id: str
    parts: tuple[ConvexPolygon, ...]
    adjacency: frozenset[tuple[int, int]] = frozenset()
    wall_attached: tuple[bool, ...] = ()
    mmg: Rect = field(init=False)
    mmo: tuple[Rect, ...] = field(init=False)
    neighbors: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)
    _packs: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        parts = tuple(p if isinstance(p, ConvexPolygon) else ConvexPolygon(p) for p in self.parts)
        if not parts:
            raise GeometryError(f"obstacle {self.id!r} has no parts")
        adjacency = set()
        for i, j in self.adjacency:
            if not (0 <= i < len(parts) and 0 <= j < len(parts)) or i == j:
                raise GeometryError(f"obstacle {self.id!r}: bad adjacency pair ({i}, {j})")
            adjacency.add((min(i, j), max(i, j)))
        wall = tuple(bool(w) for w in self.wall_attached) or (False,) * len(parts)
        if len(wall) != len(parts):
            raise GeometryError(f"obstacle {self.id!r}: wall_attached length mismatch")
        nbrs = [set() for _ in parts]
        for i, j in adjacency:
            nbrs[i].add(j)
            nbrs[j].add(i)
        mmo = tuple(p.box for p in parts)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "adjacency", frozenset(adjacency))
        object.__setattr__(self, "wall_attached", wall)
        object.__setattr__(self, "mmo", mmo)
        object.__setattr__(self, "mmg", bounding_rect(mmo))
        object.__setattr__(self, "neighbors", tuple(frozenset(s) for s in nbrs))

    @classmethod
    def build(cls, id, parts, adjacency=(), workspace: Rect | None = None,
              wall_attached: Sequence[bool] | None = None) -> "ObstacleGroup":
        """Create a group, deriving ``wall_attached`` from ``workspace`` unless given."""
        polys = tuple(p if isinstance(p, ConvexPolygon) else ConvexPolygon(p) for p in parts)
        if wall_attached is None:
            wall_attached = tuple(workspace is not None and touches_boundary(p, workspace) for p in polys)
        return cls(str(id), polys, frozenset(tuple(a) for a in adjacency), tuple(wall_attached))

    def translated(self, dx: float, dy: float) -> "ObstacleGroup":
        return ObstacleGroup(self.id, tuple(p.translated(dx, dy) for p in self.parts),
                             self.adjacency, self.wall_attached)

    def clearing_set(self, hit: Iterable[int]) -> list[int]:
        """Parts a translation must clear: the hit parts and their neighbours."""
        keep = set()
        for i in hit:
            keep.add(i)
            keep |= self.neighbors[i]
        return sorted(keep)


def touches_boundary(poly: ConvexPolygon, workspace: Rect) -> bool:
    (x0, y0), (x1, y1) = workspace
    return any(abs(x - x0) <= EPS or abs(x - x1) <= EPS or abs(y - y0) <= EPS or abs(y - y1) <= EPS
               for x, y in poly.vertices)


def _escape_parts(seg: Segment, group: ObstacleGroup, hit: Iterable[int], workspace: Rect | None) -> float:
    keep = group.clearing_set(hit)
    walled = workspace is not None and any(group.wall_attached[k] for k in keep)
    if len(keep) == 1 and not walled:
        return sat_depth(seg, group.parts[keep[0]])
    key = tuple(keep)
    packed = group._packs.get(key)
    if packed is None:
        packed = group._packs[key] = _pack([group.parts[k] for k in keep])
    return _min_escape_packed(seg, packed, workspace if walled else None)[0]


def escape_distance(seg: Segment, group: ObstacleGroup, part_index: int, workspace: Rect | None = None) -> float:
    """Shortest valid translation freeing ``seg`` from ``group.parts[part_index]``.

    A translation is valid when the moved segment clears the part and every
    part adjacent to it, and, if any of those parts touches the workspace
    boundary, stays inside ``workspace``. Returns the infimum, so a segment
    that only grazes the part gives 0.
    """
    if not segment_intersects_convex(seg, group.parts[part_index]):
        raise GeometryError(f"segment does not intersect part {part_index} of obstacle {group.id!r}")
    return _escape_parts(seg, group, (part_index,), workspace)


class CollisionReport(NamedTuple):
    parts: tuple[int, ...]
    alpha: float


_CLEAR = CollisionReport((), 0.0)


def collide_segment_group(seg: Segment, group: ObstacleGroup, workspace: Rect | None = None) -> CollisionReport:
    """Intersected parts of ``group`` and the group-level escape distance.

    Min-max boxes cull first; when several parts are hit the escape distance
    frees the segment from all of them at once.
    """
    if not segment_intersects_rect(seg, group.mmg):
        return _CLEAR
    hit = tuple(i for i, (box, part) in enumerate(zip(group.mmo, group.parts))
                if segment_intersects_rect(seg, box) and segment_intersects_convex(seg, part))
    if not hit:
        return _CLEAR
    return CollisionReport(hit, _escape_parts(seg, group, hit, workspace))
