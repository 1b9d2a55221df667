"""Brute-force reference computations used to check the planner.

Nothing here is on the planner's hot path. Collision checks use point
sampling plus orientation-based edge crossing tests instead of separating
axes, and escape distances come from a directional scan, so the two routes
share no arithmetic with :mod:`kbga.geometry` beyond the data types.
"""
from __future__ import annotations

import math
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .geometry import ConvexPolygon, ObstacleGroup, Point, Rect, Segment, collide_segment_group

if TYPE_CHECKING:
    from .environment import Environment

SAMPLES = 1000
ANGLE_STEP_DEG = 1.0
DIST_STEP = 0.01
WALL_STEP = 0.001
EPS_VIS = 1e-6
_TOL = 1e-9


class InfeasibleError(RuntimeError):
    """No collision-free route exists between start and target."""


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _points_in_polygon(px: np.ndarray, py: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Closed containment for a CCW convex polygon via orientation signs."""
    inside = np.ones(px.shape, dtype=bool)
    n = len(verts)
    for i in range(n):
        (x0, y0), (x1, y1) = verts[i], verts[(i + 1) % n]
        scale = math.hypot(x1 - x0, y1 - y0)
        inside &= _orient(x0, y0, x1, y1, px, py) >= -_TOL * scale
    return inside


def _segments_cross(ax, ay, bx, by, verts: np.ndarray) -> np.ndarray:
    """Whether segments (a, b) (arrays) touch any polygon edge, collinear overlap included."""
    hit = np.zeros(np.shape(ax), dtype=bool)
    n = len(verts)
    for i in range(n):
        (cx, cy), (dx, dy) = verts[i], verts[(i + 1) % n]
        o1 = _orient(ax, ay, bx, by, cx, cy)
        o2 = _orient(ax, ay, bx, by, dx, dy)
        o3 = _orient(cx, cy, dx, dy, ax, ay)
        o4 = _orient(cx, cy, dx, dy, bx, by)
        s1, s2 = np.sign(np.where(np.abs(o1) < _TOL, 0, o1)), np.sign(np.where(np.abs(o2) < _TOL, 0, o2))
        s3, s4 = np.sign(np.where(np.abs(o3) < _TOL, 0, o3)), np.sign(np.where(np.abs(o4) < _TOL, 0, o4))
        proper = (s1 * s2 < 0) & (s3 * s4 < 0)
        # touching / collinear cases: an endpoint of one lies on the other
        on_cd_a = (s3 == 0) & _within(ax, ay, cx, cy, dx, dy)
        on_cd_b = (s4 == 0) & _within(bx, by, cx, cy, dx, dy)
        on_ab_c = (s1 == 0) & _within(cx, cy, ax, ay, bx, by)
        on_ab_d = (s2 == 0) & _within(dx, dy, ax, ay, bx, by)
        hit |= proper | on_cd_a | on_cd_b | on_ab_c | on_ab_d
    return hit


def _within(px, py, ax, ay, bx, by):
    return ((np.minimum(ax, bx) - _TOL <= px) & (px <= np.maximum(ax, bx) + _TOL)
            & (np.minimum(ay, by) - _TOL <= py) & (py <= np.maximum(ay, by) + _TOL))


def _verts(poly: ConvexPolygon) -> np.ndarray:
    return np.asarray(poly.vertices, dtype=float)


def oracle_segment_collides(seg: Segment, group: ObstacleGroup | Sequence[ConvexPolygon]) -> bool:
    """Sampled containment plus exact edge crossings against every part."""
    parts = group.parts if isinstance(group, ObstacleGroup) else group
    (ax, ay), (bx, by) = seg
    ts = np.linspace(0.0, 1.0, SAMPLES)
    px = ax + ts * (bx - ax)
    py = ay + ts * (by - ay)
    for part in parts:
        verts = _verts(part)
        if _points_in_polygon(px, py, verts).any():
            return True
        if _segments_cross(np.array([ax]), np.array([ay]), np.array([bx]), np.array([by]), verts).any():
            return True
    return False


def _clear_along(seg: Segment, polys: list[np.ndarray], ux: float, uy: float, ds: np.ndarray,
                 bounds: Rect | None) -> np.ndarray:
    (ax, ay), (bx, by) = seg
    a_x, a_y = ax + ds * ux, ay + ds * uy
    b_x, b_y = bx + ds * ux, by + ds * uy
    blocked = np.zeros(np.broadcast(a_x, ds).shape, dtype=bool)
    for verts in polys:
        blocked |= _points_in_polygon(a_x, a_y, verts)
        blocked |= _points_in_polygon(b_x, b_y, verts)
        blocked |= _segments_cross(a_x, a_y, b_x, b_y, verts)
    if bounds is not None:
        (x0, y0), (x1, y1) = bounds
        for px, py in ((a_x, a_y), (b_x, b_y)):
            blocked |= (px < x0 - _TOL) | (px > x1 + _TOL) | (py < y0 - _TOL) | (py > y1 + _TOL)
    return ~blocked


def _directions(degrees: np.ndarray):
    theta = np.radians(degrees)
    return np.cos(theta)[:, None], np.sin(theta)[:, None]


def _scan(seg: Segment, parts: list[ConvexPolygon], bounds: Rect | None, limit: float,
          step: float = DIST_STEP, degrees: np.ndarray | None = None) -> float:
    """Smallest clearing distance over the scan directions, walking distances outward."""
    polys = [_verts(p) for p in parts]
    if degrees is None:
        degrees = np.arange(int(round(360.0 / ANGLE_STEP_DEG))) * ANGLE_STEP_DEG
    ux, uy = _directions(degrees)
    chunk = 200
    start = 1
    while start * step < limit:
        stop = min(start + chunk, int(math.ceil(limit / step)) + 1)
        ds = (np.arange(start, stop) * step)[None, :]
        clear = _clear_along(seg, polys, ux, uy, ds, bounds)
        rows, cols = np.nonzero(clear)
        # confirm candidates nearest first with the sampling test
        for k in np.lexsort((rows, cols)):
            d = float(ds[0, cols[k]])
            moved = seg.translated(d * float(ux[rows[k], 0]), d * float(uy[rows[k], 0]))
            if not oracle_segment_collides(moved, parts):
                return d
        start = stop
    return math.inf


def _along_walls(seg: Segment, parts: list[ConvexPolygon], bounds: Rect, best: float,
                 step: float = WALL_STEP) -> float:
    """Sample translations that park an endpoint exactly on a workspace side.

    When the workspace box and an obstacle edge pinch the valid translations
    into a wedge narrower than the angular step, whole-degree rays reach it
    only well past its apex. That apex lies on one of these four lines, so
    sampling them finely recovers it.
    """
    (ax, ay), (bx, by) = seg
    (x0, y0), (x1, y1) = bounds
    n = int(math.ceil(best / step))
    ts = np.arange(-n, n + 1) * step
    fixed_x = (x0 - min(ax, bx), x1 - max(ax, bx))
    fixed_y = (y0 - min(ay, by), y1 - max(ay, by))
    tx = np.concatenate([np.full(ts.shape, fixed_x[0]), np.full(ts.shape, fixed_x[1]), ts, ts])
    ty = np.concatenate([ts, ts, np.full(ts.shape, fixed_y[0]), np.full(ts.shape, fixed_y[1])])
    length = np.hypot(tx, ty)
    near = length < best
    tx, ty, length = tx[near], ty[near], length[near]
    if length.size == 0:
        return best
    polys = [_verts(p) for p in parts]
    clear = np.nonzero(_clear_along(seg, polys, tx[:, None], ty[:, None], np.ones((1, 1)), bounds)[:, 0])[0]
    for i in clear[np.argsort(length[clear], kind="stable")]:
        if not oracle_segment_collides(seg.translated(float(tx[i]), float(ty[i])), parts):
            return float(length[i])
    return best


def oracle_escape_distance(seg: Segment, group: ObstacleGroup, part: int | Sequence[int],
                           workspace: Rect | None = None) -> float:
    """Directional scan for the shortest translation freeing ``seg``.

    Scans 1 degree directions and 0.01 unit distances. The translation must
    clear the given part(s) and their adjacent parts; when any of those parts
    is wall attached the moved segment must also stay inside ``workspace``,
    and translations pinning an endpoint to a side are sampled as well.
    """
    hit = {part} if isinstance(part, int) else set(part)
    keep = set(hit)
    for i, j in group.adjacency:
        if i in hit:
            keep.add(j)
        if j in hit:
            keep.add(i)
    parts = [group.parts[k] for k in sorted(keep)]
    walled = workspace is not None and any(group.wall_attached[k] for k in keep)
    mmg = group.mmg
    limit = (math.hypot(mmg.max[0] - mmg.min[0], mmg.max[1] - mmg.min[1]) + seg.length + 2 * DIST_STEP)
    bounds = workspace if walled else None
    # a coarse pass only bounds the search; any clear translation it finds is valid
    rough = _scan(seg, parts, bounds, limit, step=50 * DIST_STEP)
    best = _scan(seg, parts, bounds, min(limit, rough + DIST_STEP))
    if math.isinf(best) and walled:
        return oracle_escape_distance(seg, group, part, None)
    if bounds is not None:
        best = _along_walls(seg, parts, bounds, best)
    return best


def _pushed_vertices(poly: ConvexPolygon, eps: float) -> list[tuple[float, float]]:
    verts = poly.vertices
    n = len(verts)
    out = []
    for i in range(n):
        px, py = verts[i - 1]
        cx, cy = verts[i]
        nx, ny = verts[(i + 1) % n]
        # outward normals of the two incident edges
        e1 = (cy - py, px - cx)
        e2 = (ny - cy, cx - nx)
        l1, l2 = math.hypot(*e1), math.hypot(*e2)
        bx = e1[0] / l1 + e2[0] / l2
        by = e1[1] / l1 + e2[1] / l2
        lb = math.hypot(bx, by)
        if lb == 0:
            bx, by, lb = e1[0], e1[1], l1
        out.append((cx + eps * bx / lb, cy + eps * by / lb))
    return out


def visibility_graph(env: "Environment", eps: float = EPS_VIS):
    """Vertices and weighted edges of the visibility graph (S is 0, T is 1)."""
    ws = env.workspace.rect
    nodes = [tuple(env.start), tuple(env.target)]
    for group in env.obstacles:
        for part in group.parts:
            for p in _pushed_vertices(part, eps):
                if ws.contains(p, 0.0):
                    nodes.append(p)
    n = len(nodes)
    rows, cols, weights = [], [], []
    for i in range(n):
        for j in range(i + 1, n):
            seg = Segment(Point(*nodes[i]), Point(*nodes[j]))
            if all(not collide_segment_group(seg, g).parts for g in env.obstacles):
                w = math.hypot(nodes[i][0] - nodes[j][0], nodes[i][1] - nodes[j][1])
                rows += [i, j]
                cols += [j, i]
                weights += [w, w]
    return nodes, (rows, cols, weights)


def oracle_shortest_path(env: "Environment", eps: float = EPS_VIS) -> float:
    """Length of the shortest collision-free S-T route over the visibility graph."""
    nodes, (rows, cols, weights) = visibility_graph(env, eps)
    n = len(nodes)
    graph = csr_matrix((weights, (rows, cols)), shape=(n, n))
    dist = dijkstra(graph, directed=False, indices=0)
    if not np.isfinite(dist[1]):
        raise InfeasibleError("target is unreachable from start")
    return float(dist[1])
