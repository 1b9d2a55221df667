"""Path cost: segment lengths plus a penetration penalty for colliding segments.

``cost = sum(d_i + beta_i * C)`` where ``beta_i`` adds up, over the obstacle
groups hit by segment ``i``, the shortest valid translation that frees the
segment from that group. Per-segment results are cached by node-id pair so
operators can re-score candidate paths cheaply.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from ..environment import Environment
from .. import _kernels
from ..geometry import EPS, Point, Segment, collide_segment_group
from .encoding import START, TARGET

CACHE_LIMIT = 400_000


class SegmentCost(NamedTuple):
    length: float
    beta: float
    hits: tuple  # ((group_id, (part, ...)), ...)


@dataclass(frozen=True)
class PathEvaluation:
    cost: float
    feasible: bool
    seg_lengths: tuple[float, ...]
    betas: tuple[float, ...]
    infeasible_segments: tuple[int, ...]
    hits: tuple[tuple, ...]


def default_penalty(env: Environment) -> float:
    return float(env.workspace.width + env.workspace.height)


def touch_depth(env: Environment, penalty: float) -> float:
    """Smallest depth charged to a colliding segment.

    A segment that merely grazes an obstacle has zero escape distance yet is
    still infeasible, so every hit is charged at least one grid-cell
    diagonal of depth. Clipping a corner then costs more than the lattice
    detour around it.
    """
    ws = env.workspace
    return math.hypot(ws.cell_width, ws.cell_height)


class Evaluator:
    """Scores chromosomes against one environment snapshot."""

    def __init__(self, env: Environment, penalty: float | None = None):
        self.penalty = float(penalty) if penalty is not None else default_penalty(env)
        self._cache: dict = {}
        self.repair_memo: dict = {}  # (u, v, group_id, band) -> inserted node or None
        self._bind(env)

    def _bind(self, env: Environment):
        self.env = env
        ws = env.workspace
        self.cols = ws.grid_cols
        self.node_count = ws.node_count
        self.cell_w = ws.width / ws.grid_cols
        self.cell_h = ws.height / ws.grid_rows
        self.touch = touch_depth(env, self.penalty)
        self.rect = ws.rect
        self._boxes = [(g.mmg.min.x - EPS, g.mmg.min.y - EPS, g.mmg.max.x + EPS, g.mmg.max.y + EPS, g)
                       for g in env.obstacles]
        self._cache.clear()
        self.repair_memo.clear()
        self._index = _PartIndex(env)

    def rebind(self, env: Environment) -> None:
        """Switch to ``env``, keeping cached segments that are still valid."""
        old = self.env
        if env is old:
            return
        if (env.version != old.version or env.obstacles is not old.obstacles
                or env.workspace != old.workspace):
            self._bind(env)
            return
        stale = set()
        if env.start != old.start:
            stale.add(START)
        if env.target != old.target:
            stale.add(TARGET)
        self.env = env
        if stale:
            for key in [k for k in self._cache if k[0] in stale or k[1] in stale]:
                del self._cache[key]
            for key in [k for k in self.repair_memo if k[0] in stale or k[1] in stale]:
                del self.repair_memo[key]

    def point(self, n: int) -> tuple[float, float]:
        if n >= 0:
            row, col = divmod(n, self.cols)
            return (col * self.cell_w, row * self.cell_h)
        return self.env.start if n == START else self.env.target

    def segment(self, u: int, v: int) -> SegmentCost:
        key = (u, v) if u <= v else (v, u)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        res = self.segment_between(self.point(key[0]), self.point(key[1]))
        if len(self._cache) >= CACHE_LIMIT:
            self._cache.clear()
            self.repair_memo.clear()
        self._cache[key] = res
        return res

    def segment_between(self, a: Sequence[float], b: Sequence[float]) -> SegmentCost:
        ax, ay = a
        bx, by = b
        lo_x, hi_x = (ax, bx) if ax <= bx else (bx, ax)
        lo_y, hi_y = (ay, by) if ay <= by else (by, ay)
        seg = None
        hits = []
        beta = 0.0
        for x0, y0, x1, y1, group in self._boxes:
            if hi_x < x0 or lo_x > x1 or hi_y < y0 or lo_y > y1:
                continue
            if seg is None:
                seg = Segment(Point(ax, ay), Point(bx, by))
            rep = collide_segment_group(seg, group, self.rect)
            if rep.parts:
                hits.append((group.id, rep.parts))
                beta += rep.alpha if rep.alpha > self.touch else self.touch
        return SegmentCost(math.hypot(bx - ax, by - ay), beta, tuple(hits))

    def evaluate(self, c: Sequence[int]) -> PathEvaluation:
        path = (START, *c, TARGET)
        C = self.penalty
        lengths = []
        betas = []
        bad = []
        hits = []
        cost = 0.0
        for i in range(len(path) - 1):
            s = self.segment(path[i], path[i + 1])
            lengths.append(s.length)
            betas.append(s.beta)
            hits.append(s.hits)
            cost += s.length + s.beta * C
            if s.hits:
                bad.append(i)
        return PathEvaluation(cost, not bad, tuple(lengths), tuple(betas), tuple(bad), tuple(hits))

    def segment_cost(self, u: int, v: int) -> float:
        s = self.segment(u, v)
        return s.length + s.beta * self.penalty

    def batch(self, ax, ay, bx, by):
        """Vectorised collision screen for many segments at once.

        Returns ``(clear, beta_low, exact)``: whether each segment is collision
        free, a lower bound on its beta, and whether that bound is exact
        (every hit is a lone part with no neighbours and no wall contact).
        """
        return self._index.screen(ax, ay, bx, by, self.touch)


class _PartIndex:
    """Padded arrays over all convex parts for the vectorised screen."""

    def __init__(self, env: Environment):
        parts = []
        for gi, g in enumerate(env.obstacles):
            for pi, p in enumerate(g.parts):
                simple = not g.neighbors[pi] and not g.wall_attached[pi]
                parts.append((gi, p, simple))
        self.n_groups = len(env.obstacles)
        self.n_parts = len(parts)
        if not parts:
            return
        m = max(len(p) for _, p, _ in parts)
        P = len(parts)
        self.box = np.empty((P, 4))
        self.nx = np.empty((P, m))
        self.ny = np.empty((P, m))
        self.up = np.empty((P, m))
        self.lo = np.empty((P, m))
        self.vx = np.empty((P, m))
        self.vy = np.empty((P, m))
        self.group = np.empty(P, dtype=np.int64)
        self.nvert = np.array([len(p) for _, p, _ in parts], dtype=np.int64)
        self.simple = np.empty(P, dtype=bool)
        for k, (gi, p, simple) in enumerate(parts):
            pad = [i if i < len(p) else 0 for i in range(m)]
            self.box[k] = (p.box.min.x - EPS, p.box.min.y - EPS, p.box.max.x + EPS, p.box.max.y + EPS)
            self.nx[k] = [p.normals[i][0] for i in pad]
            self.ny[k] = [p.normals[i][1] for i in pad]
            self.up[k] = [p.upper[i] for i in pad]
            self.lo[k] = [p.lower[i] for i in pad]
            self.vx[k] = [p.vertices[i][0] for i in pad]
            self.vy[k] = [p.vertices[i][1] for i in pad]
            self.group[k] = gi
            self.simple[k] = simple

    def screen(self, ax, ay, bx, by, touch: float):
        ax, ay, bx, by = (np.ascontiguousarray(v, dtype=float) for v in (ax, ay, bx, by))
        K = ax.shape[0]
        if self.n_parts == 0 or K == 0:
            return np.ones(K, dtype=bool), np.zeros(K), np.ones(K, dtype=bool)
        return _kernels.screen(ax, ay, bx, by, self.box, self.nx, self.ny, self.up, self.lo,
                               self.vx, self.vy, self.nvert, self.group, self.simple,
                               self.n_groups, float(touch))
