"""The five problem-specific operators.

All operators take and return tuples of node ids and never mutate their
input. Cost-aware operators score candidates through an :class:`Evaluator`
so segment results are shared across the whole run.
"""
from __future__ import annotations

import math
import random
from typing import Sequence

import numpy as np

from ..geometry import EPS
from .config import GaConfig
from .encoding import START, TARGET, Chromosome, loop_removal
from .evaluation import Evaluator, PathEvaluation


def swap_tails(p1: Sequence[int], p2: Sequence[int], i: int, j: int) -> tuple[Chromosome, Chromosome]:
    """Exchange what follows position ``i`` of ``p1`` and position ``j`` of ``p2``."""
    return tuple(p1[:i + 1]) + tuple(p2[j + 1:]), tuple(p2[:j + 1]) + tuple(p1[i + 1:])


def crossover(p1: Sequence[int], p2: Sequence[int], rng: random.Random,
              n_max: int = 10) -> tuple[Chromosome, Chromosome]:
    if not p1 or not p2:
        return tuple(p1), tuple(p2)
    i = rng.randrange(len(p1))
    j = rng.randrange(len(p2))
    c1, c2 = swap_tails(p1, p2, i, j)
    return loop_removal(c1)[:n_max], loop_removal(c2)[:n_max]


def mutate(c: Sequence[int], rng: random.Random, node_count: int) -> Chromosome:
    """Replace one uniformly chosen node by a node absent from ``c``."""
    c = tuple(c)
    if not c:
        return (rng.randrange(node_count),)
    present = set(c)
    if len(present) >= node_count:
        return c
    pos = rng.randrange(len(c))
    if len(present) * 2 > node_count:
        # dense case: draw from the explicit complement
        n = rng.choice([m for m in range(node_count) if m not in present])
    else:
        n = rng.randrange(node_count)
        while n in present:
            n = rng.randrange(node_count)
    return c[:pos] + (n,) + c[pos + 1:]


def _ring_nodes(ev: Evaluator, box, band: int) -> np.ndarray:
    """Lattice nodes lying outside ``box`` but within ``band`` cells of it."""
    cw, ch, cols = ev.cell_w, ev.cell_h, ev.cols
    rows = ev.node_count // cols
    (x0, y0), (x1, y1) = box
    c_lo = max(math.floor(x0 / cw - EPS) - band + 1, 0)
    c_hi = min(math.ceil(x1 / cw + EPS) + band - 1, cols - 1)
    r_lo = max(math.floor(y0 / ch - EPS) - band + 1, 0)
    r_hi = min(math.ceil(y1 / ch + EPS) + band - 1, rows - 1)
    cc, rr = np.meshgrid(np.arange(c_lo, c_hi + 1), np.arange(r_lo, r_hi + 1))
    cc, rr = cc.ravel(), rr.ravel()
    x, y = cc * cw, rr * ch
    outside = (x < x0 - EPS) | (x > x1 + EPS) | (y < y0 - EPS) | (y > y1 + EPS)
    return (rr * cols + cc)[outside]


def _repair_choice(ev: Evaluator, u: int, v: int, box, band: int) -> int | None:
    """Best node to insert between ``u`` and ``v``; depends only on the segment and the box."""
    cand = _ring_nodes(ev, box, band)
    cand = cand[(cand != u) & (cand != v)]
    if cand.size == 0:
        return None
    C = ev.penalty
    original = ev.segment_cost(u, v)
    (ux, uy), (vx, vy) = ev.point(u), ev.point(v)
    cols = ev.cols
    px = (cand % cols) * ev.cell_w
    py = (cand // cols) * ev.cell_h
    clear1, low1, _ = ev.batch(np.full(px.shape, ux), np.full(py.shape, uy), px, py)
    clear2, low2, _ = ev.batch(px, py, np.full(px.shape, vx), np.full(py.shape, vy))
    lengths = np.hypot(px - ux, py - uy) + np.hypot(vx - px, vy - py)

    ok = clear1 & clear2
    if ok.any():
        # a feasible detour wins whenever it beats the colliding segment
        costs = lengths[ok]
        ids = cand[ok]
        k = np.lexsort((ids, costs))[0]
        if costs[k] < original:
            return int(ids[k])
    bad = ~ok
    ids = cand[bad]
    bounds = lengths[bad] + C * (low1[bad] + low2[bad])
    best_cost, choice = math.inf, None
    for k in np.lexsort((ids, bounds)):
        if bounds[k] > best_cost:
            break
        n = int(ids[k])
        cost = ev.segment_cost(u, n) + ev.segment_cost(n, v)
        if cost < best_cost or (cost == best_cost and n < choice):
            best_cost, choice = cost, n
    return choice


def repair(c: Sequence[int], evaluation: PathEvaluation, ev: Evaluator, cfg: GaConfig,
           rng: random.Random) -> Chromosome:
    """Insert a node next to an obstacle hit by one infeasible segment."""
    c = tuple(c)
    if evaluation.feasible or len(c) >= cfg.n_max:
        return c
    seg = rng.choice(evaluation.infeasible_segments)
    gid, _ = rng.choice(evaluation.hits[seg])
    path = (START, *c, TARGET)
    u, v = path[seg], path[seg + 1]
    key = (u, v, gid, cfg.repair_band)
    choice = ev.repair_memo.get(key, -1)
    if choice == -1:
        choice = _repair_choice(ev, u, v, ev.env.group(gid).mmg, cfg.repair_band)
        ev.repair_memo[key] = choice
    if choice is None:
        return c
    out = c[:seg] + (choice,) + c[seg:]
    return out if ev.evaluate(out).cost < evaluation.cost else c


def delete_node(c: Sequence[int], ev: Evaluator, rng: random.Random,
                evaluation: PathEvaluation | None = None) -> Chromosome:
    """Drop one uniformly chosen node if that lowers the cost or makes the path feasible.

    If the neighbours of the dropped node are the same id, the now-redundant
    repeat is dropped too so no consecutive duplicates appear.
    """
    c = tuple(c)
    if not c:
        return c
    before = evaluation if evaluation is not None else ev.evaluate(c)
    j = rng.randrange(len(c))
    if 0 < j < len(c) - 1 and c[j - 1] == c[j + 1]:
        out = c[:j] + c[j + 2:]
    else:
        out = c[:j] + c[j + 1:]
    after = ev.evaluate(out)
    if after.cost < before.cost or (after.feasible and not before.feasible):
        return out
    return c


def improve(c: Sequence[int], ev: Evaluator, cfg: GaConfig, rng: random.Random,
            evaluation: PathEvaluation | None = None) -> Chromosome:
    """Move one node to the cheapest lattice neighbour keeping its two segments feasible."""
    c = tuple(c)
    if not c:
        return c
    before = evaluation if evaluation is not None else ev.evaluate(c)
    if not before.feasible:
        return c
    j = rng.randrange(len(c))
    path = (START, *c, TARGET)
    prev, node, nxt = path[j], path[j + 1], path[j + 2]
    cols = ev.cols
    rows = ev.node_count // cols
    row, col = divmod(node, cols)
    r = cfg.improvement_radius
    current = before.seg_lengths[j] + before.seg_lengths[j + 1]
    best, best_cost = None, current
    for rr in range(max(row - r, 0), min(row + r, rows - 1) + 1):
        for cc in range(max(col - r, 0), min(col + r, cols - 1) + 1):
            n = rr * cols + cc
            if n == node or n == prev or n == nxt:
                continue
            s1 = ev.segment(prev, n)
            if s1.hits:
                continue
            s2 = ev.segment(n, nxt)
            if s2.hits:
                continue
            cost = s1.length + s2.length
            # ids are visited in increasing order, so ties keep the smaller id
            if cost < best_cost:
                best, best_cost = n, cost
    if best is None:
        return c
    out = c[:j] + (best,) + c[j + 1:]
    return out if ev.evaluate(out).cost < before.cost else c
