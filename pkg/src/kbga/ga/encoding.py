"""Chromosome encoding: intermediate path nodes are integer grid ids.

Node ``n`` sits at column ``n % grid_cols`` and row ``n // grid_cols``; the
start and target points are implicit and keep their natural coordinates.
"""
from __future__ import annotations

import random
from typing import Sequence

from ..environment import Environment, Workspace
from ..geometry import Point

Chromosome = tuple  # tuple[int, ...]

START = -1
TARGET = -2


def node_to_point(n: int, ws: Workspace) -> Point:
    if not 0 <= n < ws.grid_cols * ws.grid_rows:
        raise ValueError(f"node id {n} out of range for a {ws.grid_cols}x{ws.grid_rows} grid")
    row, col = divmod(n, ws.grid_cols)
    return Point(col * ws.width / ws.grid_cols, row * ws.height / ws.grid_rows)


def point_to_node(p: Sequence[float], ws: Workspace) -> int:
    """Nearest lattice node to ``p`` (clamped to the grid)."""
    col = min(max(int(round(p[0] * ws.grid_cols / ws.width)), 0), ws.grid_cols - 1)
    row = min(max(int(round(p[1] * ws.grid_rows / ws.height)), 0), ws.grid_rows - 1)
    return row * ws.grid_cols + col


def decode(c: Sequence[int], env: Environment) -> list[Point]:
    ws = env.workspace
    return [env.start, *(node_to_point(n, ws) for n in c), env.target]


def loop_removal(c: Sequence[int]) -> Chromosome:
    """Cut out the stretch between two visits of the same node, keeping one visit."""
    out: list[int] = []
    pos: dict[int, int] = {}
    for n in c:
        k = pos.get(n)
        if k is not None:
            for dropped in out[k + 1:]:
                del pos[dropped]
            del out[k + 1:]
            continue
        pos[n] = len(out)
        out.append(n)
    return tuple(out)


def random_chromosome(rng: random.Random, env: Environment, n_max: int = 10, max_initial: int = 6) -> Chromosome:
    """Uniform length in ``[1, min(max_initial, n_max)]``, uniform node ids."""
    total = env.workspace.node_count
    length = rng.randint(1, max(1, min(max_initial, n_max)))
    nodes: list[int] = []
    while len(nodes) < length:
        n = rng.randrange(total)
        if nodes and nodes[-1] == n:
            continue
        nodes.append(n)
    return tuple(nodes)


def is_valid(c: Sequence[int], ws: Workspace, n_max: int) -> bool:
    total = ws.node_count
    return (len(c) <= n_max and all(0 <= n < total for n in c)
            and all(a != b for a, b in zip(c, c[1:])))
