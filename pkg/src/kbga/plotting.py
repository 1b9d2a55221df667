"""Matplotlib figures written next to the tabular reports.

Uses the Agg backend and strips PNG metadata so the same data always gives
the same bytes.
"""
from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Polygon  # noqa: E402

from .environment import Environment  # noqa: E402

_META = {"Software": None}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)
    return path


def convergence(histories: Mapping[str, Sequence[float]], path: Path, title: str = "") -> Path:
    """Best-so-far cost per generation, one line per label."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, hist in histories.items():
        ax.plot(range(len(hist)), hist, label=label, linewidth=1.2)
    ax.set_xlabel("generation")
    ax.set_ylabel("best cost")
    ax.set_yscale("log")
    if title:
        ax.set_title(title)
    if len(histories) > 1:
        ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return _save(fig, path)


def scene(env: Environment, path: Path, paths: Sequence[Sequence[Sequence[float]]] = (),
          trajectory: Sequence[Sequence[float]] = (), title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    ws = env.workspace
    ax.set_xlim(0, ws.width)
    ax.set_ylim(0, ws.height)
    ax.set_aspect("equal")
    ax.set_facecolor("#d9d9d9")
    for g in env.obstacles:
        for part in g.parts:
            ax.add_patch(Polygon(part.vertices, closed=True, facecolor="#404040", edgecolor="#202020"))
    for i, pts in enumerate(paths):
        xs, ys = zip(*pts)
        last = i == len(paths) - 1
        ax.plot(xs, ys, color="black" if last else "grey", linewidth=1.5 if last else 0.5,
                alpha=1.0 if last else 0.5)
    if trajectory:
        xs, ys = zip(*trajectory)
        ax.plot(xs, ys, "o-", color="white", markeredgecolor="black", markersize=3, linewidth=1)
    ax.plot(*env.start, "o", color="tab:blue")
    ax.plot(*env.target, "o", color="tab:red")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def bench_summary(rows: Sequence, path: Path, title: str = "") -> Path:
    """Mean cost and mean generations-to-best per configuration, with SD error bars."""
    labels = [r.label for r in rows]
    x = range(len(rows))
    fig, (a1, a2) = plt.subplots(1, 2, figsize=(9, 4))
    a1.bar(x, [r.mean_cost for r in rows], yerr=[r.sd_cost for r in rows], capsize=3, color="#7f7f7f")
    a1.set_ylabel("mean best cost")
    a2.bar(x, [r.mean_generations for r in rows], yerr=[r.sd_generations for r in rows], capsize=3,
           color="#bfbfbf")
    a2.set_ylabel("mean generations to best")
    for ax in (a1, a2):
        ax.set_xticks(list(x))
        ax.set_xticklabels(labels, rotation=20, ha="right")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return _save(fig, path)


def runtime(rows: Sequence, path: Path, title: str = "") -> Path:
    """Mean wall-clock seconds per configuration; timing varies between machines."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(range(len(rows)), [r.mean_seconds for r in rows], yerr=[r.sd_seconds for r in rows],
                marker="o", capsize=3, color="black")
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels([r.label for r in rows])
    ax.set_ylabel("mean seconds")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
