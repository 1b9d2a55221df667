"""Structured text output: JSON documents and comma-delimited tables.

Everything written here is a pure function of the inputs and seed. Wall-clock
timings go to their own ``timing.csv`` so the other files stay byte-identical
across reruns.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

from .dynamic import SimResult
from .environment import DynamicSchedule, Environment
from .ga.config import GaConfig
from .ga.engine import RunResult


def _pt(p) -> list[float]:
    return [float(p[0]), float(p[1])]


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(path: Path, doc: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(doc), encoding="utf-8")
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(header, rows), encoding="utf-8")
    return path


def run_document(result: RunResult, env: Environment, cfg: GaConfig, name: str = "") -> dict:
    ev = result.evaluation
    return {
        "environment": name,
        "grid": [env.workspace.grid_cols, env.workspace.grid_rows],
        "config": cfg.as_dict(),
        "cost": result.cost,
        "feasible": result.feasible,
        "generations_used": result.generations_used,
        "best_generation": result.best_generation,
        "chromosome": list(result.chromosome),
        "path": [_pt(p) for p in result.path],
        "segment_lengths": list(ev.seg_lengths),
        "betas": list(ev.betas),
    }


def history_rows(result: RunResult) -> list[tuple[int, float]]:
    return list(enumerate(result.history))


def sim_document(result: SimResult, cfg: GaConfig, schedule: DynamicSchedule, name: str = "") -> dict:
    return {
        "environment": name,
        "config": cfg.as_dict(),
        "update_interval": schedule.update_interval,
        "robot_speed": schedule.robot_speed,
        "gens_per_tick": result.gens_per_tick,
        "reached": result.reached,
        "arrival_time": result.arrival_time,
        "t_max": result.t_max,
        "total_path_length": result.total_path_length,
        "collisions": result.collisions,
        "snapshots": len(result.snapshots),
    }


def trajectory_rows(result: SimResult) -> list[tuple[float, float, float]]:
    return [(float(t), float(p[0]), float(p[1])) for t, p in result.trajectory]


def snapshot_rows(result: SimResult) -> list[tuple]:
    rows = []
    for s in result.snapshots:
        pts = ";".join(f"{x!r} {y!r}" for x, y in ((float(p[0]), float(p[1])) for p in s.path))
        rows.append((float(s.t), s.env.version, s.feasible, float(s.cost), pts))
    return rows
