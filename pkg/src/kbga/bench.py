"""Repeated seeded runs: operator ablation and runtime scaling studies."""
from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence

from .environment import Environment
from .ga.config import PRESETS, GaConfig
from .ga.engine import run
from .scenarios import load_bundled

ABLATION = ("full", "xo-mut-only", "specialized-only")
GRIDS = (100, 200, 400)
OBSTACLE_COUNTS = (20, 30, 40)


@dataclass(frozen=True)
class RunRow:
    label: str
    seed: int
    cost: float
    feasible: bool
    generations_to_best: int
    generations_used: int
    seconds: float


@dataclass(frozen=True)
class BenchRow:
    label: str
    runs: int
    mean_cost: float
    sd_cost: float
    mean_generations: float
    sd_generations: float
    mean_seconds: float
    sd_seconds: float
    feasible_fraction: float


@dataclass
class BenchReport:
    rows: list[BenchRow]
    runs: list[RunRow]

    def row(self, label: str) -> BenchRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)


def _sd(xs: Sequence[float]) -> float:
    return statistics.stdev(xs) if len(xs) > 1 else 0.0


def summarize(label: str, runs: Sequence[RunRow]) -> BenchRow:
    """Statistics over one configuration; generations count up to the best solution."""
    if not runs:
        raise ValueError("summarize needs at least one run")
    costs = [r.cost for r in runs]
    gens = [float(r.generations_to_best) for r in runs]
    secs = [r.seconds for r in runs]
    return BenchRow(label, len(runs), statistics.fmean(costs), _sd(costs), statistics.fmean(gens), _sd(gens),
                    statistics.fmean(secs), _sd(secs), sum(r.feasible for r in runs) / len(runs))


def report_from_runs(runs: Sequence[RunRow]) -> BenchReport:
    labels = list(dict.fromkeys(r.label for r in runs))
    return BenchReport([summarize(lab, [r for r in runs if r.label == lab]) for lab in labels], list(runs))


def run_config(env: Environment, cfg: GaConfig, label: str, seeds: Iterable[int]) -> list[RunRow]:
    rows = []
    for seed in seeds:
        r = run(env, cfg.with_(rng_seed=seed))
        rows.append(RunRow(label, seed, r.cost, r.feasible, r.best_generation, r.generations_used, r.seconds))
    return rows


def ablation(env: Environment, base: GaConfig, seeds: Sequence[int],
             configs: Sequence[str] = ABLATION) -> BenchReport:
    runs = []
    for name in configs:
        runs += run_config(env, base.with_(**PRESETS[name]), name, seeds)
    return report_from_runs(runs)


def resolution_sweep(env: Environment, cfg: GaConfig, seeds: Sequence[int],
                     grids: Sequence[int] = GRIDS) -> BenchReport:
    runs = []
    for g in grids:
        runs += run_config(env.with_grid(g, g), cfg, f"{g}x{g}", seeds)
    return report_from_runs(runs)


def obstacle_sweep(cfg: GaConfig, seeds: Sequence[int], counts: Sequence[int] = OBSTACLE_COUNTS) -> BenchReport:
    runs = []
    for k in counts:
        runs += run_config(load_bundled(f"unstructured-{k}").environment, cfg, f"{k} obstacles", seeds)
    return report_from_runs(runs)


RUN_FIELDS = ("label", "seed", "cost", "feasible", "generations_to_best", "generations_used")
SUMMARY_FIELDS = ("label", "runs", "mean_cost", "sd_cost", "mean_generations", "sd_generations",
                  "feasible_fraction")
TIMING_FIELDS = ("label", "runs", "mean_seconds", "sd_seconds")
