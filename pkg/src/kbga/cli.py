"""``kbga`` command line: plan, simulate, bench, envs.

Exit codes: 0 success (feasible path / target reached), 1 bad input,
2 the planner finished without a feasible path or the robot never arrived.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, plotting, report, scenarios, svg
from .bench import (ABLATION, RUN_FIELDS, SUMMARY_FIELDS, TIMING_FIELDS, BenchReport, ablation, obstacle_sweep,
                    resolution_sweep)
from .dynamic import simulate
from .environment import EnvironmentFileError, Scenario, ScheduleError, dump_scenario, load_scenario
from .ga.config import PRESETS, GaConfig
from .ga.encoding import decode
from .ga.engine import run

EXIT_OK, EXIT_BAD_INPUT, EXIT_INFEASIBLE = 0, 1, 2


class UsageError(Exception):
    pass


def _grid(text: str) -> tuple[int, int]:
    try:
        cols, rows = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected COLSxROWS, got {text!r}") from None
    return cols, rows


def _load(ref: str) -> Scenario:
    """An environment file path, or the name of a bundled environment."""
    path = Path(ref)
    if path.is_file():
        try:
            return load_scenario(path)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{ref}: not valid JSON ({exc})") from None
        except (EnvironmentFileError, ScheduleError) as exc:
            raise UsageError(f"{ref}: {exc}") from None
    if ref in scenarios.BUNDLED:
        return scenarios.load_bundled(ref)
    raise UsageError(f"{ref}: no such file or bundled environment")


def _config(args) -> GaConfig:
    cfg = GaConfig(rng_seed=args.seed)
    if args.config:
        if args.config not in PRESETS:
            raise UsageError(f"unknown config {args.config!r}; choose from {', '.join(PRESETS)}")
        cfg = cfg.with_(**PRESETS[args.config])
    changes = {}
    if args.pop is not None:
        changes["population_size"] = args.pop
    if args.max_gens is not None:
        changes["max_generations"] = args.max_gens
    if args.stagnation is not None:
        changes["stagnation_limit"] = args.stagnation
    if args.penalty_c is not None:
        changes["penalty"] = args.penalty_c
    try:
        return cfg.with_(**changes)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _scenario(args) -> Scenario:
    sc = _load(args.env)
    if args.grid:
        sc = replace(sc, environment=sc.environment.with_grid(*args.grid))
    return sc


def _label(sc: Scenario, args) -> str:
    return sc.name or Path(args.env).stem


def _emit(lines: list[str]) -> None:
    sys.stdout.write("\n".join(lines) + "\n")


def cmd_plan(args) -> int:
    sc = _scenario(args)
    cfg = _config(args)
    env = sc.environment
    name = _label(sc, args)
    result = run(env, cfg)
    out = Path(args.out)
    report.write_json(out / "report.json", report.run_document(result, env, cfg, name))
    report.write_csv(out / "history.csv", ("generation", "best_cost"), report.history_rows(result))
    report.write_csv(out / "timing.csv", ("command", "seconds"), [("plan", result.seconds)])
    plotting.convergence({name: result.history}, out / "convergence.png", title=name)
    history = [decode(c, env) for _, c in result.trace] if args.history else []
    plotting.scene(env, out / "scene.png", paths=history[:-1] + [result.path], title=name)
    if args.svg:
        paths = [(p, "history") for p in history[:-1]] + [(result.path, "best")]
        (out / "path.svg").write_text(svg.render_scene(env, paths, title=name), encoding="utf-8")
    _emit(report.csv_text(("environment", "seed", "cost", "feasible", "generations_used", "best_generation"),
                          [(name, cfg.rng_seed, result.cost, result.feasible, result.generations_used,
                            result.best_generation)]).splitlines())
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    if sc.schedule is None:
        raise UsageError(f"{args.env}: no schedule in environment file")
    schedule = sc.schedule
    try:
        if args.speed is not None:
            schedule = replace(schedule, robot_speed=args.speed)
        if args.interval is not None:
            schedule = replace(schedule, update_interval=args.interval)
    except ScheduleError as exc:
        raise UsageError(str(exc)) from None
    cfg = _config(args)
    name = _label(sc, args)
    result = simulate(sc.environment, schedule, cfg, gens_per_tick=args.gens_per_tick)
    out = Path(args.out)
    report.write_json(out / "report.json", report.sim_document(result, cfg, schedule, name))
    report.write_csv(out / "trajectory.csv", ("t", "x", "y"), report.trajectory_rows(result))
    report.write_csv(out / "snapshots.csv", ("t", "env_version", "feasible", "cost", "path"),
                     report.snapshot_rows(result))
    report.write_csv(out / "timing.csv", ("command", "seconds"), [("simulate", result.seconds)])
    robot = [p for _, p in result.trajectory]
    last = result.snapshots[-1]
    plotting.scene(last.env.with_start(robot[0]), out / "scene.png", paths=[last.path], trajectory=robot, title=name)
    if args.svg:
        frames = out / "frames"
        frames.mkdir(parents=True, exist_ok=True)
        for i, snap in enumerate(result.snapshots):
            past = [p for t, p in result.trajectory if t <= snap.t]
            paths = [(past, "trajectory")] if len(past) > 1 else []
            paths.append((snap.path, "plan"))
            text = svg.render_scene(snap.env, paths, dots=past, title=f"{name} t={snap.t:g}")
            (frames / f"frame_{i:03d}.svg").write_text(text, encoding="utf-8")
    _emit(report.csv_text(("environment", "seed", "reached", "arrival_time", "total_path_length", "collisions"),
                          [(name, cfg.rng_seed, result.reached, result.arrival_time, result.total_path_length,
                            result.collisions)]).splitlines())
    return EXIT_OK if result.reached else EXIT_INFEASIBLE


def write_bench(rep: BenchReport, out: Path, title: str) -> None:
    report.write_csv(out / "runs.csv", RUN_FIELDS, [[getattr(r, f) for f in RUN_FIELDS] for r in rep.runs])
    report.write_csv(out / "summary.csv", SUMMARY_FIELDS, [[getattr(r, f) for f in SUMMARY_FIELDS] for r in rep.rows])
    timing = [[getattr(r, f) for f in TIMING_FIELDS] for r in rep.rows]
    report.write_csv(out / "timing.csv", TIMING_FIELDS, timing)
    plotting.bench_summary(rep.rows, out / "bench.png", title=title)
    plotting.runtime(rep.rows, out / "runtime.png", title=title)


def cmd_bench(args) -> int:
    cfg = _config(args)
    seeds = range(args.seed, args.seed + args.runs)
    if args.sweep == "obstacles":
        name = "unstructured"
        rep = obstacle_sweep(cfg, seeds)
    else:
        sc = _scenario(args)
        name = _label(sc, args)
        if args.sweep == "resolution":
            rep = resolution_sweep(sc.environment, cfg, seeds)
        else:
            configs = [args.config] if args.config else list(ABLATION)
            rep = ablation(sc.environment, cfg, seeds, configs)
    write_bench(rep, Path(args.out), name)
    _emit(report.csv_text(SUMMARY_FIELDS, [[getattr(r, f) for f in SUMMARY_FIELDS] for r in rep.rows]).splitlines())
    return EXIT_OK


def cmd_envs(args) -> int:
    lines = []
    for name in scenarios.names():
        sc = scenarios.load_bundled(name)
        kind = "dynamic" if sc.schedule else "static"
        lines.append(f"{name},{kind},{len(sc.environment.obstacles)}")
        if args.export:
            doc = dump_scenario(sc.environment, sc.schedule, sc.name)
            report.write_json(Path(args.export) / f"{name}.json", doc)
    _emit(["name,kind,obstacle_groups", *lines])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kbga", description="Knowledge-based genetic path planner.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default):
        sp.add_argument("env", help="environment file (JSON) or bundled environment name")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--pop", type=int, help="population size (even)")
        sp.add_argument("--max-gens", type=int)
        sp.add_argument("--stagnation", type=int, help="generations without improvement before stopping")
        sp.add_argument("--grid", type=_grid, help="grid resolution COLSxROWS")
        sp.add_argument("--penalty-c", type=float, help="collision penalty constant C")
        sp.add_argument("--config", help=f"operator preset: {', '.join(PRESETS)}")
        sp.add_argument("--out", default=out_default, help="output directory")

    sp = sub.add_parser("plan", help="plan a path in a static environment")
    common(sp, "kbga-plan")
    sp.add_argument("--svg", action="store_true", help="write path.svg")
    sp.add_argument("--history", action="store_true", help="overlay every improving best path")
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("simulate", help="follow the evolving plan through a dynamic environment")
    common(sp, "kbga-sim")
    sp.add_argument("--svg", action="store_true", help="write one SVG frame per update")
    sp.add_argument("--gens-per-tick", type=int, default=10,
                    help="generations between updates; 0 sizes it from measured generation time")
    sp.add_argument("--speed", type=float, help="override the robot speed")
    sp.add_argument("--interval", type=float, help="override the update interval")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("bench", help="repeated seeded runs: ablation or scaling sweeps")
    common(sp, "kbga-bench")
    sp.add_argument("--runs", type=int, default=20)
    sp.add_argument("--sweep", choices=("resolution", "obstacles"),
                    help="runtime sweep instead of the operator ablation")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("envs", help="list bundled environments")
    sp.add_argument("--export", metavar="DIR", help="write each bundled environment as a JSON file")
    sp.set_defaults(func=cmd_envs)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "gens_per_tick", 1) < 0:
        parser.error("--gens-per-tick must be >= 0")
    if getattr(args, "gens_per_tick", 1) == 0:
        args.gens_per_tick = None
    if getattr(args, "runs", 1) < 1:
        parser.error("--runs must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"kbga: error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
