"""Closed-loop simulation: the robot follows the incumbent plan while the GA keeps evolving.

Time is virtual. Every ``update_interval`` seconds the robot advances along
the best path found so far, the environment steps forward, every chromosome
is re-anchored at the robot's new position, and a fixed number of
generations run before the next tick.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

from .environment import DynamicSchedule, Environment, advance_environment, environment_changed
from .ga.config import GaConfig
from .ga.encoding import decode
from .ga.engine import Individual, Population, evolve_generation, initial_population, reevaluate, _best_index, _worst_index
from .ga.evaluation import Evaluator
from .ga.operators import mutate
from .geometry import Point, Segment, collide_segment_group

P_BURST = 0.8
EPS_GOAL = 1.0
MAX_TICK_GENERATIONS = 50


class Snapshot(NamedTuple):
    t: float
    path: list[Point]
    feasible: bool
    cost: float
    env: Environment


@dataclass
class SimResult:
    trajectory: list[tuple[float, Point]]
    snapshots: list[Snapshot]
    reached: bool
    total_path_length: float
    collisions: int
    t_max: float
    gens_per_tick: int
    seconds: float = field(default=0.0, compare=False)

    @property
    def arrival_time(self) -> float | None:
        return self.trajectory[-1][0] if self.reached else None


def walk(path: Sequence[Sequence[float]], distance: float) -> tuple[list[tuple[float, Point]], int]:
    """Move ``distance`` along a polyline from its first vertex.

    Returns the points visited after the first, each with the distance at
    which it is reached (the corners passed, then the stopping point), and
    how many vertices after the first were reached.
    """
    left = distance
    x, y = path[0]
    visited: list[tuple[float, Point]] = []
    for k in range(1, len(path)):
        nx, ny = path[k]
        d = math.hypot(nx - x, ny - y)
        if d <= left:
            left -= d
            x, y = nx, ny
            visited.append((distance - left, Point(x, y)))
            continue
        f = left / d
        visited.append((distance, Point(x + f * (nx - x), y + f * (ny - y))))
        return visited, k - 1
    return visited, len(path) - 1


def trajectory_collisions(trajectory: Sequence[tuple[float, Point]], envs: Sequence[Environment]) -> int:
    """Count trajectory legs that touch an obstacle of the environment active during that leg.

    ``envs[i]`` is the snapshot in force between ``trajectory[i]`` and
    ``trajectory[i + 1]``.
    """
    bad = 0
    for (_, a), (_, b), env in zip(trajectory, trajectory[1:], envs):
        seg = Segment(a, b)
        if any(collide_segment_group(seg, g).parts for g in env.obstacles):
            bad += 1
    return bad


def _burst(pop: Population, ev: Evaluator, rng: random.Random, p_burst: float) -> Population:
    """One high-rate mutation sweep over every member except the current best."""
    elite = _best_index(pop.members)
    members = list(pop.members)
    for i, m in enumerate(members):
        if i == elite or rng.random() >= p_burst:
            continue
        c = mutate(m.chromosome, rng, ev.node_count)
        members[i] = Individual(c, ev.evaluate(c))
    best = pop.best_sofar
    top = members[_best_index(members)]
    if top.cost < best.cost:
        best = top
    return replace(pop, members=members, best_sofar=best)


def _adopt_plan(pop: Population, plan: tuple, ev: Evaluator) -> Population:
    """Make ``plan`` the incumbent and make sure the population carries it."""
    ind = Individual(plan, ev.evaluate(plan))
    members = list(pop.members)
    if all(m.chromosome != plan for m in members):
        members[_worst_index(members)] = ind
    return replace(pop, members=members, best_sofar=ind)


def simulate(env0: Environment, schedule: DynamicSchedule, cfg: GaConfig, gens_per_tick: int | None = 10,
             p_burst: float = P_BURST, eps_goal: float = EPS_GOAL, t_max: float | None = None) -> SimResult:
    """Run the robot from ``env0.start`` until it is within ``eps_goal`` of the target or time runs out.

    ``gens_per_tick=None`` sizes the per-tick budget from measured generation
    time, which ties results to the machine; pass an integer for repeatable runs.
    """
    t0 = time.perf_counter()
    dt = schedule.update_interval
    speed = schedule.robot_speed
    if t_max is None:
        t_max = 10.0 * math.dist(env0.start, env0.target) / speed
    rng = random.Random(cfg.rng_seed)

    t = 0.0
    env = advance_environment(env0, schedule, -math.inf, 0.0)
    ev = Evaluator(env, cfg.penalty_for(env))
    pop = initial_population(ev, cfg, rng)

    g_tick = gens_per_tick
    if g_tick is None:
        t_gen = time.perf_counter()
        pop = evolve_generation(pop, ev, cfg, rng)
        per_gen = max(time.perf_counter() - t_gen, 1e-6)
        g_tick = int(min(max(math.floor(dt / per_gen), 1), MAX_TICK_GENERATIONS))
    for _ in range(g_tick):
        pop = evolve_generation(pop, ev, cfg, rng)

    robot = env.start
    trajectory = [(t, robot)]
    active: list[Environment] = []
    best = pop.best_sofar
    snapshots = [Snapshot(t, decode(best.chromosome, env), best.evaluation.feasible, best.cost, env)]
    travelled = 0.0
    reached = math.dist(robot, env.target) <= eps_goal

    while not reached and t < t_max:
        best = pop.best_sofar
        plan = best.chromosome
        if best.evaluation.feasible:
            path = decode(plan, env)
            visited, passed = walk(path, speed * dt)
            plan = plan[min(passed, len(plan)):]
            for d, p in visited:
                if d > 0 and p != robot:
                    trajectory.append((t + d / speed, p))
                    active.append(env)
                    travelled += math.dist(robot, p)
                    robot = p
        if trajectory[-1][0] < t + dt and math.dist(robot, env.target) > eps_goal:
            # dot at the update instant, also when waiting
            trajectory.append((t + dt, robot))
            active.append(env)
        if math.dist(robot, env.target) <= eps_goal:
            reached = True
            break

        new_env = advance_environment(env, schedule, t, t + dt)
        t += dt
        changed = environment_changed(env, new_env)
        env = new_env.with_start(robot)
        ev.rebind(env)
        if plan != best.chromosome:
            pop = _adopt_plan(pop, plan, ev)
        pop = reevaluate(pop, ev)
        if changed and p_burst > 0:
            pop = _burst(pop, ev, rng, p_burst)
        for _ in range(g_tick):
            pop = evolve_generation(pop, ev, cfg, rng)
        best = pop.best_sofar
        snapshots.append(Snapshot(t, decode(best.chromosome, env), best.evaluation.feasible, best.cost, env))

    return SimResult(
        trajectory=trajectory,
        snapshots=snapshots,
        reached=reached,
        total_path_length=travelled,
        collisions=trajectory_collisions(trajectory, active),
        t_max=t_max,
        gens_per_tick=g_tick,
        seconds=time.perf_counter() - t0,
    )
