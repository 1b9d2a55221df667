"""Generational loop: tournament selection, operators, elitism and best-so-far tracking."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import NamedTuple

from ..environment import Environment
from ..geometry import Point
from .config import GaConfig
from .encoding import Chromosome, decode, random_chromosome
from .evaluation import Evaluator, PathEvaluation
from .operators import crossover, delete_node, improve, mutate, repair


class Individual(NamedTuple):
    chromosome: Chromosome
    evaluation: PathEvaluation

    @property
    def cost(self) -> float:
        return self.evaluation.cost


@dataclass
class Population:
    members: list[Individual]
    best_sofar: Individual
    generation: int = 0
    stagnation: int = 0
    best_generation: int = 0


@dataclass
class RunResult:
    path: list[Point]
    cost: float
    feasible: bool
    generations_used: int
    history: list[float]
    best_generation: int
    chromosome: Chromosome
    evaluation: PathEvaluation
    trace: list[tuple[int, Chromosome]] = field(default_factory=list)  # (generation, new best)
    seconds: float = field(default=0.0, compare=False)


def _best_index(members: list[Individual]) -> int:
    best = 0
    for i in range(1, len(members)):
        if members[i].evaluation.cost < members[best].evaluation.cost:
            best = i
    return best


def _worst_index(members: list[Individual]) -> int:
    worst = 0
    for i in range(1, len(members)):
        if members[i].evaluation.cost > members[worst].evaluation.cost:
            worst = i
    return worst


def initial_population(ev: Evaluator, cfg: GaConfig, rng: random.Random) -> Population:
    members = []
    for _ in range(cfg.population_size):
        c = random_chromosome(rng, ev.env, cfg.n_max, cfg.max_initial)
        members.append(Individual(c, ev.evaluate(c)))
    return Population(members, members[_best_index(members)])


def reevaluate(pop: Population, ev: Evaluator) -> Population:
    """Rescore every member and best_sofar against ``ev``'s current environment."""
    members = [Individual(m.chromosome, ev.evaluate(m.chromosome)) for m in pop.members]
    best = Individual(pop.best_sofar.chromosome, ev.evaluate(pop.best_sofar.chromosome))
    top = members[_best_index(members)]
    if top.cost < best.cost:
        best = top
    return Population(members, best, pop.generation, 0, pop.generation)


def tournament(members: list[Individual], k: int, rng: random.Random) -> int:
    picks = rng.sample(range(len(members)), k)
    return min(picks, key=lambda i: (members[i].evaluation.cost, i))


def offspring(c: Chromosome, ev: Evaluator, cfg: GaConfig, rng: random.Random) -> Individual:
    """Mutation followed by the knowledge-gated specialised operators."""
    if rng.random() < cfg.p_mutation:
        c = mutate(c, rng, ev.node_count)
    e = ev.evaluate(c)
    if not e.feasible and cfg.p_repair > 0 and rng.random() < cfg.p_repair:
        c = repair(c, e, ev, cfg, rng)
        e = ev.evaluate(c)
    if c and cfg.p_deletion > 0 and rng.random() < cfg.p_deletion:
        c = delete_node(c, ev, rng, e)
        e = ev.evaluate(c)
    if c and e.feasible and cfg.p_improvement > 0 and rng.random() < cfg.p_improvement:
        c = improve(c, ev, cfg, rng, e)
        e = ev.evaluate(c)
    return Individual(c, e)


def evolve_generation(pop: Population, ev: Evaluator, cfg: GaConfig, rng: random.Random) -> Population:
    parents = pop.members
    k = cfg.tournament_size
    children: list[Individual] = []
    for _ in range(cfg.population_size // 2):
        a = parents[tournament(parents, k, rng)].chromosome
        b = parents[tournament(parents, k, rng)].chromosome
        if rng.random() < cfg.p_crossover:
            a, b = crossover(a, b, rng, cfg.n_max)
        children.append(offspring(a, ev, cfg, rng))
        children.append(offspring(b, ev, cfg, rng))
    children[_worst_index(children)] = parents[_best_index(parents)]

    generation = pop.generation + 1
    top = children[_best_index(children)]
    if top.cost < pop.best_sofar.cost:
        return Population(children, top, generation, 0, generation)
    return Population(children, pop.best_sofar, generation, pop.stagnation + 1, pop.best_generation)


def run(env: Environment, cfg: GaConfig, evaluator: Evaluator | None = None) -> RunResult:
    t0 = time.perf_counter()
    ev = evaluator if evaluator is not None else Evaluator(env, cfg.penalty_for(env))
    ev.rebind(env)
    rng = random.Random(cfg.rng_seed)
    pop = initial_population(ev, cfg, rng)
    history = [pop.best_sofar.cost]
    trace = [(0, pop.best_sofar.chromosome)]
    while pop.generation < cfg.max_generations and pop.stagnation < cfg.stagnation_limit:
        pop = evolve_generation(pop, ev, cfg, rng)
        history.append(pop.best_sofar.cost)
        if pop.stagnation == 0:
            trace.append((pop.generation, pop.best_sofar.chromosome))
    best = pop.best_sofar
    return RunResult(
        path=decode(best.chromosome, env),
        cost=best.cost,
        feasible=best.evaluation.feasible,
        generations_used=pop.generation,
        history=history,
        best_generation=pop.best_generation,
        chromosome=best.chromosome,
        evaluation=best.evaluation,
        trace=trace,
        seconds=time.perf_counter() - t0,
    )
