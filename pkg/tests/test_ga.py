import math
import random
from collections import Counter

import pytest
from scipy.stats import chisquare

from kbga.environment import load_environment
from kbga.ga import (START, TARGET, Evaluator, GaConfig, Individual, Population, crossover, decode, delete_node, evaluate,
                     evolve_generation, improve, initial_population, is_valid, loop_removal, mutate,
                     node_to_point, point_to_node, random_chromosome, repair, run, swap_tails)
from kbga.geometry import Point, Segment
from kbga.oracle import oracle_escape_distance


def world(start, target, squares=(), grid=100):
    obstacles = [{"id": f"o{i}", "parts": [[[x0, y0], [x1, y0], [x1, y1], [x0, y1]]]}
                 for i, (x0, y0, x1, y1) in enumerate(squares)]
    return load_environment({
        "workspace": {"width": 100, "height": 100, "grid_cols": grid, "grid_rows": grid},
        "start": {"x": start[0], "y": start[1]},
        "target": {"x": target[0], "y": target[1]},
        "obstacles": obstacles,
    })


def nid(x, y, cols=100):
    return y * cols + x


EMPTY = world((10, 10), (90, 90))
FLAT = world((10, 50), (90, 50))
BLOCKED = world((0, 50), (100, 50), [(40, 40, 60, 60)])
SMALL = world((0, 50), (100, 50), [(45, 45, 55, 55)])


# --- encoding -------------------------------------------------------------

def test_node_to_point():
    ws = EMPTY.workspace
    assert node_to_point(0, ws) == (0, 0)
    assert node_to_point(88, ws) == (88, 0)
    assert node_to_point(ws.node_count - 1, ws) == (99, 99)
    with pytest.raises(ValueError):
        node_to_point(ws.node_count, ws)
    coarse = world((10, 10), (90, 90), grid=8).workspace
    assert node_to_point(8 * 8 - 1, coarse) == (7 * 100 / 8, 7 * 100 / 8)
    assert point_to_node(node_to_point(4321, ws), ws) == 4321


def test_decode():
    assert decode((), EMPTY) == [EMPTY.start, EMPTY.target]
    assert decode((nid(50, 50),), EMPTY) == [EMPTY.start, (50, 50), EMPTY.target]
    assert len(decode((1, 2, 3), EMPTY)) == 5


def test_random_chromosome():
    rng = random.Random(1)
    lengths = Counter(len(random_chromosome(rng, EMPTY, n_max=10)) for _ in range(10_000))
    assert set(lengths) == set(range(1, 7))
    tiny = world((10, 10), (90, 90), grid=2)
    for _ in range(500):
        c = random_chromosome(rng, tiny)
        assert all(0 <= n < 4 for n in c) and is_valid(c, tiny.workspace, 10)
    assert random_chromosome(random.Random(5), EMPTY) == random_chromosome(random.Random(5), EMPTY)


# --- evaluation -----------------------------------------------------------

def test_evaluate_straight_line():
    e = evaluate((), EMPTY)
    assert e.feasible and e.cost == pytest.approx(math.sqrt(12800))


def test_evaluate_penalised_segment():
    e = evaluate((), BLOCKED)
    assert not e.feasible and e.infeasible_segments == (0,)
    assert e.betas[0] == pytest.approx(10.0, abs=1e-9)
    assert e.cost == pytest.approx(100 + 10 * 200)
    seg = Segment(Point(0, 50), Point(100, 50))
    assert abs(e.betas[0] - oracle_escape_distance(seg, BLOCKED.obstacles[0], 0)) <= 0.02


def test_feasible_cost_is_length():
    c = (nid(50, 70), nid(70, 70))
    e = evaluate(c, BLOCKED)
    pts = decode(c, BLOCKED)
    assert e.feasible
    assert e.cost == pytest.approx(sum(math.dist(a, b) for a, b in zip(pts, pts[1:])), rel=1e-12)
    assert e.betas == (0.0, 0.0, 0.0)


def test_grazing_segment_is_charged():
    # runs exactly along the top edge: zero escape depth but still a hit
    env = world((0, 60), (100, 60), [(40, 40, 60, 60)])
    e = evaluate((), env)
    assert not e.feasible and e.betas[0] == pytest.approx(math.sqrt(2))


def test_evaluator_rebind_keeps_interior_segments():
    ev = Evaluator(BLOCKED)
    c = (nid(50, 70),)
    before = ev.evaluate(c)
    moved = BLOCKED.with_start(Point(10, 50))
    ev.rebind(moved)
    after = ev.evaluate(c)
    assert after.seg_lengths[1] == before.seg_lengths[1]
    assert after.seg_lengths[0] == pytest.approx(math.dist((10, 50), (50, 70)))


# --- operators ------------------------------------------------------------

def test_swap_tails_example():
    a, b, c, d, e = 1, 2, 3, 4, 5
    assert swap_tails((a, b, c), (d, e), 0, 0) == ((a, e), (d, b, c))
    assert loop_removal((a, b, c)) == (a, b, c)


def test_loop_removal():
    a, b, c, x, y = 1, 2, 3, 8, 9
    assert loop_removal((a, b, x, y, b, c)) == (a, b, c)
    assert loop_removal((a, a)) == (a,)
    assert loop_removal((a, b, a, b)) == (a, b)
    assert loop_removal(()) == ()


def test_crossover_keeps_genes_from_parents():
    rng = random.Random(3)
    for _ in range(200):
        p1 = random_chromosome(rng, EMPTY)
        p2 = random_chromosome(rng, EMPTY)
        c1, c2 = crossover(p1, p2, rng)
        assert set(c1) | set(c2) <= set(p1) | set(p2)
        assert len(set(c1)) == len(c1) and len(set(c2)) == len(c2)


def test_mutate_uniform_over_absent_nodes():
    rng = random.Random(11)
    counts = Counter(mutate((0,), rng, 4) for _ in range(10_000))
    assert set(counts) == {(1,), (2,), (3,)}
    assert chisquare(list(counts.values())).pvalue > 0.01


def test_mutate_edge_cases():
    assert mutate((0, 1, 2), random.Random(0), 4) in {(3, 1, 2), (0, 3, 2), (0, 1, 3)}
    assert mutate((0, 1, 2), random.Random(9), 4) == mutate((0, 1, 2), random.Random(9), 4)
    assert len(mutate((), random.Random(0), 4)) == 1


def test_repair_detours_around_square():
    cfg = GaConfig()
    ev = Evaluator(SMALL)
    e = ev.evaluate(())
    out = repair((), e, ev, cfg, random.Random(0))
    after = ev.evaluate(out)
    assert len(out) == 1 and after.feasible and after.cost < e.cost


def test_repair_guards():
    cfg = GaConfig(n_max=2)
    ev = Evaluator(SMALL)
    feasible = (nid(50, 70),)
    assert repair(feasible, ev.evaluate(feasible), ev, cfg, random.Random(0)) == feasible
    full = (nid(20, 50), nid(80, 50))
    assert repair(full, ev.evaluate(full), ev, cfg, random.Random(0)) == full


def test_delete_node():
    ev = Evaluator(FLAT)
    assert delete_node((nid(50, 50),), ev, random.Random(0)) == (nid(50, 50),)  # collinear: cost unchanged
    assert delete_node((nid(50, 90),), ev, random.Random(0)) == ()
    blocked = Evaluator(BLOCKED)
    assert delete_node((nid(50, 80),), blocked, random.Random(0)) == (nid(50, 80),)


def test_improve():
    cfg = GaConfig()
    ev = Evaluator(FLAT)
    c = (nid(50, 51),)
    out = improve(c, ev, cfg, random.Random(0))
    # every node on the S-T row ties at length 80; the smallest id wins
    assert out == (nid(49, 50),) and ev.evaluate(out).cost < ev.evaluate(c).cost
    assert improve((nid(50, 50),), ev, cfg, random.Random(0)) == (nid(50, 50),)
    corner = improve((0,), ev, cfg, random.Random(0))
    assert corner in {(1,), (100,), (101,)}  # the clamp leaves only in-grid neighbours


# --- engine ---------------------------------------------------------------

def test_elitism_keeps_optimum():
    cfg = GaConfig(population_size=10)
    ev = Evaluator(EMPTY)
    rng = random.Random(0)
    opt = Individual((), ev.evaluate(()))
    pop = Population([opt] * 10, opt)
    for _ in range(20):
        pop = evolve_generation(pop, ev, cfg, rng)
        assert pop.best_sofar.cost == opt.cost
        assert min(m.cost for m in pop.members) == opt.cost


def test_selection_only_converges():
    cfg = GaConfig(population_size=20, p_mutation=0, p_crossover=0, p_repair=0, p_deletion=0, p_improvement=0)
    ev = Evaluator(BLOCKED)
    rng = random.Random(4)
    pop = initial_population(ev, cfg, rng)
    diverse = len({m.chromosome for m in pop.members})
    best = pop.best_sofar.cost
    for _ in range(60):
        pop = evolve_generation(pop, ev, cfg, rng)
        assert pop.best_sofar.cost <= best
        best = pop.best_sofar.cost
    assert len({m.chromosome for m in pop.members}) < diverse
    assert len({m.chromosome for m in pop.members}) <= 2


def test_evolve_is_deterministic():
    cfg = GaConfig(population_size=16)

    def go():
        ev = Evaluator(BLOCKED)
        rng = random.Random(42)
        pop = initial_population(ev, cfg, rng)
        for _ in range(5):
            pop = evolve_generation(pop, ev, cfg, rng)
        return pop

    assert go() == go()


def test_run_empty_world():
    res = run(EMPTY, GaConfig(rng_seed=7, max_generations=200))
    assert res.feasible and res.cost == pytest.approx(math.sqrt(12800), rel=0.01)
    assert res.generations_used <= 200
    assert len(res.history) == res.generations_used + 1
    assert all(b <= a for a, b in zip(res.history, res.history[1:]))
    assert res.trace[-1][1] == res.chromosome


def test_run_single_square_short():
    res = run(BLOCKED, GaConfig(rng_seed=1))
    assert res.feasible
    assert res.cost == pytest.approx(2 * math.sqrt(1700) + 20, rel=0.05)


def test_config_validation():
    with pytest.raises(ValueError):
        GaConfig(population_size=7)
    with pytest.raises(ValueError):
        GaConfig(p_mutation=1.5)
    with pytest.raises(ValueError):
        GaConfig(tournament_size=0)


def test_start_target_sentinels():
    ev = Evaluator(EMPTY)
    assert ev.point(START) == EMPTY.start and ev.point(TARGET) == EMPTY.target
