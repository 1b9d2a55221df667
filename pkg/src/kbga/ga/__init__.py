"""Knowledge-based genetic path planner."""
from .config import PRESETS, GaConfig
from .encoding import START, TARGET, decode, is_valid, loop_removal, node_to_point, point_to_node, random_chromosome
from .engine import Individual, Population, RunResult, evolve_generation, initial_population, reevaluate, run
from .evaluation import Evaluator, PathEvaluation, SegmentCost
from .operators import crossover, delete_node, improve, mutate, repair, swap_tails


def evaluate(c, env, cfg: GaConfig | None = None) -> PathEvaluation:
    """One-off evaluation; prefer an :class:`Evaluator` for repeated scoring."""
    cfg = cfg or GaConfig()
    return Evaluator(env, cfg.penalty_for(env)).evaluate(c)
