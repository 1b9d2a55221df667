from __future__ import annotations

from dataclasses import asdict, dataclass, replace

from ..environment import Environment


@dataclass(frozen=True)
class GaConfig:
    """GA knobs. ``penalty=None`` means workspace width + height."""

    population_size: int = 50
    p_mutation: float = 0.2
    p_crossover: float = 0.9
    p_repair: float = 0.9
    p_deletion: float = 0.9
    p_improvement: float = 0.9
    tournament_size: int = 2
    penalty: float | None = None
    n_max: int = 10
    max_generations: int = 500
    stagnation_limit: int = 100
    improvement_radius: int = 1
    repair_band: int = 2
    rng_seed: int = 0
    max_initial: int = 6

    def __post_init__(self):
        if self.population_size < 2 or self.population_size % 2:
            raise ValueError("population_size must be an even number >= 2")
        for name in ("p_mutation", "p_crossover", "p_repair", "p_deletion", "p_improvement"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if not 1 <= self.tournament_size <= self.population_size:
            raise ValueError("tournament_size must be in [1, population_size]")
        if self.penalty is not None and not self.penalty > 0:
            raise ValueError("penalty must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.max_generations < 0 or self.stagnation_limit < 1:
            raise ValueError("max_generations must be >= 0 and stagnation_limit >= 1")
        if self.improvement_radius < 1 or self.repair_band < 1:
            raise ValueError("improvement_radius and repair_band must be >= 1")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")
        if self.max_initial < 1:
            raise ValueError("max_initial must be >= 1")

    def penalty_for(self, env: Environment) -> float:
        if self.penalty is not None:
            return float(self.penalty)
        return float(env.workspace.width + env.workspace.height)

    def with_(self, **changes) -> "GaConfig":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)


# operator mixes used by the ablation study
PRESETS = {
    "full": {},
    "xo-mut-only": dict(p_mutation=0.5, p_repair=0.0, p_deletion=0.0, p_improvement=0.0),
    "specialized-only": dict(p_mutation=0.0, p_crossover=0.0),
}
