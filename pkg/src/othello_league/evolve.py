"""Evolution-strategy training of n-tuple network weights.

A (mu + lambda) ES over the flat weight vector of a fixed topology: each
generation every parent spawns offspring by adding Gaussian noise, the whole
population (parents included) is re-evaluated from scratch against the
standard heuristic, and the best mu individuals survive.  Fitness is the mean
score over ``fitness_doubles`` double games at the league epsilon; because
fitness is stochastic, parents must re-earn their place every generation.

All randomness is drawn from substreams chained off the master seed by role
and absolute generation index, so a resumed run replays exactly like an
uninterrupted one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from othello_league import engine
from othello_league.evaluation import (
    BoardInversion,
    Doubled,
    NTupleNetwork,
    Perspective,
    Player,
)
from othello_league.league import MatchConfig, PerformanceEstimate, performance, swh_player
from othello_league.rng import RandomStream, chain_seed

__all__ = [
    "EsConfig",
    "EsResult",
    "EsState",
    "GenerationRecord",
    "RunLog",
    "games_per_generation",
    "init_genome",
    "mutate",
    "run",
]

# Substream roles hanging off the master seed.
_INIT = 0
_MUTATE = 1
_FITNESS = 2
_MEASURE = 3


@dataclass(frozen=True)
class EsConfig:
    """Training run parameters; the defaults are the full-scale settings."""

    mu: int = 10
    lam: int = 90
    sigma: float = 1.0
    init_low: float = -0.1
    init_high: float = 0.1
    generations: int = 5000
    fitness_doubles: int = 1000
    epsilon: float = 0.1
    measure_interval: int = 10
    measure_doubles: int = 50_000
    master_seed: int = 0
    perspective: Perspective = field(default_factory=BoardInversion)
    common_fitness_seed: int | None = None
    workers: int | None = None

    def __post_init__(self):
        if self.mu < 1 or self.lam < 1:
            raise ValueError("mu and lam must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")
        if self.fitness_doubles < 1:
            raise ValueError("fitness_doubles must be positive")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.init_high < self.init_low:
            raise ValueError("empty init range")
        if isinstance(self.perspective, Doubled):
            raise ValueError(
                "doubled perspective is not trainable here: it would need a "
                "second weight vector outside the genome"
            )


def games_per_generation(config: EsConfig) -> int:
    """Fitness games played per generation (measurements excluded)."""
    return (config.mu + config.lam) * config.fitness_doubles * 2


def init_genome(n_weights: int, config: EsConfig, rng: RandomStream) -> np.ndarray:
    low, high = config.init_low, config.init_high
    return np.array([low + rng.uniform() * (high - low) for _ in range(n_weights)])


def mutate(genome: np.ndarray, sigma: float, rng: RandomStream) -> np.ndarray:
    """Fresh genome with independent N(0, sigma^2) noise on every weight."""
    noise = np.array([rng.gauss() for _ in range(genome.shape[0])])
    return genome + sigma * noise


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    measured_performance: float | None


@dataclass
class RunLog:
    """Per-generation curve plus the pre-training baseline measurement."""

    initial_performance: float | None
    records: list[GenerationRecord] = field(default_factory=list)

    CSV_HEADER = "generation,best_fitness,mean_fitness,measured_performance"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.records:
            measured = "" if r.measured_performance is None else repr(r.measured_performance)
            lines.append(f"{r.generation},{r.best_fitness!r},{r.mean_fitness!r},{measured}")
        return "\n".join(lines) + "\n"


@dataclass
class EsState:
    """Everything needed to continue a run: the surviving parents and the
    index of the last completed generation."""

    generation: int
    parents: np.ndarray  # (mu, n_weights)


@dataclass
class EsResult:
    best_network: NTupleNetwork
    best_fitness: float
    log: RunLog
    state: EsState


class _Evaluation:
    """Fitness and measurement plumbing for one run."""

    def __init__(self, template: NTupleNetwork, config: EsConfig):
        self.template = template
        self.config = config
        self.opponent = engine.pack_player(swh_player())
        self.swh = swh_player()

    def player(self, genome: np.ndarray) -> Player:
        return Player(self.template.with_weights(genome), self.config.perspective)

    def fitness(self, genomes: Sequence[np.ndarray], seed: int) -> np.ndarray:
        config = self.config
        out = np.zeros(len(genomes))
        for i, genome in enumerate(genomes):
            codes = engine.run_match(
                engine.pack_player(self.player(genome)),
                self.opponent,
                config.epsilon,
                config.fitness_doubles,
                seed,
                workers=config.workers,
            )
            out[i] = PerformanceEstimate.from_outcome_codes(
                codes, config.fitness_doubles
            ).mean_score
        return out

    def measure(self, genome: np.ndarray, seed: int) -> float:
        """League measurement: always epsilon 0.1, the fixed yardstick."""
        config = self.config
        estimate = performance(
            self.player(genome),
            self.swh,
            MatchConfig(config.measure_doubles, 0.1, seed),
            workers=config.workers,
        )
        return estimate.mean_score


def _initial_state(template: NTupleNetwork, config: EsConfig) -> EsState:
    n_weights = template.weight_count
    parents = np.stack(
        [
            init_genome(n_weights, config, RandomStream(chain_seed(config.master_seed, _INIT, i)))
            for i in range(config.mu)
        ]
    )
    return EsState(generation=0, parents=parents)


def run(
    template: NTupleNetwork,
    config: EsConfig,
    on_generation: Callable[[GenerationRecord, EsState], None] | None = None,
    state: EsState | None = None,
) -> EsResult:
    """Train weights for ``template``'s topology; returns the fittest
    individual of the final generation.

    Pass a previous :class:`EsState` to continue a run; generation indices
    keep counting from where it stopped and the combined trajectory is
    identical to a single longer run.
    """
    if template.weight_count == 0:
        raise ValueError("template has no weights to train")
    evaluation = _Evaluation(template, config)
    fresh = state is None
    if fresh:
        state = _initial_state(template, config)
    measure_on = config.measure_doubles > 0 and config.measure_interval > 0
    if fresh and measure_on:
        initial = evaluation.measure(state.parents[0], chain_seed(config.master_seed, _MEASURE, 0))
    else:
        initial = None
    log = RunLog(initial_performance=initial)

    parents = [np.array(g) for g in state.parents]
    best_genome = parents[0]
    best_fitness = float("nan")
    final_generation = state.generation + config.generations
    for generation in range(state.generation + 1, final_generation + 1):
        children = []
        for j in range(config.lam):
            rng = RandomStream(chain_seed(config.master_seed, _MUTATE, generation, j))
            children.append(mutate(parents[j % config.mu], config.sigma, rng))
        population = parents + children
        if config.common_fitness_seed is not None:
            fitness_seed = config.common_fitness_seed
        else:
            fitness_seed = chain_seed(config.master_seed, _FITNESS, generation)
        fitness = evaluation.fitness(population, fitness_seed)
        # stable sort, parents first in the population: on exact ties the
        # incumbent survives
        order = np.argsort(-fitness, kind="stable")
        parents = [population[i] for i in order[: config.mu]]
        best_genome = population[order[0]]
        best_fitness = float(fitness[order[0]])

        measured = None
        last = generation == final_generation
        if measure_on and (generation % config.measure_interval == 0 or last):
            measured = evaluation.measure(
                best_genome, chain_seed(config.master_seed, _MEASURE, generation)
            )
        record = GenerationRecord(
            generation=generation,
            best_fitness=best_fitness,
            mean_fitness=float(np.mean(fitness)),
            measured_performance=measured,
        )
        log.records.append(record)
        state = EsState(generation=generation, parents=np.stack(parents))
        if on_generation is not None:
            on_generation(record, state)

    if config.generations == 0:
        # no mutation step requested: evaluate the starting parents once
        fitness_seed = (
            config.common_fitness_seed
            if config.common_fitness_seed is not None
            else chain_seed(config.master_seed, _FITNESS, 0)
        )
        fitness = evaluation.fitness(parents, fitness_seed)
        best_index = int(np.argmax(fitness))
        best_genome = parents[best_index]
        best_fitness = float(fitness[best_index])

    return EsResult(
        best_network=template.with_weights(best_genome),
        best_fitness=best_fitness,
        log=log,
        state=state,
    )
