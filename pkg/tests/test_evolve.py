import dataclasses
import math

import numpy as np
import pytest

from othello_league import engine
from othello_league.arch import all_straight
from othello_league.evaluation import BoardInversion, Doubled, NTupleNetwork, WpcWeights
from othello_league.evolve import (
    EsConfig,
    EsState,
    GenerationRecord,
    RunLog,
    games_per_generation,
    init_genome,
    mutate,
    run,
)
from othello_league.rng import RandomStream

# a small real topology: 10 tuples, 30 weights
_TEMPLATE = all_straight(1)


def _tiny_config(**overrides):
    base = dict(
        mu=2,
        lam=4,
        sigma=1.0,
        generations=3,
        fitness_doubles=2,
        epsilon=0.1,
        measure_interval=0,
        measure_doubles=0,
        master_seed=5,
    )
    base.update(overrides)
    return EsConfig(**base)


# ---------------------------------------------------------------------------
# configuration


def test_default_config_is_the_full_scale_setting():
    config = EsConfig()
    assert (config.mu, config.lam) == (10, 90)
    assert config.sigma == 1.0
    assert (config.init_low, config.init_high) == (-0.1, 0.1)
    assert config.generations == 5000
    assert config.fitness_doubles == 1000
    assert config.epsilon == 0.1
    assert config.measure_interval == 10
    assert config.measure_doubles == 50_000
    assert isinstance(config.perspective, BoardInversion)


def test_games_per_generation():
    assert games_per_generation(EsConfig()) == 200_000
    assert games_per_generation(_tiny_config()) == (2 + 4) * 2 * 2


def test_config_validation():
    with pytest.raises(ValueError):
        EsConfig(mu=0)
    with pytest.raises(ValueError):
        EsConfig(lam=0)
    with pytest.raises(ValueError):
        EsConfig(sigma=-0.1)
    with pytest.raises(ValueError):
        EsConfig(generations=-1)
    with pytest.raises(ValueError):
        EsConfig(fitness_doubles=0)
    with pytest.raises(ValueError):
        EsConfig(epsilon=1.1)
    with pytest.raises(ValueError):
        EsConfig(init_low=0.2, init_high=0.1)
    with pytest.raises(ValueError):
        EsConfig(perspective=Doubled(WpcWeights(np.zeros(64))))


# ---------------------------------------------------------------------------
# genome operators


def test_init_genome_range_and_determinism():
    config = EsConfig()
    a = init_genome(500, config, RandomStream(3))
    b = init_genome(500, config, RandomStream(3))
    c = init_genome(500, config, RandomStream(4))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.all(a >= -0.1) and np.all(a < 0.1)
    assert a.std() > 0.03  # spread out, not clumped


def test_mutate_statistics():
    genome = np.zeros(4000)
    mutated = mutate(genome, 0.5, RandomStream(8))
    assert abs(float(mutated.mean())) < 0.05
    assert math.isclose(float(mutated.std()), 0.5, rel_tol=0.1)


def test_mutate_zero_sigma_is_identity():
    genome = np.arange(10.0)
    assert np.array_equal(mutate(genome, 0.0, RandomStream(1)), genome)


def test_mutate_leaves_input_untouched():
    genome = np.ones(8)
    before = genome.copy()
    mutate(genome, 2.0, RandomStream(2))
    assert np.array_equal(genome, before)


# ---------------------------------------------------------------------------
# evaluation accounting


def _counting_run_match(monkeypatch):
    calls = []
    real = engine.run_match

    def counted(player_a, player_b, epsilon, n_double_games, master_seed, workers=None):
        calls.append((epsilon, n_double_games, master_seed))
        return np.zeros(2 * n_double_games, dtype=np.int8)

    monkeypatch.setattr(engine, "run_match", counted)
    return calls, real


def test_every_individual_is_evaluated_each_generation(monkeypatch):
    calls, _ = _counting_run_match(monkeypatch)
    config = _tiny_config(generations=2)
    run(_TEMPLATE, config)
    # mu + lam fitness matches per generation, no measurements
    assert len(calls) == 2 * (config.mu + config.lam)
    assert all(n == config.fitness_doubles for _, n, _ in calls)


def test_population_shares_one_fitness_seed_per_generation(monkeypatch):
    calls, _ = _counting_run_match(monkeypatch)
    run(_TEMPLATE, _tiny_config(generations=2))
    per_generation = [calls[:6], calls[6:]]
    seeds = [{seed for _, _, seed in generation} for generation in per_generation]
    assert all(len(s) == 1 for s in seeds)
    assert seeds[0] != seeds[1]  # fresh evaluation noise each generation


def test_measurement_schedule(monkeypatch):
    calls, _ = _counting_run_match(monkeypatch)
    config = _tiny_config(generations=3, measure_interval=2, measure_doubles=7)
    result = run(_TEMPLATE, config)
    # initial baseline + generations 2 (interval) and 3 (final)
    measure_calls = [c for c in calls if c[1] == 7]
    assert len(measure_calls) == 3
    assert all(epsilon == 0.1 for epsilon, _, _ in measure_calls)
    measured = [r.measured_performance for r in result.log.records]
    assert measured[0] is None
    assert measured[1] is not None and measured[2] is not None
    assert result.log.initial_performance is not None


def test_measurement_epsilon_is_fixed_even_when_training_differs(monkeypatch):
    calls, _ = _counting_run_match(monkeypatch)
    config = _tiny_config(generations=1, epsilon=0.0, measure_interval=1, measure_doubles=7)
    run(_TEMPLATE, config)
    fitness_eps = {epsilon for epsilon, n, _ in calls if n == config.fitness_doubles}
    measure_eps = {epsilon for epsilon, n, _ in calls if n == 7}
    assert fitness_eps == {0.0}
    assert measure_eps == {0.1}


# ---------------------------------------------------------------------------
# selection dynamics (real engine, tiny budgets)


def test_best_fitness_monotone_with_common_seed():
    config = _tiny_config(
        generations=4, epsilon=0.0, common_fitness_seed=99, master_seed=17
    )
    result = run(_TEMPLATE, config)
    curve = [r.best_fitness for r in result.log.records]
    assert len(curve) == 4
    for earlier, later in zip(curve, curve[1:]):
        assert later >= earlier, curve


def test_deterministic_run_and_seed_sensitivity():
    a = run(_TEMPLATE, _tiny_config())
    b = run(_TEMPLATE, _tiny_config())
    c = run(_TEMPLATE, _tiny_config(master_seed=6))
    assert np.array_equal(a.best_network.weights_flat(), b.best_network.weights_flat())
    assert a.best_fitness == b.best_fitness
    assert not np.array_equal(a.best_network.weights_flat(), c.best_network.weights_flat())


def test_resume_matches_uninterrupted_run():
    full_config = _tiny_config(generations=3)
    full = run(_TEMPLATE, full_config)

    first = run(_TEMPLATE, _tiny_config(generations=2))
    second = run(
        _TEMPLATE, _tiny_config(generations=1), state=first.state
    )
    assert second.state.generation == 3
    assert np.array_equal(
        full.best_network.weights_flat(), second.best_network.weights_flat()
    )
    assert full.best_fitness == second.best_fitness
    combined = first.log.records + second.log.records
    assert combined == full.log.records


def test_state_parents_are_not_mutated_by_continuation():
    first = run(_TEMPLATE, _tiny_config(generations=1))
    frozen = first.state.parents.copy()
    run(_TEMPLATE, _tiny_config(generations=1), state=first.state)
    assert np.array_equal(first.state.parents, frozen)


def test_zero_generations_evaluates_initial_parents():
    result = run(_TEMPLATE, _tiny_config(generations=0))
    assert result.log.records == []
    assert not math.isnan(result.best_fitness)
    assert result.state.generation == 0
    assert result.best_network.weight_count == _TEMPLATE.weight_count


def test_on_generation_callback_sees_progress():
    seen = []
    run(
        _TEMPLATE,
        _tiny_config(generations=2),
        on_generation=lambda record, state: seen.append(
            (record.generation, state.generation)
        ),
    )
    assert seen == [(1, 1), (2, 2)]


def test_run_rejects_empty_template():
    with pytest.raises(ValueError):
        run(NTupleNetwork(()), _tiny_config())


# ---------------------------------------------------------------------------
# logging


def test_run_log_csv():
    log = RunLog(
        initial_performance=0.25,
        records=[
            GenerationRecord(1, 0.5, 0.4, None),
            GenerationRecord(2, 0.625, 0.5, 0.3125),
        ],
    )
    text = log.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "generation,best_fitness,mean_fitness,measured_performance"
    assert lines[1] == "1,0.5,0.4,"
    assert lines[2] == "2,0.625,0.5,0.3125"
    assert float(lines[2].split(",")[1]) == 0.625
