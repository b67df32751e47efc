"""Compiled fast paths against the reference engine, step for step."""

import numpy as np
import pytest

from pedigree import game
from pedigree.adjacency import pedigree_adjacent
from pedigree.cycles import enumerate_histories, replay_history
from pedigree.experiments import identity_history
from pedigree.game import (
    GreedyCommonAlice,
    MoveClass,
    ScriptedAlice,
    UniformRandomAlice,
    run_game,
    trial_streams,
)
from pedigree.kernels import (
    KERNEL_MAX_HORIZON,
    mc_trace,
    mc_trials,
    pairwise_adjacency_degrees,
)

HORIZON = 60


def _reference_trace(strategy: str, seed: int, trial: int, horizon: int):
    alice_rng, bob_rng = trial_streams(seed, trial)
    if strategy == "random":
        alice = UniformRandomAlice(alice_rng)
    elif strategy == "greedy-common":
        alice = GreedyCommonAlice()
    else:
        alice = ScriptedAlice(identity_history(horizon))
    records, state = run_game(alice, bob_rng, n_max=horizon)
    return records, state


@pytest.mark.parametrize("strategy", ["random", "greedy-common", "scripted"])
def test_trace_matches_reference_engine(strategy):
    scripted = identity_history(HORIZON) if strategy == "scripted" else None
    for trial in (0, 1, 7):
        trace = mc_trace(HORIZON, strategy, seed=42, trial=trial, scripted=scripted)
        records, state = _reference_trace(strategy, 42, trial, HORIZON)
        for rec in records:
            m = rec.n
            assert trace["delta_common"][m] == rec.delta_common, (strategy, trial, m)
            assert trace["delta_components"][m] == rec.delta_components
            assert trace["isolated"][m] == int(rec.isolated_created)
            assert trace["c_move"][m] == int(rec.move_class is MoveClass.C_MOVE)
        final = trace["final"]
        assert final["final_common"] == state.num_common
        assert final["final_components"] == state.num_components
        assert final["isolated"] == sum(r.isolated_created for r in records)


def test_aggregates_do_not_depend_on_worker_count():
    kwargs = dict(window=(20, 40))
    base = mc_trials(50, "random", 3000, seed=11, workers=1, **kwargs)
    for workers in (2, 5):
        other = mc_trials(50, "random", 3000, seed=11, workers=workers, **kwargs)
        for key in base:
            assert np.array_equal(base[key], other[key]), key


def test_window_statistics_match_reference():
    seed, trial, horizon, lo, hi = 3, 123, 80, 30, 60
    res = mc_trials(horizon, "random", trial + 1, seed=seed, window=(lo, hi))
    records, _ = _reference_trace("random", seed, trial, horizon)
    in_window = [r for r in records if lo < r.n <= hi]
    assert res["window_dmoves"][trial] == sum(
        r.move_class is MoveClass.D_MOVE for r in in_window
    )
    assert res["window_t_decreased"][trial] == sum(
        r.delta_components < 0 for r in in_window
    )
    assert res["isolated"][trial] == sum(r.isolated_created for r in records)


def test_horizon_cap_is_enforced():
    with pytest.raises(ValueError):
        mc_trials(KERNEL_MAX_HORIZON + 1, "random", 1, seed=0)
    with pytest.raises(ValueError):
        mc_trace(KERNEL_MAX_HORIZON + 1, "random", seed=0, trial=0)


def test_unknown_strategy_rejected():
    with pytest.raises(KeyError):
        mc_trials(10, "clever", 1, seed=0)


@pytest.mark.parametrize("n", [5, 6])
def test_pairwise_degrees_match_reference_adjacency(n):
    histories = list(enumerate_histories(n))
    tours = [replay_history(h) for h in histories]
    degrees = pairwise_adjacency_degrees(histories, n)
    expected = np.zeros(len(tours), dtype=degrees.dtype)
    for i in range(len(tours)):
        for j in range(i + 1, len(tours)):
            if pedigree_adjacent(tours[i], tours[j]).adjacent:
                expected[i] += 1
                expected[j] += 1
    assert np.array_equal(degrees, expected)


def test_pairwise_degrees_worker_independent():
    histories = list(enumerate_histories(6))
    one = pairwise_adjacency_degrees(histories, 6, workers=1)
    many = pairwise_adjacency_degrees(histories, 6, workers=4)
    assert np.array_equal(one, many)


def test_scripted_requires_matching_horizon():
    with pytest.raises(ValueError):
        mc_trials(30, "scripted", 5, seed=0, scripted=identity_history(10))
