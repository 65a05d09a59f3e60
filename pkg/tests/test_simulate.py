
import numpy as np
import pytest

from basketcheck.engine import SolveOptions, reach_probabilities
from basketcheck.model import from_rows
from basketcheck.simulate import (estimate_reach, sample_path, step_frequencies,
                                  uniforms, wilson_interval)


def test_uniforms_range_and_determinism():
    u = uniforms(42, np.arange(10_000), 3)
    assert u.min() >= 0 and u.max() < 1
    assert np.array_equal(u, uniforms(42, np.arange(10_000), 3))
    assert not np.array_equal(u, uniforms(43, np.arange(10_000), 3))
    assert not np.array_equal(u, uniforms(42, np.arange(10_000), 4))
    # counter based: any subset gives the same draws
    assert np.array_equal(u[[5, 17]], uniforms(42, [5, 17], 3))


def test_uniforms_look_uniform():
    u = uniforms(7, np.arange(200_000), 0)
    counts, _ = np.histogram(u, bins=10, range=(0, 1))
    assert np.all(np.abs(counts / 200_000 - 0.1) < 0.005)
    assert abs(np.corrcoef(u[:-1], u[1:])[0, 1]) < 0.01


def test_absorbing_path(shop):
    path = sample_path(shop, 13, seed=5, max_steps=6)
    assert path.states == (13,) * 7
    assert path.terminated_by == "step-limit"


def test_deterministic_step(shop):
    for seed in range(10):
        assert sample_path(shop, 1, seed=seed, max_steps=1).states == (1, 2)


def test_same_seed_same_path(shop):
    a = sample_path(shop, 0, seed=11, max_steps=200, stop={13})
    assert a == sample_path(shop, 0, seed=11, max_steps=200, stop={13})
    assert a.terminated_by == "goal-hit"


def test_path_uses_stored_transitions(shop):
    for seed in range(30):
        path = sample_path(shop, 0, seed=seed, max_steps=100, stop={13})
        assert path.states[0] == 0
        for u, v in zip(path.states, path.states[1:]):
            assert v in dict(shop.rows[u])


def test_start_in_stop_set(shop):
    assert sample_path(shop, 4, seed=0, max_steps=10, stop={4}).states == (4,)


def test_estimate_matches_individual_paths(shop):
    est = estimate_reach(shop, {6}, 0, samples=200, seed=9)
    # 13 is absorbing, so stopping there cannot change whether 6 is hit
    hits = sum(sample_path(shop, 0, 9, 10_000, {6, 13}, replica=r).states[-1] == 6
               for r in range(200))
    assert est.hits == hits


def test_estimate_certain_goal(shop):
    est = estimate_reach(shop, {13}, 0, samples=10_000, max_steps=10_000, seed=1)
    assert est.estimate == 1.0
    assert est.high == 1.0 and est.low > 0.999


def test_estimate_start_in_goal(shop):
    est = estimate_reach(shop, {0}, 0, samples=50, seed=1)
    assert (est.hits, est.estimate) == (50, 1.0)


def test_estimate_contains_exact(shop):
    exact = float(reach_probabilities(shop, {6}, SolveOptions("exact")).exact[0])
    est = estimate_reach(shop, {6}, 0, samples=100_000, seed=2024)
    assert est.contains(exact)
    assert est.low <= est.estimate <= est.high


def test_estimate_deterministic(shop):
    a = estimate_reach(shop, {4}, 0, samples=5_000, seed=3)
    assert a == estimate_reach(shop, {4}, 0, samples=5_000, seed=3)


def test_censoring():
    # a two-state loop that never reaches state 2 within the step limit
    chain = from_rows([[(1, 1)], [(0, 1)], [(2, 1)]])
    est = estimate_reach(chain, {2}, 0, samples=100, max_steps=50, seed=0)
    assert (est.hits, est.censored) == (0, 100)


def test_non_goal_absorption_is_not_censoring(shop):
    est = estimate_reach(shop, {12}, 4, samples=1_000, seed=0)
    assert est.censored == 0


def test_sample_count_validation(shop):
    with pytest.raises(ValueError):
        estimate_reach(shop, {6}, 0, samples=0)


def test_wilson_interval():
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.40383, abs=1e-5)
    assert hi == pytest.approx(0.59617, abs=1e-5)
    assert wilson_interval(0, 20)[0] == 0.0
    assert wilson_interval(20, 20)[1] == 1.0


def test_step_frequencies(shop):
    freq = step_frequencies(shop, 10, 100_000, seed=0)
    assert set(freq) == {8, 9, 11}
    for state, p in {8: 0.25, 9: 0.25, 11: 0.5}.items():
        assert abs(freq[state] - p) <= 0.01
