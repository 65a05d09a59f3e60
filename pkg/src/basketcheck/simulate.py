"""Monte Carlo path sampling and statistical reachability estimates.

Randomness is counter based: the uniform used by replication ``r`` at step
``t`` is a hash of ``(seed, r, t)``.  Any subset of replications can be
simulated in any order, serially or vectorised, with identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_STEP = np.uint64(0xD1B54A32D192ED69)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

Z95 = NormalDist().inv_cdf(0.975)


def _mix(z):
    # splitmix64 finaliser
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, replicas, step: int) -> np.ndarray:
    """Uniform [0, 1) draws for the given replication ids at one step."""
    replicas = np.asarray(replicas, dtype=np.uint64)
    with np.errstate(over="ignore"):
        key = _mix(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) * _GAMMA + _GAMMA)
        z = _mix(key ^ (replicas * _GAMMA))
        z = _mix(z + np.uint64(step + 1) * _STEP)
    return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


class _Sampler:
    """Padded per-state cumulative tables for vectorised successor lookup."""

    def __init__(self, dtmc):
        width = max(len(row) for row in dtmc.rows)
        n = dtmc.num_states
        self.targets = np.zeros((n, width), dtype=np.intp)
        self.cumulative = np.full((n, width), 2.0)
        absorbing = np.zeros(n, dtype=bool)
        for s, row in enumerate(dtmc.rows):
            acc = 0.0
            for j, (t, p) in enumerate(row):
                acc += float(p)
                self.targets[s, j] = t
                self.cumulative[s, j] = acc
            # guard against rounding leaving a gap just below 1
            self.cumulative[s, len(row) - 1] = 2.0
            self.targets[s, len(row):] = row[-1][0]
            absorbing[s] = len(row) == 1 and row[0][0] == s
        self.absorbing = absorbing

    def step(self, states, u):
        choice = (u[:, None] >= self.cumulative[states]).sum(axis=1)
        return self.targets[states, choice]


@dataclass(frozen=True)
class Path:
    states: tuple[int, ...]
    terminated_by: str  # "goal-hit" or "step-limit"

    def __len__(self):
        return len(self.states) - 1


def sample_path(dtmc, start: int, seed: int, max_steps: int = 10_000,
                stop=frozenset(), replica: int = 0) -> Path:
    """Draw one path from ``start`` until it enters ``stop`` or runs ``max_steps`` steps."""
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    sampler = _Sampler(dtmc)
    states = [start]
    if start in stop:
        return Path((start,), "goal-hit")
    current = np.array([start], dtype=np.intp)
    ids = np.array([replica], dtype=np.uint64)
    for t in range(max_steps):
        current = sampler.step(current, uniforms(seed, ids, t))
        states.append(int(current[0]))
        if states[-1] in stop:
            return Path(tuple(states), "goal-hit")
    return Path(tuple(states), "step-limit")


def wilson_interval(hits: int, samples: int, z: float = Z95) -> tuple[float, float]:
    p = hits / samples
    z2 = z * z
    denom = 1 + z2 / samples
    centre = (p + z2 / (2 * samples)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / samples + z2 / (4 * samples * samples))
    return max(0.0, min(centre - half, p)), min(1.0, max(centre + half, p))


@dataclass(frozen=True)
class ReachEstimate:
    hits: int
    samples: int
    low: float
    high: float
    seed: int
    censored: int = 0

    @property
    def estimate(self):
        return self.hits / self.samples

    def contains(self, value):
        return self.low <= value <= self.high


def estimate_reach(dtmc, goal, start: int, samples: int, max_steps: int = 10_000,
                   seed: int = 0) -> ReachEstimate:
    """Estimate the probability of reaching ``goal`` from ``start``.

    Replication ``r`` follows exactly the path ``sample_path(..., replica=r)``
    would draw.  A replication stuck in a non-goal absorbing state can never
    hit, so it is retired early as a miss.  Paths still running after
    ``max_steps`` are misses too and are reported as ``censored``.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    goal_mask = np.zeros(dtmc.num_states, dtype=bool)
    goal_mask[list(goal)] = True
    if goal_mask[start]:
        lo, hi = wilson_interval(samples, samples)
        return ReachEstimate(samples, samples, lo, hi, seed)
    sampler = _Sampler(dtmc)
    dead = sampler.absorbing & ~goal_mask
    ids = np.arange(samples, dtype=np.uint64)
    states = np.full(samples, start, dtype=np.intp)
    hits = 0
    for t in range(max_steps):
        if not len(ids):
            break
        states = sampler.step(states, uniforms(seed, ids, t))
        hit = goal_mask[states]
        hits += int(hit.sum())
        alive = ~(hit | dead[states])
        ids, states = ids[alive], states[alive]
    lo, hi = wilson_interval(hits, samples)
    return ReachEstimate(hits, samples, lo, hi, seed, censored=len(ids))


def step_frequencies(dtmc, state: int, samples: int, seed: int = 0) -> dict[int, float]:
    """Empirical one-step successor frequencies out of ``state``."""
    sampler = _Sampler(dtmc)
    ids = np.arange(samples, dtype=np.uint64)
    nxt = sampler.step(np.full(samples, state, dtype=np.intp), uniforms(seed, ids, 0))
    counts = np.bincount(nxt, minlength=dtmc.num_states)
    return {s: c / samples for s, c in enumerate(counts.tolist()) if c}
