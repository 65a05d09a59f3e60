"""Independent reference computations used to derive expected test values.

Nothing here calls into the engine: these work on a plain dense matrix.
"""

from fractions import Fraction

import numpy as np


def dense(dtmc):
    n = dtmc.num_states
    m = np.zeros((n, n))
    for s, row in enumerate(dtmc.rows):
        for t, p in row:
            m[s, t] += float(p)
    return m


def absorbing_reach(dtmc, goal, steps=20_000):
    """Reachability by powering the goal-absorbing matrix (float)."""
    m = dense(dtmc)
    for g in goal:
        m[g, :] = 0.0
        m[g, g] = 1.0
    x = np.zeros(dtmc.num_states)
    x[list(goal)] = 1.0
    return np.linalg.matrix_power(m, steps) @ x


def enumerate_bounded(dtmc, goal, start, k):
    """Exact P(reach goal within k steps) by enumerating every path prefix."""
    goal = set(goal)

    def walk(state, left):
        if state in goal:
            return Fraction(1)
        if left == 0:
            return Fraction(0)
        return sum((p * walk(t, left - 1) for t, p in dtmc.rows[state]), Fraction(0))

    return walk(start, k)


def graph_reachable(dtmc, start, goal):
    """Forward DFS: can ``start`` reach any goal state?"""
    seen, stack = {start}, [start]
    while stack:
        s = stack.pop()
        if s in goal:
            return True
        for t, _ in dtmc.rows[s]:
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return False
