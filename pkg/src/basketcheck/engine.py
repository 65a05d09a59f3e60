"""Reachability, transient analysis and property evaluation for DTMCs."""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BasketCheckError, SolverError
from .exact import solve_rational
from .model import Dtmc, ProbVector, satisfaction_set
from .pctl import BoundProperty, Property, bind_to

METHODS = ("exact", "power", "jacobi", "gauss-seidel")


@dataclass(frozen=True)
class SolveOptions:
    method: str = "power"
    epsilon: float = 1e-6
    max_iterations: int = 1_000_000
    convergence: str = "absolute"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.convergence not in ("absolute", "relative"):
            raise ValueError("convergence must be 'absolute' or 'relative'")

    @classmethod
    def from_env(cls, **overrides):
        """Defaults, with the method taken from ``BASKETCHECK_ENGINE`` if set."""
        method = os.environ.get("BASKETCHECK_ENGINE")
        if method and "method" not in overrides:
            overrides["method"] = method
        return cls(**{k: v for k, v in overrides.items() if v is not None})


@dataclass(frozen=True)
class QualitativeSets:
    prob0: frozenset[int]
    prob1: frozenset[int]
    unknown: frozenset[int]


def _backward_reach(dtmc, targets, through=None):
    """States that can reach ``targets``, optionally only via ``through`` states."""
    seen = set(targets)
    queue = deque(targets)
    preds = dtmc.predecessors
    while queue:
        t = queue.popleft()
        for s in preds[t]:
            if s not in seen and (through is None or s in through):
                seen.add(s)
                queue.append(s)
    return seen


def prob0(dtmc: Dtmc, goal) -> frozenset[int]:
    """States from which ``goal`` is unreachable in the transition graph."""
    return frozenset(range(dtmc.num_states)) - _backward_reach(dtmc, set(goal))


def prob1(dtmc: Dtmc, goal) -> frozenset[int]:
    """States from which ``goal`` is reached with probability one.

    A state fails this exactly when it can reach a prob0 state without
    passing through the goal.
    """
    goal = set(goal)
    everything = set(range(dtmc.num_states))
    zero = prob0(dtmc, goal)
    bad = _backward_reach(dtmc, zero, through=everything - goal)
    return frozenset(everything - bad)


def qualitative_sets(dtmc, goal) -> QualitativeSets:
    zero, one = prob0(dtmc, goal), prob1(dtmc, goal)
    unknown = frozenset(range(dtmc.num_states)) - zero - one
    return QualitativeSets(zero, one, unknown)


def reach_probabilities(dtmc: Dtmc, goal, options: SolveOptions | None = None) -> ProbVector:
    """Probability of eventually reaching ``goal`` from every state.

    Graph precomputation fixes prob0/prob1 states; the remaining states solve
    ``x = A x + b`` either exactly or by iteration from zero.
    """
    options = options or SolveOptions()
    qs = qualitative_sets(dtmc, goal)
    unknown = sorted(qs.unknown)
    local = {s: i for i, s in enumerate(unknown)}
    n = len(unknown)

    values = np.zeros(dtmc.num_states)
    values[list(qs.prob1)] = 1.0
    if options.method == "exact":
        exact = [Fraction(0)] * dtmc.num_states
        for s in qs.prob1:
            exact[s] = Fraction(1)
        if n:
            # (I - A) x = b over the unknown states
            matrix = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
            rhs = [Fraction(0)] * n
            for i, s in enumerate(unknown):
                for t, p in dtmc.rows[s]:
                    if t in local:
                        matrix[i][local[t]] -= p
                    elif t in qs.prob1:
                        rhs[i] += p
            try:
                solution = solve_rational(matrix, rhs)
            except ZeroDivisionError as err:
                raise AssertionError("singular system after prob0/prob1 restriction") from err
            for s, v in zip(unknown, solution):
                exact[s] = v
                values[s] = float(v)
        return ProbVector(values, tuple(exact), "exact", 0, 0.0)

    if n == 0:
        return ProbVector(values, None, options.method, 0, 0.0)
    rows, cols, probs, b = [], [], [], np.zeros(n)
    for i, s in enumerate(unknown):
        for t, p in dtmc.rows[s]:
            if t in local:
                rows.append(i)
                cols.append(local[t])
                probs.append(float(p))
            elif t in qs.prob1:
                b[i] += float(p)
    solver = {"power": _power, "jacobi": _jacobi, "gauss-seidel": _gauss_seidel}[options.method]
    x, iterations, residual = solver(np.array(rows, dtype=np.intp),
                                     np.array(cols, dtype=np.intp),
                                     np.array(probs), b, options)
    values[unknown] = x
    np.clip(values, 0.0, 1.0, out=values)
    return ProbVector(values, None, options.method, iterations, residual)


def _step_size(new, old, options):
    diff = np.abs(new - old)
    if options.convergence == "relative":
        scale = np.abs(new)
        diff = np.divide(diff, scale, out=diff.copy(), where=scale > 0)
    return float(diff.max()) if len(diff) else 0.0


def _power(rows, cols, probs, b, options):
    n = len(b)
    x = np.zeros(n)
    residual = 0.0
    for it in range(1, options.max_iterations + 1):
        new = np.bincount(rows, weights=probs * x[cols], minlength=n) + b
        residual = _step_size(new, x, options)
        x = new
        if residual < options.epsilon:
            return x, it, residual
    raise SolverError("power", options.max_iterations, residual)


def _jacobi(rows, cols, probs, b, options):
    n = len(b)
    diag = np.zeros(n)
    on_diag = rows == cols
    np.add.at(diag, rows[on_diag], probs[on_diag])
    rows, cols, probs = rows[~on_diag], cols[~on_diag], probs[~on_diag]
    denom = 1.0 - diag
    x = np.zeros(n)
    residual = 0.0
    for it in range(1, options.max_iterations + 1):
        new = (np.bincount(rows, weights=probs * x[cols], minlength=n) + b) / denom
        residual = _step_size(new, x, options)
        x = new
        if residual < options.epsilon:
            return x, it, residual
    raise SolverError("jacobi", options.max_iterations, residual)


def _gauss_seidel(rows, cols, probs, b, options):
    n = len(b)
    off = [[] for _ in range(n)]
    diag = [0.0] * n
    for r, c, p in zip(rows.tolist(), cols.tolist(), probs.tolist()):
        if r == c:
            diag[r] += p
        else:
            off[r].append((c, p))
    b = b.tolist()
    x = [0.0] * n
    residual = 0.0
    relative = options.convergence == "relative"
    for it in range(1, options.max_iterations + 1):
        residual = 0.0
        for i in range(n):
            new = (b[i] + sum(p * x[c] for c, p in off[i])) / (1.0 - diag[i])
            step = abs(new - x[i])
            if relative and new != 0:
                step /= abs(new)
            residual = max(residual, step)
            x[i] = new
        if residual < options.epsilon:
            return np.array(x), it, residual
    raise SolverError("gauss-seidel", options.max_iterations, residual)


def bounded_reach_probabilities(dtmc: Dtmc, goal, k: int) -> ProbVector:
    """Probability of reaching ``goal`` within ``k`` steps, for every state."""
    if k < 0:
        raise ValueError("step bound must be non-negative")
    goal = sorted(goal)
    x = np.zeros(dtmc.num_states)
    x[goal] = 1.0
    for _ in range(k):
        # goal states are absorbing, so paths are counted at their first hit
        x = dtmc.matvec(x)
        x[goal] = 1.0
    np.clip(x, 0.0, 1.0, out=x)
    return ProbVector(x, None, "bounded", k, 0.0)


def curve(dtmc: Dtmc, goal, from_state: int, k_max: int) -> list[tuple[int, float]]:
    """``[(k, P(reach goal within k steps from from_state)) for k in 0..k_max]``."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    goal = sorted(goal)
    x = np.zeros(dtmc.num_states)
    x[goal] = 1.0
    points = [(0, float(x[from_state]))]
    for k in range(1, k_max + 1):
        x = dtmc.matvec(x)
        x[goal] = 1.0
        points.append((k, min(1.0, float(x[from_state]))))
    return points


def transient_distribution(dtmc: Dtmc, n: int, initial=None) -> ProbVector:
    """Distribution after exactly ``n`` steps.

    Starts from the initial state unless ``initial`` (a distribution) is given.
    """
    if n < 0:
        raise ValueError("number of steps must be non-negative")
    if initial is None:
        dist = np.zeros(dtmc.num_states)
        dist[dtmc.init_state] = 1.0
    else:
        dist = np.asarray(initial, dtype=float).copy()
    for _ in range(n):
        dist = dtmc.vecmat(dist)
    return ProbVector(dist, None, "transient", n, 0.0)


@dataclass(frozen=True)
class VerificationResult:
    property: Property
    probabilities: ProbVector
    eval_states: tuple[int, ...]
    filtered: bool
    satisfying: frozenset[int] | None = None
    verdict: bool | None = None

    @property
    def is_query(self):
        return self.property.is_query

    @property
    def count(self):
        return None if self.satisfying is None else len(self.satisfying)

    @property
    def values(self):
        return [float(self.probabilities.values[s]) for s in self.eval_states]

    @property
    def exact_values(self):
        if self.probabilities.exact is None:
            return None
        return [self.probabilities.exact[s] for s in self.eval_states]

    @property
    def value(self):
        """The scalar result when there is a single evaluation state."""
        return self.values[0] if len(self.eval_states) == 1 else None

    @property
    def value_range(self):
        vals = self.values
        return min(vals), max(vals)

    @property
    def context(self):
        if not self.is_query:
            sat = "satisfied" if self.verdict else "not satisfied"
            where = "all filter states" if self.filtered else "the initial state"
            return f"property {sat} in {where}"
        if not self.filtered:
            return "value in the initial state"
        if len(self.eval_states) == 1:
            return "value in the filter state"
        return "range over the filter states"


def check_property(dtmc: Dtmc, prop, options: SolveOptions | None = None) -> VerificationResult:
    """Evaluate a property and decide it at the initial state or the filter states."""
    if isinstance(prop, BoundProperty):
        prop = prop.property
    else:
        bind_to(prop, dtmc)
    goal = satisfaction_set(dtmc, prop.path.target)
    if prop.path.bounded:
        probs = bounded_reach_probabilities(dtmc, goal, prop.path.step_bound)
    else:
        probs = reach_probabilities(dtmc, goal, options)

    if prop.filter is not None:
        eval_states = tuple(sorted(satisfaction_set(dtmc, prop.filter)))
        if not eval_states:
            raise BasketCheckError(f"filter of {prop} is satisfied by no state")
    else:
        eval_states = (dtmc.init_state,)

    if prop.is_query:
        return VerificationResult(prop, probs, eval_states, prop.filter is not None)

    per_state = probs.exact if probs.exact is not None else probs.values
    satisfying = frozenset(s for s in range(dtmc.num_states)
                           if prop.quantifier.holds(per_state[s]))
    verdict = all(s in satisfying for s in eval_states)
    return VerificationResult(prop, probs, eval_states, prop.filter is not None,
                              satisfying, verdict)
