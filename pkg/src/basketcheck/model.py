"""Explicit-state DTMC representation.

States are numbered by a mixed-radix encoding of variable valuations: the
first declared variable varies slowest, the last one fastest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BasketCheckError, EvalError
from .expr import Expr, eval_expr

ROW_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class VariableDecl:
    name: str
    low: int
    high: int
    init: int

    def __post_init__(self):
        if self.high < self.low:
            raise BasketCheckError(
                f"variable {self.name} has an empty range [{self.low}..{self.high}]")
        if not self.low <= self.init <= self.high:
            raise BasketCheckError(
                f"initial value {self.init} of {self.name} is outside "
                f"[{self.low}..{self.high}]")

    @property
    def size(self):
        return self.high - self.low + 1


@dataclass(frozen=True)
class StateSpace:
    variables: tuple[VariableDecl, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))

    @property
    def size(self) -> int:
        return math.prod(v.size for v in self.variables)

    @property
    def names(self):
        return tuple(v.name for v in self.variables)

    def valuation_to_index(self, valuation: Mapping[str, int]) -> int:
        unknown = set(valuation) - set(self.names)
        if unknown:
            raise BasketCheckError(f"unknown variable {sorted(unknown)[0]}")
        index = 0
        for var in self.variables:
            if var.name not in valuation:
                raise BasketCheckError(f"missing value for variable {var.name}")
            value = valuation[var.name]
            if not var.low <= value <= var.high:
                raise BasketCheckError(
                    f"{var.name}={value} is outside [{var.low}..{var.high}]")
            index = index * var.size + (value - var.low)
        return index

    def index_to_valuation(self, index: int) -> dict[str, int]:
        if not 0 <= index < self.size:
            raise BasketCheckError(f"state index {index} out of range")
        values = {}
        for var in reversed(self.variables):
            index, digit = divmod(index, var.size)
            values[var.name] = var.low + digit
        return {v.name: values[v.name] for v in self.variables}

    def valuations(self):
        """All valuations in index order."""
        return [self.index_to_valuation(i) for i in range(self.size)]

    def describe(self, index):
        val = self.index_to_valuation(index)
        return "(" + ",".join(f"{k}={v}" for k, v in val.items()) + ")"


def valuation_to_index(space, valuation):
    return space.valuation_to_index(valuation)


def index_to_valuation(space, index):
    return space.index_to_valuation(index)


def _as_fraction(p):
    if isinstance(p, float):
        # the shortest repr is the decimal the user most likely meant
        return Fraction(repr(p))
    return Fraction(p)


@dataclass(frozen=True)
class Dtmc:
    """A finite DTMC.

    ``rows[s]`` lists ``(target, probability)`` pairs with exact rational
    probabilities.  ``labels`` maps label names to sets of state indices and
    ``constants`` holds model constants that state formulas may mention.
    Construction does not check stochasticity; see :func:`validate`.
    """

    space: StateSpace
    init_state: int
    rows: tuple[tuple[tuple[int, Fraction], ...], ...]
    labels: Mapping[str, frozenset[int]] = field(default_factory=dict)
    constants: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        rows = tuple(tuple((int(t), _as_fraction(p)) for t, p in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels",
                           {k: frozenset(v) for k, v in self.labels.items()})
        object.__setattr__(self, "constants", dict(self.constants))

    @property
    def num_states(self) -> int:
        return len(self.rows)

    @property
    def num_transitions(self) -> int:
        return sum(len(row) for row in self.rows)

    @cached_property
    def arrays(self):
        """Coordinate-form float arrays ``(sources, targets, probabilities)``."""
        src, dst, prob = [], [], []
        for s, row in enumerate(self.rows):
            for t, p in row:
                src.append(s)
                dst.append(t)
                prob.append(float(p))
        return (np.array(src, dtype=np.intp), np.array(dst, dtype=np.intp),
                np.array(prob, dtype=float))

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        preds = [[] for _ in self.rows]
        for s, row in enumerate(self.rows):
            for t, _ in row:
                preds[t].append(s)
        return tuple(tuple(p) for p in preds)

    def matvec(self, x):
        """``P @ x`` for a float vector ``x``."""
        src, dst, prob = self.arrays
        return np.bincount(src, weights=prob * x[dst], minlength=self.num_states)

    def vecmat(self, x):
        """``x @ P``: push a distribution one step forward."""
        src, dst, prob = self.arrays
        return np.bincount(dst, weights=prob * x[src], minlength=self.num_states)


@dataclass(frozen=True)
class ProbVector:
    """One probability per state, plus how it was obtained.

    ``exact`` holds rational values when the exact engine produced them.
    """

    values: np.ndarray
    exact: tuple[Fraction, ...] | None = None
    method: str = "exact"
    iterations: int = 0
    residual: float = 0.0

    def __getitem__(self, state):
        return self.values[state]

    def __len__(self):
        return len(self.values)


def validate(dtmc: Dtmc) -> list[str]:
    """Return a list of diagnostics; an empty list means the chain is well formed."""
    problems = []
    n = dtmc.num_states
    if n != dtmc.space.size:
        problems.append(f"{n} rows for a state space of size {dtmc.space.size}")
    if not 0 <= dtmc.init_state < n:
        problems.append(f"initial state {dtmc.init_state} is not a valid index")
    for s, row in enumerate(dtmc.rows):
        if not row:
            problems.append(f"deadlock: state {s} has no outgoing transitions")
            continue
        total = Fraction(0)
        for t, p in row:
            if not 0 <= t < n:
                problems.append(f"state {s} has a transition to unknown state {t}")
            if not 0 < p <= 1:
                problems.append(
                    f"probability out of range: {float(p):g} on {s} -> {t}")
            total += p
        if abs(float(total) - 1.0) > ROW_SUM_TOLERANCE:
            problems.append(f"row sum {float(total):.10g} at state {s}")
    for name, states in dtmc.labels.items():
        if any(not 0 <= s < n for s in states):
            problems.append(f"label {name!r} refers to states outside the chain")
    return problems


def state_labels(dtmc, index):
    return {name: index in states for name, states in dtmc.labels.items()}


def satisfaction_set(dtmc: Dtmc, predicate: Expr) -> frozenset[int]:
    """States whose valuation satisfies the boolean ``predicate``."""
    result = set()
    for s in range(dtmc.num_states):
        value = eval_expr(predicate, dtmc.space.index_to_valuation(s),
                          dtmc.constants, state_labels(dtmc, s))
        if not isinstance(value, bool):
            raise EvalError("state formula must be boolean", predicate.line, predicate.col)
        if value:
            result.add(s)
    return frozenset(result)


def format_probability(p) -> str:
    return f"{float(p):.6g}"


def to_dot(dtmc: Dtmc, names: Mapping[int, str] | None = None, title="dtmc") -> str:
    """Render the chain as a Graphviz digraph.

    Node labels show the valuation, optionally followed by a name from
    ``names``; the initial state is drawn with a double circle.
    """
    lines = [f"digraph {title} {{", "  rankdir=LR;", "  node [shape=circle];"]
    for s in range(dtmc.num_states):
        label = ",".join(f"{k}={v}" for k, v in dtmc.space.index_to_valuation(s).items())
        if names and s in names:
            label += f"\\n{names[s]}"
        shape = ", shape=doublecircle" if s == dtmc.init_state else ""
        lines.append(f'  {s} [label="{label}"{shape}];')
    for s, row in enumerate(dtmc.rows):
        for t, p in row:
            lines.append(f'  {s} -> {t} [label="{format_probability(p)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def from_rows(rows: Sequence[Iterable[tuple[int, object]]], init_state=0, var="s"):
    """Build a single-variable chain ``var : [0..len(rows)-1]`` from raw rows."""
    space = StateSpace((VariableDecl(var, 0, len(rows) - 1, init_state),))
    return Dtmc(space, init_state, tuple(tuple(r) for r in rows))
