"""The PCTL fragment ``P~p [ F phi ]`` / ``P=? [ F<=k phi ]`` with state filters.

A filter is written inside the brackets after the path formula, e.g.
``P>=0.5 [ F s=9 {s=8} ]``, and selects the states at which the property is
evaluated instead of the initial state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError, PropertyFileError
from .expr import Expr, Ident, LabelRef, format_expr, format_number, identifiers, parse_expr
from .lexer import TokenStream, tokenize

BOUND_OPS = ("<", "<=", ">", ">=")


@dataclass(frozen=True)
class Bound:
    op: str
    threshold: Fraction

    def holds(self, value) -> bool:
        if self.op == "<":
            return value < self.threshold
        if self.op == "<=":
            return value <= self.threshold
        if self.op == ">":
            return value > self.threshold
        return value >= self.threshold


@dataclass(frozen=True)
class Query:
    pass


@dataclass(frozen=True)
class PathFormula:
    target: Expr
    step_bound: int | None = None  # None means unbounded F

    @property
    def bounded(self):
        return self.step_bound is not None


@dataclass(frozen=True)
class Property:
    quantifier: Bound | Query
    path: PathFormula
    filter: Expr | None = None
    source: str | None = field(default=None, compare=False)

    @property
    def is_query(self):
        return isinstance(self.quantifier, Query)

    def __str__(self):
        return self.source if self.source is not None else format_property(self)


def _parse_property_tokens(ts, source=None):
    p_tok = ts.current
    if not p_tok.is_("ident", "P"):
        ts.error(f"expected 'P', found {p_tok.describe()}")
    ts.advance()
    tok = ts.current
    if tok.is_("sym", "?"):
        # "P ? [...]" is accepted as a misspelling of "P=? [...]"
        ts.advance()
        quantifier = Query()
    elif tok.is_("sym", "=") and ts.at_sym("?", offset=1):
        ts.advance()
        ts.advance()
        quantifier = Query()
    elif tok.kind == "sym" and tok.text in BOUND_OPS:
        ts.advance()
        num = ts.current
        if not num.is_("num"):
            ts.error(f"malformed bound: expected a probability after '{tok.text}', "
                     f"found {num.describe()}")
        ts.advance()
        threshold = Fraction(num.text)
        if not 0 <= threshold <= 1:
            ts.error(f"probability bound {num.text} is outside [0,1]", num)
        quantifier = Bound(tok.text, threshold)
    else:
        ts.error(f"malformed bound: expected '<', '<=', '>', '>=' or '=?', "
                 f"found {tok.describe()}")
    ts.expect("sym", "[")
    f_tok = ts.current
    if not f_tok.is_("ident", "F"):
        ts.error(f"expected path operator 'F', found {f_tok.describe()}")
    ts.advance()
    step_bound = None
    if ts.accept("sym", "<="):
        k_tok = ts.expect("num", what="a step bound")
        if not k_tok.text.isdigit():
            ts.error("step bound must be a non-negative integer", k_tok)
        step_bound = int(k_tok.text)
    target = parse_expr(ts)
    filt = None
    if ts.at_sym("{"):
        brace = ts.advance()
        if ts.at_sym("}"):
            ts.error("empty filter braces", brace)
        filt = parse_expr(ts)
        ts.expect("sym", "}")
    ts.expect("sym", "]")
    return Property(quantifier, PathFormula(target, step_bound), filt, source)


def parse_property(text: str) -> Property:
    ts = TokenStream(tokenize(text))
    prop = _parse_property_tokens(ts, text.strip())
    if not ts.at("eof"):
        ts.error(f"unexpected {ts.current.describe()} after property")
    return prop


def parse_properties_file(text: str) -> list[Property]:
    """One property per non-blank line; ``//`` comments are ignored.

    All bad lines are reported together in a :class:`PropertyFileError`.
    """
    props, errors = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        try:
            ts = TokenStream(tokenize(line, line_offset=lineno - 1))
            if ts.at("eof"):
                continue
            stripped = line.split("//", 1)[0].strip()
            prop = _parse_property_tokens(ts, stripped)
            if not ts.at("eof"):
                ts.error(f"unexpected {ts.current.describe()} after property")
            props.append(prop)
        except ParseError as err:
            errors.append(err)
    if errors:
        raise PropertyFileError(errors)
    return props


def load_properties(path) -> list[Property]:
    with open(path, encoding="utf-8") as fh:
        return parse_properties_file(fh.read())


def format_property(prop: Property) -> str:
    if prop.is_query:
        head = "P=?"
    else:
        head = f"P{prop.quantifier.op}{format_number(prop.quantifier.threshold)}"
    op = "F" if prop.path.step_bound is None else f"F<={prop.path.step_bound}"
    body = f"{op} {format_expr(prop.path.target)}"
    if prop.filter is not None:
        body += " {" + format_expr(prop.filter) + "}"
    return f"{head} [ {body} ]"


@dataclass(frozen=True)
class BoundProperty:
    """A property whose identifiers are known to resolve in a given model."""
    property: Property


def bind(prop: Property, space, labels=(), constants=()) -> BoundProperty:
    """Check every identifier against variables, constants and label names."""
    variables = set(space.names)
    known = variables | set(constants)
    label_names = set(labels)
    formulas = [prop.path.target] + ([prop.filter] if prop.filter is not None else [])
    for formula in formulas:
        for node in identifiers(formula):
            if isinstance(node, Ident) and node.name not in known:
                raise ParseError(f"unknown identifier '{node.name}'", node.line, node.col)
            if isinstance(node, LabelRef) and node.name not in label_names:
                raise ParseError(f'unknown label "{node.name}"', node.line, node.col)
    return BoundProperty(prop)


def bind_to(prop, dtmc) -> BoundProperty:
    return bind(prop, dtmc.space, dtmc.labels, dtmc.constants)
