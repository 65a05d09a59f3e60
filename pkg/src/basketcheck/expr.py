"""Expression trees for guards, updates, probabilities and state formulas.

Values are ``bool``, ``int`` or :class:`fractions.Fraction`.  Decimal literals
become exact fractions, and ``/`` is exact rational division, so no rounding
happens before a caller explicitly asks for a float.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from .errors import EvalError

Value = Union[bool, int, Fraction]


@dataclass(frozen=True)
class Expr:
    line: int | None = field(default=None, compare=False, repr=False, kw_only=True)
    col: int | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Num(Expr):
    value: int | Fraction


@dataclass(frozen=True)
class Bool(Expr):
    value: bool


@dataclass(frozen=True)
class Ident(Expr):
    name: str


@dataclass(frozen=True)
class LabelRef(Expr):
    name: str


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # "!" or "-"
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


LOGICAL = ("|", "&")
RELATIONAL = ("=", "!=", "<", "<=", ">", ">=")
ADDITIVE = ("+", "-")
MULTIPLICATIVE = ("*", "/")

PRECEDENCE = {"|": 1, "&": 2, "!": 3, **dict.fromkeys(RELATIONAL, 4),
              "+": 5, "-": 5, "*": 6, "/": 6, "neg": 7}


# -- parsing -----------------------------------------------------------------

def parse_expr(ts):
    """Parse one expression from a :class:`~basketcheck.lexer.TokenStream`."""
    return _parse_or(ts)


def _at(tok):
    return {"line": tok.line, "col": tok.col}


def _parse_or(ts):
    left = _parse_and(ts)
    while ts.at_sym("|"):
        tok = ts.advance()
        left = Binary("|", left, _parse_and(ts), **_at(tok))
    return left


def _parse_and(ts):
    left = _parse_not(ts)
    while ts.at_sym("&"):
        tok = ts.advance()
        left = Binary("&", left, _parse_not(ts), **_at(tok))
    return left


def _parse_not(ts):
    if ts.at_sym("!"):
        tok = ts.advance()
        return Unary("!", _parse_not(ts), **_at(tok))
    return _parse_relational(ts)


def _parse_relational(ts):
    left = _parse_additive(ts)
    tok = ts.current
    if tok.kind == "sym" and tok.text in RELATIONAL:
        ts.advance()
        left = Binary(tok.text, left, _parse_additive(ts), **_at(tok))
        nxt = ts.current
        if nxt.kind == "sym" and nxt.text in RELATIONAL:
            ts.error("comparison operators do not chain; add parentheses")
    return left


def _parse_additive(ts):
    left = _parse_multiplicative(ts)
    while ts.current.kind == "sym" and ts.current.text in ADDITIVE:
        tok = ts.advance()
        left = Binary(tok.text, left, _parse_multiplicative(ts), **_at(tok))
    return left


def _parse_multiplicative(ts):
    left = _parse_unary(ts)
    while ts.current.kind == "sym" and ts.current.text in MULTIPLICATIVE:
        tok = ts.advance()
        left = Binary(tok.text, left, _parse_unary(ts), **_at(tok))
    return left


def _parse_unary(ts):
    if ts.at_sym("-"):
        tok = ts.advance()
        return Unary("-", _parse_unary(ts), **_at(tok))
    return _parse_atom(ts)


def _parse_atom(ts):
    tok = ts.current
    if tok.kind == "num":
        ts.advance()
        return Num(parse_number(tok.text), **_at(tok))
    if tok.is_("kw", "true") or tok.is_("kw", "false"):
        ts.advance()
        return Bool(tok.text == "true", **_at(tok))
    if tok.kind == "ident":
        ts.advance()
        return Ident(tok.text, **_at(tok))
    if tok.kind == "string":
        ts.advance()
        return LabelRef(tok.text, **_at(tok))
    if tok.is_("sym", "("):
        ts.advance()
        inner = parse_expr(ts)
        ts.expect("sym", ")")
        return inner
    ts.error(f"expected an expression, found {tok.describe()}")


def parse_number(text):
    if any(c in text for c in ".eE"):
        return _normalize(Fraction(text))
    return int(text)


# -- evaluation --------------------------------------------------------------

def _normalize(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def _is_num(v):
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _type_name(v):
    return "boolean" if isinstance(v, bool) else "number"


def eval_expr(expr: Expr, valuation: Mapping[str, Value],
              constants: Mapping[str, Value] | None = None,
              labels: Mapping[str, bool] | None = None) -> Value:
    """Evaluate ``expr`` with variables from ``valuation``.

    Identifiers are looked up in ``valuation`` first, then ``constants``;
    quoted label references are looked up in ``labels``.
    """
    constants = constants or {}
    labels = labels or {}

    def num(e):
        v = ev(e)
        if not _is_num(v):
            raise EvalError(f"expected a number, got a {_type_name(v)}", e.line, e.col)
        return v

    def boolean(e):
        v = ev(e)
        if not isinstance(v, bool):
            raise EvalError(f"expected a boolean, got a {_type_name(v)}", e.line, e.col)
        return v

    def ev(e):
        if isinstance(e, (Num, Bool)):
            return e.value
        if isinstance(e, Ident):
            if e.name in valuation:
                return valuation[e.name]
            if e.name in constants:
                return constants[e.name]
            raise EvalError(f"unbound identifier '{e.name}'", e.line, e.col)
        if isinstance(e, LabelRef):
            if e.name not in labels:
                raise EvalError(f'unknown label "{e.name}"', e.line, e.col)
            return labels[e.name]
        if isinstance(e, Unary):
            if e.op == "!":
                return not boolean(e.operand)
            return -num(e.operand)
        op = e.op
        if op == "&":
            return boolean(e.left) and boolean(e.right)
        if op == "|":
            return boolean(e.left) or boolean(e.right)
        if op in ("=", "!="):
            a, b = ev(e.left), ev(e.right)
            if isinstance(a, bool) != isinstance(b, bool):
                raise EvalError("cannot compare a boolean with a number", e.line, e.col)
            return (a == b) if op == "=" else (a != b)
        a, b = num(e.left), num(e.right)
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        if op == "+":
            return _normalize(a + b)
        if op == "-":
            return _normalize(a - b)
        if op == "*":
            return _normalize(a * b)
        if op == "/":
            if b == 0:
                raise EvalError("division by zero", e.line, e.col)
            return _normalize(Fraction(a) / Fraction(b))
        raise AssertionError(f"unknown operator {op}")

    return ev(expr)


def eval_int(expr, valuation, constants=None, what="value"):
    """Evaluate to an integer; a non-integral rational is an error."""
    v = eval_expr(expr, valuation, constants)
    if not _is_num(v):
        raise EvalError(f"{what} must be an integer, got a boolean", expr.line, expr.col)
    if isinstance(v, Fraction):
        raise EvalError(f"non-exact integer division: {what} evaluates to {v}",
                        expr.line, expr.col)
    return v


def identifiers(expr):
    """Yield every ``Ident`` and ``LabelRef`` node in ``expr``."""
    if isinstance(expr, (Ident, LabelRef)):
        yield expr
    elif isinstance(expr, Unary):
        yield from identifiers(expr.operand)
    elif isinstance(expr, Binary):
        yield from identifiers(expr.left)
        yield from identifiers(expr.right)


# -- printing ----------------------------------------------------------------

def format_number(v):
    if isinstance(v, int):
        return str(v)
    # terminating decimals print as decimals, anything else as a quotient
    d = v.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"({v.numerator}/{v.denominator})"
    digits = 0
    scaled = v
    while scaled.denominator != 1:
        scaled *= 10
        digits += 1
    sign = "-" if scaled < 0 else ""
    text = str(abs(int(scaled))).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def format_expr(expr: Expr) -> str:
    """Render ``expr`` with just enough parentheses to re-parse identically."""
    return _fmt(expr, 0)


def _prec(e):
    if isinstance(e, Binary):
        return PRECEDENCE[e.op]
    if isinstance(e, Unary):
        return PRECEDENCE["!"] if e.op == "!" else PRECEDENCE["neg"]
    if isinstance(e, Num) and e.value < 0:
        return PRECEDENCE["neg"]
    return 8


def _fmt(e, min_prec):
    if isinstance(e, Num):
        text = format_number(e.value)
    elif isinstance(e, Bool):
        text = "true" if e.value else "false"
    elif isinstance(e, Ident):
        text = e.name
    elif isinstance(e, LabelRef):
        text = f'"{e.name}"'
    elif isinstance(e, Unary):
        text = e.op + _fmt(e.operand, _prec(e))
    else:
        p = PRECEDENCE[e.op]
        # relational operators do not associate, arithmetic is left-assoc
        left = _fmt(e.left, p + 1 if e.op in RELATIONAL else p)
        right = _fmt(e.right, p + 1)
        sep = f" {e.op} " if e.op in LOGICAL else e.op
        text = left + sep + right
    if _prec(e) < min_prec:
        return f"({text})"
    return text
