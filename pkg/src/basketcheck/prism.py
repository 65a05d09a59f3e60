"""Parser and state-space builder for a single-module PRISM DTMC subset.

Supported: ``dtmc``, ``const``, one ``module`` with bounded integer
variables and unlabelled guarded commands, and ``label`` definitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BuildError, EvalError, ParseError
from .expr import (Expr, Ident, LabelRef, Num, eval_expr, eval_int, format_expr,
                   identifiers, parse_expr)
from .lexer import TokenStream, tokenize
from .model import Dtmc, StateSpace, VariableDecl, ROW_SUM_TOLERANCE


@dataclass(frozen=True)
class ConstantDef:
    name: str
    type: str | None  # "int", "double", "bool" or None when untyped
    value: Expr


@dataclass(frozen=True)
class VariableDef:
    name: str
    low: Expr
    high: Expr
    init: Expr | None


@dataclass(frozen=True)
class Update:
    """Primed assignments; an empty tuple is the identity update ``true``."""
    assignments: tuple[tuple[str, Expr], ...]


@dataclass(frozen=True)
class Branch:
    probability: Expr
    update: Update


@dataclass(frozen=True)
class GuardedCommand:
    guard: Expr
    branches: tuple[Branch, ...]
    line: int | None = field(default=None, compare=False)
    col: int | None = field(default=None, compare=False)

    @property
    def where(self):
        return f"command at line {self.line}, column {self.col}"


@dataclass(frozen=True)
class ModuleDef:
    name: str
    variables: tuple[VariableDef, ...]
    commands: tuple[GuardedCommand, ...]


@dataclass(frozen=True)
class ModelAst:
    model_type: str
    constants: tuple[ConstantDef, ...]
    module: ModuleDef
    labels: tuple[tuple[str, Expr], ...]


# -- parsing -----------------------------------------------------------------

def parse_model(text: str) -> ModelAst:
    ts = TokenStream(tokenize(text))
    ts.expect("kw", "dtmc", what="model type 'dtmc'")
    constants, labels = [], []
    module = None
    declared = {}

    def declare(name, tok):
        if name in declared:
            raise ParseError(f"duplicate declaration of '{name}' "
                             f"(first declared at line {declared[name]})", tok.line, tok.col)
        declared[name] = tok.line

    while not ts.at("eof"):
        tok = ts.current
        if tok.is_("kw", "const"):
            const = _parse_constant(ts)
            declare(const.name, tok)
            constants.append(const)
        elif tok.is_("kw", "label"):
            ts.advance()
            name_tok = ts.expect("string", what="a quoted label name")
            declare(name_tok.text, name_tok)
            ts.expect("sym", "=")
            expr = parse_expr(ts)
            ts.expect("sym", ";")
            labels.append((name_tok.text, expr))
        elif tok.is_("kw", "module"):
            if module is not None:
                ts.error("only a single module is supported")
            module = _parse_module(ts, declare)
        else:
            ts.error(f"expected 'const', 'label' or 'module', found {tok.describe()}")
    if module is None:
        ts.error("model has no module")
    return ModelAst("dtmc", tuple(constants), module, tuple(labels))


def _parse_constant(ts):
    ts.expect("kw", "const")
    ctype = None
    for t in ("int", "double", "bool"):
        if ts.accept("kw", t):
            ctype = t
            break
    name = ts.expect("ident", what="a constant name").text
    ts.expect("sym", "=", what="'=' (undefined constants are not supported)")
    value = parse_expr(ts)
    ts.expect("sym", ";")
    return ConstantDef(name, ctype, value)


def _parse_module(ts, declare):
    ts.expect("kw", "module")
    name = ts.expect("ident", what="a module name").text
    variables, commands = [], []
    while True:
        tok = ts.current
        if tok.is_("kw", "endmodule"):
            ts.advance()
            break
        if tok.kind == "ident":
            declare(tok.text, tok)
            variables.append(_parse_variable(ts))
        elif tok.is_("sym", "["):
            commands.append(_parse_command(ts))
        else:
            ts.error(f"expected a variable declaration, a command or 'endmodule', "
                     f"found {tok.describe()}")
    return ModuleDef(name, tuple(variables), tuple(commands))


def _parse_variable(ts):
    name = ts.advance().text
    ts.expect("sym", ":")
    if ts.at("kw", "bool"):
        ts.error("boolean variables are not supported; use [0..1]")
    ts.expect("sym", "[")
    low = parse_expr(ts)
    ts.expect("sym", "..")
    high = parse_expr(ts)
    ts.expect("sym", "]")
    init = None
    if ts.accept("kw", "init"):
        init = parse_expr(ts)
    ts.expect("sym", ";")
    return VariableDef(name, low, high, init)


def _parse_command(ts):
    start = ts.expect("sym", "[")
    if not ts.at_sym("]"):
        ts.error("synchronising action labels are not supported")
    ts.expect("sym", "]")
    guard = parse_expr(ts)
    ts.expect("sym", "->")
    branches = [_parse_branch(ts)]
    while ts.accept("sym", "+"):
        branches.append(_parse_branch(ts))
    ts.expect("sym", ";")
    return GuardedCommand(guard, tuple(branches), start.line, start.col)


def _starts_update(ts):
    if ts.at_sym("(") and ts.at("ident", offset=1) and ts.at_sym("'", offset=2):
        return True
    return ts.at("kw", "true") and not ts.at_sym(":", offset=1)


def _parse_branch(ts):
    tok = ts.current
    if _starts_update(ts):
        return Branch(Num(1, line=tok.line, col=tok.col), _parse_update(ts))
    prob = parse_expr(ts)
    ts.expect("sym", ":")
    return Branch(prob, _parse_update(ts))


def _parse_update(ts):
    if ts.accept("kw", "true"):
        return Update(())
    assignments = [_parse_assignment(ts)]
    while ts.accept("sym", "&"):
        assignments.append(_parse_assignment(ts))
    names = [n for n, _ in assignments]
    if len(set(names)) != len(names):
        ts.error("a variable is assigned twice in one update")
    return Update(tuple(assignments))


def _parse_assignment(ts):
    ts.expect("sym", "(")
    name = ts.expect("ident", what="a variable name").text
    ts.expect("sym", "'")
    ts.expect("sym", "=")
    value = parse_expr(ts)
    ts.expect("sym", ")")
    return name, value


# -- printing ----------------------------------------------------------------

def format_update(update):
    if not update.assignments:
        return "true"
    return " & ".join(f"({n}'={format_expr(e)})" for n, e in update.assignments)


def format_command(cmd):
    if len(cmd.branches) == 1 and cmd.branches[0].probability == Num(1):
        return f"[] {format_expr(cmd.guard)} -> {format_update(cmd.branches[0].update)};"
    branches = " + ".join(f"{format_expr(b.probability)}:{format_update(b.update)}"
                          for b in cmd.branches)
    return f"[] {format_expr(cmd.guard)} -> {branches};"


def format_model(ast: ModelAst) -> str:
    out = [ast.model_type, ""]
    for c in ast.constants:
        typ = f"{c.type} " if c.type else ""
        out.append(f"const {typ}{c.name} = {format_expr(c.value)};")
    if ast.constants:
        out.append("")
    out.append(f"module {ast.module.name}")
    for v in ast.module.variables:
        init = f" init {format_expr(v.init)}" if v.init is not None else ""
        out.append(f"    {v.name} : [{format_expr(v.low)}..{format_expr(v.high)}]{init};")
    for cmd in ast.module.commands:
        out.append("    " + format_command(cmd))
    out.append("endmodule")
    for name, e in ast.labels:
        out.append(f'label "{name}" = {format_expr(e)};')
    return "\n".join(out) + "\n"


# -- elaboration -------------------------------------------------------------

def _wrap(err, cmd=None):
    where = f" in {cmd.where}" if cmd is not None else ""
    return BuildError(err.message + where, err.line, err.col)


def evaluate_constants(ast):
    values = {}
    for c in ast.constants:
        v = eval_expr(c.value, {}, values)
        if c.type == "int" and (isinstance(v, bool) or not isinstance(v, int)):
            raise BuildError(f"constant {c.name} is declared int but evaluates to {v}",
                             c.value.line, c.value.col)
        if c.type == "double" and isinstance(v, bool):
            raise BuildError(f"constant {c.name} is declared double but is boolean",
                             c.value.line, c.value.col)
        if c.type == "bool" and not isinstance(v, bool):
            raise BuildError(f"constant {c.name} is declared bool but is numeric",
                             c.value.line, c.value.col)
        values[c.name] = v
    return values


def _branch_probabilities(cmd, constants):
    probs = []
    for b in cmd.branches:
        try:
            p = eval_expr(b.probability, {}, constants)
        except EvalError as err:
            if any(isinstance(i, Ident) and i.name not in constants
                   for i in identifiers(b.probability)):
                raise BuildError(f"probability {format_expr(b.probability)} must be "
                                 f"constant in {cmd.where}", cmd.line, cmd.col) from err
            raise _wrap(err, cmd) from err
        if isinstance(p, bool):
            raise BuildError(f"probability must be numeric in {cmd.where}",
                             cmd.line, cmd.col)
        p = Fraction(p)
        if not 0 <= p <= 1:
            raise BuildError(f"probability {p} outside [0,1] in {cmd.where}",
                             cmd.line, cmd.col)
        probs.append(p)
    total = sum(probs, Fraction(0))
    if abs(float(total) - 1.0) > ROW_SUM_TOLERANCE:
        raise BuildError(f"branch probabilities sum to {float(total):.10g}, not 1, "
                         f"in {cmd.where}", cmd.line, cmd.col)
    return probs


def build_dtmc(ast: ModelAst, fix_deadlocks=False, merge_uniform=False) -> Dtmc:
    """Enumerate all valuations and turn the enabled command into each row.

    By default exactly one command may be enabled per state.  With
    ``merge_uniform`` (non-standard) overlapping commands are combined by a
    uniform choice among them.  With ``fix_deadlocks`` a state with no
    enabled command gets a self-loop instead of an error.
    """
    try:
        constants = evaluate_constants(ast)
        decls = []
        for v in ast.module.variables:
            low = eval_int(v.low, {}, constants, f"lower bound of {v.name}")
            high = eval_int(v.high, {}, constants, f"upper bound of {v.name}")
            init = low if v.init is None else eval_int(v.init, {}, constants,
                                                       f"initial value of {v.name}")
            if high < low:
                raise BuildError(f"variable {v.name} has an empty range [{low}..{high}]",
                                 v.low.line, v.low.col)
            if not low <= init <= high:
                raise BuildError(f"initial value {init} of {v.name} is outside "
                                 f"[{low}..{high}]", v.init.line, v.init.col)
            decls.append(VariableDecl(v.name, low, high, init))
    except EvalError as err:
        raise _wrap(err) from err
    space = StateSpace(tuple(decls))
    known = set(space.names) | set(constants)
    label_names = {name for name, _ in ast.labels}
    for node in _all_identifiers(ast):
        if isinstance(node, Ident) and node.name not in known:
            raise BuildError(f"unknown identifier '{node.name}'", node.line, node.col)
        if isinstance(node, LabelRef) and node.name not in label_names:
            raise BuildError(f'unknown label "{node.name}"', node.line, node.col)

    commands = ast.module.commands
    probabilities = [_branch_probabilities(cmd, constants) for cmd in commands]
    ranges = {d.name: d for d in space.variables}

    rows = []
    for index in range(space.size):
        valuation = space.index_to_valuation(index)
        enabled = []
        for k, cmd in enumerate(commands):
            try:
                g = eval_expr(cmd.guard, valuation, constants)
            except EvalError as err:
                raise _wrap(err, cmd) from err
            if not isinstance(g, bool):
                raise BuildError(f"guard is not boolean in {cmd.where}",
                                 cmd.guard.line, cmd.guard.col)
            if g:
                enabled.append(k)
        state = space.describe(index)
        if not enabled:
            if fix_deadlocks:
                rows.append(((index, Fraction(1)),))
                continue
            raise BuildError(f"deadlock: no command is enabled in state {state} "
                             "(use --fix-deadlocks to add a self-loop)")
        if len(enabled) > 1 and not merge_uniform:
            where = " and ".join(f"line {commands[k].line}" for k in enabled)
            second = commands[enabled[1]]
            raise BuildError(f"overlapping guards: commands at {where} are all "
                             f"enabled in state {state}", second.line, second.col)
        share = Fraction(1, len(enabled))
        row = {}
        for k in enabled:
            cmd = commands[k]
            for branch, p in zip(cmd.branches, probabilities[k]):
                if p == 0:
                    continue
                target = _apply(branch.update, valuation, constants, ranges, cmd)
                t = space.valuation_to_index(target)
                row[t] = row.get(t, Fraction(0)) + p * share
        rows.append(tuple(row.items()))

    labels = {}
    for name, expr in ast.labels:
        states = set()
        for index in range(space.size):
            try:
                v = eval_expr(expr, space.index_to_valuation(index), constants)
            except EvalError as err:
                raise _wrap(err) from err
            if not isinstance(v, bool):
                raise BuildError(f'label "{name}" is not boolean', expr.line, expr.col)
            if v:
                states.add(index)
        labels[name] = frozenset(states)

    init_state = space.valuation_to_index({d.name: d.init for d in decls})
    return Dtmc(space, init_state, tuple(rows), labels, constants)


def _apply(update, valuation, constants, ranges, cmd):
    target = dict(valuation)
    for name, expr in update.assignments:
        if name not in ranges:
            raise BuildError(f"update assigns unknown variable '{name}' in {cmd.where}",
                             cmd.line, cmd.col)
        try:
            value = eval_int(expr, valuation, constants, f"update of {name}")
        except EvalError as err:
            raise _wrap(err, cmd) from err
        decl = ranges[name]
        if not decl.low <= value <= decl.high:
            raise BuildError(f"update ({name}'={format_expr(expr)}) gives {name}={value}, "
                             f"outside [{decl.low}..{decl.high}], in {cmd.where}",
                             cmd.line, cmd.col)
        target[name] = value
    return target


def _all_identifiers(ast):
    for c in ast.constants:
        yield from identifiers(c.value)
    for cmd in ast.module.commands:
        yield from identifiers(cmd.guard)
        for b in cmd.branches:
            yield from identifiers(b.probability)
            for _, e in b.update.assignments:
                yield from identifiers(e)
    for _, e in ast.labels:
        yield from identifiers(e)


def load_model(path, **build_options) -> Dtmc:
    with open(path, encoding="utf-8") as fh:
        return build_dtmc(parse_model(fh.read()), **build_options)
