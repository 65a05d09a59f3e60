"""Command-line front end: ``basketcheck {check,simulate,curve,graph,info}``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import engine, report
from .errors import BasketCheckError, SolverError
from .expr import parse_expr
from .lexer import TokenStream, tokenize
from .model import satisfaction_set, to_dot, validate
from .pctl import bind_to, load_properties, parse_property
from .prism import load_model
from .simulate import estimate_reach

EXIT_ERROR = 1
EXIT_SOLVER = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors share the exit code of parse errors
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _add_model_args(p):
    p.add_argument("model", help="PRISM model file (.pm)")
    p.add_argument("--fix-deadlocks", action="store_true",
                   help="add self-loops to states with no enabled command")
    p.add_argument("--merge-uniform", action="store_true",
                   help="non-standard: choose uniformly among overlapping commands")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")


def _add_goal_args(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--prop", help="property whose F target is the goal; its filter is the start")
    g.add_argument("--goal", help="goal state formula, e.g. 's=6'")
    p.add_argument("--start", help="start state formula (default: initial state)")


def build_parser():
    parser = _Parser(prog="basketcheck", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    check = sub.add_parser("check", help="verify PCTL properties")
    _add_model_args(check)
    src = check.add_mutually_exclusive_group(required=True)
    src.add_argument("--prop", help="a single property")
    src.add_argument("--props", help="property file (.pctl)")
    check.add_argument("--engine", choices=engine.METHODS,
                       default=os.environ.get("BASKETCHECK_ENGINE") or "power")
    check.add_argument("--epsilon", type=float, default=1e-6)
    check.add_argument("--max-iters", type=int, default=1_000_000)
    check.add_argument("--relative", action="store_true",
                       help="relative instead of absolute convergence test")
    check.add_argument("--format", choices=("text", "json", "csv"), default="text")

    sim = sub.add_parser("simulate", help="estimate reachability by sampling paths")
    _add_model_args(sim)
    _add_goal_args(sim)
    sim.add_argument("--samples", type=int, default=10_000)
    sim.add_argument("--max-steps", type=int, default=10_000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--format", choices=("text", "json"), default="text")

    crv = sub.add_parser("curve", help="bounded reachability as a function of k")
    _add_model_args(crv)
    _add_goal_args(crv)
    crv.add_argument("--k-max", type=int, default=100)
    crv.add_argument("--svg", nargs="?", const=True, default=None, metavar="PATH",
                     help="also render the curve as SVG (next to --output by default)")

    graph = sub.add_parser("graph", help="print the chain as a DOT digraph")
    _add_model_args(graph)

    info = sub.add_parser("info", help="summarise the built chain")
    _add_model_args(info)
    return parser


def _emit(text, output):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args):
    return load_model(args.model, fix_deadlocks=args.fix_deadlocks,
                      merge_uniform=args.merge_uniform)


def _state_formula(text, dtmc):
    ts = TokenStream(tokenize(text))
    expr = parse_expr(ts)
    if not ts.at("eof"):
        ts.error(f"unexpected {ts.current.describe()} after formula")
    return satisfaction_set(dtmc, expr)


def _goal_and_start(args, dtmc):
    start = dtmc.init_state
    if args.prop:
        prop = parse_property(args.prop)
        bind_to(prop, dtmc)
        goal = satisfaction_set(dtmc, prop.path.target)
        if prop.filter is not None:
            starts = satisfaction_set(dtmc, prop.filter)
            if len(starts) != 1:
                raise BasketCheckError("the filter must select exactly one start state")
            start = next(iter(starts))
    else:
        goal = _state_formula(args.goal, dtmc)
    if args.start:
        starts = _state_formula(args.start, dtmc)
        if len(starts) != 1:
            raise BasketCheckError("--start must select exactly one state")
        start = next(iter(starts))
    return goal, start


def cmd_check(args):
    dtmc = _load(args)
    props = [parse_property(args.prop)] if args.prop else load_properties(args.props)
    bound = [bind_to(p, dtmc) for p in props]
    options = engine.SolveOptions(args.engine, args.epsilon, args.max_iters,
                                  "relative" if args.relative else "absolute")
    results = [engine.check_property(dtmc, b, options) for b in bound]
    render = {"text": report.text_report, "json": report.json_report,
              "csv": report.csv_report}[args.format]
    _emit(render(results), args.output)


def cmd_simulate(args):
    if args.samples < 1:
        raise BasketCheckError("--samples must be at least 1")
    if args.max_steps < 0:
        raise BasketCheckError("--max-steps must be non-negative")
    dtmc = _load(args)
    goal, start = _goal_and_start(args, dtmc)
    est = estimate_reach(dtmc, goal, start, args.samples, args.max_steps, args.seed)
    if args.format == "json":
        text = json.dumps({
            "start": start, "goal": sorted(goal), "hits": est.hits,
            "samples": est.samples, "estimate": est.estimate,
            "interval": [est.low, est.high], "confidence": 0.95,
            "censored": est.censored, "seed": est.seed,
        }, indent=2) + "\n"
    else:
        text = (f"Estimate: {report.format_value(est.estimate)} "
                f"({est.hits}/{est.samples} paths)\n"
                f"95% Wilson interval: [{est.low:.6f}, {est.high:.6f}]\n"
                f"Censored paths: {est.censored}\n"
                f"Seed: {est.seed}\n")
    _emit(text, args.output)


def cmd_curve(args):
    if args.k_max < 0:
        raise BasketCheckError("--k-max must be non-negative")
    dtmc = _load(args)
    goal, start = _goal_and_start(args, dtmc)
    points = engine.curve(dtmc, goal, start, args.k_max)
    _emit(report.curve_csv(points), args.output)
    if args.svg:
        from .plotting import plot_curve

        if isinstance(args.svg, str):
            target = Path(args.svg)
        elif args.output:
            target = Path(args.output).with_suffix(".svg")
        else:
            target = Path("curve.svg")
        limit = float(engine.reach_probabilities(dtmc, goal).values[start])
        title = args.prop or f"reach {args.goal} from {dtmc.space.describe(start)}"
        plot_curve(points, target, title=title, limit=limit)
        print(f"wrote {target}", file=sys.stderr)


def cmd_graph(args):
    _emit(to_dot(_load(args)), args.output)


def cmd_info(args):
    dtmc = _load(args)
    problems = validate(dtmc)
    lines = [
        f"states: {dtmc.num_states}, transitions: {dtmc.num_transitions}",
        f"initial state: {dtmc.init_state} {dtmc.space.describe(dtmc.init_state)}",
        "variables: " + ", ".join(f"{v.name}:[{v.low}..{v.high}]"
                                  for v in dtmc.space.variables),
    ]
    if dtmc.labels:
        lines.append("labels: " + ", ".join(sorted(dtmc.labels)))
    lines.append("validation: ok" if not problems else
                 "validation: failed\n  " + "\n  ".join(problems))
    _emit("\n".join(lines) + "\n", args.output)


COMMANDS = {"check": cmd_check, "simulate": cmd_simulate, "curve": cmd_curve,
            "graph": cmd_graph, "info": cmd_info}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        COMMANDS[args.command](args)
    except SolverError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SOLVER
    except (BasketCheckError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
