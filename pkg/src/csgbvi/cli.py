"""Command-line front end: ``csgbvi solve | inspect | becs``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import fixtures
from .bec import SupportCapError, bec_report
from .engine import ALL_STATES, BVI, EXACT, FLOAT, MODES, SCOPES, bvi
from .graph import find_mecs
from .model import ModelError, NormalizedCsg, load_csg, normalize, parse_prob
from .valuation import Valuation, initial_upper

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2


class InputError(Exception):
    pass


def fmt(q: Fraction) -> str:
    return f"{q} ({float(q):.12g})"


def resolve_model(arg: str) -> Path:
    p = Path(arg)
    if p.exists():
        return p
    try:
        return fixtures.path(p.name)
    except FileNotFoundError:
        raise InputError(f"{arg}: no such file") from None


def load_model(arg: str) -> NormalizedCsg:
    path = resolve_model(arg)
    try:
        return normalize(load_csg(path))
    except ModelError as e:
        raise InputError(f"{path}: {e}") from None
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def parse_epsilon(raw: str) -> Fraction:
    try:
        eps = Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad epsilon {raw!r}") from None
    if eps <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return eps


def positive_int(raw: str) -> int:
    try:
        n = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer {raw!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def per_original_state(g: NormalizedCsg, v: Valuation | None):
    orig = g.original
    for s, name in enumerate(orig.states):
        yield name, None if v is None else v[g.state_map[s]]


# -- solve -------------------------------------------------------------------

def write_trace(path: str, g: NormalizedCsg, result) -> None:
    names = g.game.states
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if path.endswith(".csv"):
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "state", "lower", "upper_after_bellman", "upper"])
            for rec in result.trace:
                for s, name in enumerate(names):
                    w.writerow([
                        rec.index, name, str(rec.lower[s]),
                        "" if rec.upper is None else str(rec.upper_after_bellman[s]),
                        "" if rec.upper is None else str(rec.upper[s]),
                    ])
        else:
            for rec in result.trace:
                fh.write(json.dumps(rec.to_json(g)) + "\n")


def cmd_solve(args) -> int:
    g = load_model(args.model)
    result = bvi(
        g, args.epsilon, args.max_iters,
        mode=args.mode, termination=args.termination,
        arithmetic=args.arithmetic, keep_trace=bool(args.trace),
        precision_bits=args.precision_bits,
    )
    if args.trace:
        write_trace(args.trace, g, result)
    rows = list(zip(
        per_original_state(g, result.lower), per_original_state(g, result.upper)
    ))
    out = sys.stdout
    if args.output == "json":
        doc = {
            "model": str(args.model),
            "mode": result.mode,
            "epsilon": str(result.epsilon),
            "arithmetic": args.arithmetic,
            "termination": args.termination,
            "iterations": result.iterations,
            "converged": result.converged,
            "states": {
                name: {"lower": str(lo), "upper": None if hi is None else str(hi)}
                for (name, lo), (_, hi) in rows
            },
        }
        out.write(json.dumps(doc, indent=2) + "\n")
    elif args.output == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["state", "lower", "upper"])
        for (name, lo), (_, hi) in rows:
            w.writerow([name, str(lo), "" if hi is None else str(hi)])
    else:
        width = max(len(name) for (name, _), _ in rows)
        out.write(f"mode: {result.mode}  epsilon: {result.epsilon}  arithmetic: {args.arithmetic}\n")
        for (name, lo), (_, hi) in rows:
            upper = "-" if hi is None else fmt(hi)
            out.write(f"{name:<{width}}  L = {fmt(lo)}  U = {upper}\n")
        out.write(f"iterations: {result.iterations}\n")
        out.write(f"converged: {'yes' if result.converged else 'no'}\n")
    return EXIT_OK if result.converged else EXIT_BUDGET


# -- inspect -----------------------------------------------------------------

def cmd_inspect(args) -> int:
    g = load_model(args.model)
    orig = g.original
    names = g.game.states
    mecs = [sorted(names[s] for s in m.states) for m in find_mecs(g, g.inner_states)]
    win = [orig.states[s] for s in sorted(g.winning_region)]
    actions = {
        orig.states[s]: [len(orig.actions_reach[s]), len(orig.actions_safe[s])]
        for s in range(orig.n)
    }
    if args.output == "json":
        doc = {
            "states": list(orig.states),
            "initial": orig.states[orig.initial_state],
            "targets": [orig.states[t] for t in sorted(orig.targets)],
            "actions": actions,
            "winning_region": win,
            "mecs": mecs,
        }
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
        return EXIT_OK
    out = sys.stdout
    out.write(f"states: {orig.n}\n")
    out.write(f"initial: {orig.states[orig.initial_state]}\n")
    out.write(f"targets: {{{', '.join(orig.states[t] for t in sorted(orig.targets))}}}\n")
    out.write("actions (R x S):\n")
    for name, (r, c) in actions.items():
        out.write(f"  {name}: {r} x {c}\n")
    out.write(f"W: {{{', '.join(win)}}}\n")
    if mecs:
        out.write("MECs: [" + ", ".join("{" + ",".join(m) + "}" for m in mecs) + "]\n")
    else:
        out.write("MECs: none\n")
    return EXIT_OK


# -- becs --------------------------------------------------------------------

def read_valuation(path: str, g: NormalizedCsg) -> Valuation:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh, parse_float=str)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: malformed document: {e}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: valuation must map state names to values")
    orig = g.original
    given = {}
    for name in orig.states:
        if name not in doc:
            raise InputError(f"{path}: missing state {name!r}")
        try:
            x = parse_prob(doc[name])
        except ModelError:
            raise InputError(f"{path}: bad value for {name!r}") from None
        if not 0 <= x <= 1:
            raise InputError(f"{path}: value {x} for {name!r} outside [0, 1]")
        given[name] = x
    vals = []
    for s, name in enumerate(g.game.states):
        if s == g.target_sink:
            vals.append(Fraction(1))
        elif s == g.losing_sink:
            vals.append(Fraction(0))
        else:
            vals.append(given[name])
    return Valuation(vals)


def cmd_becs(args) -> int:
    g = load_model(args.model)
    v = initial_upper(g) if args.valuation == "init" else read_valuation(args.valuation, g)
    report = bec_report(g, v)
    doc = report.to_json(g)
    doc["valuation"] = {name: str(x) for name, x in zip(g.game.states, v)}
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="csgbvi",
        description="Bounded value iteration for concurrent stochastic reachability games.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="compute [L, U] bounds on the reachability value")
    s.add_argument("model", help="model file (or the name of a bundled example)")
    s.add_argument("--epsilon", type=parse_epsilon, default=Fraction(1, 10**6),
                   help="precision, e.g. 1e-3 or 1/1000 (default 1e-6)")
    s.add_argument("--mode", choices=MODES, default=BVI)
    s.add_argument("--max-iters", type=positive_int, default=None)
    s.add_argument("--output", choices=("text", "json", "csv"), default="text")
    s.add_argument("--trace", metavar="FILE",
                   help="write the iteration trace (JSON lines, or CSV if FILE ends in .csv)")
    s.add_argument("--arithmetic", choices=(EXACT, FLOAT), default=EXACT)
    s.add_argument("--termination", choices=SCOPES, default=ALL_STATES)
    s.add_argument("--precision-bits", type=positive_int, default=None, metavar="N",
                   help="round L down and U up to multiples of 2^-N (exact mode)")
    s.set_defaults(func=cmd_solve)

    i = sub.add_parser("inspect", help="show MECs, the sure-losing region and action counts")
    i.add_argument("model")
    i.add_argument("--output", choices=("text", "json"), default="text")
    i.set_defaults(func=cmd_inspect)

    b = sub.add_parser("becs", help="report maximal bloated end components as JSON")
    b.add_argument("model")
    b.add_argument("--valuation", default="init",
                   help='JSON file mapping every state to a value, or "init" (default)')
    b.set_defaults(func=cmd_becs)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, SupportCapError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
