"""Command line front end.

Subcommands: parse, pretty, sat, valid, entails, simulate, conform.
A universe argument is either a builtin corpus name or a path to a
.uni / .chalo file; a formula argument is either the name of a
zero-argument def from the universe or inline formula text.

Exit codes are uniform: 0 when the input parses / the query holds /
the trace conforms, 2 when a query is refuted (unsatisfiable, a
countermodel was found, or some window violated the formula), 1 for
usage, parse, or I/O errors.  Reports are deterministic; identical
inputs produce byte-identical output.  The CHALO_SEED environment
variable fixes the seed of randomized simulation scripts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import corpus
from .desugar import NormalizeError, normalize
from .enumeration import (
    DEFAULT_CAP, CardinalityError, ModelSpace, entails, satisfiable, valid,
)
from .formulas import level_of, pretty
from .parser import ParseError, parse_formula, parse_universe
from .semantics import Engine, EvalError
from .systems import run_stopwatch, run_subway, run_switch, ScriptError
from .traces import TraceError, conform, load_trace, trace_to_text
from .universe import UniverseError

SCHEMA = "chalo-report-1"

_ERRORS = (ParseError, NormalizeError, EvalError, UniverseError,
           TraceError, ScriptError, CardinalityError, KeyError,
           ValueError, OSError)


def _load_universe(arg):
    if os.path.exists(arg):
        with open(arg, "r", encoding="utf-8") as fh:
            return parse_universe(fh.read())
    if arg in corpus.BUILTIN:
        return corpus.load(arg)
    raise UniverseError(
        "no file %r and no builtin universe of that name (builtins: %s)"
        % (arg, ", ".join(corpus.BUILTIN)))


def _resolve_formula(uni, text_or_name, ffile=None):
    """Formula from -f FILE, a def name, or inline text; returns
    (surface formula, display name)."""
    if ffile is not None:
        with open(ffile, "r", encoding="utf-8") as fh:
            src = fh.read().strip()
        return parse_formula(src, uni), os.path.basename(ffile)
    if text_or_name is None:
        raise UniverseError("no formula given")
    by_arity = uni.macros.get(text_or_name)
    if by_arity is not None and 0 in by_arity:
        return corpus.named_formula(uni, text_or_name), text_or_name
    return parse_formula(text_or_name, uni), text_or_name


def _apply_natbound(uni, args):
    if getattr(args, "natbound", None) is not None:
        if args.natbound < 0:
            raise UniverseError("natbound must not be negative")
        uni.nat_bound = args.natbound
    return uni


def _emit(args, payload, text_lines):
    if getattr(args, "json", False):
        payload["schema"] = SCHEMA
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


# --- subcommands ------------------------------------------------------------

def _cmd_parse(args):
    uni = _apply_natbound(_load_universe(args.universe), args)
    tree = uni.tree
    lines = [
        "universe: %s" % uni.name,
        "places: %s" % (" ".join(uni.flat_places()) or "(none)"),
        "tree: %s" % ("tree %d %d %d (buffers %s)"
                      % (tree.buffers, tree.entries, tree.width,
                         " ".join(tree.buffer_names))
                      if tree else "none"),
        "natbound: %d" % uni.nat_bound,
        "defs: %d" % len(uni.macros),
    ]
    payload = {
        "command": "parse",
        "universe": uni.name,
        "places": uni.flat_places(),
        "tree": ([tree.buffers, tree.entries, tree.width] if tree else None),
        "natbound": uni.nat_bound,
        "defs": sorted(uni.macros),
    }
    if args.formula is not None or args.file is not None:
        f, name = _resolve_formula(uni, args.formula, args.file)
        lv = level_of(normalize(f, uni))
        lines += ["formula: %s" % pretty(f),
                  "level: %s" % ("pure" if lv is None else lv)]
        payload["formula"] = pretty(f)
        payload["level"] = lv
    _emit(args, payload, lines)
    return 0


def _cmd_pretty(args):
    uni = _apply_natbound(_load_universe(args.universe), args)
    f, name = _resolve_formula(uni, args.formula, args.file)
    shown = pretty(normalize(f, uni)) if args.desugar else pretty(f)
    _emit(args, {"command": "pretty", "universe": uni.name,
                 "formula": name, "desugar": bool(args.desugar),
                 "text": shown}, [shown])
    return 0


def _query_space(uni, args, levels):
    level = args.level if args.level is not None else max(levels)
    cap = args.max_models if args.max_models is not None else DEFAULT_CAP
    return ModelSpace(uni, level, cap=cap), level


def _cmd_sat(args):
    uni = _apply_natbound(_load_universe(args.universe), args)
    f, name = _resolve_formula(uni, args.formula, args.file)
    nf = normalize(f, uni)
    space, level = _query_space(uni, args, [level_of(nf, fallback=0) or 0])
    eng = Engine(uni, prune=not args.no_prune)
    m = satisfiable(nf, space, eng)
    payload = {"command": "sat", "universe": uni.name, "formula": name,
               "level": level, "result": "sat" if m is not None else "unsat",
               "model": None if m is None else repr(m)}
    if m is None:
        _emit(args, payload, ["satisfiable: no"])
        return 2
    _emit(args, payload, ["satisfiable: yes", "model: %r" % (m,)])
    return 0


def _cmd_valid(args):
    uni = _apply_natbound(_load_universe(args.universe), args)
    f, name = _resolve_formula(uni, args.formula, args.file)
    nf = normalize(f, uni)
    space, level = _query_space(uni, args, [level_of(nf, fallback=0) or 0])
    eng = Engine(uni, prune=not args.no_prune)
    ok, cex = valid(nf, space, eng)
    payload = {"command": "valid", "universe": uni.name, "formula": name,
               "level": level, "result": "valid" if ok else "refuted",
               "countermodel": None if ok else repr(cex)}
    if ok:
        _emit(args, payload, ["valid: yes"])
        return 0
    _emit(args, payload, ["valid: no", "countermodel: %r" % (cex,)])
    return 2


def _cmd_entails(args):
    uni = _apply_natbound(_load_universe(args.universe), args)
    p, pname = _resolve_formula(uni, args.hypothesis)
    q, qname = _resolve_formula(uni, args.conclusion)
    np_, nq = normalize(p, uni), normalize(q, uni)
    levels = [level_of(np_, fallback=0) or 0, level_of(nq, fallback=0) or 0]
    space, level = _query_space(uni, args, levels)
    eng = Engine(uni, prune=not args.no_prune)
    ok, cex = entails(np_, nq, space, eng)
    payload = {"command": "entails", "universe": uni.name,
               "hypothesis": pname, "conclusion": qname, "level": level,
               "result": "entailed" if ok else "refuted",
               "countermodel": None if ok else repr(cex)}
    if ok:
        _emit(args, payload, ["entailed: yes"])
        return 0
    _emit(args, payload, ["entailed: no", "countermodel: %r" % (cex,)])
    return 2


def _cmd_simulate(args):
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("CHALO_SEED", "0"))
    uni = _load_universe(args.universe) if args.universe else corpus.load(
        "switch" if args.system == "switch" else args.system)
    _apply_natbound(uni, args)
    payload = {"command": "simulate", "system": args.system, "seed": seed}
    lines = []
    if args.system == "subway":
        kw = {} if args.script is None else {"script": args.script}
        if args.steps is not None:
            kw["steps"] = args.steps
        trace = run_subway(uni, **kw)
    elif args.system == "stopwatch":
        kw = {} if args.script is None else {"script": args.script}
        if args.steps is not None:
            kw["steps"] = args.steps
        trace = run_stopwatch(uni, **kw)
    else:
        kw = {"seed": seed}
        if args.script is not None:
            kw["script"] = args.script
        if args.steps is not None:
            kw["steps"] = args.steps
        res = run_switch(uni, **kw)
        trace = res.trace
        occ = ["%s=%d" % (b, res.max_occupancy[b])
               for b in sorted(res.max_occupancy)]
        lines.append("arrivals: %d  moves: %d  drains: %d  drops: %d"
                     % (len(res.arrivals), len(res.moves),
                        len(res.drains), len(res.drops)))
        lines.append("max occupancy: %s" % " ".join(occ))
        payload.update(arrivals=len(res.arrivals), moves=len(res.moves),
                       drains=len(res.drains), drops=len(res.drops),
                       max_occupancy={b: res.max_occupancy[b]
                                      for b in sorted(res.max_occupancy)})
    out = args.output or (args.system + ".trace")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(trace_to_text(trace))
    lines.insert(0, "wrote %d steps to %s" % (len(trace.steps), out))
    payload.update(steps=len(trace.steps), trace=out, universe=uni.name)
    _emit(args, payload, lines)
    return 0


def _cmd_conform(args):
    uni = _apply_natbound(_load_universe(args.universe), args)
    f, name = _resolve_formula(uni, args.formula, args.file)
    trace = load_trace(args.trace, uni)
    guard = None
    mode = "every"
    if args.guard is not None:
        guard, _ = _resolve_formula(uni, args.guard)
        mode = "guarded"
    if args.level is not None:
        lv = level_of(normalize(f, uni))
        if lv != args.level:
            raise TraceError("formula %s has level %s, not the requested %d"
                             % (name, lv, args.level))
    eng = Engine(uni, prune=not args.no_prune)
    report = conform(trace, f, mode=mode, guard=guard, engine=eng,
                     formula_name=name)
    payload = report.to_dict()
    payload["command"] = "conform"
    _emit(args, payload, [str(report)])
    return 0 if report.ok else 2


# --- argument plumbing ------------------------------------------------------

def _add_common(p, natbound=True):
    p.add_argument("--json", action="store_true",
                   help="machine-readable report on stdout")
    if natbound:
        p.add_argument("--natbound", type=int, default=None, metavar="N",
                       help="override the universe's natural-number bound")


def _add_formula_opts(p):
    p.add_argument("-f", "--formula", dest="file", default=None, metavar="FILE",
                   help="read the formula from a file instead")
    p.add_argument("--no-prune", action="store_true",
                   help="disable footprint pruning in the solver")


def _add_space_opts(p):
    p.add_argument("-k", "--level", type=int, default=None,
                   help="model level (default: the formula's own level)")
    p.add_argument("--max-models", type=int, default=None, metavar="N",
                   help="cardinality guard for the model space (default %d)"
                        % DEFAULT_CAP)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="chalo",
        description="Parse, solve, simulate, and check the change logics "
                    "of snapshot towers.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a universe and optional formula")
    p.add_argument("universe", help="builtin name or .uni/.chalo file")
    p.add_argument("formula", nargs="?", default=None,
                   help="def name or formula text")
    p.add_argument("-f", "--formula", dest="file", default=None, metavar="FILE")
    _add_common(p)
    p.set_defaults(fn=_cmd_parse)

    p = sub.add_parser("pretty", help="print a formula, optionally desugared")
    p.add_argument("universe")
    p.add_argument("formula", nargs="?", default=None)
    p.add_argument("-f", "--formula", dest="file", default=None, metavar="FILE")
    p.add_argument("--desugar", action="store_true",
                   help="expand defs, tuples, and framed arrows first")
    _add_common(p)
    p.set_defaults(fn=_cmd_pretty)

    for cmd, fn, hlp in (("sat", _cmd_sat, "search for a satisfying model"),
                         ("valid", _cmd_valid, "check truth in every model")):
        p = sub.add_parser(cmd, help=hlp)
        p.add_argument("formula", nargs="?", default=None)
        p.add_argument("-u", "--universe", required=True)
        _add_formula_opts(p)
        _add_space_opts(p)
        _add_common(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("entails", help="check one formula forces another")
    p.add_argument("hypothesis")
    p.add_argument("conclusion")
    p.add_argument("-u", "--universe", required=True)
    p.add_argument("--no-prune", action="store_true")
    _add_space_opts(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_entails)

    p = sub.add_parser("simulate", help="run a bundled system and write a trace")
    p.add_argument("system", choices=("subway", "stopwatch", "switch"))
    p.add_argument("--script", default=None,
                   help="scenario name or event list, e.g. strp@3,strp@9")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None,
                   help="randomized-script seed (default: $CHALO_SEED or 0)")
    p.add_argument("-u", "--universe", default=None,
                   help="override the builtin universe of the system")
    p.add_argument("-o", "--output", default=None, metavar="FILE",
                   help="trace file to write (default SYSTEM.trace)")
    _add_common(p)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("conform", help="check a trace window by window")
    p.add_argument("formula", nargs="?", default=None)
    p.add_argument("-u", "--universe", required=True)
    p.add_argument("-t", "--trace", required=True, metavar="FILE")
    p.add_argument("--guard", default=None, metavar="FORMULA",
                   help="only check windows where this formula holds")
    _add_formula_opts(p)
    p.add_argument("-k", "--level", type=int, default=None,
                   help="assert the formula has this level")
    _add_common(p)
    p.set_defaults(fn=_cmd_conform)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except _ERRORS as e:
        msg = e.args[0] if e.args else str(e)
        print("error: %s" % (msg,), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
