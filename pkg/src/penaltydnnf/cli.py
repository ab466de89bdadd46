"""Command-line interface.

Exit status: 0 when the command answered, 1 for a domain-level failure
(inconsistent hard part or evidence, oracle scope too large), 2 for usage,
parse and file errors.
"""
from __future__ import annotations

import argparse
import sys
import time
import typing as t
from contextlib import contextmanager
from pathlib import Path

from . import __version__
from .base import format_weight, load_base
from .compiler import CompileStats, compile_base, compile_clauses, loads_dimacs
from .diagnosis import (
    DEFAULT_EPSILON, MODES, CompiledSystem, compile_system, load_system, rank_diagnoses,
    recondition,
)
from .engine import InconsistentError, base_weight, infer, load_bundle, preferred_models, save_bundle
from .logic import ParseError, format_world, parse_formula, parse_literals, term_to_formula, to_cnf
from .nnf import CircuitError, dumps_nnf, loads_nnf
from .oracle import ScopeTooLargeError, oracle_diagnoses, oracle_infer, oracle_scan


class Report:
    """Result payload plus stage timings and sizes for one run."""

    def __init__(self, command: str):
        self.command = command
        self.results: list[tuple[str, str]] = []
        self.stats: dict[str, str] = {}

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.stats[f"time.{name}"] = f"{time.perf_counter() - start:.6f}"

    def add(self, key: str, value) -> None:
        self.results.append((key, str(value)))

    def circuit(self, prefix: str, c) -> None:
        self.stats[f"{prefix}.nodes"] = str(c.node_count)
        self.stats[f"{prefix}.edges"] = str(c.edge_count)

    def emit(self, porcelain: bool, out=None) -> None:
        out = out or sys.stdout
        if porcelain:
            for k, v in self.results:
                print(f"{k}={v}", file=out)
            print(f"report.command={self.command}", file=out)
            for k, v in self.stats.items():
                print(f"report.{k}={v}", file=out)
        else:
            for k, v in self.results:
                print(f"{k}: {v}" if k not in ("model", "diagnosis") else v, file=out)


def _read(loader, path):
    try:
        return loader(path)
    except (ParseError, CircuitError) as exc:
        exc.filename = str(path)
        raise


def _yesno(b: bool) -> str:
    return "yes" if b else "no"


# -- commands -----------------------------------------------------------------

def cmd_compile(args, rep: Report) -> int:
    sources = [x for x in (args.cnf, args.base, args.system) if x]
    if len(sources) != 1:
        raise argparse.ArgumentTypeError("give exactly one of --cnf, --base, --system")
    stats = CompileStats()
    if args.base:
        with rep.stage("parse"):
            base = _read(load_base, args.base)
        with rep.stage("compile"):
            cb = compile_base(base, stats=stats)
        save_bundle(cb, args.output)
        rep.circuit("circuit", cb.circuit)
        rep.add("bundle", args.output)
        rep.add("K", format_weight(base_weight(cb)))
    else:
        with rep.stage("parse"):
            if args.cnf:
                nvars, clauses, names = _read(lambda f: loads_dimacs(Path(f).read_text()), args.cnf)
            else:
                sd, ok = _read(load_system, args.system)
        with rep.stage("compile"):
            if args.cnf:
                c = compile_clauses(nvars, clauses, names, smooth=args.smooth, stats=stats)
            else:
                c = compile_system(sd, [v for v, _ in ok])
        Path(args.output).write_text(dumps_nnf(c))
        rep.circuit("circuit", c)
        rep.add("nnf", args.output)
        rep.add("consistent", _yesno(not c.is_const(False)))
    for k, v in vars(stats).items():
        rep.stats[f"compile.{k}"] = str(v)
    return 0


def _query_inputs(args):
    query = to_cnf(parse_formula(args.query))
    evidence = parse_literals(args.evidence) if args.evidence else parse_literals("")
    return query, evidence


def cmd_query(args, rep: Report) -> int:
    with rep.stage("parse"):
        cb = _read(load_bundle, args.bundle)
        query, evidence = _query_inputs(args)
    rep.circuit("circuit", cb.circuit)
    with rep.stage("infer"):
        ans = infer(cb, query, evidence, epsilon=args.weight_epsilon)
    rep.add("answer", _yesno(ans.entailed))
    rep.add("K", format_weight(ans.weight))
    rep.add("inconsistent", _yesno(ans.inconsistent))
    return 1 if ans.inconsistent else 0


def _emit_models(rep: Report, k: float, worlds: t.Iterable, order, limit):
    rep.add("K", format_weight(k))
    count = 0
    for w in worlds:
        if limit is not None and count >= limit:
            break
        rep.add("model", format_world(w, order))
        count += 1


def cmd_models(args, rep: Report) -> int:
    with rep.stage("parse"):
        cb = _read(load_bundle, args.bundle)
    rep.circuit("circuit", cb.circuit)
    k = base_weight(cb)
    stats: dict = {}
    with rep.stage("enumerate"):
        _emit_models(rep, k, preferred_models(cb, args.weight_epsilon, stats),
                     cb.original_vars, args.limit)
    for key, v in stats.items():
        rep.stats[f"enumerate.{key}"] = str(v)
    return 0 if k < float("inf") else 1


def cmd_check(args, rep: Report) -> int:
    with rep.stage("parse"):
        c = _read(lambda f: loads_nnf(Path(f).read_text()), args.nnf)
    rep.circuit("circuit", c)
    report = c.check()
    rep.add("decomposable", _yesno(report.decomposable))
    rep.add("smooth", _yesno(report.smooth))
    rep.add("consistent", _yesno(c.is_consistent()) if report.decomposable else "unknown")
    return 0


def _emit_diagnoses(rep: Report, mode, k, diagnoses, consistent):
    rep.add("mode", mode)
    rep.add("consistent", _yesno(consistent))
    rep.add("K", repr(k) if consistent else "inf")
    rep.add("logp", repr(-k) if consistent else "-inf")
    for d in diagnoses:
        rep.add("diagnosis", f"{d[0]} penalty={d[1]!r} probability={d[2]!r}")


def cmd_diagnose(args, rep: Report) -> int:
    with rep.stage("parse"):
        sd, ok = _read(load_system, args.system)
        obs = parse_literals(args.obs or "")
    with rep.stage("compile"):
        system = CompiledSystem(sd, ok, compile_system(sd, [v for v, _ in ok]))
    rep.circuit("circuit", system.circuit)
    with rep.stage("diagnose"):
        if args.top is not None:
            ranked = rank_diagnoses(system, obs, args.mode)[:args.top]
            rows = [(str(d), d.penalty, d.probability) for d in ranked]
            consistent = bool(ranked)
            k = ranked[0].penalty if ranked else float("inf")
        else:
            res = recondition(system, obs, args.mode, args.weight_epsilon or DEFAULT_EPSILON)
            rows = [(str(d), d.penalty, d.probability) for d in res.diagnoses]
            consistent, k = res.consistent, res.penalty
    _emit_diagnoses(rep, args.mode, k, rows, consistent)
    return 0 if consistent else 1


def cmd_oracle(args, rep: Report) -> int:
    what = args.what
    if what in ("query", "models"):
        if not args.base:
            raise argparse.ArgumentTypeError("oracle query/models need --base")
        base = _read(load_base, args.base)
        if what == "query":
            query, evidence = _query_inputs(args)
            ev = term_to_formula(evidence)
            with rep.stage("oracle"):
                answer = oracle_infer(base, query, ev)
                k = min((w for world, w in oracle_scan(base).table
                         if all(world.get(l.var) == l.positive for l in evidence)),
                        default=float("inf"))
            inconsistent = k == float("inf")
            rep.add("answer", _yesno(answer))
            rep.add("K", format_weight(k))
            rep.add("inconsistent", _yesno(inconsistent))
            return 1 if inconsistent else 0
        with rep.stage("oracle"):
            scan = oracle_scan(base)
        _emit_models(rep, scan.K, scan.preferred, base.variables, args.limit)
        return 0 if scan.K < float("inf") else 1
    if not args.system:
        raise argparse.ArgumentTypeError("oracle diagnose needs --system")
    sd, ok = _read(load_system, args.system)
    obs = parse_literals(args.obs or "")
    with rep.stage("oracle"):
        ranked = oracle_diagnoses(sd, ok, obs, args.mode)
    names = [v for v, _ in ok]
    rows = [(" ".join(v if t_[v] else "~" + v for v in names), pen, prob)
            for t_, pen, prob in ranked]
    if args.top is not None:
        rows = rows[:args.top]
    elif rows:
        eps = args.weight_epsilon or DEFAULT_EPSILON
        rows = [r for r in rows if r[1] <= rows[0][1] + eps]
    consistent = bool(rows)
    _emit_diagnoses(rep, args.mode, rows[0][1] if rows else float("inf"), rows, consistent)
    return 0 if consistent else 1


# -- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="penaltydnnf",
                                description="Compile weighted bases to smooth DNNF and query them.")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--porcelain", action="store_true",
                        help="key=value output including run report lines")
    common.add_argument("--weight-epsilon", type=float, default=0.0,
                        help="tolerance when keeping Or children during minimization")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", parents=[common], help="compile a CNF, base or system")
    c.add_argument("--cnf")
    c.add_argument("--base")
    c.add_argument("--system")
    c.add_argument("-o", "--output", required=True,
                   help="output .nnf file (bundle directory for --base)")
    c.add_argument("--smooth", action="store_true", help="smooth the --cnf output")
    c.set_defaults(func=cmd_compile)

    q = sub.add_parser("query", parents=[common], help="clausal inference from a bundle")
    q.add_argument("--bundle", required=True)
    q.add_argument("--query", required=True, help="formula, converted to CNF")
    q.add_argument("--evidence", help="term, e.g. 'a,~b'")
    q.set_defaults(func=cmd_query)

    m = sub.add_parser("models", parents=[common], help="enumerate preferred models")
    m.add_argument("--bundle", required=True)
    m.add_argument("--limit", type=int)
    m.set_defaults(func=cmd_models)

    k = sub.add_parser("check", parents=[common], help="structural flags of an .nnf file")
    k.add_argument("--nnf", required=True)
    k.set_defaults(func=cmd_check)

    d = sub.add_parser("diagnose", parents=[common], help="most probable diagnoses")
    d.add_argument("--system", required=True)
    d.add_argument("--obs", default="", help="observation literals, e.g. 'x,~z'")
    d.add_argument("--mode", choices=MODES, default="exact")
    d.add_argument("--top", type=int, help="rank all consistent diagnoses, print the best N")
    d.set_defaults(func=cmd_diagnose)

    o = sub.add_parser("oracle", parents=[common], help="brute-force counterpart of query/models/diagnose")
    o.add_argument("what", choices=("query", "models", "diagnose"))
    o.add_argument("--base")
    o.add_argument("--system")
    o.add_argument("--query")
    o.add_argument("--evidence")
    o.add_argument("--limit", type=int)
    o.add_argument("--obs", default="")
    o.add_argument("--mode", choices=MODES, default="exact")
    o.add_argument("--top", type=int)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv: t.Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "oracle" and args.what == "query" and not args.query:
        parser.error("oracle query needs --query")
    rep = Report(args.command)
    try:
        code = args.func(args, rep)
    except (ParseError, CircuitError, OSError, argparse.ArgumentTypeError, ValueError) as exc:
        if isinstance(exc, ScopeTooLargeError):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        if isinstance(exc, InconsistentError):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        where = getattr(exc, "filename", None)
        print(f"error: {where + ':' if where else ''}{exc}", file=sys.stderr)
        return 2
    rep.emit(args.porcelain)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
