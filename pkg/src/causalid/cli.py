"""Command-line interface: identify effects, verify against a model, export DOT.

Exit codes: 0 success, 1 usage or parse errors, 2 not identifiable,
3 verification deviation above tolerance.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from dataclasses import dataclass

from . import __version__
from .admg import Admg, parse_graph_text, to_dot
from .errors import CausalError
from .expr import Expression, free_variables, simplify, to_dict, to_latex
from .identify import NotIdentifiable, Query, TraceStep, identify
from .oracle import (
    conditional_from_table,
    evaluate,
    interventional,
    joint,
    load_model,
    random_scm,
    scm_graph,
)

_SCHEMA_VERSION = 1


@dataclass
class IdentifyReport:
    """The outcome of one identification run; exactly one of ``expression``
    and ``hedge`` is populated."""

    identifiable: bool
    latex: str | None = None
    expression: dict | None = None
    hedge: dict | None = None
    recursion_log: list[TraceStep] | None = None

    def to_json(self) -> str:
        doc = {"version": _SCHEMA_VERSION, "identifiable": self.identifiable}
        if self.identifiable:
            doc["latex"] = self.latex
            doc["expression"] = self.expression
        else:
            doc["hedge"] = self.hedge
        if self.recursion_log is not None:
            doc["recursion_log"] = [
                {"depth": s.depth, "line": s.line, "query": s.query}
                for s in self.recursion_log
            ]
        return json.dumps(doc, indent=2, sort_keys=True)


def _graph_from_args(args) -> Admg:
    text = None
    if getattr(args, "graph", None):
        if getattr(args, "graph_file", None):
            print("warning: both --graph and --graph-file given; using --graph", file=sys.stderr)
        text = args.graph
    elif getattr(args, "graph_file", None):
        if args.graph_file == "-":
            text = sys.stdin.read()
        else:
            with open(args.graph_file, "r", encoding="utf-8") as fh:
                text = fh.read()
    if text is None:
        raise CausalError("no graph given; use --graph or --graph-file")
    return parse_graph_text(text)


def _names(values) -> frozenset[str]:
    out = []
    for chunk in values or []:
        out.extend(t for t in (part.strip() for part in chunk.split(",")) if t)
    return frozenset(out)


def _hedge_dict(exc: NotIdentifiable) -> dict:
    def graph_dict(g: Admg) -> dict:
        return {
            "vertices": sorted(g.vertices),
            "directed": [list(e) for e in sorted(g.directed)],
            "bidirected": [sorted(e) for e in sorted(g.bidirected, key=sorted)],
        }

    w = exc.witness
    return {
        "forest": graph_dict(w.forest_f),
        "subforest": graph_dict(w.forest_f_sub),
        "sub_x": sorted(w.sub_x),
        "sub_y": sorted(w.sub_y),
        "description": w.describe(),
    }


def _print_trace(log: list[TraceStep]) -> None:
    for step in log:
        print(f"{'  ' * step.depth}line {step.line}: {step.query} on "
              f"{{{', '.join(step.vertices)}}}", file=sys.stderr)


def cmd_identify(args) -> int:
    g = _graph_from_args(args)
    q = Query.of(_names(args.effect), _names(args.do), _names(args.cond))
    log: list[TraceStep] = []
    fmt = args.format or os.environ.get("CAUSALID_FORMAT", "latex")
    if fmt not in ("latex", "text", "ast"):
        raise CausalError(f"unknown format {fmt!r}")
    try:
        raw = identify(q, g, log, simplify_result=False)
    except NotIdentifiable as exc:
        if args.verbose:
            _print_trace(log)
        report = IdentifyReport(
            identifiable=False,
            hedge=_hedge_dict(exc),
            recursion_log=log if args.verbose else None,
        )
        if fmt == "ast":
            print(report.to_json())
        else:
            print("not identifiable")
            print(exc.witness.describe())
        return 2
    if args.verbose:
        _print_trace(log)
    if args.simplify == "full":
        expression = simplify(raw)
    elif args.simplify == "basic":
        expression = simplify(raw, merge_chains=False)
    else:
        expression = raw
    report = IdentifyReport(
        identifiable=True,
        latex=to_latex(expression),
        expression=to_dict(expression),
        recursion_log=log if args.verbose else None,
    )
    if fmt == "latex":
        print(report.latex)
    elif fmt == "text":
        print("identifiable: yes")
        print(report.latex)
    else:
        print(report.to_json())
    return 0


def _verify_once(model, effect, do, cond, expression: Expression):
    """Compare the expression against the interventional oracle for every
    assignment of the query variables.

    Free variables beyond the query (value-independent interventions
    introduced during the recursion) are pinned to 0.  Returns the rows
    ``(label, evaluated, oracle)`` and the max absolute deviation.
    """
    table = joint(model)
    extras = sorted(free_variables(expression) - effect - do - cond)
    worst = 0.0
    rows = []
    names = sorted(do)
    for xs in itertools.product(*(range(model.domain_of(v)) for v in names)):
        forced = dict(zip(names, xs))
        itable = interventional(model, forced)
        outs = sorted(effect | cond)
        for vals in itertools.product(*(range(model.domain_of(v)) for v in outs)):
            binding = dict(zip(outs, vals))
            truth = conditional_from_table(
                itable,
                {v: binding[v] for v in effect},
                {v: binding[v] for v in cond},
            )
            label = _row_label(effect, cond, forced, binding)
            binding.update(forced)
            binding.update({v: 0 for v in extras})
            got = evaluate(expression, table, binding)
            rows.append((label, got, truth))
            worst = max(worst, abs(got - truth))
    return rows, worst


def _row_label(effect, cond, forced, binding) -> str:
    do_part = ", ".join(f"{v.lower()}={val}" for v, val in sorted(forced.items()))
    out_part = ", ".join(f"{v.lower()}={binding[v]}" for v in sorted(effect))
    head = f"P_{{{do_part}}}" if do_part else "P"
    if cond:
        cond_part = ", ".join(f"{v.lower()}={binding[v]}" for v in sorted(cond))
        return f"{head}({out_part}|{cond_part})"
    return f"{head}({out_part})"


def cmd_verify(args) -> int:
    with open(args.model, "r", encoding="utf-8") as fh:
        model = load_model(fh.read())
    g = scm_graph(model)
    effect, do, cond = _names(args.effect), _names(args.do), _names(args.cond)
    try:
        expression = identify(Query.of(effect, do, cond), g)
    except NotIdentifiable as exc:
        print("not identifiable")
        print(exc.witness.describe())
        return 2
    print(to_latex(expression))
    rows, worst = _verify_once(model, effect, do, cond, expression)
    if len(rows) <= 32:
        for label, got, truth in rows:
            print(f"{label} = {got:.6g} (oracle {truth:.6g})")
    for trial in range(args.trials):
        remodel = random_scm(g, seed=trial)
        _, dev = _verify_once(remodel, effect, do, cond, expression)
        worst = max(worst, dev)
    print(f"max deviation: {worst:.3e}")
    if worst > args.tolerance:
        print(f"FAIL: deviation above tolerance {args.tolerance:g}")
        return 3
    print("OK")
    return 0


def cmd_export_dot(args) -> int:
    g = _graph_from_args(args)
    sys.stdout.write(to_dot(g))
    return 0


def _add_graph_args(sub) -> None:
    sub.add_argument("--graph", help="inline graph, comma-separated edges (A->B, A<->B)")
    sub.add_argument("--graph-file", help="path to a graph file, or - for stdin")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalid",
        description="Identify causal effects on mixed graphs and verify them numerically.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p_id = subs.add_parser("identify", help="identify P_x(y) or P_x(y|z)")
    _add_graph_args(p_id)
    p_id.add_argument("--effect", action="append", required=True, help="outcome variables")
    p_id.add_argument("--do", action="append", default=[], help="intervened variables")
    p_id.add_argument("--cond", action="append", default=[], help="conditioning variables")
    p_id.add_argument("--format", choices=["latex", "text", "ast"],
                      help="output format (default: $CAUSALID_FORMAT or latex)")
    p_id.add_argument("--simplify", choices=["full", "basic", "none"], default="full",
                      help="rewrite level for the result (basic skips chain merging)")
    p_id.add_argument("--verbose", action="store_true", help="print the recursion trace")
    p_id.set_defaults(func=cmd_identify)

    p_ver = subs.add_parser("verify", help="verify an identified effect against a model file")
    p_ver.add_argument("model", help="JSON model document")
    p_ver.add_argument("--effect", action="append", required=True)
    p_ver.add_argument("--do", action="append", default=[])
    p_ver.add_argument("--cond", action="append", default=[])
    p_ver.add_argument("--tolerance", type=float, default=1e-9)
    p_ver.add_argument("--trials", type=int, default=0,
                       help="additionally verify N random re-parameterisations")
    p_ver.set_defaults(func=cmd_verify)

    p_dot = subs.add_parser("export-dot", help="emit the graph as DOT text")
    _add_graph_args(p_dot)
    p_dot.set_defaults(func=cmd_export_dot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CausalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
