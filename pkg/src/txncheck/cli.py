"""Command-line front end. Every command prints JSON lines on stdout.

Exit codes: 0 pass/member, 1 fail/non-member, 2 input error,
3 enumeration budget exceeded, 4 unsupported request.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .axec import AbstractExecution, graphof, validate_execution
from .codec import (
    InputError,
    execution_from_json,
    execution_to_json,
    graph_from_json,
    graph_to_json,
    history_from_json,
    kind_of,
    load,
)
from .core import validate_history
from .depgraph import DependencyGraph, GraphError, criteria, robustness_check
from .fixtures import emit_fixtures
from .oracle import (
    BudgetExceeded,
    EnumerationBudget,
    audit_laws,
    compatible_graphs,
    enumerate_executions,
    oracle_graph_membership,
    oracle_membership,
)
from .sessions import (
    FullCausal,
    PerObjectCausal,
    ExtendedExecution,
    ExtendedSpec,
    audit_session_laws,
    conforms,
    extended_execution_from_json,
    extended_history_from_json,
    lift_guarantee,
    parse_session_guarantee,
)
from .solver import NotSimpleError, decide_membership
from .spec import canonical_model, catalog, satisfies

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET, EXIT_UNSUPPORTED = 0, 1, 2, 3, 4


class Unsupported(Exception):
    pass


class Output:
    def __init__(self, pretty: bool, stream=None):
        self.pretty = pretty
        self.stream = stream or sys.stdout

    def emit(self, doc: dict):
        if self.pretty:
            cyc = doc.get("cycle")
            if cyc:
                doc = dict(doc, cycle_text=render_cycle(cyc))
            self.stream.write(json.dumps(doc, indent=2) + "\n")
        else:
            self.stream.write(json.dumps(doc, separators=(",", ":")) + "\n")


def render_cycle(edges) -> str:
    """``T1 -AD(x)-> T2 -VO(z)-> T3`` from edge tuples ``(src, kind, obj, dst, ...)``."""
    names = {"wr": "RF", "ww": "VO", "rw": "AD", "ar": "AR", "vis": "VIS"}
    if not edges:
        return ""
    parts = [edges[0][0]]
    for e in edges:
        kind, obj, dst = e[1], e[2], e[3]
        lab = names.get(kind, kind.upper())
        lab = f"{lab}({obj})" if obj else lab
        parts.append(f"-{lab}-> {dst}")
    return " ".join(parts)


def _edges_json(edges) -> list:
    return [list(e[:4]) + ([list(e[4])] if len(e) > 4 else []) for e in edges]


def _model(name: str) -> str:
    try:
        return canonical_model(name)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None


def _load_doc(path: str):
    return load(path)


def _load_graph(path: str) -> DependencyGraph:
    doc = _load_doc(path)
    if kind_of(doc) != "graph":
        raise InputError(f"{path}: expected a dependency graph (with 'wr' and 'ww')")
    return graph_from_json(doc)


def _load_execution(path: str) -> AbstractExecution:
    doc = _load_doc(path)
    if kind_of(doc) != "execution":
        raise InputError(f"{path}: expected an execution (with 'vis' and 'ar')")
    return execution_from_json(doc)


def _solver_history(sigma, h) -> tuple:
    for g in compatible_graphs(h):
        v = decide_membership(sigma, g)
        if v.member:
            return True, v.witness
    return False, None


def cmd_check(args, out: Output) -> int:
    model = _model(args.model)
    doc = _load_doc(args.file)
    kind = kind_of(doc)
    budget = EnumerationBudget.from_env()
    g = graph_from_json(doc) if kind == "graph" else None
    h = g.history if g is not None else history_from_json(doc)
    sigma = catalog(model, h.objects)
    engine = args.engine or ("oracle" if len(h) <= budget.max_transactions else "solver")
    res = {"command": "check", "model": model, "engine": engine, "input": kind}
    cycle = None
    if engine == "oracle":
        if g is not None:
            v = oracle_graph_membership(sigma, g, budget)
        else:
            v = oracle_membership(sigma, h, budget)
        member, witness = v.member, v.witness
    else:
        if not sigma.simple():
            raise Unsupported(f"the solver does not decide the non-simple model {model}")
        if g is not None:
            v = decide_membership(sigma, g)
            member, witness, cycle = v.member, v.witness, v.cycle
        else:
            member, witness = _solver_history(sigma, h)
    res["member"] = member
    res["verdict"] = "member" if member else "non-member"
    res["witness"] = execution_to_json(witness) if witness is not None else None
    if cycle:
        res["cycle"] = _edges_json(cycle)
    out.emit(res)
    return EXIT_OK if member else EXIT_FAIL


def cmd_oracle_check(args, out: Output) -> int:
    args.engine = "oracle"
    return cmd_check(args, out)


def cmd_robust(args, out: Output) -> int:
    model = _model(args.model)
    g = _load_graph(args.file)
    try:
        criteria(model, g.objects)
    except KeyError:
        raise Unsupported(f"no robustness criterion for model {model}") from None
    rep = robustness_check(model, g)
    out.emit(
        {
            "command": "robust",
            "model": model,
            "certified": rep.certified,
            "criteria": [
                {"name": r.name, "holds": r.holds, "cycle": _edges_json(r.cycle)} for r in rep.results
            ],
            "cycle": next((_edges_json(r.cycle) for r in rep.results if not r.holds), None),
        }
    )
    return EXIT_OK if rep.certified else EXIT_FAIL


def cmd_witness(args, out: Output) -> int:
    model = _model(args.model)
    g = _load_graph(args.file)
    sigma = catalog(model, g.objects)
    try:
        v = decide_membership(sigma, g)
    except NotSimpleError as exc:
        raise Unsupported(str(exc)) from None
    res = {
        "command": "witness",
        "model": model,
        "member": v.member,
        "verdict": "member" if v.member else "non-member",
    }
    if v.member:
        res["witness"] = execution_to_json(v.witness)
    else:
        res["cycle"] = _edges_json(v.cycle)
    out.emit(res)
    return EXIT_OK if v.member else EXIT_FAIL


def cmd_graphof(args, out: Output) -> int:
    e = _load_execution(args.file)
    bad = validate_execution(e)
    if bad:
        out.emit({"command": "graphof", "valid": False, "violations": [str(v) for v in bad]})
        return EXIT_FAIL
    out.emit({"command": "graphof", "valid": True, "graph": graph_to_json(graphof(e))})
    return EXIT_OK


def _extended_spec(args, objects) -> ExtendedSpec:
    try:
        sessions = tuple(parse_session_guarantee(s) for s in args.session or ())
    except ValueError as exc:
        raise InputError(str(exc)) from None
    causality = []
    if args.causal == "full":
        causality.append(FullCausal)
    elif args.causal == "per-object":
        causality.extend(PerObjectCausal(x) for x in objects)
    cons = ()
    if args.model:
        cons = tuple(lift_guarantee(g) for g in catalog(_model(args.model), objects).guarantees)
    return ExtendedSpec(sessions, tuple(causality), cons)


def _report_json(report: dict) -> dict:
    return {k: {"status": r.status, "failures": list(r.failures)} for k, r in report.items()}


def cmd_audit_laws(args, out: Output) -> int:
    doc = _load_doc(args.file)
    if kind_of(doc) != "execution":
        raise InputError(f"{args.file}: expected an execution (with 'vis' and 'ar')")
    extended = "sessions" in doc or args.session or args.causal != "full"
    if extended:
        ee = extended_execution_from_json(doc)
        spec = _extended_spec(args, ee.history.history.objects)
        verdict = conforms(ee, spec)
        if not verdict.conforms:
            out.emit(
                {
                    "command": "audit-laws",
                    "conforms": False,
                    "violations": [str(v) for v in verdict.violations],
                }
            )
            return EXIT_FAIL
        report = audit_session_laws(ee, spec)
    else:
        if not args.model:
            raise InputError("audit-laws needs --model for executions without sessions")
        e = execution_from_json(doc)
        bad = validate_execution(e)
        if bad:
            out.emit({"command": "audit-laws", "valid": False, "violations": [str(v) for v in bad]})
            return EXIT_FAIL
        report = audit_laws(e, catalog(_model(args.model), e.history.objects))
    ok = all(r.status != "fail" for r in report.values())
    out.emit({"command": "audit-laws", "pass": ok, "laws": _report_json(report)})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_conforms(args, out: Output) -> int:
    doc = _load_doc(args.file)
    ee: ExtendedExecution = extended_execution_from_json(doc)
    spec = _extended_spec(args, ee.history.history.objects)
    v = conforms(ee, spec)
    out.emit(
        {
            "command": "conforms",
            "conforms": v.conforms,
            "violations": [{"clause": c.clause, "pair": list(c.pair) if c.pair else None} for c in v.violations],
        }
    )
    return EXIT_OK if v.conforms else EXIT_FAIL


def cmd_enumerate(args, out: Output) -> int:
    h = history_from_json(_load_doc(args.file))
    sigma = catalog(_model(args.model), h.objects) if args.model else None
    n = 0
    for e in enumerate_executions(h, EnumerationBudget.from_env(), causal=not args.non_causal):
        if sigma is not None and not satisfies(e, sigma):
            continue
        n += 1
        if args.limit is None or n <= args.limit:
            out.emit({"execution": execution_to_json(e)})
    out.emit({"command": "enumerate", "count": n})
    return EXIT_OK


def cmd_fixtures(args, out: Output) -> int:
    entries = emit_fixtures()
    if args.emit:
        d = Path(args.emit)
        try:
            d.mkdir(parents=True, exist_ok=True)
            for f in entries:
                doc = dict(f.payload)
                if f.expected:
                    doc["expected"] = f.expected
                (d / f"{f.name}.json").write_text(json.dumps(doc, indent=2) + "\n")
        except OSError as exc:
            raise InputError(f"cannot write fixtures to {d}: {exc.strerror}") from None
    for f in entries:
        out.emit({"name": f.name, "kind": f.kind, "expected": f.expected})
    return EXIT_OK


def cmd_validate(args, out: Output) -> int:
    doc = _load_doc(args.file)
    kind = kind_of(doc)
    h = history_from_json(doc, check=False)
    bad = [str(v) for v in validate_history(h)]
    if not bad and kind == "graph":
        try:
            graph_from_json(doc)
        except InputError as exc:
            bad.append(str(exc))
    if not bad and kind == "execution":
        bad = [str(v) for v in validate_execution(execution_from_json(doc))]
    if not bad and "sessions" in doc:
        try:
            extended_history_from_json(doc)
        except InputError as exc:
            bad.append(str(exc))
    out.emit({"command": "validate", "kind": kind, "valid": not bad, "violations": bad})
    return EXIT_OK if not bad else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="txncheck", description=__doc__.splitlines()[0])
    p.add_argument("--pretty", action="store_true", help="indented output with rendered cycles")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("check", cmd_check, "membership of a history (or graph) in a model")
    sp.add_argument("model")
    sp.add_argument("file")
    sp.add_argument("--engine", choices=("oracle", "solver"), default=None)

    sp = add("oracle-check", cmd_oracle_check, "check with the brute-force oracle")
    sp.add_argument("model")
    sp.add_argument("file")

    sp = add("robust", cmd_robust, "static robustness criteria over a dependency graph")
    sp.add_argument("model")
    sp.add_argument("file")

    sp = add("witness", cmd_witness, "solver verdict for a graph, with a witness execution")
    sp.add_argument("model")
    sp.add_argument("file")

    sp = add("graphof", cmd_graphof, "dependency graph of a valid execution")
    sp.add_argument("file")

    for name, fn, help_ in (
        ("audit-laws", cmd_audit_laws, "evaluate the algebraic laws on an execution"),
        ("conforms", cmd_conforms, "check an execution with sessions against an extended spec"),
    ):
        sp = add(name, fn, help_)
        sp.add_argument("file")
        sp.add_argument("--model", help="consistency guarantees of this model")
        sp.add_argument("--session", action="append", help="RYW, RYW(x), MW or SS; repeatable")
        sp.add_argument("--causal", choices=("full", "per-object", "none"), default="full")

    sp = add("enumerate", cmd_enumerate, "list every valid execution of a history")
    sp.add_argument("file")
    sp.add_argument("--model", help="keep only executions satisfying this model")
    sp.add_argument("--limit", type=int, default=None, help="print at most this many")
    sp.add_argument("--non-causal", action="store_true", help="drop transitivity of visibility")

    sp = add("fixtures", cmd_fixtures, "list (and optionally write) the shipped fixtures")
    sp.add_argument("--emit", metavar="DIR")

    sp = add("validate", cmd_validate, "schema and validity check of any input file")
    sp.add_argument("file")
    return p


def _error(code: str, msg: str, status: int) -> int:
    sys.stderr.write(json.dumps({"error": code, "message": msg}) + "\n")
    return status


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args.pretty)
    try:
        return args.fn(args, out)
    except (InputError, GraphError) as exc:
        return _error("input-error", str(exc), EXIT_INPUT)
    except BudgetExceeded as exc:
        return _error("budget-exceeded", str(exc), EXIT_BUDGET)
    except (Unsupported, NotSimpleError) as exc:
        return _error("unsupported", str(exc), EXIT_UNSUPPORTED)


if __name__ == "__main__":
    sys.exit(main())
