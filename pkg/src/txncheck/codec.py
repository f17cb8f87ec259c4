"""JSON encoding of histories, executions and dependency graphs.

History::

    {"transactions": [{"id": "t1", "ops": [{"kind": "write", "obj": "x", "val": 1},
                                           {"kind": "read", "obj": "y", "val": 0},
                                           {"kind": "marker", "tag": "ser"}]}],
     "init": "t0",                  # optional, visible to every transaction
     "sessions": [["t1", "t2"]]}    # optional, session order

Executions add ``"vis"`` and ``"ar"`` edge lists (VIS given transitively);
graphs add ``"wr"`` and ``"ww"`` maps from object to edge list. ``"rw"`` is
written on output and, if present on input, must match the derived edges.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .axec import AbstractExecution, PreExecution
from .core import History, Operation, OpKind, Transaction, validate_history
from .depgraph import DependencyGraph, GraphError, build_graph
from .rel import Relation

INT64 = (-(2**63), 2**63 - 1)


class InputError(ValueError):
    """Malformed or schema-violating input."""


def _need(cond: bool, msg: str):
    if not cond:
        raise InputError(msg)


def op_from_json(d: Any) -> Operation:
    _need(isinstance(d, dict), f"operation must be an object, got {d!r}")
    kind = d.get("kind")
    _need(kind in ("read", "write", "marker"), f"unknown operation kind {kind!r}")
    if kind == "marker":
        _need(set(d) <= {"kind", "tag"}, f"marker has unexpected fields: {sorted(d)}")
        tag = str(d.get("tag", "")).lower()
        try:
            return Operation(OpKind.MARKER, tag=tag)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    _need(set(d) <= {"kind", "obj", "val"}, f"{kind} has unexpected fields: {sorted(d)}")
    obj, val = d.get("obj"), d.get("val")
    _need(isinstance(obj, str) and obj != "", f"{kind} needs a non-empty string 'obj'")
    _need(isinstance(val, int) and not isinstance(val, bool), f"{kind} needs an integer 'val'")
    _need(INT64[0] <= val <= INT64[1], f"value {val} does not fit in 64 bits")
    return Operation(OpKind(kind), obj, val)


def op_to_json(op: Operation) -> dict:
    if op.kind is OpKind.MARKER:
        return {"kind": "marker", "tag": op.tag}
    return {"kind": op.kind.value, "obj": op.obj, "val": op.val}


def history_from_json(doc: Any, check: bool = True) -> History:
    _need(isinstance(doc, dict), "document must be a JSON object")
    txs = doc.get("transactions")
    _need(isinstance(txs, list), "'transactions' must be a list")
    out = []
    for t in txs:
        _need(isinstance(t, dict), "each transaction must be an object")
        tid = t.get("id")
        _need(isinstance(tid, str) and tid != "", "transaction 'id' must be a non-empty string")
        ops = t.get("ops", [])
        _need(isinstance(ops, list), f"'ops' of {tid} must be a list")
        out.append(Transaction(tid, frozenset(op_from_json(o) for o in ops)))
    init = doc.get("init")
    _need(init is None or isinstance(init, str), "'init' must be a transaction id")
    h = History(tuple(out), init=init)
    if check:
        bad = validate_history(h)
        _need(not bad, "invalid history: " + ", ".join(map(str, bad)))
    return h


def history_to_json(h: History) -> dict:
    doc: dict = {
        "transactions": [
            {"id": t.id, "ops": [op_to_json(o) for o in sorted(t.ops, key=_op_order)]}
            for t in h.transactions
        ]
    }
    if h.init is not None:
        doc["init"] = h.init
    return doc


def _op_order(op: Operation):
    return (op.kind is OpKind.MARKER, op.obj or "", op.kind is OpKind.WRITE, op.val or 0)


def _edges(h: History, raw: Any, what: str) -> list:
    _need(isinstance(raw, list), f"'{what}' must be a list of [src, dst] pairs")
    out = []
    for e in raw:
        _need(
            isinstance(e, list) and len(e) == 2 and all(isinstance(a, str) for a in e),
            f"bad edge in '{what}': {e!r}",
        )
        for a in e:
            _need(a in h.universe, f"unknown transaction {a!r} in '{what}'")
        out.append((e[0], e[1]))
    return out


def relation_to_json(r: Relation) -> list:
    return [[a, b] for a, b in r.pairs()]


def execution_from_json(doc: Any, partial: bool = False) -> AbstractExecution:
    h = history_from_json(doc)
    _need("vis" in doc and "ar" in doc, "an execution needs 'vis' and 'ar'")
    u = h.universe
    vis = Relation.from_pairs(u, _edges(h, doc["vis"], "vis"))
    ar = Relation.from_pairs(u, _edges(h, doc["ar"], "ar"))
    cls = PreExecution if partial else AbstractExecution
    return cls(h, vis, ar)


def execution_to_json(e: AbstractExecution) -> dict:
    doc = history_to_json(e.history)
    doc["vis"] = relation_to_json(e.vis)
    doc["ar"] = relation_to_json(e.ar)
    return doc


def _edge_map(h: History, raw: Any, what: str) -> dict:
    _need(isinstance(raw, dict), f"'{what}' must map objects to edge lists")
    return {x: _edges(h, v, f"{what}.{x}") for x, v in raw.items()}


def graph_from_json(doc: Any) -> DependencyGraph:
    h = history_from_json(doc)
    _need("wr" in doc and "ww" in doc, "a dependency graph needs 'wr' and 'ww'")
    wr = _edge_map(h, doc["wr"], "wr")
    ww = _edge_map(h, doc["ww"], "ww")
    rw = _edge_map(h, doc["rw"], "rw") if "rw" in doc else None
    try:
        return build_graph(h, wr, ww, rw)
    except GraphError as exc:
        raise InputError(str(exc)) from None


def graph_to_json(g: DependencyGraph) -> dict:
    doc = history_to_json(g.history)
    for key, fam in (("wr", g.wr), ("ww", g.ww), ("rw", g.rw)):
        doc[key] = {x: relation_to_json(r) for x, r in fam.items() if r}
    return doc


def kind_of(doc: Any) -> str:
    _need(isinstance(doc, dict), "document must be a JSON object")
    if "wr" in doc or "ww" in doc:
        return "graph"
    if "vis" in doc or "ar" in doc:
        return "execution"
    return "history"


def load(path: Union[str, Path]) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None
