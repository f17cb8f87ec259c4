"""The shipped litmus corpus: classic anomalies, the lost-update running example
and a graph on which the naive solver for a non-simple model is incomplete.

Anomaly histories carry an initialiser ``T0`` that writes 0 to every object
involved and is visible to every other transaction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .axec import AbstractExecution, execution
from .codec import execution_to_json, graph_to_json, history_to_json
from .core import History, Marker, Read, Write, history, txn
from .depgraph import DependencyGraph, build_graph

A, F = "allowed", "forbidden"
MATRIX_MODELS = ("cc", "ccser", "psi", "si", "ser")


def _row(*cells: str) -> dict:
    return dict(zip(MATRIX_MODELS, cells))


@dataclass(frozen=True)
class Anomaly:
    name: str
    history: History
    wr: dict
    ww: dict
    expected: dict

    def graph(self) -> DependencyGraph:
        return build_graph(self.history, self.wr, self.ww)


def fractured_reads() -> Anomaly:
    h = history(
        txn("T0", Write("x", 0), Write("y", 0)),
        txn("T1", Write("x", 1), Write("y", 1)),
        txn("T2", Read("x", 1), Read("y", 0)),
        init="T0",
    )
    return Anomaly(
        "fractured-reads",
        h,
        {"x": [("T1", "T2")], "y": [("T0", "T2")]},
        {"x": [("T0", "T1")], "y": [("T0", "T1")]},
        _row(F, F, F, F, F),
    )


def causality_violation() -> Anomaly:
    h = history(
        txn("T0", Write("x", 0), Write("y", 0)),
        txn("T1", Write("x", 1)),
        txn("T2", Read("x", 1), Write("y", 1)),
        txn("T3", Read("x", 0), Read("y", 1)),
        init="T0",
    )
    return Anomaly(
        "causality-violation",
        h,
        {"x": [("T1", "T2"), ("T0", "T3")], "y": [("T2", "T3")]},
        {"x": [("T0", "T1")], "y": [("T0", "T2")]},
        _row(F, F, F, F, F),
    )


def _lost_update_history(marked: bool) -> History:
    extra = (Marker(),) if marked else ()
    return history(
        txn("T0", Write("acct", 0)),
        txn("T1", Read("acct", 0), Write("acct", 50), *extra),
        txn("T2", Read("acct", 0), Write("acct", 25), *extra),
        txn("S", Read("acct", 25)),
        init="T0",
    )


_LU_WR = {"acct": [("T0", "T1"), ("T0", "T2"), ("T2", "S")]}
_LU_WW = {"acct": [("T0", "T1"), ("T0", "T2"), ("T1", "T2")]}


def lost_update() -> Anomaly:
    return Anomaly("lost-update", _lost_update_history(False), _LU_WR, _LU_WW, _row(A, A, F, F, F))


def serialisable_lost_update() -> Anomaly:
    return Anomaly(
        "serialisable-lost-update", _lost_update_history(True), _LU_WR, _LU_WW, _row(A, F, F, F, F)
    )


def _long_fork_history(marked: bool) -> History:
    extra = (Marker(),) if marked else ()
    return history(
        txn("T0", Write("x", 0), Write("y", 0)),
        txn("T1", Write("x", 1), *extra),
        txn("T2", Write("y", 1), *extra),
        txn("T3", Read("x", 1), Read("y", 0)),
        txn("T4", Read("y", 1), Read("x", 0)),
        init="T0",
    )


_LF_WR = {"x": [("T1", "T3"), ("T0", "T4")], "y": [("T0", "T3"), ("T2", "T4")]}
_LF_WW = {"x": [("T0", "T1")], "y": [("T0", "T2")]}


def long_fork() -> Anomaly:
    return Anomaly("long-fork", _long_fork_history(False), _LF_WR, _LF_WW, _row(A, A, A, F, F))


def long_fork_ser_updates() -> Anomaly:
    return Anomaly(
        "long-fork-ser-updates", _long_fork_history(True), _LF_WR, _LF_WW, _row(A, F, A, F, F)
    )


def write_skew() -> Anomaly:
    h = history(
        txn("T0", Write("x", 0), Write("y", 0)),
        txn("T1", Read("x", 0), Write("y", 1)),
        txn("T2", Read("y", 0), Write("x", 1)),
        init="T0",
    )
    return Anomaly(
        "write-skew",
        h,
        {"x": [("T0", "T1")], "y": [("T0", "T2")]},
        {"x": [("T0", "T2")], "y": [("T0", "T1")]},
        _row(A, A, A, A, F),
    )


def running_example() -> Anomaly:
    """The lost-update running example, with its drawn execution."""
    lu = lost_update()
    return Anomaly("running-example", lu.history, lu.wr, lu.ww, dict(lu.expected))


def running_example_execution() -> AbstractExecution:
    h = _lost_update_history(False)
    vis = [("T0", "T1"), ("T0", "T2"), ("T0", "S"), ("T1", "S"), ("T2", "S")]
    order = ["T0", "T1", "T2", "S"]
    ar = [(a, b) for i, a in enumerate(order) for b in order[i + 1 :]]
    return execution(h, vis, ar)


def anomalies() -> list:
    return [
        fractured_reads(),
        causality_violation(),
        lost_update(),
        serialisable_lost_update(),
        long_fork(),
        long_fork_ser_updates(),
        write_skew(),
        running_example(),
    ]


def anomaly(name: str) -> Anomaly:
    for a in anomalies():
        if a.name == name:
            return a
    raise KeyError(name)


def incompleteness_graph() -> DependencyGraph:
    """Four-transaction cycle AD(x), VO(z), AD(v), VO(y) with T1, T3 marked.

    T0 writes the initial x and v and is read by T1 and T3 only.
    """
    h = history(
        txn("T0", Write("x", 0), Write("v", 0)),
        txn("T1", Write("y", 2), Read("x", 0), Marker()),
        txn("T2", Write("x", 1), Write("z", 1)),
        txn("T3", Write("z", 2), Read("v", 0), Marker()),
        txn("T4", Write("v", 1), Write("y", 1)),
    )
    return build_graph(
        h,
        {"x": [("T0", "T1")], "v": [("T0", "T3")]},
        {
            "x": [("T0", "T2")],
            "v": [("T0", "T4")],
            "y": [("T4", "T1")],
            "z": [("T2", "T3")],
        },
    )


@dataclass(frozen=True)
class FixtureEntry:
    name: str
    kind: str  # history | execution | graph
    payload: dict
    expected: dict = field(default_factory=dict)


def emit_fixtures() -> list:
    out = []
    for a in anomalies():
        out.append(FixtureEntry(a.name, "history", history_to_json(a.history), dict(a.expected)))
        out.append(FixtureEntry(f"{a.name}-graph", "graph", graph_to_json(a.graph())))
    out.append(FixtureEntry("running-example-execution", "execution", execution_to_json(running_example_execution())))
    out.append(
        FixtureEntry(
            "incompleteness",
            "graph",
            graph_to_json(incompleteness_graph()),
            {"cp": F, "si+ser": F},
        )
    )
    return out
