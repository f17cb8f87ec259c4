"""Regular expressions over dependency-graph edges.

g-specification deltas and robustness criteria are written once as small
expression trees and interpreted two ways: as plain relations (fast verdicts)
and as witness relations that keep, for every pair, one shortest labelled
path realising it (counterexample extraction).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Protocol

from .rel import Relation, test_mask

KINDS = ("wr", "ww", "rw")


class Env(Protocol):
    """What an expression needs from a dependency graph."""

    universe: object
    objects: tuple

    def edges(self, kind: str, obj: Optional[str]) -> Relation: ...

    def set_mask(self, name: str, obj: Optional[str]) -> int: ...


class Expr:
    def __or__(self, other):
        return Alt((self, other))

    def __matmul__(self, other):
        return Seq((self, other))

    @property
    def plus(self):
        return Plus(self)

    @property
    def star(self):
        return Star(self)

    @property
    def opt(self):
        return Opt(self)


@dataclass(frozen=True)
class Edge(Expr):
    kind: str
    obj: Optional[str] = None

    def __str__(self):
        name = {"wr": "RF", "ww": "VO", "rw": "AD"}[self.kind]
        return f"{name}({self.obj})" if self.obj else name


@dataclass(frozen=True)
class Tst(Expr):
    """Sub-identity on a named set: ``writers``/``readers`` of obj, or ``ser``."""

    name: str
    obj: Optional[str] = None

    def __str__(self):
        inner = {"writers": f"WTr_{self.obj}", "readers": f"RTr_{self.obj}", "ser": "SER"}
        return f"<{inner.get(self.name, self.name)}>"


@dataclass(frozen=True)
class Seq(Expr):
    parts: tuple

    def __str__(self):
        return "(" + " ; ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Alt(Expr):
    parts: tuple

    def __str__(self):
        return "(" + " | ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Plus(Expr):
    body: Expr

    def __str__(self):
        return f"{self.body}+"


@dataclass(frozen=True)
class Star(Expr):
    body: Expr

    def __str__(self):
        return f"{self.body}*"


@dataclass(frozen=True)
class Opt(Expr):
    body: Expr

    def __str__(self):
        return f"{self.body}?"


@dataclass(frozen=True)
class NoId(Expr):
    body: Expr

    def __str__(self):
        return f"({self.body} \\ Id)"


@dataclass(frozen=True)
class Tag(Expr):
    """Marks every edge of the witness paths through ``body`` with ``label``."""

    label: str
    body: Expr

    def __str__(self):
        return str(self.body)


RF, VO, AD = Edge("wr"), Edge("ww"), Edge("rw")


def alt(*parts: Expr) -> Expr:
    return parts[0] if len(parts) == 1 else Alt(tuple(parts))


def seq(*parts: Expr) -> Expr:
    return parts[0] if len(parts) == 1 else Seq(tuple(parts))


# plain relational semantics


def evaluate(e: Expr, env: Env) -> Relation:
    u = env.universe
    if isinstance(e, Edge):
        return env.edges(e.kind, e.obj)
    if isinstance(e, Tst):
        return test_mask(u, env.set_mask(e.name, e.obj))
    if isinstance(e, Seq):
        out = evaluate(e.parts[0], env)
        for p in e.parts[1:]:
            out = out.compose(evaluate(p, env))
        return out
    if isinstance(e, Alt):
        out = evaluate(e.parts[0], env)
        for p in e.parts[1:]:
            out = out.union(evaluate(p, env))
        return out
    if isinstance(e, Plus):
        return evaluate(e.body, env).transitive_closure()
    if isinstance(e, Star):
        return evaluate(e.body, env).reflexive_transitive_closure()
    if isinstance(e, Opt):
        return evaluate(e.body, env).reflexive_closure()
    if isinstance(e, NoId):
        return evaluate(e.body, env).irreflexive_part()
    if isinstance(e, Tag):
        return evaluate(e.body, env)
    raise TypeError(f"not an expression: {e!r}")


# witness semantics: dict (i, j) -> tuple of labelled edges
# an edge is (src, kind, obj, dst, tags)


def _better(old, new) -> bool:
    return old is None or len(new) < len(old)


def _w_union(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, p in b.items():
        if _better(out.get(k), p):
            out[k] = p
    return out


def _w_compose(a: dict, b: dict) -> dict:
    by_src: dict = {}
    for (j, k), p in b.items():
        by_src.setdefault(j, []).append((k, p))
    out: dict = {}
    for (i, j), p in a.items():
        for k, q in by_src.get(j, ()):
            cand = p + q
            if _better(out.get((i, k)), cand):
                out[(i, k)] = cand
    return out


def _w_plus(a: dict) -> dict:
    out = dict(a)
    while True:
        nxt = _w_union(out, _w_compose(out, a))
        if nxt == out:
            return out
        out = nxt


def _w_identity(n: int) -> dict:
    return {(i, i): () for i in range(n)}


def witness(e: Expr, env: Env) -> dict:
    n = len(env.universe)
    if isinstance(e, Edge):
        objs = [e.obj] if e.obj else list(env.objects)
        out: dict = {}
        for x in objs:
            for i, j in env.edges(e.kind, x).index_pairs():
                out.setdefault((i, j), ((i, e.kind, x, j, frozenset()),))
        return out
    if isinstance(e, Tst):
        m = env.set_mask(e.name, e.obj)
        return {(i, i): () for i in range(n) if m >> i & 1}
    if isinstance(e, Seq):
        out = witness(e.parts[0], env)
        for p in e.parts[1:]:
            out = _w_compose(out, witness(p, env))
        return out
    if isinstance(e, Alt):
        out = witness(e.parts[0], env)
        for p in e.parts[1:]:
            out = _w_union(out, witness(p, env))
        return out
    if isinstance(e, Plus):
        return _w_plus(witness(e.body, env))
    if isinstance(e, Star):
        return _w_union(_w_identity(n), _w_plus(witness(e.body, env)))
    if isinstance(e, Opt):
        return _w_union(_w_identity(n), witness(e.body, env))
    if isinstance(e, NoId):
        return {k: p for k, p in witness(e.body, env).items() if k[0] != k[1]}
    if isinstance(e, Tag):
        return {
            k: tuple((s, kd, x, d, tags | {e.label}) for s, kd, x, d, tags in p)
            for k, p in witness(e.body, env).items()
        }
    raise TypeError(f"not an expression: {e!r}")
