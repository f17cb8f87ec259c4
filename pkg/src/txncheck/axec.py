"""Abstract executions, pre-executions, validity and graph extraction."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

from .core import History, Violation
from .depgraph import DependencyGraph, validate_graph, GraphError
from .rel import Relation, _bits, find_cycle, is_strict_total_order


@dataclass(frozen=True)
class AbstractExecution:
    history: History
    vis: Relation
    ar: Relation

    partial = False

    @property
    def universe(self):
        return self.history.universe

    @cached_property
    def anti_vis(self) -> Relation:
        return anti_visibility(self)

    def key(self):
        return (self.history, self.vis.rows, self.ar.rows)


@dataclass(frozen=True)
class PreExecution(AbstractExecution):
    """Like an abstract execution but AR need only be total per writer set."""

    partial = True


def execution(h: History, vis: Iterable[tuple], ar: Iterable[tuple]) -> AbstractExecution:
    u = h.universe
    return AbstractExecution(h, Relation.from_pairs(u, vis), Relation.from_pairs(u, ar))


def anti_visibility(e: AbstractExecution) -> Relation:
    return e.vis.inverse().complement()


def visible_writer(e: AbstractExecution, t: int, x: str, wmask: int) -> Optional[int]:
    """AR-maximal visible writer of ``x`` for transaction index ``t``.

    None when no writer is visible or the maximum is not unique.
    """
    cands = e.vis.inverse().rows[t] & wmask
    if not cands:
        return None
    tops = [w for w in _bits(cands) if not (e.ar.rows[w] & cands)]
    return tops[0] if len(tops) == 1 else None


def validate_execution(e: AbstractExecution, causal: bool = True) -> list:
    """Every violated validity clause, by name (empty iff valid).

    ``causal=False`` skips the transitivity requirement on VIS, which the
    session extensions relax.
    """
    h, u = e.history, e.universe
    out = []
    vis, ar = e.vis, e.ar
    if not vis.subset_of(ar):
        out.append(Violation("vis-not-in-ar"))
    if e.partial:
        if not ar.transitive_closure().is_irreflexive():
            out.append(Violation("ar-cyclic"))
        elif not ar.is_transitive():
            out.append(Violation("ar-not-transitive"))
    elif not is_strict_total_order(ar):
        out.append(Violation("ar-cyclic" if find_cycle(ar) else "ar-not-total"))
    for x in h.objects:
        if not is_strict_total_order(ar, h.writers(x)):
            out.append(Violation("ar-not-total-on-writers", None, x))
    if causal and not vis.is_transitive():
        out.append(Violation("vis-not-transitive"))
    if h.init is not None and h.init in u:
        i = u.index[h.init]
        row = vis.rows[i]
        for t in h.ids:
            j = u.index[t]
            if j != i and not row >> j & 1:
                out.append(Violation("init-not-visible", t))
    vinv = vis.inverse().rows
    for t in h.transactions:
        ti = u.index[t.id]
        for x in sorted(t.read_values):
            wmask = u.mask(h.writers(x))
            cands = vinv[ti] & wmask
            if not cands:
                out.append(Violation("lww-empty-visible-set", t.id, x))
                continue
            tops = [w for w in _bits(cands) if not (ar.rows[w] & cands)]
            if len(tops) != 1:
                continue  # already reported as an AR totality failure
            if h[u.members[tops[0]]].write_value(x) not in t.read_values[x]:
                out.append(Violation("lww-wrong-value", t.id, x))
    return out


def is_valid(e: AbstractExecution, causal: bool = True) -> bool:
    return not validate_execution(e, causal)


def graphof(e: AbstractExecution) -> DependencyGraph:
    h, u = e.history, e.universe
    wr, ww = {}, {}
    for x in h.objects:
        wmask = u.mask(h.writers(x))
        rows = [0] * len(u)
        for r in sorted(h.readers(x)):
            ri = u.index[r]
            w = visible_writer(e, ri, x, wmask)
            if w is None:
                raise GraphError([Violation("lww-empty-visible-set", r, x)])
            rows[w] |= 1 << ri
        wr[x] = Relation(u, rows)
        ww[x] = e.ar.restrict(wmask)
    g = DependencyGraph(h, wr, ww)
    bad = validate_graph(g)
    if bad:
        raise GraphError(bad)
    return g
