"""Dependency graphs, g-specifications and critical-cycle detectors.

A dependency graph records, per object, who each reader read from (``wr``),
the version order among writers (``ww``) and the derived anti-dependencies
(``rw``). ``rw`` is never supplied by the user; it is computed from the other
two and cross-checked when present in input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional

from . import expr as E
from .core import History, Violation, validate_history
from .expr import AD, RF, VO, Expr, NoId, Tag, Tst, alt, seq
from .rel import Relation, find_cycle_indices, is_strict_total_order


class GraphError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid dependency graph: " + ", ".join(map(str, self.violations)))


@dataclass(frozen=True, eq=False)
class DependencyGraph:
    history: History
    wr: dict
    ww: dict
    rw: dict = field(default=None)

    def __post_init__(self):
        h = self.history
        u = h.universe
        empty = Relation.empty(u)
        wr = {x: self.wr.get(x, empty) for x in h.objects}
        ww = {x: self.ww.get(x, empty) for x in h.objects}
        object.__setattr__(self, "wr", wr)
        object.__setattr__(self, "ww", ww)
        object.__setattr__(self, "rw", {x: derive_rw(wr[x], ww[x]) for x in h.objects})

    @property
    def universe(self):
        return self.history.universe

    @property
    def objects(self) -> tuple:
        return self.history.objects

    def _union(self, fam: dict) -> Relation:
        out = Relation.empty(self.universe)
        for r in fam.values():
            out = out | r
        return out

    @cached_property
    def rf(self) -> Relation:
        return self._union(self.wr)

    @cached_property
    def vo(self) -> Relation:
        return self._union(self.ww)

    @cached_property
    def ad(self) -> Relation:
        return self._union(self.rw)

    def edges(self, kind: str, obj: Optional[str] = None) -> Relation:
        fam = {"wr": self.wr, "ww": self.ww, "rw": self.rw}[kind]
        if obj is None:
            return {"wr": self.rf, "ww": self.vo, "rw": self.ad}[kind]
        return fam.get(obj, Relation.empty(self.universe))

    def set_mask(self, name: str, obj: Optional[str] = None) -> int:
        u = self.universe
        if name == "writers":
            return u.mask(self.history.writers(obj))
        if name == "readers":
            return u.mask(self.history.readers(obj))
        if name == "ser":
            return u.mask(self.history.marked())
        raise KeyError(name)

    def key(self) -> tuple:
        return (
            self.history,
            tuple((x, self.wr[x].rows) for x in self.objects),
            tuple((x, self.ww[x].rows) for x in self.objects),
        )

    def __eq__(self, other):
        return isinstance(other, DependencyGraph) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def labelled_edges(self) -> list:
        out = []
        for kind, fam in (("wr", self.wr), ("ww", self.ww), ("rw", self.rw)):
            for x in self.objects:
                for a, b in fam[x].pairs():
                    out.append((a, kind, x, b))
        return out


def derive_rw(wr: Relation, ww: Relation) -> Relation:
    """S -> T iff S != T and some T' has T' -wr-> S and T' -ww-> T."""
    return wr.inverse().compose(ww).irreflexive_part()


def validate_graph(g: DependencyGraph) -> list:
    h = g.history
    out = []
    for x in h.objects:
        writers, readers = h.writers(x), h.readers(x)
        wr, ww = g.wr[x], g.ww[x]
        for a, b in wr.pairs():
            if a == b:
                out.append(Violation("wr-self-edge", a, x))
            elif a not in writers or b not in readers:
                out.append(Violation("wr-not-writer-to-reader", b, x))
            elif h[a].write_value(x) != h[b].read_value(x):
                out.append(Violation("wr-value-mismatch", b, x))
        inv = wr.inverse()
        for r in sorted(readers):
            n = len(inv.successors(h.universe.index[r]))
            if n == 0:
                out.append(Violation("wr-missing-source", r, x))
            elif n > 1:
                out.append(Violation("wr-multiple-sources", r, x))
        mask = h.universe.mask(writers)
        if ww.restrict(mask) != ww:
            out.append(Violation("ww-outside-writers", None, x))
        if not is_strict_total_order(ww, writers):
            out.append(Violation("ww-not-total-order", None, x))
    return out


def build_graph(
    h: History,
    wr: Mapping[str, Iterable[tuple]],
    ww: Mapping[str, Iterable[tuple]],
    rw: Optional[Mapping[str, Iterable[tuple]]] = None,
) -> DependencyGraph:
    """Graph from edge lists keyed by object; raises GraphError on any violation.

    ``rw``, when given, must equal the derived anti-dependencies exactly.
    """
    bad = validate_history(h)
    if bad:
        raise GraphError(bad)
    u = h.universe
    problems = []
    for fam in (wr, ww) + ((rw,) if rw else ()):
        for x, pairs in fam.items():
            if x not in h.objects:
                problems.append(Violation("unknown-object", None, x))
            for a, b in pairs:
                for t in (a, b):
                    if t not in u:
                        problems.append(Violation("unknown-transaction", t, x))
    if problems:
        raise GraphError(sorted(set(problems), key=str))
    g = DependencyGraph(
        h,
        {x: Relation.from_pairs(u, p) for x, p in wr.items() if x in h.objects},
        {x: Relation.from_pairs(u, p) for x, p in ww.items() if x in h.objects},
    )
    problems = validate_graph(g)
    if rw is not None:
        for x in h.objects:
            given = Relation.from_pairs(u, rw.get(x, ()))
            if given != g.rw[x]:
                problems.append(Violation("rw-mismatch", None, x))
    if problems:
        raise GraphError(problems)
    return g


def graph_from_relations(h: History, wr: dict, ww: dict) -> DependencyGraph:
    g = DependencyGraph(h, wr, ww)
    problems = validate_graph(g)
    if problems:
        raise GraphError(problems)
    return g


# delta catalogue


def delta_ser() -> Expr:
    return alt(RF, VO, AD).plus


def delta_si() -> Expr:
    return seq(RF | VO, AD.opt).plus


def delta_psi0() -> Expr:
    return (RF | VO).plus


def delta_psi_obj(x: str) -> Expr:
    return seq((RF | VO).star, E.Edge("rw", x)).plus


def delta_psi_merged(objects: Iterable[str]) -> Expr:
    parts = [delta_psi0()]
    for x in objects:
        parts.append(seq(Tst("writers", x), (RF | VO).star, E.Edge("rw", x)).plus)
    return alt(*parts)


def delta(name: str, objects: Iterable[str] = ()) -> Expr:
    """Look up a delta by name: ser, si, psi0, psi(<obj>), psi'."""
    if name == "ser":
        return delta_ser()
    if name == "si":
        return delta_si()
    if name == "psi0":
        return delta_psi0()
    if name == "psi'":
        return delta_psi_merged(objects)
    if name.startswith("psi(") and name.endswith(")"):
        return delta_psi_obj(name[4:-1])
    raise KeyError(f"unknown delta {name!r}")


def evaluate_delta(name: str, g: DependencyGraph) -> Relation:
    return E.evaluate(delta(name, g.objects), g)


@dataclass(frozen=True)
class GSpecification:
    name: str
    deltas: tuple  # of delta names


def gspec(name: str, objects: Iterable[str]) -> GSpecification:
    objects = tuple(objects)
    if name == "ser":
        return GSpecification("ser", ("ser",))
    if name == "si":
        return GSpecification("si", ("si",))
    if name == "psi":
        return GSpecification("psi", ("psi0",) + tuple(f"psi({x})" for x in objects))
    if name == "psi'":
        return GSpecification("psi'", ("psi'",))
    raise KeyError(f"unknown g-specification {name!r}")


@dataclass(frozen=True)
class GVerdict:
    passed: bool
    delta: Optional[str] = None
    cycle: tuple = ()  # of (src, kind, obj, dst)


def render_path(g: DependencyGraph, path) -> tuple:
    m = g.universe.members
    return tuple((m[s], k, x, m[d]) for s, k, x, d, _ in path)


def check_gspec(spec: GSpecification, g: DependencyGraph) -> GVerdict:
    for name in spec.deltas:
        e = delta(name, g.objects)
        r = E.evaluate(e, g)
        bad = [i for i, row in enumerate(r.rows) if row >> i & 1]
        if bad:
            w = E.witness(e, g)
            best = min((w[(i, i)] for i in bad), key=len)
            return GVerdict(False, name, render_path(g, best))
    return GVerdict(True)


def passes_gspec(spec: GSpecification, g: DependencyGraph) -> bool:
    return all(E.evaluate(delta(n, g.objects), g).is_irreflexive() for n in spec.deltas)


# robustness criteria


def fenced(r: Expr) -> Expr:
    return seq(Tst("ser"), RF.star, Tag("protected", r), RF.star, Tst("ser"))


@dataclass(frozen=True)
class Criterion:
    name: str
    expr: Expr
    mode: str  # "acyclic" or "irreflexive"


def criteria(model: str, objects: Iterable[str]) -> tuple:
    objects = tuple(objects)
    model = model.lower()
    if model == "ser":
        return (Criterion("ser", alt(RF, VO, AD), "acyclic"),)
    if model == "si":
        return (Criterion("si", seq(RF | VO, AD.opt), "acyclic"),)
    if model == "psi":
        out = [Criterion("psi-no-ad", RF | VO, "acyclic")]
        for x in objects:
            out.append(Criterion(f"psi({x})", seq((RF | VO).star, E.Edge("rw", x)), "acyclic"))
        return tuple(out)
    if model in ("ccser", "redblue"):
        protected = alt(RF, fenced((RF | VO).plus), fenced(AD))
        return (
            Criterion("ccser-fenced-ad", alt(RF, VO, fenced(AD)), "acyclic"),
            Criterion("ccser-strong", seq(protected.plus, AD), "irreflexive"),
        )
    if model == "cp":
        csub = NoId(seq(Tst("ser"), RF.star, Tag("critical", AD), (VO | RF).star, Tst("ser")))
        return (Criterion("cp", alt(RF, VO, csub), "acyclic"),)
    raise KeyError(f"no robustness criterion for model {model!r}")


@dataclass(frozen=True)
class CriterionResult:
    name: str
    holds: bool
    cycle: tuple = ()  # of (src, kind, obj, dst, tags)


@dataclass(frozen=True)
class RobustnessReport:
    model: str
    certified: bool
    results: tuple


def _labelled(g: DependencyGraph, path) -> tuple:
    m = g.universe.members
    return tuple((m[s], k, x, m[d], tuple(sorted(t))) for s, k, x, d, t in path)


def evaluate_criterion(c: Criterion, g: DependencyGraph) -> CriterionResult:
    r = E.evaluate(c.expr, g)
    if c.mode == "irreflexive":
        bad = [i for i, row in enumerate(r.rows) if row >> i & 1]
        if not bad:
            return CriterionResult(c.name, True)
        w = E.witness(c.expr, g)
        best = min((w[(i, i)] for i in bad), key=len)
        return CriterionResult(c.name, False, _labelled(g, best))
    cyc = find_cycle_indices(r)
    if cyc is None:
        return CriterionResult(c.name, True)
    w = E.witness(c.expr, g)
    path = ()
    for a, b in zip(cyc, cyc[1:]):
        path += w[(a, b)]
    return CriterionResult(c.name, False, _labelled(g, path))


def criterion_holds(c: Criterion, g: DependencyGraph) -> bool:
    r = E.evaluate(c.expr, g)
    if c.mode == "irreflexive":
        return r.is_irreflexive()
    return r.transitive_closure().is_irreflexive()


def robustness_check(model: str, g: DependencyGraph) -> RobustnessReport:
    results = tuple(evaluate_criterion(c, g) for c in criteria(model, g.objects))
    return RobustnessReport(model.lower(), all(r.holds for r in results), results)
