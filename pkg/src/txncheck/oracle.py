"""Brute-force ground truth over small histories, plus the algebraic-law auditor.

Executions are enumerated by fixing the arbitration order (permutations in
lexicographic order) and then, transaction by transaction in arbitration
order, choosing its set of visible predecessors (subset rank order). A choice
is rejected as soon as it breaks transitivity or last-writer-wins for that
transaction, so every valid execution is produced exactly once.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import permutations, product
from typing import Callable, Iterator, Optional

from .axec import AbstractExecution, graphof
from .core import History
from .depgraph import DependencyGraph
from .rel import Relation, _bits, linear_order, test
from .spec import XSpecification, apply_spec_function, satisfies, satisfies_guarantee

DEFAULT_MAX_TRANSACTIONS = 6
DEFAULT_MAX_CANDIDATES = 50_000_000


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class EnumerationBudget:
    max_transactions: int = DEFAULT_MAX_TRANSACTIONS
    max_candidates: int = DEFAULT_MAX_CANDIDATES

    def __post_init__(self):
        if self.max_transactions < 1:
            raise ValueError("max_transactions must be at least 1")

    @classmethod
    def from_env(cls) -> "EnumerationBudget":
        raw = os.environ.get("CK_BUDGET")
        return cls(int(raw)) if raw else cls()


def _check_size(h: History, budget: EnumerationBudget):
    if len(h) > budget.max_transactions:
        raise BudgetExceeded(
            f"history has {len(h)} transactions; enumeration budget is {budget.max_transactions}"
        )


def enumerate_executions(
    h: History,
    budget: Optional[EnumerationBudget] = None,
    causal: bool = True,
) -> Iterator[AbstractExecution]:
    """Every valid abstract execution over ``h``, each exactly once.

    ``causal=False`` drops the transitivity requirement on visibility.
    """
    budget = budget or EnumerationBudget()
    _check_size(h, budget)
    u = h.universe
    n = len(u)
    txns = [h[m] for m in u.members]
    reads = [
        [(u.mask(h.writers(x)), vals) for x, vals in sorted(t.read_values.items())] for t in txns
    ]
    write_val = [t.write_values for t in txns]
    init = u.index[h.init] if h.init is not None else None
    counter = [0]

    def lww_ok(t: int, vis: int, pos: list) -> bool:
        for (x, _), (wmask, vals) in zip(sorted(txns[t].read_values.items()), reads[t]):
            cands = vis & wmask
            if not cands:
                return False
            top = max(_bits(cands), key=lambda w: pos[w])
            if next(iter(write_val[top][x])) not in vals:
                return False
        return True

    for order in permutations(range(n)):
        if init is not None and order[0] != init:
            continue
        pos = [0] * n
        for p, t in enumerate(order):
            pos[t] = p
        ar = linear_order(u, [u.members[t] for t in order])
        visin = [0] * n  # visin[t]: mask of transactions visible to t

        def choose(k: int):
            if k == n:
                rows = [0] * n
                for t in range(n):
                    for s in _bits(visin[t]):
                        rows[s] |= 1 << t
                yield AbstractExecution(h, Relation(u, rows), ar)
                return
            t = order[k]
            preds = order[:k]
            for sub in range(1 << k):
                counter[0] += 1
                if counter[0] > budget.max_candidates:
                    raise BudgetExceeded(f"more than {budget.max_candidates} candidates examined")
                vis = 0
                for b in range(k):
                    if sub >> b & 1:
                        vis |= 1 << preds[b]
                if init is not None and k > 0 and not vis >> init & 1:
                    continue
                if causal and any(visin[s] & ~vis for s in _bits(vis)):
                    continue
                if not lww_ok(t, vis, pos):
                    continue
                visin[t] = vis
                yield from choose(k + 1)
            visin[t] = 0

        yield from choose(0)


@dataclass(frozen=True)
class OracleVerdict:
    member: bool
    witness: Optional[AbstractExecution] = None


def oracle_membership(
    sigma: XSpecification, h: History, budget: Optional[EnumerationBudget] = None
) -> OracleVerdict:
    for e in enumerate_executions(h, budget):
        if satisfies(e, sigma):
            return OracleVerdict(True, e)
    return OracleVerdict(False)


def oracle_graph_membership(
    sigma: XSpecification, g: DependencyGraph, budget: Optional[EnumerationBudget] = None
) -> OracleVerdict:
    """Whether some execution in the model has exactly the dependency graph ``g``."""
    for e in enumerate_executions(g.history, budget):
        if satisfies(e, sigma) and graphof(e) == g:
            return OracleVerdict(True, e)
    return OracleVerdict(False)


def compatible_graphs(h: History) -> Iterator[DependencyGraph]:
    """Every dependency graph over ``h``.

    With an initialiser, it is placed first in every version order, since it
    is visible to (hence arbitrated before) every other writer.
    """
    u = h.universe
    per_obj = []
    for x in h.objects:
        writers = sorted(h.writers(x))
        rf_choices = []
        for r in sorted(h.readers(x)):
            val = h[r].read_value(x)
            srcs = [w for w in writers if w != r and h[w].write_value(x) == val]
            rf_choices.append([(w, r) for w in srcs])
        orders = [
            p for p in permutations(writers) if h.init is None or h.init not in p or p[0] == h.init
        ]
        per_obj.append((x, list(product(*rf_choices)), orders))
    for combo in product(*[[(rf, o) for rf in rfs for o in ords] for _, rfs, ords in per_obj]):
        wr, ww = {}, {}
        for (x, _, _), (rf, order) in zip(per_obj, combo):
            wr[x] = Relation.from_pairs(u, rf)
            ww[x] = linear_order(u, order)
        yield DependencyGraph(h, wr, ww)


# algebraic laws


@dataclass(frozen=True)
class LawResult:
    status: str  # "pass" | "fail" | "not-applicable"
    failures: tuple = ()


LAW_IDS = (
    ["a.1", "a.2", "a.3", "a.4"]
    + [f"b.{i}" for i in range(1, 7)]
    + [f"c.{i}" for i in range(1, 13)]
    + [f"d.{i}" for i in range(1, 5)]
)


def _result(failures: list) -> LawResult:
    return LawResult("fail" if failures else "pass", tuple(failures))


def _test_sets(h: History) -> list:
    sets = [("all", h.ids), ("none", ()), ("ser", sorted(h.marked()))]
    for x in h.objects:
        sets.append((f"WTr_{x}", sorted(h.writers(x))))
        sets.append((f"RTr_{x}", sorted(h.readers(x))))
    return sets


def audit_core_laws(
    h: History,
    vis: Relation,
    ar: Relation,
    g: DependencyGraph,
    guarantees: list,
    apply: Callable,
    skip: frozenset = frozenset(),
) -> dict:
    """Shared law checks over (VIS, AR) and its graph.

    ``guarantees`` are (label, rho, pi) triples already known to hold; ``apply``
    maps a spec function and a relation to a relation. Law ids in ``skip`` are
    reported as not applicable.
    """
    u = h.universe
    ident = Relation.identity(u)
    full = Relation.full(u)
    avis = vis.inverse().complement()
    report: dict = {}

    tests = [(name, test(u, ids), set(ids)) for name, ids in _test_sets(h)]
    rels = dict(VIS=vis, AR=ar, AVIS=avis, RF=g.rf, VO=g.vo, AD=g.ad)
    # a.3/a.4 pairs: each relation with itself and against the others it meets in the laws
    pairs = [(a, a) for a in rels] + [
        ("VIS", "AR"), ("AR", "VIS"), ("VIS", "AVIS"), ("RF", "VIS"),
        ("VO", "AR"), ("AD", "AVIS"), ("AR", "AVIS"),
    ]

    report["a.1"] = _result([n for n, t, _ in tests if not t.subset_of(ident)])
    fails = []
    for (n1, t1, s1), (n2, t2, s2) in product(tests, tests):
        if test(u, s1 & s2) != t1 @ t2:
            fails.append(f"{n1},{n2}")
    report["a.2"] = _result(fails)
    f3, f4 = [], []
    for n, t, _ in tests:
        for a, b in pairs:
            r1, r2 = rels[a], rels[b]
            if ((r1 @ t) & r2) != ((r1 & r2) @ t):
                f3.append(f"{n},{a},{b}")
            if ((t @ r1) & r2) != (t @ (r1 & r2)):
                f4.append(f"{n},{a},{b}")
    report["a.3"] = _result(f3)
    report["a.4"] = _result(f4)

    b = {k: [] for k in range(1, 7)}
    c = {k: [] for k in (1, 2, 3, 7)}
    for x in h.objects:
        w, r = test(u, h.writers(x)), test(u, h.readers(x))
        rf, vo, ad = g.wr[x], g.ww[x], g.rw[x]
        checks = [
            (1, rf, w @ rf @ r),
            (2, vo, w @ vo @ w),
            (3, ad, r @ ad @ w),
            (4, rf, rf - ident),
            (5, vo, vo - ident),
            (6, ad, ad - ident),
        ]
        for k, lhs, rhs in checks:
            if not lhs.subset_of(rhs):
                b[k].append(x)
        for k, lhs, rhs in [(1, rf, vis), (2, vo, ar), (3, ad, avis), (7, w @ vis @ ad, ar)]:
            if not lhs.subset_of(rhs):
                c[k].append(x)
    for k in range(1, 7):
        report[f"b.{k}"] = _result(b[k])
    empty = Relation.empty(u)
    c_more = {
        4: (vis.transitive_closure(), vis),
        5: (ar.transitive_closure(), ar),
        6: (vis, ar),
        8: (vis @ avis, avis),
        9: (avis @ vis, avis),
        10: ((avis @ vis) & ident, empty),
        11: ((vis @ avis) & ident, empty),
        12: (ar & ident, empty),
    }
    for k in range(1, 13):
        lid = f"c.{k}"
        if lid in skip:
            report[lid] = LawResult("not-applicable")
        elif k in c:
            report[lid] = _result(c[k])
        else:
            lhs, rhs = c_more[k]
            report[lid] = _result([] if lhs.subset_of(rhs) else ["containment"])

    if not guarantees:
        for k in range(1, 5):
            report[f"d.{k}"] = LawResult("not-applicable")
        return report
    d = {k: [] for k in range(1, 5)}
    for label, rho, pi in guarantees:
        rv, pv = apply(rho, vis), apply(pi, vis)
        rfull, pfull = apply(rho, full), apply(pi, full)
        if not (rv @ ar @ pv).subset_of(vis):
            d[1].append(label)
        if not (pv @ avis @ rv).irreflexive_part().subset_of(ar):
            d[2].append(label)
        if not ((ar @ pv @ avis) & rfull.inverse()).subset_of(avis):
            d[3].append(label)
        if not ((avis @ rv @ ar) & pfull.inverse()).subset_of(avis):
            d[4].append(label)
    for k in range(1, 5):
        report[f"d.{k}"] = _result(d[k])
    return report


def audit_laws(e: AbstractExecution, sigma: XSpecification) -> dict:
    """Law id -> LawResult for a valid execution; d-laws use the satisfied guarantees."""
    h = e.history
    g = graphof(e)
    held = [
        (str(gr), gr.rho, gr.pi) for gr in sigma if satisfies_guarantee(e, gr).holds
    ]

    def apply(f, r):
        return apply_spec_function(f, h, r)

    return audit_core_laws(h, e.vis, e.ar, g, held, apply)


def laws_pass(report: dict) -> bool:
    return all(r.status != "fail" for r in report.values())


def failing_laws(report: dict) -> list:
    return [k for k, r in report.items() if r.status == "fail"]
