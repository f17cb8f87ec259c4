"""Least-fixpoint solver for the visibility/arbitration/anti-visibility system.

Given a specification and a dependency graph, the unknowns ``xv`` (candidate
visibility), ``xa`` (arbitration) and ``xn`` (anti-visibility) are constrained
by the rules below. For a simple specification with non-conflict guarantee
``(rho, pi)``::

    V1  RF ⊆ xv                      A1  VO ⊆ xa
    V2  xv;xv ⊆ xv                   A2  xv ⊆ xa
    V3  VO(x) ⊆ xv  per (rho_x,rho_x) A3  <WTr_x>;xv;AD(x) ⊆ xa
    V4  rho(xv);xa;pi(xv) ⊆ xv       A4  xa;xa ⊆ xa
                                     A5  (pi(xv);xn;rho(xv)) \\ Id ⊆ xa
    N1  AD ⊆ xn   N2  xv;xn ⊆ xn   N3  xn;xv ⊆ xn

The graph belongs to the model iff the least ``xa`` is acyclic; a witness
execution is then built by repeatedly ordering an unrelated pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .axec import AbstractExecution, PreExecution, graphof, validate_execution
from .depgraph import DependencyGraph
from .rel import Relation, find_cycle, test
from .spec import XSpecification, apply_spec_function, satisfies, violated


class NotSimpleError(ValueError):
    """The solver only decides simple specifications."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class SolverSolution:
    xv: Relation
    xa: Relation
    xn: Relation


def _init_facts(g: DependencyGraph) -> Optional[Relation]:
    h = g.history
    if h.init is None:
        return None
    return Relation.from_pairs(h.universe, [(h.init, t) for t in h.ids if t != h.init])


def _require_simple(sigma: XSpecification):
    if not sigma.simple():
        raise NotSimpleError(
            f"specification {sigma.name or ''} has {len(sigma.main)} non-conflict guarantees;"
            " the solver only handles simple specifications"
        )


class System:
    """The inequality system instantiated for one (specification, graph) pair."""

    def __init__(self, sigma: XSpecification, g: DependencyGraph, allow_non_simple: bool = False):
        if not allow_non_simple:
            _require_simple(sigma)
        self.sigma, self.g = sigma, g
        h, u = g.history, g.universe
        self.h, self.u = h, u
        self.main = sigma.main
        self.vo_wc = Relation.empty(u)
        for x in sigma.conflict_objects:
            if x in h.objects:
                self.vo_wc = self.vo_wc | g.ww[x]
        self.init = _init_facts(g)
        self.ad_by_writer = [
            (test(u, h.writers(x)), g.rw[x]) for x in h.objects if g.rw[x]
        ]
        # every catalogue function except rho_SI ignores its argument
        self.const = {}
        for gr in self.main:
            for f in (gr.rho, gr.pi):
                if f.kind != "si":
                    self.const[f] = apply_spec_function(f, h, Relation.empty(u))

    def rho(self, f, r: Relation) -> Relation:
        c = self.const.get(f)
        return c if c is not None else apply_spec_function(f, self.h, r)

    def a3(self, xv: Relation) -> Relation:
        out = Relation.empty(self.u)
        for w, ad in self.ad_by_writer:
            out = out | (w @ xv @ ad)
        return out

    def v4(self, xv: Relation, xa: Relation) -> Relation:
        out = Relation.empty(self.u)
        for g in self.main:
            out = out | (self.rho(g.rho, xv) @ xa @ self.rho(g.pi, xv))
        return out

    def a5(self, xv: Relation, xn: Relation) -> Relation:
        out = Relation.empty(self.u)
        for g in self.main:
            out = out | (self.rho(g.pi, xv) @ xn @ self.rho(g.rho, xv)).irreflexive_part()
        return out

    def v_base(self) -> Relation:
        out = self.g.rf | self.vo_wc
        return out | self.init if self.init is not None else out

    def a_generators(self, s: SolverSolution) -> Relation:
        """The A-rule right-hand sides before transitive closure."""
        return self.g.vo | s.xv | self.a3(s.xv) | self.a5(s.xv, s.xn)

    def least(self, seed: Optional[Relation] = None) -> SolverSolution:
        g, u = self.g, self.u
        xv = xa = xn = Relation.empty(u)
        v_base = self.v_base()
        a_base = g.vo if seed is None else g.vo | seed
        while True:
            # V-rules
            nv = (xv | v_base | self.v4(xv, xa)).transitive_closure()
            # A-rules
            na = (xa | a_base | nv | self.a3(nv) | self.a5(nv, xn)).transitive_closure()
            # N-rules: with nv transitive their least closure is nv?;AD;nv?
            vo = nv.reflexive_closure()
            nn = xn | (vo @ g.ad @ vo)
            if nv == xv and na == xa and nn == xn:
                return SolverSolution(xv, xa, xn)
            xv, xa, xn = nv, na, nn

    def unsatisfied(self, s: SolverSolution, seed: Optional[Relation] = None) -> list:
        """Names of the rules that ``s`` violates (empty iff it is a solution)."""
        g = self.g
        xv, xa, xn = s.xv, s.xa, s.xn
        checks = [
            ("V1", g.rf, xv),
            ("V2", xv @ xv, xv),
            ("V3", self.vo_wc, xv),
            ("V4", self.v4(xv, xa), xv),
            ("A1", g.vo, xa),
            ("A2", xv, xa),
            ("A3", self.a3(xv), xa),
            ("A4", xa @ xa, xa),
            ("A5", self.a5(xv, xn), xa),
            ("N1", g.ad, xn),
            ("N2", xv @ xn, xn),
            ("N3", xn @ xv, xn),
        ]
        if self.init is not None:
            checks.append(("V-init", self.init, xv))
        if seed is not None:
            checks.append(("seed", seed, xa))
        return [name for name, lhs, rhs in checks if not lhs.subset_of(rhs)]


def least_solution(
    sigma: XSpecification,
    g: DependencyGraph,
    seed: Optional[Iterable] = None,
    allow_non_simple: bool = False,
) -> SolverSolution:
    """The least solution, optionally with extra arbitration base facts ``seed``.

    ``seed`` may be a Relation or an iterable of id pairs. With
    ``allow_non_simple`` every non-conflict guarantee contributes its V4/A5
    rules; the result is then no longer a decision procedure.
    """
    system = System(sigma, g, allow_non_simple)
    return system.least(_as_relation(g, seed))


def _as_relation(g: DependencyGraph, seed) -> Optional[Relation]:
    if seed is None or isinstance(seed, Relation):
        return seed
    return Relation.from_pairs(g.universe, seed)


def solution_of(sigma, g, xv, xa, xn, allow_non_simple: bool = False) -> list:
    return System(sigma, g, allow_non_simple).unsatisfied(SolverSolution(xv, xa, xn))


@dataclass
class TotalizeStep:
    pair: tuple
    delta_a: Relation
    solution: SolverSolution


@dataclass
class Totalization:
    execution: AbstractExecution
    steps: list = field(default_factory=list)


class InternalError(AssertionError):
    pass


def _check_pre_execution(sigma, g, s: SolverSolution, final: bool):
    cls = AbstractExecution if final else PreExecution
    pe = cls(g.history, s.xv, s.xa)
    bad = validate_execution(pe)
    if bad:
        raise InternalError("construction left the valid region: " + ", ".join(map(str, bad)))
    if not satisfies(pe, sigma):
        raise InternalError(f"construction broke guarantees: {violated(pe, sigma)}")
    if graphof(pe) != g:
        raise InternalError("construction changed the dependency graph")
    return pe


def unrelated_pair(xa: Relation) -> Optional[tuple]:
    """Smallest (i, j), i < j in universe order, with neither orientation in xa."""
    n = len(xa.universe)
    for i in range(n):
        for j in range(i + 1, n):
            if not xa.has(i, j) and not xa.has(j, i):
                return i, j
    return None


def extend(system: System, s: SolverSolution, i: int, j: int) -> tuple:
    """One incremental step ordering ``i`` before ``j``; returns (ΔA, new solution)."""
    u, g = system.u, system.g
    d_a = Relation.from_index_pairs(u, [(i, j)])
    xa_opt = s.xa.reflexive_closure()
    delta_a = xa_opt @ d_a @ xa_opt
    xa = s.xa | delta_a
    d_v = Relation.empty(u)
    for gr in system.main:
        d_v = d_v | (system.rho(gr.rho, s.xv) @ delta_a @ system.rho(gr.pi, s.xv))
    xv_opt = s.xv.reflexive_closure()
    xv = s.xv | (xv_opt @ d_v @ xv_opt)
    xv_opt = xv.reflexive_closure()
    xn = xv_opt @ g.ad @ xv_opt
    return delta_a, SolverSolution(xv, xa, xn)


def totalize(
    sigma: XSpecification, g: DependencyGraph, start: SolverSolution, check: bool = True
) -> Totalization:
    """Extend an acyclic least solution to a total witness execution."""
    system = System(sigma, g)
    if find_cycle(start.xa) is not None:
        raise PreconditionError("arbitration of the start solution is cyclic")
    s = start
    steps = []
    if check:
        _check_pre_execution(sigma, g, s, final=False)
    while True:
        pair = unrelated_pair(s.xa)
        if pair is None:
            break
        delta_a, s = extend(system, s, *pair)
        if not s.xa.is_irreflexive():
            raise InternalError(f"arbitration became cyclic after ordering {pair}")
        m = g.universe.members
        steps.append(TotalizeStep((m[pair[0]], m[pair[1]]), delta_a, s))
        if check:
            _check_pre_execution(sigma, g, s, final=False)
    e = _check_pre_execution(sigma, g, s, final=True) if check else AbstractExecution(g.history, s.xv, s.xa)
    return Totalization(e, steps)


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    witness: Optional[AbstractExecution] = None
    cycle: Optional[tuple] = None  # of (src, kind, obj, dst)
    solution: Optional[SolverSolution] = None


def label_cycle(g: DependencyGraph, ids: list, vis: Optional[Relation] = None) -> tuple:
    """Attach the first dependency edge between consecutive ids, else ``vis``
    when the step is in ``vis``, else ``ar``."""
    edges = g.labelled_edges()
    out = []
    for a, b in zip(ids, ids[1:]):
        hit = next(((s, k, x, d) for s, k, x, d in edges if s == a and d == b), None)
        if hit is None:
            hit = (a, "vis" if vis is not None and (a, b) in vis else "ar", None, b)
        out.append(hit)
    return tuple(out)


def explain_cycle(system: System, s: SolverSolution) -> list:
    """A cycle of arbitration constraints justifying that ``s.xa`` is not acyclic.

    Steps come from the unclosed A-rule generators; an A3 self-loop ``i`` is
    unfolded into its ``xv`` step and the closing anti-dependency. Cycles made
    only of dependency edges are preferred.
    """
    g, u = system.g, system.u
    gens = system.a_generators(s)
    rows = list(gens.irreflexive_part().rows)
    for w, ad in system.ad_by_writer:
        loop = (w @ s.xv @ ad).rows
        for i in range(len(u)):
            if loop[i] >> i & 1:
                for j in range(len(u)):
                    if j != i and s.xv.has(i, j) and ad.has(j, i):
                        rows[i] |= 1 << j
                        rows[j] |= 1 << i
    steps = Relation(u, rows)
    return (
        find_cycle(steps & (g.rf | g.vo | g.ad))
        or find_cycle(steps)
        or find_cycle(gens)
    )


def decide_membership(sigma: XSpecification, g: DependencyGraph) -> MembershipVerdict:
    system = System(sigma, g)
    sol = system.least()
    if not sol.xa.is_irreflexive():
        cyc = explain_cycle(system, sol)
        return MembershipVerdict(False, cycle=label_cycle(g, cyc, sol.xv), solution=sol)
    w = totalize(sigma, g, sol).execution
    return MembershipVerdict(True, witness=w, solution=sol)


def soundness_check(sigma: XSpecification, e: AbstractExecution) -> bool:
    """Whether (VIS, AR, anti-visibility) of ``e`` solves the system for its graph."""
    bad = validate_execution(e)
    if bad:
        raise PreconditionError("execution is not valid: " + ", ".join(map(str, bad)))
    if not satisfies(e, sigma):
        raise PreconditionError(f"execution does not satisfy the specification: {violated(e, sigma)}")
    g = graphof(e)
    return not solution_of(sigma, g, e.vis, e.ar, e.anti_vis)
