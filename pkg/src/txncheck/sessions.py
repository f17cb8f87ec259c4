"""Histories with sessions, session and causality guarantees, and their laws.

An extended history adds a session order PO: the transactions of each session
form a strict total order and sessions are unrelated. Extended executions keep
VIS and AR as before but need not be causal; causality is instead requested
through causality guarantees ``(gamma, beta)`` read as
``gamma(VIS);beta(VIS) ⊆ VIS``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Optional

from .axec import AbstractExecution, graphof, validate_execution
from .codec import InputError, history_from_json
from .core import History, Violation
from .oracle import _result, audit_core_laws
from .rel import Relation, linear_order, test
from .spec import (
    ConsistencyGuarantee,
    SpecFunction,
    XSpecification,
    apply_spec_function,
)


def validate_sessions(h: History, sessions: Iterable[Iterable[str]]) -> list:
    out = []
    seen = set()
    for s in sessions:
        for t in s:
            if t not in h.by_id:
                out.append(Violation("session-unknown-transaction", t))
            elif t in seen:
                out.append(Violation("session-duplicate", t))
            seen.add(t)
    for t in h.ids:
        if t not in seen:
            out.append(Violation("session-missing", t))
    return out


@dataclass(frozen=True)
class ExtendedHistory:
    history: History
    sessions: tuple  # of tuples of ids, each in session order

    def __post_init__(self):
        object.__setattr__(self, "sessions", tuple(tuple(s) for s in self.sessions))
        bad = validate_sessions(self.history, self.sessions)
        if bad:
            raise ValueError("sessions do not partition the history: " + ", ".join(map(str, bad)))

    @cached_property
    def po(self) -> Relation:
        u = self.history.universe
        out = Relation.empty(u)
        for s in self.sessions:
            out = out | linear_order(u, s)
        return out

    @property
    def universe(self):
        return self.history.universe


def singleton_sessions(h: History) -> ExtendedHistory:
    return ExtendedHistory(h, tuple((t,) for t in h.ids))


@dataclass(frozen=True)
class ExtendedExecution:
    history: ExtendedHistory
    vis: Relation
    ar: Relation

    @property
    def base(self) -> AbstractExecution:
        return AbstractExecution(self.history.history, self.vis, self.ar)

    @property
    def po(self) -> Relation:
        return self.history.po

    @cached_property
    def anti_vis(self) -> Relation:
        return self.vis.inverse().complement()


def lift(e: AbstractExecution) -> ExtendedExecution:
    """The same execution with every transaction in its own session."""
    return ExtendedExecution(singleton_sessions(e.history), e.vis, e.ar)


# extended specification functions


@dataclass(frozen=True, order=True)
class ExtFunction:
    """``base`` wraps a plain function; ``not-session`` is R minus PO?;
    ``causal`` is R minus Id; ``causal-obj`` restricts that to accessors of ``obj``."""

    kind: str
    base: Optional[SpecFunction] = None
    obj: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("base", "not-session", "causal", "causal-obj"):
            raise ValueError(f"unknown extended function {self.kind!r}")
        if (self.kind == "base") != (self.base is not None):
            raise ValueError("only base functions wrap a specification function")
        if (self.kind == "causal-obj") != (self.obj is not None):
            raise ValueError("causal-obj functions take exactly one object")

    def __str__(self):
        if self.kind == "base":
            return str(self.base)
        if self.kind == "causal-obj":
            return f"gamma_{self.obj}"
        return {"not-session": "rho_NotPO", "causal": "gamma_CC"}[self.kind]


def lifted(f: SpecFunction) -> ExtFunction:
    return ExtFunction("base", base=f)


NotSession = ExtFunction("not-session")
GammaCC = ExtFunction("causal")


def GammaObj(x: str) -> ExtFunction:
    return ExtFunction("causal-obj", obj=x)


def apply_ext(f: ExtFunction, eh: ExtendedHistory, r: Relation) -> Relation:
    h, u = eh.history, r.universe
    if f.kind == "base":
        return apply_spec_function(f.base, h, r)
    if f.kind == "not-session":
        return r - eh.po.reflexive_closure()
    if f.kind == "causal":
        return r.irreflexive_part()
    acc = test(u, h.writers(f.obj) | h.readers(f.obj))
    return (acc @ r @ acc).irreflexive_part()


# guarantees


@dataclass(frozen=True, order=True)
class SessionGuarantee:
    """``ryw`` (per ``obj``, or every object when None), ``mw`` or ``ss``."""

    kind: str
    obj: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("ryw", "mw", "ss"):
            raise ValueError(f"unknown session guarantee {self.kind!r}")
        if self.obj is not None and self.kind != "ryw":
            raise ValueError("only read-your-writes takes an object")

    def __str__(self):
        name = self.kind.upper()
        return f"{name}({self.obj})" if self.obj else name


RYW = SessionGuarantee("ryw")
MW = SessionGuarantee("mw")
SS = SessionGuarantee("ss")


def apply_session(s: SessionGuarantee, h: History, r: Relation) -> Relation:
    u = r.universe
    if s.kind == "ss":
        return r
    if s.kind == "mw":
        w = test(u, set().union(*(h.writers(x) for x in h.objects)))
        return w @ r @ w
    objs = h.objects if s.obj is None else [s.obj]
    out = Relation.empty(u)
    for x in objs:
        out = out | (test(u, h.writers(x)) @ r @ test(u, h.readers(x)))
    return out


@dataclass(frozen=True, order=True)
class CausalityGuarantee:
    gamma: ExtFunction
    beta: ExtFunction

    def __str__(self):
        return f"({self.gamma},{self.beta})"


FullCausal = CausalityGuarantee(GammaCC, GammaCC)


def PerObjectCausal(x: str) -> CausalityGuarantee:
    return CausalityGuarantee(GammaObj(x), GammaObj(x))


@dataclass(frozen=True, order=True)
class ExtConsistency:
    rho: ExtFunction
    pi: ExtFunction

    def __str__(self):
        return f"({self.rho},{self.pi})"


@dataclass(frozen=True)
class ExtendedSpec:
    sessions: tuple = ()
    causality: tuple = ()
    consistency: tuple = ()

    def __post_init__(self):
        for f in ("sessions", "causality", "consistency"):
            object.__setattr__(self, f, tuple(sorted(set(getattr(self, f)))))

    @property
    def fully_causal(self) -> bool:
        return FullCausal in self.causality


def lift_spec(sigma: XSpecification, causal: bool = True) -> ExtendedSpec:
    """``sigma`` as an extended specification, with full causality when ``causal``."""
    cons = [ExtConsistency(lifted(g.rho), lifted(g.pi)) for g in sigma.guarantees]
    return ExtendedSpec((), (FullCausal,) if causal else (), tuple(cons))


def lift_guarantee(g: ConsistencyGuarantee) -> ExtConsistency:
    return ExtConsistency(lifted(g.rho), lifted(g.pi))


# conformance


@dataclass(frozen=True)
class ClauseViolation:
    clause: str  # session:<g> | causality:<g> | consistency:<g> | valid:<violation>
    pair: Optional[tuple] = None

    def __str__(self):
        return f"{self.clause} at {self.pair}" if self.pair else self.clause


@dataclass(frozen=True)
class Conformance:
    conforms: bool
    violations: tuple = ()


def _first_extra(lhs: Relation, rhs: Relation) -> Optional[tuple]:
    extra = lhs - rhs
    return extra.pairs()[0] if extra else None


def conforms(e: ExtendedExecution, spec: ExtendedSpec) -> Conformance:
    """Every violated clause of ``spec`` (validity is checked without causality)."""
    out = [ClauseViolation(f"valid:{v}") for v in validate_execution(e.base, causal=False)]
    eh, vis, ar = e.history, e.vis, e.ar
    h = eh.history
    for s in spec.sessions:
        p = _first_extra(apply_session(s, h, eh.po), vis)
        if p:
            out.append(ClauseViolation(f"session:{s}", p))
    for c in spec.causality:
        p = _first_extra(apply_ext(c.gamma, eh, vis) @ apply_ext(c.beta, eh, vis), vis)
        if p:
            out.append(ClauseViolation(f"causality:{c}", p))
    for k in spec.consistency:
        lhs = apply_ext(k.rho, eh, vis) @ ar @ apply_ext(k.pi, eh, vis)
        p = _first_extra(lhs, vis)
        if p:
            out.append(ClauseViolation(f"consistency:{k}", p))
    return Conformance(not out, tuple(out))


SESSION_LAW_IDS = ("s.1", "s.2", "s.3")
NON_CAUSAL_SKIP = frozenset({"c.4", "c.8", "c.9"})


def audit_session_laws(e: ExtendedExecution, spec: ExtendedSpec) -> dict:
    """Core laws (minus the causal ones unless full causality is required)
    plus the three session/causality inequalities ``s.1``..``s.3``."""
    eh, vis, ar = e.history, e.vis, e.ar
    h, u = eh.history, eh.universe
    full = Relation.full(u)
    avis = e.anti_vis

    def apply(f, r):
        return apply_ext(f, eh, r)

    held = []
    for k in spec.consistency:
        if (apply(k.rho, vis) @ ar @ apply(k.pi, vis)).subset_of(vis):
            held.append((str(k), k.rho, k.pi))
    skip = frozenset() if spec.fully_causal else NON_CAUSAL_SKIP
    report = audit_core_laws(h, vis, ar, graphof(e.base), held, apply, skip)

    s1 = [str(s) for s in spec.sessions if not apply_session(s, h, eh.po).subset_of(vis)]
    report["s.1"] = _result(s1)
    s2, s3 = [], []
    for c in spec.causality:
        g_full, b_full = apply(c.gamma, full), apply(c.beta, full)
        if not ((apply(c.beta, vis) @ avis) & g_full.inverse()).subset_of(avis):
            s2.append(str(c))
        if not ((avis @ apply(c.gamma, vis)) & b_full.inverse()).subset_of(avis):
            s3.append(str(c))
    report["s.2"] = _result(s2)
    report["s.3"] = _result(s3)
    return report


def not_applicable(report: dict) -> list:
    return [k for k, r in report.items() if r.status == "not-applicable"]


# JSON


def extended_history_from_json(doc: Any) -> ExtendedHistory:
    """A history document with an optional ``sessions`` list (default: singletons)."""
    h = history_from_json(doc)
    raw = doc.get("sessions")
    if raw is None:
        return singleton_sessions(h)
    if not (isinstance(raw, list) and all(isinstance(s, list) for s in raw)):
        raise InputError("'sessions' must be a list of id lists")
    if not all(isinstance(t, str) for s in raw for t in s):
        raise InputError("session entries must be transaction ids")
    bad = validate_sessions(h, raw)
    if bad:
        raise InputError("invalid sessions: " + ", ".join(map(str, bad)))
    return ExtendedHistory(h, tuple(tuple(s) for s in raw))


def extended_execution_from_json(doc: Any) -> ExtendedExecution:
    eh = extended_history_from_json(doc)
    if "vis" not in doc or "ar" not in doc:
        raise InputError("an execution needs 'vis' and 'ar'")
    u = eh.universe
    rels = []
    for key in ("vis", "ar"):
        raw = doc[key]
        if not isinstance(raw, list):
            raise InputError(f"'{key}' must be a list of [src, dst] pairs")
        for p in raw:
            if not (isinstance(p, list) and len(p) == 2 and all(a in u for a in p)):
                raise InputError(f"bad edge in '{key}': {p!r}")
        rels.append(Relation.from_pairs(u, [tuple(p) for p in raw]))
    return ExtendedExecution(eh, *rels)


def sessions_to_json(eh: ExtendedHistory) -> list:
    return [list(s) for s in eh.sessions]


def parse_session_guarantee(text: str) -> SessionGuarantee:
    """``RYW``, ``RYW(x)``, ``MW`` or ``SS`` (case-insensitive)."""
    t = text.strip()
    if "(" in t and t.endswith(")"):
        name, obj = t[:-1].split("(", 1)
        return SessionGuarantee(name.strip().lower(), obj.strip())
    return SessionGuarantee(t.lower())

