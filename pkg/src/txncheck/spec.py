"""Specification functions, consistency guarantees and the model catalogue."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .core import SER, History
from .rel import Relation, test


@dataclass(frozen=True, order=True)
class SpecFunction:
    """Closed catalogue: ``id``, ``si``, ``writes`` (needs ``obj``), ``marked`` (needs ``tag``)."""

    kind: str
    obj: Optional[str] = None
    tag: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("id", "si", "writes", "marked"):
            raise ValueError(f"unknown specification function {self.kind!r}")
        if (self.kind == "writes") != (self.obj is not None):
            raise ValueError("writes functions take exactly one object")
        if (self.kind == "marked") != (self.tag is not None):
            raise ValueError("marked functions take exactly one tag")

    def __str__(self):
        if self.kind == "writes":
            return f"rho_{self.obj}"
        if self.kind == "marked":
            return "rho_S" if self.tag == SER else f"rho_{self.tag}"
        return {"id": "rho_Id", "si": "rho_SI"}[self.kind]


IdFun = SpecFunction("id")
SIFun = SpecFunction("si")
SerFun = SpecFunction("marked", tag=SER)


def WriteSetFun(x: str) -> SpecFunction:
    return SpecFunction("writes", obj=x)


def MarkedFun(tag: str = SER) -> SpecFunction:
    return SpecFunction("marked", tag=tag)


def apply_spec_function(f: SpecFunction, h: History, r: Relation) -> Relation:
    u = r.universe
    if f.kind == "id":
        return Relation.identity(u)
    if f.kind == "si":
        return r.irreflexive_part()
    if f.kind == "writes":
        return test(u, h.writers(f.obj))
    return test(u, h.marked(f.tag))


@dataclass(frozen=True, order=True)
class ConsistencyGuarantee:
    rho: SpecFunction
    pi: SpecFunction

    @property
    def write_conflict(self) -> bool:
        return self.rho.kind == "writes" and self.rho == self.pi

    def __str__(self):
        return f"({self.rho},{self.pi})"


@dataclass(frozen=True)
class XSpecification:
    guarantees: frozenset
    name: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "guarantees", frozenset(self.guarantees))

    def __iter__(self):
        return iter(sorted(self.guarantees))

    def __len__(self):
        return len(self.guarantees)

    @property
    def main(self) -> list:
        """Guarantees other than per-object write-conflict detection."""
        return sorted(g for g in self.guarantees if not g.write_conflict)

    @property
    def conflict_objects(self) -> list:
        return sorted(g.rho.obj for g in self.guarantees if g.write_conflict)

    def simple(self) -> bool:
        return len(self.main) <= 1


def simple(sigma: XSpecification) -> bool:
    return sigma.simple()


MODELS = ("cc", "ccser", "psi", "si", "si+ser", "ser", "cp")
ALIASES = {"redblue": "ccser", "si_ser": "si+ser"}


def canonical_model(name: str) -> str:
    n = name.strip().lower()
    n = ALIASES.get(n, n)
    if n not in MODELS:
        raise KeyError(f"unknown model {name!r}; expected one of {', '.join(MODELS)}")
    return n


def catalog(name: str, objects: Iterable[str]) -> XSpecification:
    n = canonical_model(name)
    wc = {ConsistencyGuarantee(WriteSetFun(x), WriteSetFun(x)) for x in objects}
    si_g = ConsistencyGuarantee(IdFun, SIFun)
    ser_g = ConsistencyGuarantee(SerFun, SerFun)
    table = {
        "cc": set(),
        "ccser": {ser_g},
        "psi": wc,
        "si": wc | {si_g},
        "si+ser": wc | {si_g, ser_g},
        "ser": {ConsistencyGuarantee(IdFun, IdFun)},
        "cp": {si_g, ser_g},
    }
    return XSpecification(frozenset(table[n]), n)


def model_for(name: str, h: History) -> XSpecification:
    return catalog(name, h.objects)


@dataclass(frozen=True)
class GuaranteeCheck:
    holds: bool
    counterexample: Optional[tuple] = None


def satisfies_guarantee(e, g: ConsistencyGuarantee) -> GuaranteeCheck:
    h = e.history
    lhs = apply_spec_function(g.rho, h, e.vis) @ e.ar @ apply_spec_function(g.pi, h, e.vis)
    extra = lhs - e.vis
    if extra:
        return GuaranteeCheck(False, extra.pairs()[0])
    return GuaranteeCheck(True)


def satisfies(e, sigma: XSpecification) -> bool:
    return all(satisfies_guarantee(e, g).holds for g in sigma.guarantees)


def violated(e, sigma: XSpecification) -> list:
    return [(g, c.counterexample) for g in sigma for c in [satisfies_guarantee(e, g)] if not c.holds]
