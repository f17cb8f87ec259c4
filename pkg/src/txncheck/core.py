"""Histories, transactions and operations.

A transaction is a *set* of operations; op order inside a transaction is not
modelled. Object names and transaction ids are opaque strings, ordered
lexicographically wherever a canonical order is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional

from .rel import Universe

SER = "ser"
MARKER_TAGS = frozenset({SER})


class OpKind(str, Enum):
    READ = "read"
    WRITE = "write"
    MARKER = "marker"


@dataclass(frozen=True, order=True)
class Operation:
    kind: OpKind
    obj: Optional[str] = None
    val: Optional[int] = None
    tag: Optional[str] = None

    def __post_init__(self):
        if self.kind is OpKind.MARKER:
            if self.obj is not None or self.val is not None:
                raise ValueError("marker operations carry no object or value")
            if self.tag not in MARKER_TAGS:
                raise ValueError(f"unknown marker tag {self.tag!r}")
        else:
            if self.obj is None or self.val is None:
                raise ValueError(f"{self.kind.value} needs an object and a value")
            if self.tag is not None:
                raise ValueError("only markers carry a tag")

    def __str__(self):
        if self.kind is OpKind.MARKER:
            return f"[{self.tag.upper()}]"
        head = "RD" if self.kind is OpKind.READ else "WR"
        return f"{head} {self.obj}:{self.val}"


def Read(obj: str, val: int) -> Operation:
    return Operation(OpKind.READ, obj, val)


def Write(obj: str, val: int) -> Operation:
    return Operation(OpKind.WRITE, obj, val)


def Marker(tag: str = SER) -> Operation:
    return Operation(OpKind.MARKER, tag=tag)


@dataclass(frozen=True)
class Transaction:
    id: str
    ops: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "ops", frozenset(self.ops))

    def _values(self, kind: OpKind) -> dict:
        out: dict = {}
        for op in self.ops:
            if op.kind is kind:
                out.setdefault(op.obj, set()).add(op.val)
        return out

    @cached_property
    def read_values(self) -> dict:
        """object -> set of values read (a singleton when atomic)."""
        return self._values(OpKind.READ)

    @cached_property
    def write_values(self) -> dict:
        return self._values(OpKind.WRITE)

    def reads(self, x: str) -> bool:
        return x in self.read_values

    def writes(self, x: str) -> bool:
        return x in self.write_values

    def read_value(self, x: str) -> int:
        (v,) = self.read_values[x]
        return v

    def write_value(self, x: str) -> int:
        (v,) = self.write_values[x]
        return v

    def marked(self, tag: str = SER) -> bool:
        return Marker(tag) in self.ops

    @property
    def objects(self) -> frozenset:
        return frozenset(self.read_values) | frozenset(self.write_values)

    def __str__(self):
        body = ", ".join(str(op) for op in sorted(self.ops, key=_op_key))
        return f"{self.id}{{{body}}}"


def _op_key(op: Operation):
    return (op.kind != OpKind.MARKER, op.obj or "", op.kind.value, op.val or 0)


def txn(tid: str, *ops: Operation) -> Transaction:
    return Transaction(tid, frozenset(ops))


@dataclass(frozen=True)
class Violation:
    """One named failure of a validity clause, e.g. ``lww-wrong-value(S,acct)``."""

    clause: str
    txn: Optional[str] = None
    obj: Optional[str] = None

    def __str__(self):
        args = [a for a in (self.txn, self.obj) if a is not None]
        return f"{self.clause}({','.join(args)})" if args else self.clause


@dataclass(frozen=True)
class History:
    """A finite set of transactions.

    ``init`` optionally names an initialiser transaction that every other
    transaction must observe (the usual T0 of anomaly litmus tests).
    """

    transactions: tuple
    init: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(
            self, "transactions", tuple(sorted(self.transactions, key=lambda t: t.id))
        )

    @cached_property
    def ids(self) -> tuple:
        return tuple(t.id for t in self.transactions)

    @cached_property
    def universe(self) -> Universe:
        return Universe(self.ids)

    @cached_property
    def by_id(self) -> dict:
        return {t.id: t for t in self.transactions}

    def __getitem__(self, tid: str) -> Transaction:
        return self.by_id[tid]

    def __len__(self):
        return len(self.transactions)

    def __iter__(self):
        return iter(self.transactions)

    @cached_property
    def objects(self) -> tuple:
        return tuple(sorted(set().union(*(t.objects for t in self.transactions))))

    def writers(self, x: str) -> frozenset:
        return writers_of(self, x)

    def readers(self, x: str) -> frozenset:
        return readers_of(self, x)

    def marked(self, tag: str = SER) -> frozenset:
        return frozenset(t.id for t in self.transactions if t.marked(tag))


def history(*transactions: Transaction, init: Optional[str] = None) -> History:
    return History(tuple(transactions), init=init)


def writers_of(h: History, x: str) -> frozenset:
    return frozenset(t.id for t in h.transactions if t.writes(x))


def readers_of(h: History, x: str) -> frozenset:
    return frozenset(t.id for t in h.transactions if t.reads(x))


def validate_history(h: History) -> list:
    """Every duplicate-id and atomic-visibility violation in ``h``."""
    out = []
    seen = set()
    for t in h.transactions:
        if t.id in seen:
            out.append(Violation("duplicate-id", t.id))
        seen.add(t.id)
    for t in h.transactions:
        for x, vals in sorted(t.read_values.items()):
            if len(vals) > 1:
                out.append(Violation("read-atomicity", t.id, x))
        for x, vals in sorted(t.write_values.items()):
            if len(vals) > 1:
                out.append(Violation("write-atomicity", t.id, x))
    if h.init is not None and h.init not in seen:
        out.append(Violation("unknown-init", h.init))
    return sorted(set(out), key=lambda v: (v.clause, v.txn or "", v.obj or ""))


def check_history(h: History) -> History:
    """Raise ``ValueError`` unless ``h`` is valid; returns ``h`` for chaining."""
    bad = validate_history(h)
    if bad:
        raise ValueError("invalid history: " + ", ".join(map(str, bad)))
    return h

