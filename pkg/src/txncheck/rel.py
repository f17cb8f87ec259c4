"""Finite binary relations over a fixed, ordered universe.

Relations are dense boolean matrices stored as one Python int per row
(bit ``j`` of ``rows[i]`` set iff ``(i, j)`` is in the relation). All values
are immutable; every operation returns a fresh relation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence


class UniverseMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Universe:
    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if len(set(self.members)) != len(self.members):
            raise ValueError("universe members must be distinct")

    @cached_property
    def index(self) -> dict:
        return {m: i for i, m in enumerate(self.members)}

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, item):
        return item in self.index

    def mask(self, ids: Iterable[str]) -> int:
        m = 0
        for a in ids:
            if a not in self.index:
                raise KeyError(f"{a!r} is not in the universe")
            m |= 1 << self.index[a]
        return m

    @property
    def full_mask(self) -> int:
        return (1 << len(self.members)) - 1


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class Relation:
    __slots__ = ("universe", "rows", "_hash")

    def __init__(self, universe: Universe, rows: Sequence[int]):
        if len(rows) != len(universe):
            raise ValueError("row count does not match universe size")
        self.universe = universe
        self.rows = tuple(rows)
        self._hash = None

    # construction

    @classmethod
    def empty(cls, u: Universe) -> "Relation":
        return cls(u, [0] * len(u))

    @classmethod
    def identity(cls, u: Universe) -> "Relation":
        return cls(u, [1 << i for i in range(len(u))])

    @classmethod
    def full(cls, u: Universe) -> "Relation":
        return cls(u, [u.full_mask] * len(u))

    @classmethod
    def from_pairs(cls, u: Universe, pairs: Iterable[tuple]) -> "Relation":
        rows = [0] * len(u)
        for a, b in pairs:
            rows[u.index[a]] |= 1 << u.index[b]
        return cls(u, rows)

    @classmethod
    def from_index_pairs(cls, u: Universe, pairs: Iterable[tuple]) -> "Relation":
        rows = [0] * len(u)
        n = len(u)
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise IndexError(f"pair {(i, j)} outside universe of size {n}")
            rows[i] |= 1 << j
        return cls(u, rows)

    # inspection

    def index_pairs(self) -> Iterator[tuple]:
        for i, row in enumerate(self.rows):
            for j in _bits(row):
                yield i, j

    def pairs(self) -> list:
        m = self.universe.members
        return [(m[i], m[j]) for i, j in self.index_pairs()]

    def __contains__(self, pair) -> bool:
        a, b = pair
        idx = self.universe.index
        return bool(self.rows[idx[a]] >> idx[b] & 1)

    def has(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def __len__(self):
        return sum(bin(r).count("1") for r in self.rows)

    def __bool__(self):
        return any(self.rows)

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self.universe == other.universe and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.universe.members, self.rows))
        return self._hash

    def __repr__(self):
        return f"Relation({self.pairs()!r})"

    def successors(self, i: int) -> list:
        return list(_bits(self.rows[i]))

    def image(self, mask: int) -> int:
        out = 0
        for i in _bits(mask):
            out |= self.rows[i]
        return out

    # algebra

    def _check(self, other: "Relation"):
        if self.universe is not other.universe and self.universe.members != other.universe.members:
            raise UniverseMismatch("relations are over different universes")

    def union(self, other: "Relation") -> "Relation":
        self._check(other)
        return _make(self.universe, [a | b for a, b in zip(self.rows, other.rows)])

    def intersect(self, other: "Relation") -> "Relation":
        self._check(other)
        return _make(self.universe, [a & b for a, b in zip(self.rows, other.rows)])

    def difference(self, other: "Relation") -> "Relation":
        self._check(other)
        return _make(self.universe, [a & ~b for a, b in zip(self.rows, other.rows)])

    def compose(self, other: "Relation") -> "Relation":
        self._check(other)
        orows = other.rows
        out = []
        for row in self.rows:
            acc = 0
            j = 0
            while row:
                if row & 1:
                    acc |= orows[j]
                row >>= 1
                j += 1
            out.append(acc)
        return _make(self.universe, out)

    def inverse(self) -> "Relation":
        n = len(self.universe)
        out = [0] * n
        for i, row in enumerate(self.rows):
            for j in _bits(row):
                out[j] |= 1 << i
        return Relation(self.universe, out)

    def complement(self) -> "Relation":
        full = self.universe.full_mask
        return Relation(self.universe, [full & ~r for r in self.rows])

    def reflexive_closure(self) -> "Relation":
        return _make(self.universe, [r | (1 << i) for i, r in enumerate(self.rows)])

    def transitive_closure(self) -> "Relation":
        rows = list(self.rows)
        n = len(rows)
        for k in range(n):
            bit = 1 << k
            rk = rows[k]
            for i in range(n):
                if rows[i] & bit:
                    rows[i] |= rk
        return _make(self.universe, rows)

    def reflexive_transitive_closure(self) -> "Relation":
        return self.transitive_closure().reflexive_closure()

    def irreflexive_part(self) -> "Relation":
        """R \\ Id."""
        return _make(self.universe, [r & ~(1 << i) for i, r in enumerate(self.rows)])

    def restrict(self, mask: int) -> "Relation":
        """Pairs with both endpoints in ``mask``."""
        return Relation(
            self.universe,
            [(r & mask) if mask >> i & 1 else 0 for i, r in enumerate(self.rows)],
        )

    def subset_of(self, other: "Relation") -> bool:
        self._check(other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def is_reflexive_somewhere(self) -> bool:
        return any(r >> i & 1 for i, r in enumerate(self.rows))

    def is_irreflexive(self) -> bool:
        return not self.is_reflexive_somewhere()

    def is_transitive(self) -> bool:
        return self.compose(self).subset_of(self)

    def reflexive_points(self) -> list:
        return [self.universe.members[i] for i, r in enumerate(self.rows) if r >> i & 1]

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __matmul__ = compose
    __invert__ = complement
    __le__ = subset_of


def _make(u: Universe, rows) -> Relation:
    """Unchecked constructor for rows known to fit ``u``."""
    r = Relation.__new__(Relation)
    r.universe = u
    r.rows = tuple(rows)
    r._hash = None
    return r


def compose(*rs: Relation) -> Relation:
    out = rs[0]
    for r in rs[1:]:
        out = out.compose(r)
    return out


def union(first: Relation, *rest: Relation) -> Relation:
    out = first
    for r in rest:
        out = out.union(r)
    return out


def test(u: Universe, ids: Iterable[str]) -> Relation:
    """The sub-identity relation on ``ids``."""
    mask = u.mask(ids)
    return Relation(u, [(1 << i) if mask >> i & 1 else 0 for i in range(len(u))])


def test_mask(u: Universe, mask: int) -> Relation:
    return Relation(u, [(1 << i) if mask >> i & 1 else 0 for i in range(len(u))])


def _shortest_cycle_through(r: Relation, s: int) -> Optional[list]:
    parent = {}
    queue = deque()
    for j in _bits(r.rows[s]):
        if j == s:
            return [s, s]
        if j not in parent:
            parent[j] = s
            queue.append(j)
    while queue:
        v = queue.popleft()
        for w in _bits(r.rows[v]):
            if w == s:
                path = [v]
                while path[-1] != s:
                    path.append(parent[path[-1]])
                path.reverse()
                return path + [s]
            if w not in parent:
                parent[w] = v
                queue.append(w)
    return None


def find_cycle_indices(r: Relation) -> Optional[list]:
    """Shortest cycle ``[v0, ..., vk]`` with ``v0 == vk``, or None if acyclic.

    Ties between equally short cycles go to the one whose start vertex comes
    first in universe order.
    """
    best = None
    for s in range(len(r.universe)):
        c = _shortest_cycle_through(r, s)
        if c is not None and (best is None or len(c) < len(best)):
            best = c
            if len(best) == 2:
                break
    return best


def find_cycle(r: Relation) -> Optional[list]:
    c = find_cycle_indices(r)
    if c is None:
        return None
    m = r.universe.members
    return [m[i] for i in c]


def is_acyclic(r: Relation) -> bool:
    return r.transitive_closure().is_irreflexive()


def topological_order(r: Relation) -> Optional[list]:
    """Kahn's algorithm, smallest index first; None when ``r`` has a cycle."""
    n = len(r.universe)
    indeg = [0] * n
    for _, j in r.index_pairs():
        indeg[j] += 1
    ready = [i for i in range(n) if indeg[i] == 0]
    out = []
    while ready:
        ready.sort()
        i = ready.pop(0)
        out.append(i)
        for j in _bits(r.rows[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
    return out if len(out) == n else None


def is_strict_total_order(r: Relation, ids: Optional[Iterable[str]] = None) -> bool:
    """Irreflexive, transitive and total on ``ids`` (default: whole universe)."""
    u = r.universe
    mask = u.full_mask if ids is None else u.mask(ids)
    s = r.restrict(mask)
    if not s.is_irreflexive() or not s.is_transitive():
        return False
    for i in _bits(mask):
        for j in _bits(mask):
            if i < j and not (s.has(i, j) or s.has(j, i)):
                return False
    return True


def linear_order(u: Universe, order: Sequence) -> Relation:
    """Strict total order listing ``order`` (ids) first to last."""
    idx = [u.index[a] for a in order]
    rows = [0] * len(u)
    later = 0
    for i in reversed(idx):
        rows[i] = later
        later |= 1 << i
    return Relation(u, rows)
