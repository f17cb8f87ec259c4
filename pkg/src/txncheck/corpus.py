"""Seeded random histories for small-scope exhaustive checking."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator

from .core import History, Marker, Read, Transaction, Write


@dataclass(frozen=True)
class CorpusConfig:
    size: int = 200
    max_transactions: int = 5
    objects: tuple = ("x", "y")
    values: tuple = (0, 1)
    p_read: float = 0.5
    p_write: float = 0.5
    p_marker: float = 0.3
    p_zero_writer: float = 0.5  # prepend an ordinary transaction writing the first value everywhere
    seed: int = 20161015


def random_history(rng: random.Random, cfg: CorpusConfig) -> History:
    """Writes are drawn first; reads then pick a value some other transaction wrote."""
    n = rng.randint(1, cfg.max_transactions)
    writes = []
    if n > 1 and rng.random() < cfg.p_zero_writer:
        writes.append({x: cfg.values[0] for x in cfg.objects})
    while len(writes) < n:
        writes.append(
            {x: rng.choice(cfg.values) for x in cfg.objects if rng.random() < cfg.p_write}
        )
    txns = []
    for i, w in enumerate(writes):
        ops = {Write(x, v) for x, v in w.items()}
        for x in cfg.objects:
            seen = sorted({o[x] for j, o in enumerate(writes) if j != i and x in o})
            if seen and rng.random() < cfg.p_read:
                ops.add(Read(x, rng.choice(seen)))
        if not ops:
            ops.add(Read(cfg.objects[0], cfg.values[0]))
        if rng.random() < cfg.p_marker:
            ops.add(Marker())
        txns.append(Transaction(f"t{i}", frozenset(ops)))
    return History(tuple(txns))


def random_histories(cfg: CorpusConfig = CorpusConfig()) -> Iterator[History]:
    rng = random.Random(cfg.seed)
    for _ in range(cfg.size):
        yield random_history(rng, cfg)
