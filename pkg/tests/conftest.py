import os
import random
import sys

import hypothesis
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from txncheck.corpus import CorpusConfig, random_history  # noqa: E402
from txncheck.rel import Relation, Universe  # noqa: E402

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=15, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=1000, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

IDS = tuple(f"t{i}" for i in range(6))


def universe(n: int) -> Universe:
    return Universe(IDS[:n])


@st.composite
def relations(draw, n=None, count=1):
    """``count`` relations over one shared universe of size ``n`` (drawn when None)."""
    n = draw(st.integers(1, 5)) if n is None else n
    u = universe(n)
    rows = st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n)
    rels = [Relation(u, draw(rows)) for _ in range(count)]
    return rels[0] if count == 1 else tuple(rels)


SMALL = CorpusConfig(max_transactions=4)


def histories(cfg: CorpusConfig = SMALL):
    return st.integers(0, 2**32 - 1).map(lambda s: random_history(random.Random(s), cfg))


def as_pairs(r: Relation) -> set:
    return set(r.pairs())


@st.composite
def graphs(draw, cfg: CorpusConfig = SMALL):
    """A random dependency graph over a random small history."""
    from itertools import islice

    from txncheck.oracle import compatible_graphs

    h = draw(histories(cfg))
    gs = list(islice(compatible_graphs(h), 64))
    hypothesis.assume(gs)
    return gs[draw(st.integers(0, len(gs) - 1))]
