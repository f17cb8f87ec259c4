from hypothesis import given
from hypothesis import strategies as st

import reference as ref
from conftest import as_pairs, relations, universe
from txncheck.rel import (
    Relation,
    UniverseMismatch,
    find_cycle,
    is_acyclic,
    is_strict_total_order,
    linear_order,
    test as sub_identity,
    topological_order,
)


def test_from_pairs_roundtrip():
    u = universe(3)
    r = Relation.from_pairs(u, [("t0", "t1"), ("t2", "t0")])
    assert sorted(r.pairs()) == [("t0", "t1"), ("t2", "t0")]
    assert ("t0", "t1") in r and ("t1", "t0") not in r
    assert len(r) == 2


def test_universe_mismatch_rejected():
    a = Relation.empty(universe(2))
    b = Relation.empty(universe(3))
    try:
        a | b
    except UniverseMismatch:
        pass
    else:
        raise AssertionError("expected UniverseMismatch")


def test_cycle_is_shortest_and_earliest():
    u = universe(4)
    r = Relation.from_pairs(u, [("t0", "t1"), ("t1", "t2"), ("t2", "t0"), ("t2", "t3"), ("t3", "t2")])
    assert find_cycle(r) == ["t2", "t3", "t2"]


def test_self_loop_cycle():
    u = universe(2)
    assert find_cycle(Relation.from_pairs(u, [("t1", "t1")])) == ["t1", "t1"]


def test_linear_order_is_total():
    u = universe(4)
    r = linear_order(u, ["t2", "t0", "t3", "t1"])
    assert is_strict_total_order(r)
    assert topological_order(r) == [2, 0, 3, 1]


@given(relations(count=2))
def test_compose_matches_reference(rs):
    r, s = rs
    assert as_pairs(r @ s) == ref.compose(as_pairs(r), as_pairs(s))


@given(relations())
def test_closure_matches_reference(r):
    assert as_pairs(r.transitive_closure()) == ref.closure(as_pairs(r))


@given(relations(count=3))
def test_composition_associative_and_distributive(rs):
    a, b, c = rs
    assert (a @ b) @ c == a @ (b @ c)
    assert a @ (b | c) == (a @ b) | (a @ c)
    assert (a | b) @ c == (a @ c) | (b @ c)


@given(relations(count=2))
def test_inverse_laws(rs):
    a, b = rs
    assert a.inverse().inverse() == a
    assert (a @ b).inverse() == b.inverse() @ a.inverse()


@given(relations())
def test_star_unfolds(r):
    ident = Relation.identity(r.universe)
    star = r.reflexive_transitive_closure()
    assert star == ident | (r @ star)
    assert star @ star == star
    assert r.transitive_closure() == r @ star


@given(relations())
def test_cycle_iff_no_topological_order(r):
    cyc = find_cycle(r)
    topo = topological_order(r)
    assert (cyc is None) == (topo is not None) == is_acyclic(r)
    assert is_acyclic(r) == ref.acyclic(as_pairs(r))
    if cyc is not None:
        assert cyc[0] == cyc[-1]
        assert all((a, b) in r for a, b in zip(cyc, cyc[1:]))
    else:
        pos = {i: k for k, i in enumerate(topo)}
        assert all(pos[i] < pos[j] for i, j in r.index_pairs())


@given(relations(), st.data())
def test_tests_are_subidentities(r, data):
    ids = data.draw(st.sets(st.sampled_from(r.universe.members)))
    t = sub_identity(r.universe, ids)
    assert t <= Relation.identity(r.universe)
    assert as_pairs(t @ r) == {(a, b) for a, b in as_pairs(r) if a in ids}


@given(relations())
def test_complement_and_difference(r):
    full = Relation.full(r.universe)
    assert ~r == full - r
    assert (r & ~r) == Relation.empty(r.universe)
