import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import histories
from txncheck.fixtures import lost_update, running_example_execution, serialisable_lost_update
from txncheck.oracle import enumerate_executions
from txncheck.rel import Relation
from txncheck.spec import (
    ConsistencyGuarantee,
    IdFun,
    MODELS,
    SIFun,
    SerFun,
    WriteSetFun,
    apply_spec_function,
    canonical_model,
    catalog,
    satisfies,
    satisfies_guarantee,
    simple,
)


def test_si_function_on_identity_is_empty():
    h = lost_update().history
    assert not apply_spec_function(SIFun, h, Relation.identity(h.universe))


def test_write_set_function():
    h = lost_update().history
    r = apply_spec_function(WriteSetFun("acct"), h, Relation.empty(h.universe))
    assert sorted(r.pairs()) == [("T0", "T0"), ("T1", "T1"), ("T2", "T2")]


@given(histories(), st.data())
def test_locality(h, data):
    u = h.universe
    n = len(u)
    r = Relation(u, data.draw(st.lists(st.integers(0, (1 << n) - 1), min_size=n, max_size=n)))
    fns = [IdFun, SIFun, SerFun] + [WriteSetFun(x) for x in h.objects]
    f = data.draw(st.sampled_from(fns))
    full = apply_spec_function(f, h, Relation.full(u))
    assert apply_spec_function(f, h, r) == full & r.reflexive_closure()


def test_ser_axiom_fails_on_running_example():
    e = running_example_execution()
    c = satisfies_guarantee(e, ConsistencyGuarantee(IdFun, IdFun))
    assert not c.holds and c.counterexample == ("T1", "T2")


def test_cc_vacuous():
    assert satisfies(running_example_execution(), catalog("cc", ["acct"]))


def test_serialisable_lost_update_breaks_ser_marker_axiom():
    h = serialisable_lost_update().history
    g = ConsistencyGuarantee(SerFun, SerFun)
    assert not any(satisfies_guarantee(e, g).holds for e in enumerate_executions(h))


def test_catalog_shapes():
    assert len(catalog("cc", ["x"])) == 0
    psi = catalog("psi", ["x", "y"])
    assert set(psi.guarantees) == {
        ConsistencyGuarantee(WriteSetFun("x"), WriteSetFun("x")),
        ConsistencyGuarantee(WriteSetFun("y"), WriteSetFun("y")),
    }
    assert not simple(catalog("si+ser", ["x"]))
    assert not simple(catalog("cp", ["x"]))
    for m in ("cc", "ccser", "psi", "si", "ser"):
        assert simple(catalog(m, ["x", "y"]))


def test_aliases_and_unknown():
    assert canonical_model("RedBlue") == "ccser"
    assert canonical_model("SI_SER") == "si+ser"
    assert set(MODELS) >= {"cc", "ccser", "psi", "si", "ser"}
    with pytest.raises(KeyError):
        catalog("linearizable", [])
