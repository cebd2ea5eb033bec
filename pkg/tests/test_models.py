"""Finite models: evaluation semantics, law checking, the four suites.

Expected values here were worked out by hand against the intended
semantics (a state is a tuple of location contents; an exceptional value
carries its constructor name and payload) and then frozen.
"""

from __future__ import annotations

import pytest
from hypothesis import given, settings

import strategies as strat
from decorlogic import errors as E
from decorlogic.kernel import Holds
from decorlogic.models import (FiniteExceptionModel, FiniteStateModel,
                               Valuation, check_equation, eval_exceptions,
                               eval_states, observational_equiv,
                               verify_law_suite)
from decorlogic.terms import (Catch, Comp, FromEmpty, Gen, Id, Lookup,
                              Throw, ToUnit, Update, comp)
from decorlogic.theory import eq_strong, eq_weak
from decorlogic.types import Param, UNIT, Value


def test_lookup_and_update(model32):
    assert eval_states(model32, Lookup("x"), (), (2, 1)) == (2, (2, 1))
    assert eval_states(model32, Lookup("y"), (), (2, 1)) == (1, (2, 1))
    assert eval_states(model32, Update("x"), 0, (2, 1)) == ((), (0, 1))


def test_update_then_read_other(model32):
    t = comp(Lookup("y"), Update("x"))
    assert eval_states(model32, t, 2, (0, 1)) == (1, (2, 1))


def test_a1_weak_holds_strong_fails(model32):
    lhs = comp(Lookup("x"), Update("x"))
    weak = check_equation(model32, eq_weak(lhs, Id(Value("x"))), "A1_x")
    assert weak.holds and weak.points == 18
    strong = check_equation(model32, eq_strong(lhs, Id(Value("x"))),
                            "A1_x_strong")
    assert strong.status == "fails"
    assert strong.witness == {"input": 0, "state": (1, 0),
                              "lhs": (0, (0, 0)), "rhs": (0, (1, 0))}


def test_annihilation_holds_strongly(model32):
    eq = eq_strong(comp(Update("x"), Lookup("x")), Id(UNIT))
    r = check_equation(model32, eq, "annihilation")
    assert r.holds and r.points == 6


def test_states_seven_suite(model32):
    rep = verify_law_suite(model32, "states-seven")
    assert rep.ok
    assert len(rep.results) == 26
    assert rep.results[0].name == "1-read-then-write[x]"


def test_throw_catch_round_trip(exc_model22):
    assert eval_exceptions(exc_model22, comp(Catch("i"), Throw("i")),
                           ("val", 1)) == ("val", 1)
    assert eval_exceptions(exc_model22, comp(Catch("j"), Throw("i")),
                           ("val", 1)) == ("exc", ("i", 1))
    #  an incoming exception propagates past a throw untouched
    assert eval_exceptions(exc_model22, Throw("i"),
                           ("exc", ("j", 0))) == ("exc", ("j", 0))


def test_catch_only_acts_on_matching_exceptions(exc_model22):
    c = Catch("i")
    assert eval_exceptions(exc_model22, c, ("exc", ("i", 1))) == ("val", 1)
    assert eval_exceptions(exc_model22, c, ("exc", ("j", 0))) == ("exc", ("j", 0))


def test_exceptions_laws_suite(exc_model22):
    rep = verify_law_suite(exc_model22, "exceptions-laws")
    assert rep.ok
    assert len(rep.results) == 14
    names = [r.name for r in rep.results]
    assert names[:4] == ["B1_i", "B1_j", "B2_i_j", "B2_j_i"]


def test_nesting_matrix(exc_model22):
    rep = verify_law_suite(exc_model22, "nesting-matrix")
    assert rep.ok
    assert [r.name for r in rep.results] == [
        "a/flat-escapes", "a/seq-catches", "a/clause-catches",
        "b/flat-catches", "b/seq-catches", "b/clause-misses"]


def test_duality_semantic_runs_from_states(model32, exc_model22):
    rep = verify_law_suite(model32, "duality-semantic")
    assert rep.ok
    assert [r.name for r in rep.results] == [
        "A1_x<->B1_x", "A1_y<->B1_y", "A2_x_y<->B2_x_y", "A2_y_x<->B2_y_x",
        "annihilation[x]<->annihilation[x]",
        "annihilation[y]<->annihilation[y]"]
    with pytest.raises(E.ModelError):
        verify_law_suite(exc_model22, "duality-semantic")


def test_unknown_suite(model32):
    with pytest.raises(E.SuiteUnknown):
        verify_law_suite(model32, "no-such-suite")


def test_observational_equivalence(model32):
    assert observational_equiv(model32, (1, 0), (1, 0))
    assert not observational_equiv(model32, (1, 0), (2, 0))


def test_missing_size_is_refused(states2):
    with pytest.raises(E.CarrierMissing):
        FiniteStateModel(states2, {"x": 3})


def test_flavor_mismatch_is_refused(states2, exc2):
    with pytest.raises(E.ModelError):
        FiniteStateModel(exc2, {"i": 2, "j": 2})
    with pytest.raises(E.ModelError):
        FiniteExceptionModel(states2, {"x": 2, "y": 2})


def test_bound_guards_exhaustive_checks(states2):
    small = FiniteStateModel(states2, {"x": 3, "y": 2}, bound=5)
    eq = eq_weak(comp(Lookup("x"), Update("x")), Id(Value("x")))
    with pytest.raises(E.SearchSpaceTooLarge):
        check_equation(small, eq)


def test_pure_gen_tables(states2):
    g = Gen("inc", Value("x"), Value("x"), 0)
    th = states2.with_gen(g)
    m = FiniteStateModel(th, {"x": 3, "y": 2},
                         Valuation(tables={"inc": [1, 2, 0]}))
    assert eval_states(m, g, 2, (0, 0)) == (0, (0, 0))
    bare = FiniteStateModel(th, {"x": 3, "y": 2})
    with pytest.raises(E.NoInterpretation):
        eval_states(bare, g, 0, (0, 0))


def test_effectful_gens_have_no_tables(states2):
    g = Gen("bump", UNIT, UNIT, 2)
    th = states2.with_gen(g)
    m = FiniteStateModel(th, {"x": 2, "y": 2},
                         Valuation(tables={"bump": [()]}))
    with pytest.raises(E.NoInterpretation):
        eval_states(m, g, (), (0, 0))


@settings(max_examples=80, deadline=None)
@given(strat.composed_terms(strat.state_atoms(["x", "y"]), max_factors=6))
def test_states_evaluation_is_total_and_deterministic(model22, t):
    for s in model22.states():
        for x in model22.carrier(strat.dom(t)):
            assert eval_states(model22, t, x, s) == eval_states(model22, t, x, s)


@settings(max_examples=60, deadline=None)
@given(strat.states_derivations(max_steps=3))
def test_kernel_soundness_in_state_models(model22, d):
    """Whatever the kernel derives holds in every finite model we try."""
    concl = d.conclusion
    if isinstance(concl, Holds):
        assert check_equation(model22, concl.eq).holds


@settings(max_examples=60, deadline=None)
@given(strat.exceptions_derivations(max_steps=3))
def test_kernel_soundness_in_exception_models(exc_model22, d):
    concl = d.conclusion
    if isinstance(concl, Holds):
        assert check_equation(exc_model22, concl.eq).holds
