"""Types, terms, theories: construction, rendering, typing, decorations."""

from __future__ import annotations

import pytest
from hypothesis import given

import strategies as strat
from decorlogic import errors as E
from decorlogic.terms import (CaseSum, Catch, Coerce, Comp, ConstCotuple,
                              FromEmpty, Gen, Id, Inj1, Inj2, LocTuple,
                              Lookup, PropCase, Proj1, SemiProd, Throw,
                              ToUnit, Update, cod, comp, dom,
                              normalize_assoc, subterms, term_size,
                              term_to_text)
from decorlogic.theory import (Equation, STRONG, WEAK, eq_strong, eq_weak,
                               infer_decoration, norm_eq, typecheck,
                               typecheck_equation)
from decorlogic.types import (Coprod, EMPTY, Named, Param, Prod, UNIT, Value)


def test_type_rendering():
    assert str(UNIT) == "1"
    assert str(EMPTY) == "0"
    assert str(Value("x")) == "V[x]"
    assert str(Param("i")) == "P[i]"
    assert str(Prod(Value("x"), UNIT)) == "(V[x] * 1)"
    assert str(Coprod(UNIT, Param("i"))) == "(1 + P[i])"
    assert str(Named("Acct")) == "Acct"


def test_term_rendering():
    assert term_to_text(Lookup("x")) == "l[x]"
    assert term_to_text(Update("x")) == "u[x]"
    assert term_to_text(Throw("i")) == "t[i]"
    assert term_to_text(Catch("i")) == "c[i]"
    assert term_to_text(Id(Value("x"))) == "id[V[x]]"
    assert term_to_text(Proj1(UNIT, Value("x"))) == "p1[1,V[x]]"
    t = Comp(Lookup("y"), Comp(Update("x"), Lookup("x")))
    assert term_to_text(t) == "l[y] . (u[x] . l[x])"
    fam = LocTuple((("x", Lookup("x")), ("y", Lookup("y"))))
    assert term_to_text(fam) == "tuple(x: l[x], y: l[y])"


def test_profiles_of_effect_atoms():
    assert dom(Lookup("x")) == UNIT and cod(Lookup("x")) == Value("x")
    assert dom(Update("x")) == Value("x") and cod(Update("x")) == UNIT
    assert dom(Throw("i")) == Param("i") and cod(Throw("i")) == EMPTY
    assert dom(Catch("i")) == EMPTY and cod(Catch("i")) == Param("i")


def test_comp_normalizes_to_right_nesting():
    a, b, c = Lookup("x"), Update("x"), Lookup("x")
    left = Comp(Comp(a, b), c)
    right = Comp(a, Comp(b, c))
    assert normalize_assoc(left) == right
    assert comp(a, b, c) == right
    assert normalize_assoc(right) == right


@given(strat.composed_terms(strat.state_atoms(["x", "y"]), max_factors=6))
def test_normalize_assoc_is_idempotent(t):
    once = normalize_assoc(t)
    assert normalize_assoc(once) == once


def test_typecheck_accepts_composable(states2):
    t = comp(Lookup("y"), Update("x"), Lookup("x"))
    assert typecheck(states2, t) == (UNIT, Value("y"))


def test_typecheck_rejects_profile_mismatch(states2):
    with pytest.raises(E.CompositionMismatch):
        typecheck(states2, Comp(Lookup("x"), Lookup("x")))


def test_typecheck_rejects_wrong_flavor(states2, exc2):
    with pytest.raises(E.TypingError):
        typecheck(states2, Throw("i"))
    with pytest.raises(E.TypingError):
        typecheck(exc2, Lookup("x"))


def test_typecheck_rejects_unknown_index(states2):
    with pytest.raises(E.UnknownIndex):
        typecheck(states2, Lookup("zz"))


def test_loc_tuple_needs_every_location(states2):
    with pytest.raises(E.IncompleteFamily):
        typecheck(states2, LocTuple((("x", Lookup("x")),)))


def test_semi_product_pure_slot_is_enforced(states2):
    eff = Lookup("x")
    with pytest.raises(E.PureSideRequired):
        typecheck(states2, SemiProd(Comp(Lookup("x"), Update("x")), eff,
                                    pure_on_left=True))
    ok = SemiProd(Id(UNIT), eff, pure_on_left=True)
    d, c = typecheck(states2, ok)
    # the semi-pure product maps pairs: (1 * 1) -> (1 * V[x])
    assert d == Prod(UNIT, UNIT) and c == Prod(UNIT, Value("x"))


def test_decorations_of_atoms():
    assert infer_decoration(Id(UNIT)) == 0
    assert infer_decoration(Lookup("x")) == 1
    assert infer_decoration(Update("x")) == 2
    assert infer_decoration(Throw("i")) == 1
    assert infer_decoration(Catch("i")) == 2
    assert infer_decoration(LocTuple((("x", Lookup("x")),))) == 2
    assert infer_decoration(ConstCotuple((("i", Catch("i")),))) == 2


def test_coerce_caps_the_decoration():
    handler_ish = Coerce(Comp(CaseSum(Id(Param("i")), Catch("i")),
                              Throw("i")))
    assert infer_decoration(handler_ish) == 1
    assert infer_decoration(Coerce(Id(UNIT))) == 0


@given(strat.composed_terms(strat.state_atoms(["x", "y"]), max_factors=5),
       strat.composed_terms(strat.state_atoms(["x", "y"]), max_factors=5))
def test_composite_decoration_is_the_max(f, g):
    t = Comp(f, g)
    assert infer_decoration(t) == max(infer_decoration(f),
                                      infer_decoration(g))


def test_gen_decoration_is_declared():
    g = Gen("tick", UNIT, UNIT, 2)
    assert infer_decoration(g) == 2
    assert infer_decoration(SemiProd(Id(UNIT), g, True)) == 2


def test_term_size_and_subterms():
    t = comp(Lookup("y"), Update("x"), Lookup("x"))
    assert term_size(t) == 5
    subs = list(subterms(t))
    assert Lookup("x") in subs and Update("x") in subs and t in subs


def test_theory_lookup_errors(states2):
    with pytest.raises(E.UnknownAxiom):
        states2.axiom("A9_q")
    with pytest.raises(E.UnknownGenerator):
        states2.gen("missing")


def test_with_gen_rejects_duplicates(states2):
    g = Gen("fresh", UNIT, UNIT, 0)
    extended = states2.with_gen(g)
    assert extended.gen("fresh") == g
    with pytest.raises(E.TypingError):
        extended.with_gen(Gen("fresh", UNIT, UNIT, 1))


def test_norm_eq_normalizes_both_sides():
    a, b, c = Lookup("x"), Update("x"), Lookup("x")
    eq = eq_weak(Comp(Comp(a, b), c), Comp(a, Comp(b, c)))
    n = norm_eq(eq)
    assert n.lhs == n.rhs


def test_equation_kinds_and_render():
    eq = eq_strong(Id(UNIT), Id(UNIT))
    assert eq.kind == STRONG
    assert eq_weak(Id(UNIT), Id(UNIT)).kind == WEAK
    assert "==" in str(eq)
    assert "~~" in str(eq_weak(Id(UNIT), Id(UNIT)))


def test_typecheck_equation_requires_same_profile(states2):
    with pytest.raises(E.TypingError):
        typecheck_equation(states2, eq_weak(Lookup("x"), Update("x")))


def test_exception_case_terms_typecheck(exc2):
    y = Param("j")
    chain = Comp(CaseSum(Id(y), Comp(FromEmpty(y), Throw("i"))), Throw("j"))
    with pytest.raises(E.TypingError):
        # the case scrutinee must produce Y + 0, t[j] lands in plain 0
        typecheck(exc2, chain)
    cases = PropCase(Inj1(Param("i"), Param("j")),
                     Inj2(Param("i"), Param("j")))
    d, c = typecheck(exc2, cases)
    assert d == Coprod(Param("i"), Param("j")) == c
