"""Erasure, duality, and expansion, cross-checked against the evaluators."""

from __future__ import annotations

import pytest
from hypothesis import given, settings

import strategies as strat
from decorlogic import errors as E
from decorlogic.exceptions import (build_exceptions_theory, with_catch_all,
                                   builtin_proof as exc_proof,
                                   derive_lemma as exc_lemma)
from decorlogic.kernel import check_derivation
from decorlogic.models import (FiniteExceptionModel, FiniteStateModel,
                               eval_exceptions, eval_states)
from decorlogic.states import (build_states_theory, builtin_proof as st_proof,
                               derive_lemma as st_lemma)
from decorlogic.terms import (Catch, CatchAll, Comp, FromEmpty, Id, Lookup,
                              SemiProd, SemiCoprod, Throw, ToUnit, Update,
                              cod, dom)
from decorlogic.theory import Equation, STRONG, WEAK
from decorlogic.translators import (DUALITY, ECase, EGen, EId, EInitial,
                                    EInj1, EInj2, EPair, EProj1, EProj2,
                                    ETerminal, RULE_DUALS, dual_axiom_name,
                                    dualize_derivation, dualize_equation,
                                    dualize_term, dualize_theory,
                                    dualize_type, ecomp, erase_derivation,
                                    erase_equation, erase_theory, esimplify,
                                    eval_explicit, exception_type,
                                    expand_exceptions,
                                    expand_exceptions_equation, expand_states,
                                    expand_states_equation, pack_exception,
                                    pack_state, state_type)
from decorlogic.types import (EMPTY, UNIT, Coprod, Empty, Param, Prod, Unit,
                              Value)

# ---------------------------------------------------------------- erasure


def test_erase_theory_forgets_decorations(states2):
    plain = erase_theory(states2)
    assert plain.flavor == "plain"
    assert plain.name == states2.name + "-plain"
    assert [a.name for a in plain.axioms] == [a.name for a in states2.axioms]
    assert all(a.eq.kind == STRONG for a in plain.axioms)
    # idempotent: erasing a plain theory is the identity
    assert erase_theory(plain) is plain


def test_erase_equation_promotes_kind(states2):
    eq = states2.axiom("A1_x").eq
    erased = erase_equation(eq)
    assert erased.kind == STRONG
    assert (erased.lhs, erased.rhs) == (eq.lhs, eq.rhs)


def test_erased_derivations_replay_on_plain_theory(states2, exc2):
    cases = [
        (states2, st_lemma(states2, "annihilation", {"i": "x"})),
        (states2, st_lemma(states2, "commutation-6", {"i": "x", "j": "y"})),
        (states2, st_proof(states2, "pr5")),
        (exc2, exc_lemma(exc2, "key-annihilation", {"i": "i"})),
        (exc2, exc_lemma(exc2, "handler-commute", {"i": "i", "j": "j"})),
        (exc2, exc_proof(exc2, "bridge-r")),
    ]
    for theory, d in cases:
        plain = erase_theory(theory)
        ed = erase_derivation(theory, d)
        res = check_derivation(plain, ed)
        assert res.valid, res.error
        assert ed.conclusion.eq.kind == STRONG


def test_erasure_keeps_the_tree_shape(states2):
    d = st_proof(states2, "pr5")
    ed = erase_derivation(states2, d)
    assert ed.rule == d.rule
    assert len(ed.premises) == len(d.premises)
    assert ed.conclusion.eq.lhs == d.conclusion.eq.lhs


# ---------------------------------------------------------------- duality


def test_dualize_type_swaps_both_pillars():
    assert dualize_type(UNIT) == EMPTY
    assert dualize_type(EMPTY) == UNIT
    assert dualize_type(Value("x")) == Param("x")
    assert dualize_type(Param("i")) == Value("i")
    assert (dualize_type(Prod(Value("x"), UNIT))
            == Coprod(Param("x"), EMPTY))


def test_dualize_term_swaps_and_reverses():
    assert dualize_term(Lookup("x")) == Throw("x")
    assert dualize_term(Update("x")) == Catch("x")
    assert dualize_term(ToUnit(Value("x"))) == FromEmpty(Param("x"))
    # composition order flips
    got = dualize_term(Comp(Lookup("y"), Update("x")))
    assert got == Comp(Catch("x"), Throw("y"))
    # semi-pairing becomes semi-copairing, handedness kept
    sp = SemiProd(Id(UNIT), Update("x"), True)
    sc = dualize_term(sp)
    assert isinstance(sc, SemiCoprod)
    assert sc.pure_on_left
    assert sc.eff == Catch("x")


@given(strat.states_terms(strat.STATES2))
def test_dualize_term_is_an_involution(t):
    assert dualize_term(dualize_term(t)) == t
    assert dom(dualize_term(t)) == dualize_type(cod(t))
    assert cod(dualize_term(t)) == dualize_type(dom(t))


def test_dual_axiom_name_toggles_prefix():
    assert dual_axiom_name("A1_x") == "B1_x"
    assert dual_axiom_name("B2_i_j") == "A2_i_j"
    assert dual_axiom_name("CA_i") == "CA_i"
    assert dual_axiom_name("assoc") == "assoc"


def test_dualize_theory_matches_a_hand_built_dual():
    s = build_states_theory("S", ["x", "y"])
    assert dualize_theory(s) == build_exceptions_theory("S-dual", ["x", "y"])
    assert dualize_theory(dualize_theory(s)) == s


def test_dualize_theory_outside_domain(states2, exc2):
    with pytest.raises(E.OutsideDualityDomain):
        dualize_theory(erase_theory(states2))
    with pytest.raises(E.OutsideDualityDomain):
        dualize_theory(with_catch_all(exc2))


def test_builtin_proofs_cross_the_duality(states3):
    dual = dualize_theory(states3)
    for name in ("pr1", "pr2", "pr3", "pr4", "pr5", "pr6", "pr7", "pr8"):
        d = st_proof(states3, name)
        dd = dualize_derivation(states3, d)
        res = check_derivation(dual, dd)
        assert res.valid, f"{name}: {res.error}"
        # and back again, to the node
        assert dualize_derivation(dual, dd) == d


def test_states_lemmas_land_on_an_independent_target(states2):
    target = build_exceptions_theory("landing", ["x", "y"])
    for name, params in (("annihilation", {"i": "x"}),
                         ("commutation-6", {"i": "x", "j": "y"}),
                         ("interaction-3", {"i": "x"})):
        d = st_lemma(states2, name, params)
        dd = dualize_derivation(states2, d, target=target)
        res = check_derivation(target, dd)
        assert res.valid, f"{name}: {res.error}"


def test_dual_of_annihilation_is_the_key_identity(states2):
    d = st_lemma(states2, "annihilation", {"i": "x"})
    dd = dualize_derivation(states2, d)
    eq = dd.conclusion.eq
    assert eq == Equation(Comp(Throw("x"), Catch("x")), Id(EMPTY), STRONG)


def test_handler_constructs_have_no_dual(exc2):
    for d in (exc_lemma(exc2, "handler-commute", {"i": "i", "j": "j"}),
              exc_proof(exc2, "bridge-r"),
              exc_proof(exc2, "bridge-l")):
        with pytest.raises(E.OutsideDualityDomain):
            dualize_derivation(exc2, d)


def test_exception_lemmas_dualize_to_state_facts(exc2):
    dual = dualize_theory(exc2)
    for name, params in (("key-annihilation", {"i": "i"}),
                         ("catch-throw", {"i": "i"})):
        d = exc_lemma(exc2, name, params)
        dd = dualize_derivation(exc2, d)
        assert check_derivation(dual, dd).valid


def test_duality_map_bundles_the_functions(states2):
    t = Comp(Lookup("y"), Update("x"))
    assert DUALITY.type(Value("x")) == dualize_type(Value("x"))
    assert DUALITY.term(t) == dualize_term(t)
    eq = states2.axiom("A2_x_y").eq
    assert DUALITY.equation(eq) == dualize_equation(eq)
    assert DUALITY.theory(states2) == dualize_theory(states2)
    d = st_proof(states2, "pr5")
    assert (DUALITY.derivation(states2, d)
            == dualize_derivation(states2, d))
    assert DUALITY.rule("w-subs") == "w-repl"
    assert DUALITY.rule("comp") == "comp"
    for rid, dual_rid in RULE_DUALS.items():
        assert DUALITY.rule(dual_rid) == rid
    with pytest.raises(E.OutsideDualityDomain):
        DUALITY.rule("sum-case-weak")


@given(strat.states_derivations())
@settings(max_examples=50)
def test_random_weak_derivations_cross_the_duality(d):
    dual = dualize_theory(strat.STATES2)
    dd = dualize_derivation(strat.STATES2, d)
    res = check_derivation(dual, dd)
    assert res.valid, res.error
    assert dualize_derivation(dual, dd) == d


# -------------------------------------------------------------- expansion


def test_state_type_nests_right(states2, states3):
    assert state_type(states2) == Prod(Value("x"), Value("y"))
    assert state_type(states3) == Prod(Value("x"),
                                       Prod(Value("y"), Value("z")))
    one = build_states_theory("One", ["a"])
    assert state_type(one) == Value("a")
    assert pack_state(one, (5,)) == 5
    assert pack_state(states2, (1, 2)) == (1, 2)
    assert pack_state(states3, (1, 2, 3)) == (1, (2, 3))


def test_exception_type_nests_right(exc2):
    assert exception_type(exc2) == Coprod(Param("i"), Param("j"))
    three = build_exceptions_theory("Three", ["i", "j", "k"])
    assert exception_type(three) == Coprod(Param("i"),
                                           Coprod(Param("j"), Param("k")))
    assert pack_exception(exc2, "i", 7) == ("l", 7)
    assert pack_exception(exc2, "j", 7) == ("r", 7)
    assert pack_exception(three, "i", 7) == ("l", 7)
    assert pack_exception(three, "j", 7) == ("r", ("l", 7))
    assert pack_exception(three, "k", 7) == ("r", ("r", 7))


def test_expansion_guards_the_flavor(states2, exc2):
    with pytest.raises(E.BadParams):
        expand_states(exc2, Id(UNIT))
    with pytest.raises(E.BadParams):
        expand_exceptions(states2, Id(EMPTY))


def test_weak_axiom_expansions_collapse(states2, states3, exc2):
    """Dropping the hidden column makes every axiom literally true."""
    for th in (states2, states3):
        for a in th.axioms:
            lhs, rhs = expand_states_equation(th, a.eq)
            assert lhs == rhs, a.name
    for a in exc2.axioms:
        lhs, rhs = expand_exceptions_equation(exc2, a.eq)
        assert lhs == rhs, a.name


def test_strong_readings_do_not_collapse(states2, exc2):
    a1 = states2.axiom("A1_x").eq
    lhs, rhs = expand_states_equation(
        states2, Equation(a1.lhs, a1.rhs, STRONG))
    assert lhs != rhs
    b1 = exc2.axiom("B1_i").eq
    lhs, rhs = expand_exceptions_equation(
        exc2, Equation(b1.lhs, b1.rhs, STRONG))
    assert lhs != rhs


def _unpack_state(theory, packed):
    out = []
    cur = packed
    for _ in theory.locations[:-1]:
        out.append(cur[0])
        cur = cur[1]
    out.append(cur)
    return tuple(out)


def _states_agree_everywhere(theory, model, t):
    et = expand_states(theory, t)
    a, b = dom(t), cod(t)
    for v in model.carrier(a):
        for s in model.states():
            want = eval_states(model, t, v, s)
            packed = pack_state(theory, s)
            ein = packed if isinstance(a, Unit) else (v, packed)
            out = eval_explicit(et, ein)
            if isinstance(b, Unit):
                got = ((), _unpack_state(theory, out))
            else:
                got = (out[0], _unpack_state(theory, out[1]))
            assert want == got, (t, v, s, want, got)


def test_expand_states_agrees_on_the_axiom_terms(states2, model22):
    for a in states2.axioms:
        _states_agree_everywhere(states2, model22, a.eq.lhs)
        _states_agree_everywhere(states2, model22, a.eq.rhs)


@given(strat.states_terms(strat.STATES2, max_factors=4))
@settings(max_examples=60, deadline=None)
def test_expand_states_agrees_pointwise(t):
    model = FiniteStateModel(strat.STATES2, {"x": 2, "y": 2})
    _states_agree_everywhere(strat.STATES2, model, t)


def _encode_exc_input(theory, ty, inp):
    tag, payload = inp
    if tag == "val":
        return ("l", payload)
    packed = pack_exception(theory, *payload)
    return packed if isinstance(ty, Empty) else ("r", packed)


def _decode_exc_output(theory, ty, out):
    tagged = ("r", out) if isinstance(ty, Empty) else out
    if tagged[0] == "l":
        return ("val", tagged[1])
    cur = tagged[1]
    names = theory.constructors
    for k, name in enumerate(names):
        if k == len(names) - 1:
            return ("exc", (name, cur))
        side, inner = cur
        if side == "l":
            return ("exc", (name, inner))
        cur = inner
    raise AssertionError("unreachable")


def _exc_points(model, ty):
    points = [("val", v) for v in model.carrier(ty)]
    for name in model.theory.constructors:
        for p in model.carrier(Param(name)):
            points.append(("exc", (name, p)))
    return points


def _exceptions_agree_everywhere(theory, model, t):
    et = expand_exceptions(theory, t)
    a, b = dom(t), cod(t)
    for inp in _exc_points(model, a):
        want = eval_exceptions(model, t, inp)
        out = eval_explicit(et, _encode_exc_input(theory, a, inp))
        got = _decode_exc_output(theory, b, out)
        assert want == got, (t, inp, want, got)


def test_expand_exceptions_agrees_on_the_axiom_terms(exc2, exc_model22):
    for a in exc2.axioms:
        _exceptions_agree_everywhere(exc2, exc_model22, a.eq.lhs)
        _exceptions_agree_everywhere(exc2, exc_model22, a.eq.rhs)


@given(strat.exceptions_terms(strat.EXC2, max_factors=4))
@settings(max_examples=60, deadline=None)
def test_expand_exceptions_agrees_pointwise(t):
    model = FiniteExceptionModel(strat.EXC2, {"i": 2, "j": 2})
    _exceptions_agree_everywhere(strat.EXC2, model, t)


def test_strong_lemmas_hold_under_expansion(states2, exc2):
    """Syntactically distinct expansions, equal at every point."""
    lhs = expand_states(states2, Comp(Update("x"), Lookup("x")))
    rhs = expand_states(states2, Id(UNIT))
    assert lhs != rhs
    model = FiniteStateModel(states2, {"x": 3, "y": 2})
    for s in model.states():
        packed = pack_state(states2, s)
        assert eval_explicit(lhs, packed) == eval_explicit(rhs, packed)

    klhs = expand_exceptions(exc2, Comp(Throw("i"), Catch("i")))
    krhs = expand_exceptions(exc2, Id(EMPTY))
    xmodel = FiniteExceptionModel(exc2, {"i": 2, "j": 2})
    for name in exc2.constructors:
        for p in xmodel.carrier(Param(name)):
            packed = pack_exception(exc2, name, p)
            assert eval_explicit(klhs, packed) == eval_explicit(krhs, packed)


def test_catch_all_expansion_recovers_everything(exc2):
    extended = with_catch_all(exc2)
    et = expand_exceptions(extended, CatchAll())
    model = FiniteExceptionModel(extended, {"i": 2, "j": 2})
    for name in extended.constructors:
        for p in model.carrier(Param(name)):
            packed = pack_exception(extended, name, p)
            assert eval_explicit(et, packed) == ("l", ())


# ------------------------------------------------- explicit term utilities


def test_esimplify_contracts_the_obvious_pairs():
    vx, vy = Value("x"), Value("y")
    f = EProj2(vx, vy)
    pair = EPair(EProj1(vx, vy), f)
    assert esimplify(ecomp(EProj1(vx, vy), pair)) == EProj1(vx, vy)
    assert esimplify(ecomp(EProj2(vx, vy), pair)) == f
    # eta on pairing and on case analysis
    assert esimplify(pair) == EId(Prod(vx, vy))
    case = ECase(EInj1(vx, vy), EInj2(vx, vy))
    assert esimplify(case) == EId(Coprod(vx, vy))
    assert esimplify(ecomp(ECase(EGen("g", vx, vy), EId(vy)),
                           EInj1(vx, vy))) == EGen("g", vx, vy)
    # terminal absorbs to the left, initial to the right
    assert esimplify(ecomp(ETerminal(vy), EGen("g", vx, vy))) == ETerminal(vx)
    assert esimplify(ecomp(EGen("g", vx, vy), EInitial(vx))) == EInitial(vy)


def test_ecomp_drops_identities():
    vx = Value("x")
    g = EGen("g", vx, vx)
    assert ecomp(EId(vx), g, EId(vx)) == g
    assert ecomp(EId(vx), EId(vx)) == EId(vx)


def test_eval_explicit_edges():
    vx = Value("x")
    with pytest.raises(E.ModelError):
        eval_explicit(EInitial(vx), 0)
    with pytest.raises(E.NoInterpretation):
        eval_explicit(EGen("g", vx, vx), 0)
    assert eval_explicit(EGen("g", vx, vx), 3, {"g": lambda v: v + 1}) == 4
    assert eval_explicit(EPair(EId(vx), ETerminal(vx)), 2) == (2, ())
