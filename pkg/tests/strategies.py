"""Hypothesis strategies: well-typed terms and derivations, by construction.

Terms come out of a composition walk over a small atom pool, so every drawn
term typechecks and stays within two indices. Derivations grow from an axiom
leaf by a few random weak-rule applications; every node is built through the
kernel, so the checker accepting them is not vacuous (the checker recomputes
all conclusions independently).
"""

from __future__ import annotations

from hypothesis import strategies as st

from decorlogic.exceptions import build_exceptions_theory
from decorlogic.kernel import axiom_node, node
from decorlogic.states import build_states_theory
from decorlogic.terms import (Catch, Comp, FromEmpty, Id, LocTuple, Lookup,
                              Throw, ToUnit, Update, cod, dom)
from decorlogic.theory import Theory
from decorlogic.types import EMPTY, Param, UNIT, Value

STATES2 = build_states_theory("S", ["x", "y"])
EXC2 = build_exceptions_theory("E", ["i", "j"])


def state_atoms(locations) -> list:
    pool = [Id(UNIT), ToUnit(UNIT)]
    for i in locations:
        pool += [Lookup(i), Update(i), Id(Value(i)), ToUnit(Value(i))]
    return pool


def exception_atoms(constructors) -> list:
    pool = [Id(EMPTY)]
    for i in constructors:
        pool += [Throw(i), Catch(i), Id(Param(i)), FromEmpty(Param(i))]
    return pool


@st.composite
def composed_terms(draw, atoms, max_factors: int = 5):
    """A left-to-right composition walk; each factor's domain matches the
    codomain reached so far, so the result always typechecks."""
    t = draw(st.sampled_from(atoms))
    extra = draw(st.integers(min_value=0, max_value=max_factors - 1))
    for _ in range(extra):
        fits = [a for a in atoms if dom(a) == cod(t)]
        t = Comp(draw(st.sampled_from(fits)), t)
    return t


def states_terms(theory: Theory, max_factors: int = 5):
    return composed_terms(state_atoms(theory.locations), max_factors)


def exceptions_terms(theory: Theory, max_factors: int = 5):
    return composed_terms(exception_atoms(theory.constructors), max_factors)


@st.composite
def full_tuples(draw, theory: Theory):
    """tuple(i: f_i, ...) with one component per location, each 1 -> V[i]."""
    comps = []
    for i in theory.locations:
        t = draw(st.sampled_from(
            [Lookup(i), Comp(Lookup(i), ToUnit(UNIT))]))
        comps.append((i, t))
    return LocTuple(tuple(comps))


_PURE_SHAPES = (Id, ToUnit, FromEmpty)


@st.composite
def weak_derivations(draw, theory: Theory, atoms, max_steps: int = 3):
    """An axiom leaf extended by random weak-rule applications.

    The free/pure split of substitution and replacement is mirrored between
    the two flavors, so the rule ids depend on which side we are on.
    """
    states_side = theory.flavor == "states"
    subs_rule = "w-subs" if states_side else "w-subs-pure"
    repl_rule = "w-repl-pure" if states_side else "w-repl"
    name = draw(st.sampled_from([a.name for a in theory.axioms]))
    d = axiom_node(theory, name)
    for _ in range(draw(st.integers(min_value=0, max_value=max_steps))):
        op = draw(st.sampled_from(["sym", "subs", "repl", "trans"]))
        eq = d.conclusion.eq
        if op == "sym":
            d = node(theory, "w-sym", [d])
        elif op == "subs":
            fits = [a for a in atoms if cod(a) == dom(eq.lhs)
                    and (states_side or isinstance(a, _PURE_SHAPES))]
            if not fits:
                continue
            d = node(theory, subs_rule, [d], by=draw(st.sampled_from(fits)))
        elif op == "repl":
            fits = [a for a in atoms if dom(a) == cod(eq.lhs)
                    and (not states_side or isinstance(a, _PURE_SHAPES))]
            if not fits:
                continue
            d = node(theory, repl_rule, [d], by=draw(st.sampled_from(fits)))
        else:
            refl = node(theory, "w-refl", f=eq.rhs)
            d = node(theory, "w-trans", [d, refl])
    return d


def states_derivations(theory: Theory = STATES2, max_steps: int = 3):
    return weak_derivations(theory, state_atoms(theory.locations), max_steps)


def exceptions_derivations(theory: Theory = EXC2, max_steps: int = 3):
    return weak_derivations(theory, exception_atoms(theory.constructors),
                            max_steps)
