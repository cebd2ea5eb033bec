"""The states theory: signature builder, the seven classical state laws as
checkable goals, and packaged kernel derivations for the interesting ones.

A states theory over locations i has l[i]: 1 -> V[i] (level 1) and
u[i]: V[i] -> 1 (level 2), with two weak axiom families:

    A1_i:   l[i] . u[i]  ~~  id[V[i]]        read back what you wrote
    A2_i_j: l[j] . u[i]  ~~  l[j] . unit[V[i]]   (j != i)  other cells untouched

The first index of A2 is the updated location, the second the observed one.

The derivations below are built node by node through the kernel (`node`
recomputes every conclusion), so constructing them is already half a check;
`check_derivation` re-verifies from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import errors as E
from .kernel import (
    Derivation, axiom_node, derive_final_uniqueness, node,
)
from .terms import (
    Id, Lookup, Proj1, Proj2, SemiProd, Term, ToUnit, Update,
    comp, normalize_assoc,
)
from .theory import Axiom, Equation, Theory, WEAK, eq_strong, eq_weak, typecheck
from .types import Prod, UNIT, Value


def build_states_theory(name: str, locations) -> Theory:
    locs = tuple(locations)
    if len(set(locs)) != len(locs) or not locs:
        raise E.BadParams("locations must be non-empty and distinct")
    axioms = []
    for i in locs:
        axioms.append(Axiom(
            f"A1_{i}", eq_weak(comp(Lookup(i), Update(i)), Id(Value(i)))))
    for i in locs:
        for j in locs:
            if j != i:
                axioms.append(Axiom(
                    f"A2_{i}_{j}",
                    eq_weak(comp(Lookup(j), Update(i)),
                            comp(Lookup(j), ToUnit(Value(i))))))
    return Theory(name, "states", locations=locs, axioms=tuple(axioms))


def semi_pure_product(theory: Theory, pure: Term, eff: Term,
                      pure_on_left: bool = True) -> SemiProd:
    """Pair a pure map with an arbitrary one; typechecked against theory."""
    t = SemiProd(normalize_assoc(pure), normalize_assoc(eff), pure_on_left)
    typecheck(theory, t)
    return t


# ----------------------------------------------------------- law goals

def annihilation_equation(theory: Theory, i: str) -> Equation:
    return eq_strong(comp(Update(i), Lookup(i)), Id(UNIT))


def _sp_left(i: str, j: str) -> SemiProd:
    """u[i] on the left factor, identity on the right: V[i]*V[j] -> 1*V[j]."""
    return SemiProd(Id(Value(j)), Update(i), pure_on_left=False)


def _sp_right(i: str, j: str) -> SemiProd:
    """identity on the left factor, u[j] on the right: V[i]*V[j] -> V[i]*1."""
    return SemiProd(Id(Value(i)), Update(j), pure_on_left=True)


def commutation6_equation(theory: Theory, i: str, j: str) -> Equation:
    """Writing i then j equals writing j then i (on a pair of fresh values)."""
    vi, vj = Value(i), Value(j)
    lhs = comp(Update(j), Proj2(UNIT, vj), _sp_left(i, j))
    rhs = comp(Update(i), Proj1(vi, UNIT), _sp_right(i, j))
    return eq_strong(lhs, rhs)


def interaction3_equation(theory: Theory, i: str) -> Equation:
    """Writing i twice keeps only the second write."""
    vi = Value(i)
    sp = SemiProd(Id(vi), Update(i), pure_on_left=False)
    lhs = comp(Update(i), Proj2(UNIT, vi), sp)
    rhs = comp(Update(i), Proj2(vi, vi))
    return eq_strong(lhs, rhs)


def mirror3_equation(theory: Theory, i: str) -> Equation:
    """The mirrored double write: first component wins when it runs second."""
    vi = Value(i)
    sp = SemiProd(Id(vi), Update(i), pure_on_left=True)
    lhs = comp(Update(i), Proj1(vi, UNIT), sp)
    rhs = comp(Update(i), Proj1(vi, vi))
    return eq_strong(lhs, rhs)


@dataclass(frozen=True)
class SevenGoal:
    name: str
    direct: Equation
    observations: tuple[tuple[str, Equation], ...]


def _observe(theory: Theory, name: str, eq: Equation) -> tuple:
    obs = []
    for k in theory.locations:
        obs.append((f"{name}/obs[{k}]",
                    Equation(comp(Lookup(k), eq.lhs), comp(Lookup(k), eq.rhs), WEAK)))
    return tuple(obs)


def seven_equation_goals(theory: Theory) -> list[SevenGoal]:
    """The seven laws every storage model satisfies, as decorated goals.

    Laws between maps into 1 also come with their per-location observation
    forms (compose a lookup on the left, ask for weak equality).
    """
    goals: list[SevenGoal] = []
    for i in theory.locations:
        vi = Value(i)
        e1 = annihilation_equation(theory, i)
        goals.append(SevenGoal(f"1-read-then-write[{i}]", e1,
                               _observe(theory, f"1-read-then-write[{i}]", e1)))
        goals.append(SevenGoal(
            f"2-reread[{i}]",
            eq_strong(comp(Lookup(i), ToUnit(vi), Lookup(i)), Lookup(i)), ()))
        e3 = interaction3_equation(theory, i)
        goals.append(SevenGoal(f"3-overwrite[{i}]", e3,
                               _observe(theory, f"3-overwrite[{i}]", e3)))
        goals.append(SevenGoal(
            f"4-write-then-read[{i}]",
            eq_weak(comp(Lookup(i), Update(i)), Id(vi)), ()))
    for i in theory.locations:
        for j in theory.locations:
            if i == j:
                continue
            vi = Value(i)
            goals.append(SevenGoal(
                f"5-reread-other[{i},{j}]",
                eq_strong(comp(Lookup(j), ToUnit(vi), Lookup(i)), Lookup(j)), ()))
            e6 = commutation6_equation(theory, i, j)
            goals.append(SevenGoal(f"6-write-commute[{i},{j}]", e6,
                                   _observe(theory, f"6-write-commute[{i},{j}]", e6)))
            goals.append(SevenGoal(
                f"7-read-other-write[{i},{j}]",
                eq_weak(comp(Lookup(j), Update(i)),
                        comp(Lookup(j), ToUnit(vi))), ()))
    return goals


# ---------------------------------------------------- derivation pieces

def _fin_pair(th: Theory, a: Term, b: Term) -> Derivation:
    """a == b for two accessors into 1, via both being unit[...]."""
    da = derive_final_uniqueness(th, a)
    db = derive_final_uniqueness(th, b)
    return node(th, "eq-trans", [da, node(th, "eq-sym", [db])])


def _wsubs_ax(th: Theory, ax_name: str, by: Term) -> Derivation:
    return node(th, "w-subs", [axiom_node(th, ax_name)], by=by)


def _repl_weak(th: Theory, strong: Derivation, by: Term) -> Derivation:
    """Post-compose a strong fact and immediately weaken it."""
    return node(th, "s-to-w", [node(th, "eq-repl", [strong], by=by)])


def _unit_discard(th: Theory, i: str, proj: Term, other: Term) -> Derivation:
    """unit[V[i]] . proj == other, both accessors into 1."""
    return _fin_pair(th, comp(ToUnit(Value(i)), proj), other)


# --------------------------------------------------- appendix proof trees

def pr1(th: Theory, i: str, j: str, k: str) -> Derivation:
    """Observing k != i,j after the first write of the commuted pair."""
    f = comp(Proj2(UNIT, Value(j)), _sp_left(i, j))
    return _wsubs_ax(th, f"A2_{j}_{k}", f)


def _shift_to_first_write(th: Theory, i: str, j: str, k: str) -> Derivation:
    """l[k] . unit[V[j]] . p2 . (u[i] rsemi id)  ~~  l[k] . u[i] . p1."""
    vi, vj = Value(i), Value(j)
    sp = _sp_left(i, j)
    d1 = _unit_discard(th, j, Proj2(UNIT, vj), Proj1(UNIT, vj))
    d2 = node(th, "eq-subs", [d1], by=sp)
    d3 = node(th, "semiprod-P2", term=sp)
    d4 = node(th, "eq-trans", [d2, d3])
    return _repl_weak(th, d4, Lookup(k))


def pr2(th: Theory, i: str, j: str, k: str) -> Derivation:
    return _shift_to_first_write(th, i, j, k)


def pr3(th: Theory, i: str, j: str, k: str) -> Derivation:
    """l[k] . u[i] . p1 ~~ l[k] . unit[V[i]*V[j]]."""
    vi, vj = Value(i), Value(j)
    s = _wsubs_ax(th, f"A2_{i}_{k}", Proj1(vi, vj))
    fin = _unit_discard(th, i, Proj1(vi, vj), ToUnit(Prod(vi, vj)))
    return node(th, "w-trans", [s, _repl_weak(th, fin, Lookup(k))])


def pr4(th: Theory, i: str, j: str, k: str) -> Derivation:
    return node(th, "w-trans",
                [node(th, "w-trans", [pr1(th, i, j, k), pr2(th, i, j, k)]),
                 pr3(th, i, j, k)])


def pr5(th: Theory, i: str, j: str) -> Derivation:
    """Observing i itself after the first write."""
    f = comp(Proj2(UNIT, Value(j)), _sp_left(i, j))
    return _wsubs_ax(th, f"A2_{j}_{i}", f)


def pr6(th: Theory, i: str, j: str) -> Derivation:
    return _shift_to_first_write(th, i, j, i)


def pr7(th: Theory, i: str, j: str) -> Derivation:
    """l[i] of the left double write is the first component."""
    step = node(th, "w-trans", [pr5(th, i, j), pr6(th, i, j)])
    a1 = _wsubs_ax(th, f"A1_{i}", Proj1(Value(i), Value(j)))
    return node(th, "w-trans", [step, a1])


def pr8(th: Theory, i: str, j: str) -> Derivation:
    """l[i] of the right double write is the first component."""
    sp = _sp_right(i, j)
    a1 = _wsubs_ax(th, f"A1_{i}", comp(Proj1(Value(i), UNIT), sp))
    p1 = node(th, "semiprod-P1", term=sp)
    return node(th, "w-trans", [a1, p1])


def _pr8_mirror(th: Theory, i: str, j: str) -> Derivation:
    """l[j] of the left double write is the second component."""
    sp = _sp_left(i, j)
    a1 = _wsubs_ax(th, f"A1_{j}", comp(Proj2(UNIT, Value(j)), sp))
    p1 = node(th, "semiprod-P1", term=sp)
    return node(th, "w-trans", [a1, p1])


def _shift_to_second_write(th: Theory, i: str, j: str, k: str) -> Derivation:
    """l[k] . unit[V[i]] . p1 . (id lsemi u[j])  ~~  l[k] . u[j] . p2."""
    vi, vj = Value(i), Value(j)
    sp = _sp_right(i, j)
    d1 = _unit_discard(th, i, Proj1(vi, UNIT), Proj2(vi, UNIT))
    d2 = node(th, "eq-subs", [d1], by=sp)
    d3 = node(th, "semiprod-P2", term=sp)
    d4 = node(th, "eq-trans", [d2, d3])
    return _repl_weak(th, d4, Lookup(k))


def _pr7_mirror(th: Theory, i: str, j: str) -> Derivation:
    """l[j] of the right double write is the second component."""
    vi, vj = Value(i), Value(j)
    sp = _sp_right(i, j)
    s = _wsubs_ax(th, f"A2_{i}_{j}", comp(Proj1(vi, UNIT), sp))
    step = node(th, "w-trans", [s, _shift_to_second_write(th, i, j, j)])
    a1 = _wsubs_ax(th, f"A1_{j}", Proj2(vi, vj))
    return node(th, "w-trans", [step, a1])


def _pr4_mirror(th: Theory, i: str, j: str, k: str) -> Derivation:
    """Observing k != i,j after the right double write."""
    vi, vj = Value(i), Value(j)
    sp = _sp_right(i, j)
    s = _wsubs_ax(th, f"A2_{i}_{k}", comp(Proj1(vi, UNIT), sp))
    step = node(th, "w-trans", [s, _shift_to_second_write(th, i, j, k)])
    s2 = _wsubs_ax(th, f"A2_{j}_{k}", Proj2(vi, vj))
    fin = _unit_discard(th, j, Proj2(vi, vj), ToUnit(Prod(vi, vj)))
    tail = node(th, "w-trans", [s2, _repl_weak(th, fin, Lookup(k))])
    return node(th, "w-trans", [step, tail])


# ------------------------------------------------------------- lemmas

def _tuple_family(th: Theory, per_loc) -> tuple:
    return tuple((k, normalize_assoc(per_loc(k))) for k in th.locations)


def _conclude_by_cone(th: Theory, lhs: Term, rhs: Term, fam: tuple,
                      branches_l: list, branches_r: list) -> Derivation:
    u1 = node(th, "loc-tuple-unique", branches_l, g=lhs, family=fam)
    u2 = node(th, "loc-tuple-unique", branches_r, g=rhs, family=fam)
    return node(th, "eq-trans", [u1, node(th, "eq-sym", [u2])])


def _annihilation(th: Theory, i: str) -> Derivation:
    g = comp(Update(i), Lookup(i))
    branches = []
    for j in th.locations:
        if j == i:
            branches.append(_wsubs_ax(th, f"A1_{i}", Lookup(i)))
        else:
            s1 = _wsubs_ax(th, f"A2_{i}_{j}", Lookup(i))
            fin = _fin_pair(th, comp(ToUnit(Value(i)), Lookup(i)), Id(UNIT))
            branches.append(node(th, "w-trans", [s1, _repl_weak(th, fin, Lookup(j))]))
    fam = _tuple_family(th, Lookup)
    refl = [node(th, "w-refl", f=Lookup(j)) for j in th.locations]
    return _conclude_by_cone(th, g, Id(UNIT), fam, branches, refl)


def _commutation6(th: Theory, i: str, j: str) -> Derivation:
    if i == j:
        raise E.BadParams("commutation-6 needs two distinct locations")
    vi, vj = Value(i), Value(j)
    sp_l, sp_r = _sp_left(i, j), _sp_right(i, j)
    lhs = comp(Update(j), Proj2(UNIT, vj), sp_l)
    rhs = comp(Update(i), Proj1(vi, UNIT), sp_r)

    def fam_at(k: str) -> Term:
        if k == i:
            return Proj1(vi, vj)
        if k == j:
            return Proj2(vi, vj)
        return comp(Lookup(k), ToUnit(Prod(vi, vj)))

    branches_l, branches_r = [], []
    for k in th.locations:
        if k == i:
            branches_l.append(pr7(th, i, j))
            branches_r.append(pr8(th, i, j))
        elif k == j:
            branches_l.append(_pr8_mirror(th, i, j))
            branches_r.append(_pr7_mirror(th, i, j))
        else:
            branches_l.append(pr4(th, i, j, k))
            branches_r.append(_pr4_mirror(th, i, j, k))
    fam = _tuple_family(th, fam_at)
    return _conclude_by_cone(th, lhs, rhs, fam, branches_l, branches_r)


def _interaction3(th: Theory, i: str, mirrored: bool = False) -> Derivation:
    vi = Value(i)
    sp = SemiProd(Id(vi), Update(i), pure_on_left=mirrored)
    if mirrored:
        proj_s, proj_keep, proj_drop = (
            Proj1(vi, UNIT), Proj1(vi, vi), Proj2(vi, vi))
        other_s = Proj2(vi, UNIT)
    else:
        proj_s, proj_keep, proj_drop = (
            Proj2(UNIT, vi), Proj2(vi, vi), Proj1(vi, vi))
        other_s = Proj1(UNIT, vi)
    lhs = comp(Update(i), proj_s, sp)
    rhs = comp(Update(i), proj_keep)

    def fam_at(k: str) -> Term:
        return proj_keep if k == i else comp(Lookup(k), ToUnit(Prod(vi, vi)))

    branches_l, branches_r = [], []
    for k in th.locations:
        if k == i:
            a1 = _wsubs_ax(th, f"A1_{i}", comp(proj_s, sp))
            p1 = node(th, "semiprod-P1", term=sp)
            branches_l.append(node(th, "w-trans", [a1, p1]))
            branches_r.append(_wsubs_ax(th, f"A1_{i}", proj_keep))
        else:
            s = _wsubs_ax(th, f"A2_{i}_{k}", comp(proj_s, sp))
            d1 = _unit_discard(th, i, proj_s, other_s)
            d2 = node(th, "eq-subs", [d1], by=sp)
            d3 = node(th, "semiprod-P2", term=sp)
            d4 = node(th, "eq-trans", [d2, d3])
            step = node(th, "w-trans", [s, _repl_weak(th, d4, Lookup(k))])
            s2 = _wsubs_ax(th, f"A2_{i}_{k}", proj_drop)
            fin = _unit_discard(th, i, proj_drop, ToUnit(Prod(vi, vi)))
            tail = node(th, "w-trans", [s2, _repl_weak(th, fin, Lookup(k))])
            branches_l.append(node(th, "w-trans", [step, tail]))
            s3 = _wsubs_ax(th, f"A2_{i}_{k}", proj_keep)
            fin2 = _unit_discard(th, i, proj_keep, ToUnit(Prod(vi, vi)))
            branches_r.append(node(th, "w-trans",
                                   [s3, _repl_weak(th, fin2, Lookup(k))]))
    fam = _tuple_family(th, fam_at)
    return _conclude_by_cone(th, lhs, rhs, fam, branches_l, branches_r)


LEMMAS = ("annihilation", "final-uniqueness", "commutation-6", "interaction-3")


def derive_lemma(theory: Theory, lemma_id: str, params=None) -> Derivation:
    """Build the named lemma's derivation for the given theory.

    annihilation(i):    u[i] . l[i] == id[1]
    final-uniqueness(f): f == unit[X] for an accessor f: X -> 1
    commutation-6(i,j): independent writes commute
    interaction-3(i):   double write keeps the second value
    """
    p = dict(params or {})
    if theory.flavor != "states":
        raise E.BadParams("states lemmas need a states theory")

    def want(key):
        if key not in p:
            raise E.BadParams(f"lemma {lemma_id!r} needs parameter {key!r}")
        return p[key]

    if lemma_id == "annihilation":
        return _annihilation(theory, _loc(theory, want("i")))
    if lemma_id == "final-uniqueness":
        return derive_final_uniqueness(theory, want("f"))
    if lemma_id == "commutation-6":
        return _commutation6(theory, _loc(theory, want("i")), _loc(theory, want("j")))
    if lemma_id == "interaction-3":
        return _interaction3(theory, _loc(theory, want("i")))
    raise E.UnknownLemma(f"no states lemma {lemma_id!r} "
                         f"(expected one of {', '.join(LEMMAS)})")


def _loc(theory: Theory, i) -> str:
    if i not in theory.locations:
        raise E.UnknownIndex(f"unknown location {i!r}")
    return i


def mirror_interaction3(theory: Theory, i: str) -> Derivation:
    """The mirrored form of interaction-3 (used via duality by handlers)."""
    return _interaction3(theory, _loc(theory, i), mirrored=True)


# ----------------------------------------------------- built-in proofs

def builtin_proof(theory: Theory, name: str) -> Derivation:
    """Replayable appendix trees: pr1..pr8 at default locations."""
    locs = theory.locations
    three = {"pr1", "pr2", "pr3", "pr4"}
    if name in three:
        if len(locs) < 3:
            raise E.BadParams(f"{name} observes a third location; "
                              f"theory has only {len(locs)}")
        i, j, k = locs[0], locs[1], locs[2]
        return {"pr1": pr1, "pr2": pr2, "pr3": pr3, "pr4": pr4}[name](theory, i, j, k)
    if name in {"pr5", "pr6", "pr7", "pr8"}:
        if len(locs) < 2:
            raise E.BadParams(f"{name} needs two locations")
        i, j = locs[0], locs[1]
        return {"pr5": pr5, "pr6": pr6, "pr7": pr7, "pr8": pr8}[name](theory, i, j)
    raise E.UnknownLemma(f"no built-in proof {name!r}")
