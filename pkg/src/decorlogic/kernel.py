"""The proof kernel: rule catalog, rule application, derivation checking,
and a small saturation prover.

A derivation is a tree whose nodes each carry the rule they claim to apply,
the instantiation it needs, and the conclusion they claim to reach. The
checker recomputes every conclusion bottom-up with `apply_rule` and compares
against the stored one, so changing any single node (the root included)
makes the tree invalid.

Leaf citations are not catalog rules: ('axiom', name) quotes a theory axiom,
('gen', name) quotes a generator's declared profile, ('hyp', label) assumes a
judgment (reported, so validity is "relative to hypotheses").

Rule naming follows the construct it governs, with the w- prefix for the weak
variants. Conclusions are always associativity/identity-normalized; premise
matching is structural equality of normalized judgments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Mapping, Optional, Sequence, Union
from typing import get_args

from . import errors as E
from .terms import (
    CaseSum, Catch, Coerce, Comp, ConstCotuple, FromEmpty, Id, Inj1, Inj2,
    LocTuple, Lookup, PropCase, Proj1, Proj2, SemiCoprod, SemiProd, Term,
    ToUnit, Throw, Update, cod, dom, normalize_assoc, subterms, term_size,
)
from .theory import (
    Equation, STRONG, Theory, WEAK, infer_decoration, norm_eq, typecheck,
    typecheck_equation,
)
from .types import EMPTY, TypeExpr, UNIT, Unit, Empty

_TERM_CLASSES = get_args(Term)
_TYPE_CLASSES = get_args(TypeExpr)


# ------------------------------------------------------------- judgments

@dataclass(frozen=True)
class Holds:
    """The equation has a proof."""

    eq: Equation

    def __str__(self) -> str:
        return str(self.eq)


@dataclass(frozen=True)
class WellFormed:
    """The term is well-formed at the given level."""

    term: Term
    level: int

    def __str__(self) -> str:
        return f"{self.term} : level {self.level}"


Judgment = Union[Holds, WellFormed]

RuleRef = Union[str, tuple]  # rule id, or ('axiom'|'gen'|'hyp', name)


@dataclass(frozen=True)
class Derivation:
    rule: RuleRef
    premises: tuple["Derivation", ...]
    inst: tuple[tuple[str, Any], ...]
    conclusion: Judgment

    def iter_nodes(self):
        yield self
        for p in self.premises:
            yield from p.iter_nodes()

    def __len__(self) -> int:
        return sum(1 for _ in self.iter_nodes())


# ------------------------------------------------- instantiation helpers

def _arity(premises: tuple, n: int, rid: str) -> None:
    if len(premises) != n:
        raise E.BadPremises(f"{rid} takes {n} premises, got {len(premises)}")


def _as_holds(p: Judgment, rid: str) -> Equation:
    if not isinstance(p, Holds):
        raise E.BadPremises(f"{rid} needs an equation premise, got {p}")
    return p.eq


def _as_wf(p: Judgment, rid: str) -> WellFormed:
    if not isinstance(p, WellFormed):
        raise E.BadPremises(f"{rid} needs a well-formedness premise, got {p}")
    return p


def _kind(eq: Equation, kind: str, rid: str) -> Equation:
    if eq.kind != kind:
        raise E.BadPremises(f"{rid} needs a {kind} equation, got {eq.kind}")
    return eq


def _wkind(theory: Theory) -> str:
    # the plain flavor has no weak/strong distinction
    return WEAK if theory.flavor != "plain" else STRONG


def _take(inst: dict, key: str, rid: str) -> Any:
    if key not in inst:
        raise E.BadInstantiation(f"{rid} needs instantiation key {key!r}")
    return inst.pop(key)


def _take_term(theory: Theory, inst: dict, key: str, rid: str) -> Term:
    v = _take(inst, key, rid)
    if not isinstance(v, _TERM_CLASSES):
        raise E.BadInstantiation(f"{rid}: {key!r} must be a term")
    v = normalize_assoc(v)
    typecheck(theory, v)
    return v


def _take_type(theory: Theory, inst: dict, key: str, rid: str) -> TypeExpr:
    from .theory import check_type
    v = _take(inst, key, rid)
    if not isinstance(v, _TYPE_CLASSES):
        raise E.BadInstantiation(f"{rid}: {key!r} must be a type")
    check_type(theory, v)
    return v


def _take_family(theory: Theory, inst: dict, key: str, rid: str
                 ) -> tuple[tuple[str, Term], ...]:
    v = _take(inst, key, rid)
    try:
        fam = tuple((str(i), normalize_assoc(f)) for i, f in v)
    except Exception:
        raise E.BadInstantiation(f"{rid}: {key!r} must be (index, term) pairs")
    return fam


def _done(inst: dict, rid: str) -> None:
    if inst:
        raise E.BadInstantiation(f"{rid}: unexpected keys {sorted(inst)}")


def _decorated(theory: Theory) -> bool:
    return theory.flavor != "plain"


def _require_level(theory: Theory, t: Term, k: int, rid: str, what: str) -> None:
    if _decorated(theory) and infer_decoration(t) > k:
        raise E.SideConditionViolated(
            f"{rid}: {what} must be level <= {k}, {t} has level {infer_decoration(t)}")


def _require_pure(theory: Theory, t: Term, rid: str, what: str) -> None:
    _require_level(theory, t, 0, rid, what)


# ----------------------------------------------------------- rule table

@dataclass(frozen=True)
class RuleSpec:
    rid: str
    flavors: frozenset
    impl: Callable
    doc: str


RULES: dict[str, RuleSpec] = {}

_CORE = frozenset({"states", "exceptions", "plain"})
_ST = frozenset({"states", "plain"})
_EX = frozenset({"exceptions", "plain"})


def _rule(rid: str, flavors: frozenset, doc: str):
    def deco(fn):
        RULES[rid] = RuleSpec(rid, flavors, fn, doc)
        return fn
    return deco


def list_rules(flavor: Optional[str] = None) -> list[str]:
    if flavor is None:
        return sorted(RULES)
    return sorted(r for r, s in RULES.items() if flavor in s.flavors)


# core category rules ---------------------------------------------------

@_rule("comp", _CORE, "WF(f,a), WF(g,b) => WF(g.f, max(a,b))")
def _r_comp(theory, ps, inst):
    _arity(ps, 2, "comp")
    wf_f, wf_g = _as_wf(ps[0], "comp"), _as_wf(ps[1], "comp")
    _done(inst, "comp")
    if cod(wf_f.term) != dom(wf_g.term):
        raise E.BadPremises("comp: premises do not compose")
    t = normalize_assoc(Comp(wf_g.term, wf_f.term))
    return WellFormed(t, max(wf_f.level, wf_g.level))


@_rule("id", _CORE, "=> WF(id[T], 2)")
def _r_id(theory, ps, inst):
    _arity(ps, 0, "id")
    at = _take_type(theory, inst, "at", "id")
    _done(inst, "id")
    return WellFormed(Id(at), 2)


@_rule("0-id", _CORE, "=> WF(id[T], 0)")
def _r_zid(theory, ps, inst):
    _arity(ps, 0, "0-id")
    at = _take_type(theory, inst, "at", "0-id")
    _done(inst, "0-id")
    return WellFormed(Id(at), 0)


@_rule("assoc", _CORE, "=> h.(g.f) == (h.g).f  (normal forms coincide)")
def _r_assoc(theory, ps, inst):
    _arity(ps, 0, "assoc")
    f = _take_term(theory, inst, "f", "assoc")
    g = _take_term(theory, inst, "g", "assoc")
    h = _take_term(theory, inst, "h", "assoc")
    _done(inst, "assoc")
    lhs = normalize_assoc(Comp(h, Comp(g, f)))
    rhs = normalize_assoc(Comp(Comp(h, g), f))
    typecheck(theory, lhs)
    return Holds(Equation(lhs, rhs, STRONG))


@_rule("id-src", _CORE, "=> f.id == f")
def _r_id_src(theory, ps, inst):
    _arity(ps, 0, "id-src")
    f = _take_term(theory, inst, "f", "id-src")
    _done(inst, "id-src")
    return Holds(Equation(normalize_assoc(Comp(f, Id(dom(f)))), f, STRONG))


@_rule("id-tgt", _CORE, "=> id.f == f")
def _r_id_tgt(theory, ps, inst):
    _arity(ps, 0, "id-tgt")
    f = _take_term(theory, inst, "f", "id-tgt")
    _done(inst, "id-tgt")
    return Holds(Equation(normalize_assoc(Comp(Id(cod(f)), f)), f, STRONG))


@_rule("eq-refl", _CORE, "=> f == f")
def _r_eq_refl(theory, ps, inst):
    _arity(ps, 0, "eq-refl")
    f = _take_term(theory, inst, "f", "eq-refl")
    _done(inst, "eq-refl")
    return Holds(Equation(f, f, STRONG))


@_rule("eq-sym", _CORE, "a == b => b == a")
def _r_eq_sym(theory, ps, inst):
    _arity(ps, 1, "eq-sym")
    eq = _kind(_as_holds(ps[0], "eq-sym"), STRONG, "eq-sym")
    _done(inst, "eq-sym")
    return Holds(Equation(eq.rhs, eq.lhs, STRONG))


@_rule("eq-trans", _CORE, "a == b, b == c => a == c")
def _r_eq_trans(theory, ps, inst):
    _arity(ps, 2, "eq-trans")
    e1 = _kind(_as_holds(ps[0], "eq-trans"), STRONG, "eq-trans")
    e2 = _kind(_as_holds(ps[1], "eq-trans"), STRONG, "eq-trans")
    _done(inst, "eq-trans")
    if e1.rhs != e2.lhs:
        raise E.BadPremises("eq-trans: middle terms differ")
    return Holds(Equation(e1.lhs, e2.rhs, STRONG))


@_rule("eq-subs", _CORE, "g1 == g2 => g1.f == g2.f")
def _r_eq_subs(theory, ps, inst):
    _arity(ps, 1, "eq-subs")
    eq = _kind(_as_holds(ps[0], "eq-subs"), STRONG, "eq-subs")
    f = _take_term(theory, inst, "by", "eq-subs")
    _done(inst, "eq-subs")
    if cod(f) != dom(eq.lhs):
        raise E.BadInstantiation("eq-subs: substituted term does not compose")
    return Holds(Equation(normalize_assoc(Comp(eq.lhs, f)),
                          normalize_assoc(Comp(eq.rhs, f)), STRONG))


@_rule("eq-repl", _CORE, "f1 == f2 => g.f1 == g.f2")
def _r_eq_repl(theory, ps, inst):
    _arity(ps, 1, "eq-repl")
    eq = _kind(_as_holds(ps[0], "eq-repl"), STRONG, "eq-repl")
    g = _take_term(theory, inst, "by", "eq-repl")
    _done(inst, "eq-repl")
    if cod(eq.lhs) != dom(g):
        raise E.BadInstantiation("eq-repl: replacement context does not compose")
    return Holds(Equation(normalize_assoc(Comp(g, eq.lhs)),
                          normalize_assoc(Comp(g, eq.rhs)), STRONG))


# decoration bookkeeping ------------------------------------------------

@_rule("0-to-1", _CORE, "WF(t,0) => WF(t,1)")
def _r_0_to_1(theory, ps, inst):
    _arity(ps, 1, "0-to-1")
    wf = _as_wf(ps[0], "0-to-1")
    _done(inst, "0-to-1")
    if wf.level != 0:
        raise E.BadPremises("0-to-1 lifts level 0")
    return WellFormed(wf.term, 1)


@_rule("1-to-2", _CORE, "WF(t,1) => WF(t,2)")
def _r_1_to_2(theory, ps, inst):
    _arity(ps, 1, "1-to-2")
    wf = _as_wf(ps[0], "1-to-2")
    _done(inst, "1-to-2")
    if wf.level != 1:
        raise E.BadPremises("1-to-2 lifts level 1")
    return WellFormed(wf.term, 2)


@_rule("0-comp", _CORE, "WF(f,0), WF(g,0) => WF(g.f, 0)")
def _r_0_comp(theory, ps, inst):
    _arity(ps, 2, "0-comp")
    wf_f, wf_g = _as_wf(ps[0], "0-comp"), _as_wf(ps[1], "0-comp")
    _done(inst, "0-comp")
    if wf_f.level != 0 or wf_g.level != 0:
        raise E.BadPremises("0-comp composes two level-0 terms")
    if cod(wf_f.term) != dom(wf_g.term):
        raise E.BadPremises("0-comp: premises do not compose")
    return WellFormed(normalize_assoc(Comp(wf_g.term, wf_f.term)), 0)


@_rule("1-comp", _CORE, "WF(f,1), WF(g,1) => WF(g.f, 1)")
def _r_1_comp(theory, ps, inst):
    _arity(ps, 2, "1-comp")
    wf_f, wf_g = _as_wf(ps[0], "1-comp"), _as_wf(ps[1], "1-comp")
    _done(inst, "1-comp")
    if wf_f.level > 1 or wf_g.level > 1:
        raise E.BadPremises("1-comp composes two level-<=1 terms")
    if cod(wf_f.term) != dom(wf_g.term):
        raise E.BadPremises("1-comp: premises do not compose")
    return WellFormed(normalize_assoc(Comp(wf_g.term, wf_f.term)), 1)


# weak-equation core ----------------------------------------------------

@_rule("w-refl", _CORE, "=> f ~~ f")
def _r_w_refl(theory, ps, inst):
    _arity(ps, 0, "w-refl")
    f = _take_term(theory, inst, "f", "w-refl")
    _done(inst, "w-refl")
    return Holds(Equation(f, f, _wkind(theory)))


@_rule("w-sym", _CORE, "a ~~ b => b ~~ a")
def _r_w_sym(theory, ps, inst):
    _arity(ps, 1, "w-sym")
    eq = _kind(_as_holds(ps[0], "w-sym"), _wkind(theory), "w-sym")
    _done(inst, "w-sym")
    return Holds(Equation(eq.rhs, eq.lhs, eq.kind))


@_rule("w-trans", _CORE, "a ~~ b, b ~~ c => a ~~ c")
def _r_w_trans(theory, ps, inst):
    _arity(ps, 2, "w-trans")
    wk = _wkind(theory)
    e1 = _kind(_as_holds(ps[0], "w-trans"), wk, "w-trans")
    e2 = _kind(_as_holds(ps[1], "w-trans"), wk, "w-trans")
    _done(inst, "w-trans")
    if e1.rhs != e2.lhs:
        raise E.BadPremises("w-trans: middle terms differ")
    return Holds(Equation(e1.lhs, e2.rhs, wk))


@_rule("s-to-w", _CORE, "a == b => a ~~ b")
def _r_s_to_w(theory, ps, inst):
    _arity(ps, 1, "s-to-w")
    eq = _kind(_as_holds(ps[0], "s-to-w"), STRONG, "s-to-w")
    _done(inst, "s-to-w")
    return Holds(Equation(eq.lhs, eq.rhs, _wkind(theory)))


def _w_to_s(theory, ps, inst, rid):
    if len(ps) not in (1, 2):
        raise E.BadPremises(f"{rid} takes the weak premise, optionally a WF premise")
    eq = _kind(_as_holds(ps[0], rid), _wkind(theory), rid)
    if len(ps) == 2:
        wf = _as_wf(ps[1], rid)
        if wf.term not in (eq.lhs, eq.rhs):
            raise E.BadPremises(f"{rid}: WF premise names a term not in the equation")
        if wf.level > 1:
            raise E.BadPremises(f"{rid}: WF premise must be level <= 1")
    _done(inst, rid)
    _require_level(theory, eq.lhs, 1, rid, "left side")
    _require_level(theory, eq.rhs, 1, rid, "right side")
    return Holds(Equation(eq.lhs, eq.rhs, STRONG))


# states-side rules -----------------------------------------------------

@_rule("w-subs", _ST, "g1 ~~ g2 => g1.f ~~ g2.f (any f)")
def _r_w_subs(theory, ps, inst):
    _arity(ps, 1, "w-subs")
    eq = _kind(_as_holds(ps[0], "w-subs"), _wkind(theory), "w-subs")
    f = _take_term(theory, inst, "by", "w-subs")
    _done(inst, "w-subs")
    if cod(f) != dom(eq.lhs):
        raise E.BadInstantiation("w-subs: substituted term does not compose")
    return Holds(Equation(normalize_assoc(Comp(eq.lhs, f)),
                          normalize_assoc(Comp(eq.rhs, f)), eq.kind))


@_rule("w-repl-pure", _ST, "f1 ~~ f2 => g.f1 ~~ g.f2 (g pure)")
def _r_w_repl_pure(theory, ps, inst):
    _arity(ps, 1, "w-repl-pure")
    eq = _kind(_as_holds(ps[0], "w-repl-pure"), _wkind(theory), "w-repl-pure")
    g = _take_term(theory, inst, "by", "w-repl-pure")
    _done(inst, "w-repl-pure")
    _require_pure(theory, g, "w-repl-pure", "the replacement context")
    if cod(eq.lhs) != dom(g):
        raise E.BadInstantiation("w-repl-pure: context does not compose")
    return Holds(Equation(normalize_assoc(Comp(g, eq.lhs)),
                          normalize_assoc(Comp(g, eq.rhs)), eq.kind))


@_rule("w-to-s", _ST, "a ~~ b => a == b (both levels <= 1)")
def _r_w_to_s(theory, ps, inst):
    return _w_to_s(theory, ps, inst, "w-to-s")


@_rule("final", _ST, "=> WF(id[1], 0)")
def _r_final(theory, ps, inst):
    _arity(ps, 0, "final")
    _done(inst, "final")
    return WellFormed(Id(UNIT), 0)


@_rule("unit-arrow", _ST, "=> WF(unit[X], 0)")
def _r_unit_arrow(theory, ps, inst):
    _arity(ps, 0, "unit-arrow")
    at = _take_type(theory, inst, "at", "unit-arrow")
    _done(inst, "unit-arrow")
    return WellFormed(ToUnit(at), 0)


@_rule("w-final", _ST, "=> f ~~ unit[X] for f: X -> 1")
def _r_w_final(theory, ps, inst):
    _arity(ps, 0, "w-final")
    f = _take_term(theory, inst, "f", "w-final")
    _done(inst, "w-final")
    if not isinstance(cod(f), Unit):
        raise E.BadInstantiation("w-final applies to maps into 1")
    return Holds(Equation(f, ToUnit(dom(f)), _wkind(theory)))


@_rule("loc-tuple", _ST, "=> l[i].tuple(..) ~~ component i")
def _r_loc_tuple(theory, ps, inst):
    _arity(ps, 0, "loc-tuple")
    fam = _take_family(theory, inst, "family", "loc-tuple")
    at = _take(inst, "at", "loc-tuple")
    _done(inst, "loc-tuple")
    lt = LocTuple(fam)
    typecheck(theory, lt)
    fam_map = dict(fam)
    if at not in fam_map:
        raise E.BadInstantiation(f"loc-tuple: no component for {at!r}")
    return Holds(Equation(normalize_assoc(Comp(Lookup(at), lt)),
                          fam_map[at], _wkind(theory)))


@_rule("loc-tuple-unique", _ST,
       "l[i].g ~~ f_i for every location => g == tuple(f)")
def _r_loc_tuple_unique(theory, ps, inst):
    fam = _take_family(theory, inst, "family", "loc-tuple-unique")
    g = _take_term(theory, inst, "g", "loc-tuple-unique")
    _done(inst, "loc-tuple-unique")
    lt = LocTuple(fam)
    typecheck(theory, lt)
    if dom(g) != dom(lt) or not isinstance(cod(g), Unit):
        raise E.BadInstantiation("loc-tuple-unique: g must share the cone's profile")
    _arity(ps, len(fam), "loc-tuple-unique")
    wk = _wkind(theory)
    for (i, fi), p in zip(fam, ps):
        want = Equation(normalize_assoc(Comp(Lookup(i), g)), fi, wk)
        if _as_holds(p, "loc-tuple-unique") != want:
            raise E.BadPremises(
                f"loc-tuple-unique: premise for {i!r} should be {want}, got {p}")
    return Holds(Equation(g, lt, STRONG))


@_rule("semiprod-P1", _ST, "=> weak projection law, pure factor")
def _r_semiprod_p1(theory, ps, inst):
    _arity(ps, 0, "semiprod-P1")
    t = _take_term(theory, inst, "term", "semiprod-P1")
    _done(inst, "semiprod-P1")
    if not isinstance(t, SemiProd):
        raise E.BadInstantiation("semiprod-P1 needs a semi-pure pairing")
    ap, bp = dom(t.pure), cod(t.pure)
    ae, be = dom(t.eff), cod(t.eff)
    if t.pure_on_left:
        lhs = Comp(Proj1(bp, be), t)
        rhs = Comp(t.pure, Proj1(ap, ae))
    else:
        lhs = Comp(Proj2(be, bp), t)
        rhs = Comp(t.pure, Proj2(ae, ap))
    return Holds(Equation(normalize_assoc(lhs), normalize_assoc(rhs),
                          _wkind(theory)))


@_rule("semiprod-P2", _ST, "=> strong projection law, effectful factor")
def _r_semiprod_p2(theory, ps, inst):
    _arity(ps, 0, "semiprod-P2")
    t = _take_term(theory, inst, "term", "semiprod-P2")
    _done(inst, "semiprod-P2")
    if not isinstance(t, SemiProd):
        raise E.BadInstantiation("semiprod-P2 needs a semi-pure pairing")
    ap, bp = dom(t.pure), cod(t.pure)
    ae, be = dom(t.eff), cod(t.eff)
    if t.pure_on_left:
        lhs = Comp(Proj2(bp, be), t)
        rhs = Comp(t.eff, Proj2(ap, ae))
    else:
        lhs = Comp(Proj1(be, bp), t)
        rhs = Comp(t.eff, Proj1(ae, ap))
    return Holds(Equation(normalize_assoc(lhs), normalize_assoc(rhs), STRONG))


@_rule("binprod-proj", _ST, "=> WF(p1/p2, 0)")
def _r_binprod_proj(theory, ps, inst):
    _arity(ps, 0, "binprod-proj")
    which = _take(inst, "which", "binprod-proj")
    left = _take_type(theory, inst, "left", "binprod-proj")
    right = _take_type(theory, inst, "right", "binprod-proj")
    _done(inst, "binprod-proj")
    if which not in (1, 2):
        raise E.BadInstantiation("binprod-proj: which must be 1 or 2")
    return WellFormed(Proj1(left, right) if which == 1 else Proj2(left, right), 0)


# exceptions-side rules -------------------------------------------------

@_rule("w-subs-pure", _EX, "g1 ~~ g2 => g1.f ~~ g2.f (f pure)")
def _r_w_subs_pure(theory, ps, inst):
    _arity(ps, 1, "w-subs-pure")
    eq = _kind(_as_holds(ps[0], "w-subs-pure"), _wkind(theory), "w-subs-pure")
    f = _take_term(theory, inst, "by", "w-subs-pure")
    _done(inst, "w-subs-pure")
    _require_pure(theory, f, "w-subs-pure", "the substituted term")
    if cod(f) != dom(eq.lhs):
        raise E.BadInstantiation("w-subs-pure: substituted term does not compose")
    return Holds(Equation(normalize_assoc(Comp(eq.lhs, f)),
                          normalize_assoc(Comp(eq.rhs, f)), eq.kind))


@_rule("w-repl", _EX, "f1 ~~ f2 => g.f1 ~~ g.f2 (any g)")
def _r_w_repl(theory, ps, inst):
    _arity(ps, 1, "w-repl")
    eq = _kind(_as_holds(ps[0], "w-repl"), _wkind(theory), "w-repl")
    g = _take_term(theory, inst, "by", "w-repl")
    _done(inst, "w-repl")
    if cod(eq.lhs) != dom(g):
        raise E.BadInstantiation("w-repl: context does not compose")
    return Holds(Equation(normalize_assoc(Comp(g, eq.lhs)),
                          normalize_assoc(Comp(g, eq.rhs)), eq.kind))


@_rule("w-to-s-prop", _EX, "a ~~ b => a == b (both levels <= 1)")
def _r_w_to_s_prop(theory, ps, inst):
    return _w_to_s(theory, ps, inst, "w-to-s-prop")


@_rule("initial", _EX, "=> WF(id[0], 0)")
def _r_initial(theory, ps, inst):
    _arity(ps, 0, "initial")
    _done(inst, "initial")
    return WellFormed(Id(EMPTY), 0)


@_rule("empty-arrow", _EX, "=> WF(empty[Y], 0)")
def _r_empty_arrow(theory, ps, inst):
    _arity(ps, 0, "empty-arrow")
    at = _take_type(theory, inst, "at", "empty-arrow")
    _done(inst, "empty-arrow")
    return WellFormed(FromEmpty(at), 0)


@_rule("w-initial", _EX, "=> f ~~ empty[Y] for f: 0 -> Y")
def _r_w_initial(theory, ps, inst):
    _arity(ps, 0, "w-initial")
    f = _take_term(theory, inst, "f", "w-initial")
    _done(inst, "w-initial")
    if not isinstance(dom(f), Empty):
        raise E.BadInstantiation("w-initial applies to maps out of 0")
    return Holds(Equation(f, FromEmpty(cod(f)), _wkind(theory)))


@_rule("const-cotuple", _EX, "=> cotuple(..).t[i] ~~ component i")
def _r_const_cotuple(theory, ps, inst):
    _arity(ps, 0, "const-cotuple")
    fam = _take_family(theory, inst, "family", "const-cotuple")
    at = _take(inst, "at", "const-cotuple")
    _done(inst, "const-cotuple")
    ct = ConstCotuple(fam)
    typecheck(theory, ct)
    fam_map = dict(fam)
    if at not in fam_map:
        raise E.BadInstantiation(f"const-cotuple: no component for {at!r}")
    return Holds(Equation(normalize_assoc(Comp(ct, Throw(at))),
                          fam_map[at], _wkind(theory)))


@_rule("const-cotuple-unique", _EX,
       "g.t[i] ~~ f_i for every exception name => g == cotuple(f)")
def _r_const_cotuple_unique(theory, ps, inst):
    fam = _take_family(theory, inst, "family", "const-cotuple-unique")
    g = _take_term(theory, inst, "g", "const-cotuple-unique")
    _done(inst, "const-cotuple-unique")
    ct = ConstCotuple(fam)
    typecheck(theory, ct)
    if cod(g) != cod(ct) or not isinstance(dom(g), Empty):
        raise E.BadInstantiation("const-cotuple-unique: g must share the cocone's profile")
    _arity(ps, len(fam), "const-cotuple-unique")
    wk = _wkind(theory)
    for (i, fi), p in zip(fam, ps):
        want = Equation(normalize_assoc(Comp(g, Throw(i))), fi, wk)
        if _as_holds(p, "const-cotuple-unique") != want:
            raise E.BadPremises(
                f"const-cotuple-unique: premise for {i!r} should be {want}, got {p}")
    return Holds(Equation(g, ct, STRONG))


@_rule("semicoprod-P1", _EX, "=> weak injection law, pure factor")
def _r_semicoprod_p1(theory, ps, inst):
    _arity(ps, 0, "semicoprod-P1")
    t = _take_term(theory, inst, "term", "semicoprod-P1")
    _done(inst, "semicoprod-P1")
    if not isinstance(t, SemiCoprod):
        raise E.BadInstantiation("semicoprod-P1 needs a semi-pure case map")
    ap, bp = dom(t.pure), cod(t.pure)
    ae, be = dom(t.eff), cod(t.eff)
    if t.pure_on_left:
        lhs = Comp(t, Inj1(ap, ae))
        rhs = Comp(Inj1(bp, be), t.pure)
    else:
        lhs = Comp(t, Inj2(ae, ap))
        rhs = Comp(Inj2(be, bp), t.pure)
    return Holds(Equation(normalize_assoc(lhs), normalize_assoc(rhs),
                          _wkind(theory)))


@_rule("semicoprod-P2", _EX, "=> strong injection law, effectful factor")
def _r_semicoprod_p2(theory, ps, inst):
    _arity(ps, 0, "semicoprod-P2")
    t = _take_term(theory, inst, "term", "semicoprod-P2")
    _done(inst, "semicoprod-P2")
    if not isinstance(t, SemiCoprod):
        raise E.BadInstantiation("semicoprod-P2 needs a semi-pure case map")
    ap, bp = dom(t.pure), cod(t.pure)
    ae, be = dom(t.eff), cod(t.eff)
    if t.pure_on_left:
        lhs = Comp(t, Inj2(ap, ae))
        rhs = Comp(Inj2(bp, be), t.eff)
    else:
        lhs = Comp(t, Inj1(ae, ap))
        rhs = Comp(Inj1(be, bp), t.eff)
    return Holds(Equation(normalize_assoc(lhs), normalize_assoc(rhs), STRONG))


@_rule("bincoprod-inj", _EX, "=> WF(in1/in2, 0)")
def _r_bincoprod_inj(theory, ps, inst):
    _arity(ps, 0, "bincoprod-inj")
    which = _take(inst, "which", "bincoprod-inj")
    left = _take_type(theory, inst, "left", "bincoprod-inj")
    right = _take_type(theory, inst, "right", "bincoprod-inj")
    _done(inst, "bincoprod-inj")
    if which not in (1, 2):
        raise E.BadInstantiation("bincoprod-inj: which must be 1 or 2")
    return WellFormed(Inj1(left, right) if which == 1 else Inj2(left, right), 0)


def _case_term(theory, inst, rid) -> CaseSum:
    t = _take_term(theory, inst, "term", rid)
    if not isinstance(t, CaseSum):
        raise E.BadInstantiation(f"{rid} needs a case(g, k) term")
    return t


@_rule("sum-case-exists", _EX, "=> WF(case(g,k), level)")
def _r_sum_case_exists(theory, ps, inst):
    _arity(ps, 0, "sum-case-exists")
    t = _case_term(theory, inst, "sum-case-exists")
    _done(inst, "sum-case-exists")
    return WellFormed(t, infer_decoration(t))


@_rule("sum-case-weak", _EX, "=> case(g,k) ~~ g")
def _r_sum_case_weak(theory, ps, inst):
    _arity(ps, 0, "sum-case-weak")
    t = _case_term(theory, inst, "sum-case-weak")
    _done(inst, "sum-case-weak")
    return Holds(Equation(t, t.on_value, _wkind(theory)))


@_rule("sum-case-empty", _EX, "=> case(g,k).empty[X] == k")
def _r_sum_case_empty(theory, ps, inst):
    _arity(ps, 0, "sum-case-empty")
    t = _case_term(theory, inst, "sum-case-empty")
    _done(inst, "sum-case-empty")
    return Holds(Equation(normalize_assoc(Comp(t, FromEmpty(dom(t)))),
                          t.on_empty, STRONG))


@_rule("sum-case-prop", _EX, "=> case(g,k) == g when k cannot catch")
def _r_sum_case_prop(theory, ps, inst):
    _arity(ps, 0, "sum-case-prop")
    t = _case_term(theory, inst, "sum-case-prop")
    _done(inst, "sum-case-prop")
    _require_level(theory, t.on_empty, 1, "sum-case-prop", "the exception branch")
    return Holds(Equation(t, t.on_value, STRONG))


@_rule("sum-case-unique", _EX,
       "h ~~ g and h.empty[X] == k => h == case(g, k)")
def _r_sum_case_unique(theory, ps, inst):
    _arity(ps, 2, "sum-case-unique")
    t = _case_term(theory, inst, "sum-case-unique")
    h = _take_term(theory, inst, "h", "sum-case-unique")
    _done(inst, "sum-case-unique")
    wk = _wkind(theory)
    want1 = Equation(h, t.on_value, wk)
    want2 = Equation(normalize_assoc(Comp(h, FromEmpty(dom(h)))), t.on_empty, STRONG)
    if _as_holds(ps[0], "sum-case-unique") != want1:
        raise E.BadPremises(f"sum-case-unique: first premise should be {want1}")
    if _as_holds(ps[1], "sum-case-unique") != want2:
        raise E.BadPremises(f"sum-case-unique: second premise should be {want2}")
    return Holds(Equation(h, t, STRONG))


def _coerce_term(theory, inst, rid) -> Coerce:
    t = _take_term(theory, inst, "term", rid)
    if not isinstance(t, Coerce):
        raise E.BadInstantiation(f"{rid} needs a coerce(k) term")
    return t


@_rule("coerce-exists", _EX, "=> WF(coerce(k), 1)")
def _r_coerce_exists(theory, ps, inst):
    _arity(ps, 0, "coerce-exists")
    t = _coerce_term(theory, inst, "coerce-exists")
    _done(inst, "coerce-exists")
    return WellFormed(t, min(infer_decoration(t), 1))


@_rule("coerce-weak", _EX, "=> coerce(k) ~~ k")
def _r_coerce_weak(theory, ps, inst):
    _arity(ps, 0, "coerce-weak")
    t = _coerce_term(theory, inst, "coerce-weak")
    _done(inst, "coerce-weak")
    return Holds(Equation(t, t.inner, _wkind(theory)))


@_rule("coerce-unique", _EX, "p ~~ k => p == coerce(k) (p level <= 1)")
def _r_coerce_unique(theory, ps, inst):
    _arity(ps, 1, "coerce-unique")
    t = _coerce_term(theory, inst, "coerce-unique")
    p = _take_term(theory, inst, "p", "coerce-unique")
    _done(inst, "coerce-unique")
    _require_level(theory, p, 1, "coerce-unique", "the compared propagator")
    want = Equation(p, t.inner, _wkind(theory))
    if _as_holds(ps[0], "coerce-unique") != want:
        raise E.BadPremises(f"coerce-unique: premise should be {want}")
    return Holds(Equation(p, t, STRONG))


def _propcase_term(theory, inst, rid) -> PropCase:
    t = _take_term(theory, inst, "term", rid)
    if not isinstance(t, PropCase):
        raise E.BadInstantiation(f"{rid} needs a cases(g, h) term")
    return t


@_rule("propcase-inl", _EX, "=> cases(g,h).in1 == g")
def _r_propcase_inl(theory, ps, inst):
    _arity(ps, 0, "propcase-inl")
    t = _propcase_term(theory, inst, "propcase-inl")
    _done(inst, "propcase-inl")
    inj = Inj1(dom(t.on_left), dom(t.on_right))
    return Holds(Equation(normalize_assoc(Comp(t, inj)), t.on_left, STRONG))


@_rule("propcase-inr", _EX, "=> cases(g,h).in2 == h")
def _r_propcase_inr(theory, ps, inst):
    _arity(ps, 0, "propcase-inr")
    t = _propcase_term(theory, inst, "propcase-inr")
    _done(inst, "propcase-inr")
    inj = Inj2(dom(t.on_left), dom(t.on_right))
    return Holds(Equation(normalize_assoc(Comp(t, inj)), t.on_right, STRONG))


# -------------------------------------------------------- rule dispatch

def apply_rule(theory: Theory, rule_id: str, premises: Sequence[Judgment],
               inst: Optional[Mapping[str, Any]] = None) -> Judgment:
    """Apply one catalog rule; returns the (normalized) conclusion."""
    spec = RULES.get(rule_id)
    if spec is None:
        raise E.UnknownRule(f"no rule named {rule_id!r}")
    if theory.flavor not in spec.flavors:
        raise E.RuleNotInFlavor(
            f"rule {rule_id!r} is not part of the {theory.flavor} logic")
    return spec.impl(theory, tuple(premises), dict(inst or {}))


def _canon_inst(inst: Mapping[str, Any]) -> tuple[tuple[str, Any], ...]:
    return tuple(sorted(inst.items(), key=lambda kv: kv[0]))


def node(theory: Theory, rule_id: str, premises: Sequence[Derivation] = (),
         **inst: Any) -> Derivation:
    """Build a derivation node, computing (and thereby checking) its conclusion."""
    concl = apply_rule(theory, rule_id, [p.conclusion for p in premises], inst)
    return Derivation(rule_id, tuple(premises), _canon_inst(inst), concl)


def axiom_node(theory: Theory, name: str) -> Derivation:
    ax = theory.axiom(name)
    return Derivation(("axiom", name), (), (), Holds(norm_eq(ax.eq)))


def gen_node(theory: Theory, name: str) -> Derivation:
    g = theory.gen(name)
    return Derivation(("gen", name), (), (), WellFormed(g, g.dec))


def hyp_node(theory: Theory, label: str, judgment: Judgment) -> Derivation:
    if isinstance(judgment, Holds):
        eq = norm_eq(judgment.eq)
        typecheck_equation(theory, eq)
        judgment = Holds(eq)
    else:
        typecheck(theory, judgment.term)
        judgment = WellFormed(normalize_assoc(judgment.term), judgment.level)
    return Derivation(("hyp", label), (), (), judgment)


# ------------------------------------------------------------- checking

@dataclass(frozen=True)
class CheckResult:
    valid: bool
    error: Optional[str]
    path: Optional[tuple[int, ...]]
    hypotheses: tuple[str, ...]
    nodes: int

    def __bool__(self) -> bool:
        return self.valid


def check_derivation(theory: Theory, d: Derivation) -> CheckResult:
    """Recompute every node's conclusion; any mismatch invalidates the tree.

    `path` addresses the offending node by premise indices from the root.
    """
    hyps: list[str] = []
    count = 0

    def walk(n: Derivation, path: tuple[int, ...]) -> Optional[tuple[tuple, str]]:
        nonlocal count
        count += 1
        for k, p in enumerate(n.premises):
            bad = walk(p, path + (k,))
            if bad:
                return bad
        try:
            if isinstance(n.rule, tuple):
                tag, name = n.rule[0], n.rule[1]
                if n.premises:
                    return path, f"citation {tag}({name}) cannot have premises"
                if tag == "axiom":
                    want: Judgment = Holds(norm_eq(theory.axiom(name).eq))
                elif tag == "gen":
                    g = theory.gen(name)
                    want = WellFormed(g, g.dec)
                elif tag == "hyp":
                    if isinstance(n.conclusion, Holds):
                        typecheck_equation(theory, n.conclusion.eq)
                    else:
                        typecheck(theory, n.conclusion.term)
                    hyps.append(name)
                    return None
                else:
                    return path, f"unknown citation kind {tag!r}"
            else:
                want = apply_rule(theory, n.rule,
                                  [p.conclusion for p in n.premises],
                                  dict(n.inst))
            if want != n.conclusion:
                return path, (f"node claims {n.conclusion}, rule "
                              f"{n.rule} yields {want}")
        except E.DecorError as exc:
            return path, str(exc)
        return None

    bad = walk(d, ())
    if bad:
        return CheckResult(False, bad[1], bad[0], tuple(hyps), count)
    return CheckResult(True, None, None, tuple(hyps), count)


# ------------------------------------------------- packaged derivations

def derive_final_uniqueness(theory: Theory, f: Term) -> Derivation:
    """f == unit[X] for any accessor f: X -> 1 (three nodes)."""
    f = normalize_assoc(f)
    typecheck(theory, f)
    if _decorated(theory) and infer_decoration(f) > 1:
        raise E.NotAnAccessor(f"{f} is level {infer_decoration(f)}")
    n1 = node(theory, "w-final", f=f)
    n2 = node(theory, "unit-arrow", at=dom(f))
    return node(theory, "w-to-s", [n1, n2])


def derive_initial_uniqueness(theory: Theory, f: Term) -> Derivation:
    """f == empty[Y] for any propagator f: 0 -> Y (the exceptions-side twin)."""
    f = normalize_assoc(f)
    typecheck(theory, f)
    if _decorated(theory) and infer_decoration(f) > 1:
        raise E.NotAPropagator(f"{f} is level {infer_decoration(f)}")
    n1 = node(theory, "w-initial", f=f)
    n2 = node(theory, "empty-arrow", at=cod(f))
    return node(theory, "w-to-s-prop", [n1, n2])


# ------------------------------------------------------------ saturation

@dataclass(frozen=True)
class ProveResult:
    status: str  # 'proven' | 'unknown'
    derivation: Optional[Derivation]
    reason: str
    rounds: int
    facts: int

    @property
    def proven(self) -> bool:
        return self.status == "proven"


def saturate_prove(theory: Theory, goal: Equation, budget: int = 4,
                   max_term_size: int = 7, fact_cap: int = 20000) -> ProveResult:
    """Forward saturation from the axioms.

    Each budget round composes every known fact with every pool term on both
    sides (substitution/replacement, respecting the flavor's restrictions),
    then closes under symmetry, transitivity, the strong/weak conversions,
    and the final/initial seeds. Deterministic: the fact table keeps insertion
    order and the pool is sorted, so reruns build the same derivation.
    Returns the derivation when the goal is reached.
    """
    goal = norm_eq(goal)
    typecheck_equation(theory, goal)
    wk = _wkind(theory)
    facts: dict[Equation, Derivation] = {}

    def add(eq: Equation, mk: Callable[[], Derivation]) -> bool:
        # membership first: building a node re-runs the rule, which is the
        # expensive part, and saturation regenerates the same facts a lot
        if eq.lhs == eq.rhs or eq in facts:
            return False
        facts[eq] = mk()
        return True

    for ax in theory.axioms:
        nm = ax.name
        add(norm_eq(ax.eq), lambda nm=nm: axiom_node(theory, nm))

    prims: list[Term] = []
    if theory.flavor in ("states", "plain"):
        prims += [Lookup(i) for i in theory.locations]
        prims += [Update(i) for i in theory.locations]
        prims.append(Id(UNIT))
    if theory.flavor in ("exceptions", "plain"):
        prims += [Throw(i) for i in theory.constructors]
        prims += [Catch(i) for i in theory.constructors]
        prims.append(Id(EMPTY))

    def pool() -> list[Term]:
        seen: dict[Term, None] = {}
        for t in prims:
            seen.setdefault(t)
        for side in (goal.lhs, goal.rhs):
            for s in subterms(side):
                seen.setdefault(s)
        for eq in facts:
            for side in (eq.lhs, eq.rhs):
                for s in subterms(side):
                    seen.setdefault(s)
        return sorted(seen, key=lambda t: (term_size(t), str(t)))

    def seed_finals(terms: list[Term]) -> None:
        for t in terms:
            if theory.flavor == "states" and isinstance(cod(t), Unit):
                add(Equation(t, ToUnit(dom(t)), wk),
                    lambda t=t: node(theory, "w-final", f=t))
            if theory.flavor == "exceptions" and isinstance(dom(t), Empty):
                add(Equation(t, FromEmpty(cod(t)), wk),
                    lambda t=t: node(theory, "w-initial", f=t))

    def close() -> None:
        changed = True
        while changed:
            changed = False
            snapshot = list(facts.items())
            by_lhs: dict[tuple, list[Equation]] = {}
            for eq in facts:
                by_lhs.setdefault((eq.lhs, eq.kind), []).append(eq)
            for eq, d in snapshot:
                if goal in facts:
                    return
                sym_rule = "eq-sym" if eq.kind == STRONG else "w-sym"
                if add(Equation(eq.rhs, eq.lhs, eq.kind),
                       lambda r=sym_rule, d=d: node(theory, r, [d])):
                    changed = True
                if eq.kind == STRONG and wk == WEAK:
                    if add(Equation(eq.lhs, eq.rhs, WEAK),
                           lambda d=d: node(theory, "s-to-w", [d])):
                        changed = True
                if (eq.kind == WEAK and infer_decoration(eq.lhs) <= 1
                        and infer_decoration(eq.rhs) <= 1):
                    conv = "w-to-s" if theory.flavor == "states" else "w-to-s-prop"
                    if add(Equation(eq.lhs, eq.rhs, STRONG),
                           lambda c=conv, d=d: node(theory, c, [d])):
                        changed = True
                for nxt in by_lhs.get((eq.rhs, eq.kind), []):
                    tr = "eq-trans" if eq.kind == STRONG else "w-trans"
                    if add(Equation(eq.lhs, nxt.rhs, eq.kind),
                           lambda r=tr, d=d, n=nxt: node(theory, r, [d, facts[n]])):
                        changed = True
            if len(facts) > fact_cap:
                return

    def found() -> Optional[Derivation]:
        return facts.get(goal)

    seed_finals(pool())
    close()
    if found():
        return ProveResult("proven", found(), "closure of the axioms", 0, len(facts))
    if len(facts) > fact_cap:
        return ProveResult("unknown", None, f"fact cap {fact_cap} reached", 0, len(facts))

    for rnd in range(1, budget + 1):
        p = pool()
        snapshot = list(facts.items())
        for eq, d in snapshot:
            if goal in facts:
                break
            for f in p:
                # substitution: build  lhs.f ~ rhs.f
                if cod(f) == dom(eq.lhs):
                    t1 = normalize_assoc(Comp(eq.lhs, f))
                    if term_size(t1) <= max_term_size:
                        r1 = normalize_assoc(Comp(eq.rhs, f))
                        if eq.kind == STRONG:
                            add(Equation(t1, r1, STRONG),
                                lambda d=d, f=f: node(theory, "eq-subs", [d], by=f))
                        elif theory.flavor == "states":
                            add(Equation(t1, r1, WEAK),
                                lambda d=d, f=f: node(theory, "w-subs", [d], by=f))
                        elif infer_decoration(f) == 0:
                            add(Equation(t1, r1, WEAK),
                                lambda d=d, f=f: node(theory, "w-subs-pure", [d], by=f))
                # replacement: build  f.lhs ~ f.rhs
                if dom(f) == cod(eq.lhs):
                    t2 = normalize_assoc(Comp(f, eq.lhs))
                    if term_size(t2) <= max_term_size:
                        r2 = normalize_assoc(Comp(f, eq.rhs))
                        if eq.kind == STRONG:
                            add(Equation(t2, r2, STRONG),
                                lambda d=d, f=f: node(theory, "eq-repl", [d], by=f))
                        elif theory.flavor == "exceptions":
                            add(Equation(t2, r2, WEAK),
                                lambda d=d, f=f: node(theory, "w-repl", [d], by=f))
                        elif infer_decoration(f) == 0:
                            add(Equation(t2, r2, WEAK),
                                lambda d=d, f=f: node(theory, "w-repl-pure", [d], by=f))
            if len(facts) > fact_cap:
                return ProveResult("unknown", None,
                                   f"fact cap {fact_cap} reached", rnd, len(facts))
        seed_finals(pool())
        close()
        if found():
            return ProveResult("proven", found(), f"found in round {rnd}",
                               rnd, len(facts))
        if len(facts) > fact_cap:
            return ProveResult("unknown", None,
                               f"fact cap {fact_cap} reached", rnd, len(facts))

    return ProveResult("unknown", None, f"budget of {budget} rounds exhausted",
                       budget, len(facts))
