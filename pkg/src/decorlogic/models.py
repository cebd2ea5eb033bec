"""Finite models: the semantic oracle.

A model fixes a finite carrier for every base type and interprets terms as
actual functions, by exhaustive enumeration:

* states side: a term X -> Y runs as (x, state) -> (y, state'), where a state
  is a tuple of stored values in location order;
* exceptions side: a term X -> Y runs on tagged inputs ('val', x) or
  ('exc', (name, arg)) and returns the same shape; level <= 1 terms always
  propagate exceptional inputs unchanged.

`check_equation` decides strong equations by comparing full outcomes on every
input, weak ones by comparing result values only (states) or ordinary inputs
only (exceptions). Everything is deterministic; enumeration order is
documented by the carrier builders below, so counterexample witnesses are
stable and can be frozen into tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

from . import errors as E
from .terms import (
    CaseSum, Catch, CatchAll, Coerce, Comp, ConstCotuple, FromEmpty, Gen, Id,
    Inj1, Inj2, LocTuple, Lookup, PropCase, Proj1, Proj2, SemiCoprod, SemiProd,
    Term, ToUnit, Throw, Update, cod, dom,
)
from .theory import Equation, STRONG, Theory, WEAK, infer_decoration
from .types import Coprod, Empty, Named, Param, Prod, TypeExpr, Unit, Value

DEFAULT_BOUND = 10_000_000


@dataclass(frozen=True)
class Valuation:
    """Interpretations for the symbols a theory leaves open.

    base: carrier sizes for Named types. tables: for each pure generator, the
    output value at each domain element, indexed in enumeration order.
    """

    base: Mapping[str, int] = field(default_factory=dict)
    tables: Mapping[str, Sequence[Any]] = field(default_factory=dict)


class _Model:
    def __init__(self, theory: Theory, sizes: Mapping[str, int],
                 valuation: Optional[Valuation] = None,
                 bound: int = DEFAULT_BOUND):
        self.theory = theory
        self.sizes = dict(sizes)
        self.valuation = valuation or Valuation()
        self.bound = bound
        self._carriers: dict[TypeExpr, list] = {}
        for n in self.sizes.values():
            if n < 1:
                raise E.ModelError("carriers must be non-empty")

    # ---- carriers -------------------------------------------------

    def carrier(self, ty: TypeExpr) -> list:
        """Enumerate ty: ints count up, pairs nest left-outer, sums list
        left then right with 'l'/'r' tags."""
        if ty in self._carriers:
            return self._carriers[ty]
        if isinstance(ty, Unit):
            out = [()]
        elif isinstance(ty, Empty):
            out = []
        elif isinstance(ty, (Value, Param)):
            if ty.index not in self.sizes:
                raise E.CarrierMissing(f"no size for index {ty.index!r}")
            out = list(range(self.sizes[ty.index]))
        elif isinstance(ty, Named):
            if ty.name not in self.valuation.base:
                raise E.CarrierMissing(f"no carrier for base type {ty.name!r}")
            out = list(range(self.valuation.base[ty.name]))
        elif isinstance(ty, Prod):
            out = [(a, b) for a in self.carrier(ty.left)
                   for b in self.carrier(ty.right)]
        elif isinstance(ty, Coprod):
            out = ([("l", a) for a in self.carrier(ty.left)]
                   + [("r", b) for b in self.carrier(ty.right)])
        else:
            raise TypeError(f"not a type: {ty!r}")
        self._carriers[ty] = out
        return out

    def _gen_apply(self, g: Gen, x: Any) -> Any:
        if g.dec != 0:
            raise E.NoInterpretation(
                f"generator {g.name!r} has level {g.dec}; only pure generators "
                f"can be interpreted by tables")
        if g.name not in self.valuation.tables:
            raise E.NoInterpretation(f"no table for generator {g.name!r}")
        table = self.valuation.tables[g.name]
        domain = self.carrier(g.dom)
        if len(table) != len(domain):
            raise E.ModelError(
                f"table for {g.name!r} has {len(table)} entries, "
                f"domain has {len(domain)}")
        return table[domain.index(x)]

    def describe(self) -> dict:
        return {"theory": self.theory.name, "sizes": dict(self.sizes)}


class FiniteStateModel(_Model):
    """Finite model of a states theory: one size per location."""

    def __init__(self, theory: Theory, sizes: Mapping[str, int],
                 valuation: Optional[Valuation] = None,
                 bound: int = DEFAULT_BOUND):
        if theory.flavor != "states":
            raise E.ModelError("FiniteStateModel needs a states theory")
        missing = set(theory.locations) - set(sizes)
        if missing:
            raise E.CarrierMissing(f"no sizes for locations {sorted(missing)}")
        super().__init__(theory, sizes, valuation, bound)

    def states(self) -> list[tuple]:
        """All states, lexicographic in location order."""
        axes = [range(self.sizes[i]) for i in self.theory.locations]
        return list(itertools.product(*axes))

    def loc_pos(self, index: str) -> int:
        return self.theory.locations.index(index)


class FiniteExceptionModel(_Model):
    """Finite model of an exceptions theory: one size per exception name."""

    def __init__(self, theory: Theory, sizes: Mapping[str, int],
                 valuation: Optional[Valuation] = None,
                 bound: int = DEFAULT_BOUND):
        if theory.flavor != "exceptions":
            raise E.ModelError("FiniteExceptionModel needs an exceptions theory")
        missing = set(theory.constructors) - set(sizes)
        if missing:
            raise E.CarrierMissing(f"no sizes for exception names {sorted(missing)}")
        super().__init__(theory, sizes, valuation, bound)

    def exceptions(self) -> list[tuple]:
        """All exceptional outcomes (name, arg), names in theory order."""
        return [(i, a) for i in self.theory.constructors
                for a in range(self.sizes[i])]


# ------------------------------------------------------------ evaluation

def eval_states(model: FiniteStateModel, t: Term, value: Any, state: tuple
                ) -> tuple[Any, tuple]:
    """Run t on (value, state); returns (result, new state)."""
    if isinstance(t, Id):
        return value, state
    if isinstance(t, Comp):
        mid, st = eval_states(model, t.before, value, state)
        return eval_states(model, t.after, mid, st)
    if isinstance(t, ToUnit):
        return (), state
    if isinstance(t, Proj1):
        return value[0], state
    if isinstance(t, Proj2):
        return value[1], state
    if isinstance(t, Lookup):
        return state[model.loc_pos(t.index)], state
    if isinstance(t, Update):
        pos = model.loc_pos(t.index)
        return (), state[:pos] + (value,) + state[pos + 1:]
    if isinstance(t, Gen):
        return model._gen_apply(t, value), state
    if isinstance(t, SemiProd):
        a, b = value
        if t.pure_on_left:
            pa, _ = eval_states(model, t.pure, a, state)
            eb, st = eval_states(model, t.eff, b, state)
            return (pa, eb), st
        ea, st = eval_states(model, t.eff, a, state)
        pb, _ = eval_states(model, t.pure, b, state)
        return (ea, pb), st
    if isinstance(t, LocTuple):
        # every component observes the *incoming* state; together they
        # determine the whole new state
        new = tuple(eval_states(model, f, value, state)[0]
                    for _, f in t.components)
        return (), new
    raise E.ModelError(f"{type(t).__name__} cannot run on the states side")


ExcVal = tuple  # ('val', x) | ('exc', (name, arg))


def eval_exceptions(model: FiniteExceptionModel, t: Term, inp: ExcVal) -> ExcVal:
    """Run t on a tagged input, total over ordinary and exceptional inputs."""
    tag, payload = inp
    if isinstance(t, Comp):
        return eval_exceptions(model, t.after,
                               eval_exceptions(model, t.before, inp))

    if tag == "exc":
        name, arg = payload
        if isinstance(t, Catch):
            return ("val", arg) if name == t.index else inp
        if isinstance(t, CatchAll):
            return ("val", ())
        if isinstance(t, ConstCotuple):
            comp_map = dict(t.components)
            return eval_exceptions(model, comp_map[name], ("val", arg))
        if isinstance(t, CaseSum):
            return eval_exceptions(model, t.on_empty, inp)
        if isinstance(t, SemiCoprod):
            r = eval_exceptions(model, t.eff, inp)
            if r[0] == "exc":
                return r
            return ("val", ("r" if t.pure_on_left else "l", r[1]))
        # Id, injections, pure maps, Gen, Throw, PropCase, Coerce: propagate
        return inp

    x = payload
    if isinstance(t, Id):
        return inp
    if isinstance(t, ToUnit):
        return ("val", ())
    if isinstance(t, FromEmpty):
        raise E.ModelError("ordinary input of empty type cannot exist")
    if isinstance(t, Inj1):
        return ("val", ("l", x))
    if isinstance(t, Inj2):
        return ("val", ("r", x))
    if isinstance(t, Throw):
        return ("exc", (t.index, x))
    if isinstance(t, (Catch, CatchAll, ConstCotuple)):
        raise E.ModelError("ordinary input of empty type cannot exist")
    if isinstance(t, Gen):
        return ("val", model._gen_apply(t, x))
    if isinstance(t, SemiCoprod):
        side, v = x
        pure_side = "l" if t.pure_on_left else "r"
        if side == pure_side:
            r = eval_exceptions(model, t.pure, ("val", v))
            return ("val", (side, r[1]))
        r = eval_exceptions(model, t.eff, ("val", v))
        if r[0] == "exc":
            return r
        return ("val", (side, r[1]))
    if isinstance(t, CaseSum):
        return eval_exceptions(model, t.on_value, inp)
    if isinstance(t, PropCase):
        side, v = x
        branch = t.on_left if side == "l" else t.on_right
        return eval_exceptions(model, branch, ("val", v))
    if isinstance(t, Coerce):
        return eval_exceptions(model, t.inner, inp)
    raise E.ModelError(f"{type(t).__name__} cannot run on the exceptions side")


def observational_equiv(model: FiniteStateModel, s1: tuple, s2: tuple) -> bool:
    """States are indistinguishable iff every lookup agrees on them."""
    for i in model.theory.locations:
        v1, _ = eval_states(model, Lookup(i), (), s1)
        v2, _ = eval_states(model, Lookup(i), (), s2)
        if v1 != v2:
            return False
    return True


# ---------------------------------------------------------------- checks

@dataclass(frozen=True)
class LawResult:
    name: str
    status: str  # 'holds' | 'fails'
    witness: Optional[dict]
    points: int

    @property
    def holds(self) -> bool:
        return self.status == "holds"


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    results: tuple[LawResult, ...]

    @property
    def ok(self) -> bool:
        return all(r.holds for r in self.results)


def check_equation(model: _Model, eq: Equation, name: str = "") -> LawResult:
    """Exhaustively decide eq in the model.

    States: strong compares (value, state') on every (input, state), weak
    compares values only. Exceptions: strong runs exceptional inputs too,
    weak only ordinary ones; outputs always compared in full.
    """
    if isinstance(model, FiniteStateModel):
        dcar = model.carrier(dom(eq.lhs))
        states = model.states()
        total = len(dcar) * len(states)
        if total > model.bound:
            raise E.SearchSpaceTooLarge(f"{total} points exceeds bound {model.bound}")
        for x in dcar:
            for s in states:
                r1 = eval_states(model, eq.lhs, x, s)
                r2 = eval_states(model, eq.rhs, x, s)
                same = (r1 == r2) if eq.kind == STRONG else (r1[0] == r2[0])
                if not same:
                    return LawResult(name, "fails", {
                        "input": x, "state": s,
                        "lhs": r1, "rhs": r2}, total)
        return LawResult(name, "holds", None, total)

    if isinstance(model, FiniteExceptionModel):
        inputs: list[ExcVal] = [("val", x) for x in model.carrier(dom(eq.lhs))]
        if eq.kind == STRONG:
            inputs += [("exc", e) for e in model.exceptions()]
        total = len(inputs)
        if total > model.bound:
            raise E.SearchSpaceTooLarge(f"{total} points exceeds bound {model.bound}")
        for inp in inputs:
            r1 = eval_exceptions(model, eq.lhs, inp)
            r2 = eval_exceptions(model, eq.rhs, inp)
            if r1 != r2:
                return LawResult(name, "fails", {
                    "input": inp, "lhs": r1, "rhs": r2}, total)
        return LawResult(name, "holds", None, total)

    raise E.ModelError("unknown model kind")


# ---------------------------------------------------------------- suites

def verify_law_suite(model: _Model, suite: str) -> SuiteReport:
    if suite == "states-seven":
        return _suite_states_seven(model)
    if suite == "exceptions-laws":
        return _suite_exceptions_laws(model)
    if suite == "nesting-matrix":
        return _suite_nesting(model)
    if suite == "duality-semantic":
        return _suite_duality(model)
    raise E.SuiteUnknown(f"no suite named {suite!r}")


def _suite_states_seven(model: FiniteStateModel) -> SuiteReport:
    from .states import seven_equation_goals

    if not isinstance(model, FiniteStateModel):
        raise E.ModelError("states-seven runs on a states model")
    results = []
    for goal in seven_equation_goals(model.theory):
        results.append(check_equation(model, goal.direct, goal.name))
        for obs_name, obs_eq in goal.observations:
            results.append(check_equation(model, obs_eq, obs_name))
    return SuiteReport("states-seven", tuple(results))


def _suite_exceptions_laws(model: FiniteExceptionModel) -> SuiteReport:
    from .exceptions import (catch_equation, handler_commute_equation,
                             handler_idempotent_equation, key_annihilation_equation,
                             raise_term)
    from .theory import eq_strong

    if not isinstance(model, FiniteExceptionModel):
        raise E.ModelError("exceptions-laws runs on an exceptions model")
    th = model.theory
    results = []
    for ax in th.axioms:
        results.append(check_equation(model, ax.eq, ax.name))
    for i in th.constructors:
        results.append(check_equation(
            model, key_annihilation_equation(th, i), f"annihilation[{i}]"))
        results.append(check_equation(
            model, catch_equation(th, i), f"catch-throw[{i}]"))
        results.append(check_equation(
            model, eq_strong(raise_term(th, i, Empty()), Throw(i)),
            f"raise-is-throw[{i}]"))
        results.append(check_equation(
            model, handler_idempotent_equation(th, i), f"handler-idempotent[{i}]"))
    for i in th.constructors:
        for j in th.constructors:
            if i != j:
                results.append(check_equation(
                    model, handler_commute_equation(th, i, j),
                    f"handler-commute[{i},{j}]"))
    return SuiteReport("exceptions-laws", tuple(results))


def _suite_nesting(model: FiniteExceptionModel) -> SuiteReport:
    """The three ways to nest two catch clauses genuinely differ.

    With f raising i and the i-clause g raising j: the flat handler lets g's
    exception escape while both nested forms catch it; with f raising j, the
    nested-inside-clause form misses it while the other two catch it. The
    suite pins the full expected outcome of each of the six runs.
    """
    from .exceptions import handle_term, raise_term

    if not isinstance(model, FiniteExceptionModel):
        raise E.ModelError("nesting-matrix runs on an exceptions model")
    th = model.theory
    if len(th.constructors) < 2:
        raise E.BadParams("nesting-matrix needs at least two exception names")
    i, j = th.constructors[0], th.constructors[1]
    ni, nj = model.sizes[i], model.sizes[j]

    cast = Gen("nest_cast", Param(i), Param(j), 0)
    th2 = th.with_gen(cast)
    val = Valuation(base=dict(model.valuation.base),
                    tables={**dict(model.valuation.tables),
                            "nest_cast": tuple(a % nj for a in range(ni))})
    m2 = FiniteExceptionModel(th2, model.sizes, val, model.bound)

    y = Param(j)
    f_a = raise_term(th2, i, y)                      # P[i] -> P[j], raises i
    f_b = Comp(raise_term(th2, j, y), cast)          # raises j instead
    g = Comp(raise_term(th2, j, y), cast)            # i-clause that re-raises as j
    h = Id(y)                                        # j-clause that recovers

    n1_a = handle_term(th2, f_a, [(i, g), (j, h)]).term
    n2_a = handle_term(th2, handle_term(th2, f_a, [(i, g)]).term, [(j, h)]).term
    inner_clause = handle_term(th2, g, [(j, h)]).term
    n3_a = handle_term(th2, f_a, [(i, inner_clause)]).term
    n1_b = handle_term(th2, f_b, [(i, g), (j, h)]).term
    n2_b = handle_term(th2, handle_term(th2, f_b, [(i, g)]).term, [(j, h)]).term
    n3_b = handle_term(th2, f_b, [(i, inner_clause)]).term

    def expect(nm: str, term: Term, want) -> LawResult:
        pts = 0
        for a in range(ni):
            pts += 1
            got = eval_exceptions(m2, term, ("val", a))
            if got != want(a):
                return LawResult(nm, "fails", {
                    "input": ("val", a), "got": got, "want": want(a)}, pts)
        return LawResult(nm, "holds", None, pts)

    c = lambda a: a % nj
    results = (
        expect("a/flat-escapes", n1_a, lambda a: ("exc", (j, c(a)))),
        expect("a/seq-catches", n2_a, lambda a: ("val", c(a))),
        expect("a/clause-catches", n3_a, lambda a: ("val", c(a))),
        expect("b/flat-catches", n1_b, lambda a: ("val", c(a))),
        expect("b/seq-catches", n2_b, lambda a: ("val", c(a))),
        expect("b/clause-misses", n3_b, lambda a: ("exc", (j, c(a)))),
    )
    return SuiteReport("nesting-matrix", results)


def _suite_duality(model: _Model) -> SuiteReport:
    """Each states law and its mirror-image exceptions law hold together.

    Runs on a states model; the exceptions side is its dual theory with the
    same index sizes. Rows pair A1/B1, A2/B2 and the two annihilations.
    """
    from .exceptions import key_annihilation_equation
    from .states import annihilation_equation
    from .translators import dualize_theory

    if isinstance(model, FiniteExceptionModel):
        raise E.ModelError("duality-semantic starts from the states side")
    th = model.theory
    dual_th = dualize_theory(th)
    dual_m = FiniteExceptionModel(dual_th, model.sizes, model.valuation, model.bound)

    def pair(nm: str, st_res: LawResult, ex_res: LawResult) -> LawResult:
        ok = st_res.holds and ex_res.holds
        wit = None if ok else {"states": st_res.witness, "exceptions": ex_res.witness}
        return LawResult(nm, "holds" if ok else "fails", wit,
                         st_res.points + ex_res.points)

    results = []
    for ax, dax in zip(th.axioms, dual_th.axioms):
        results.append(pair(f"{ax.name}<->{dax.name}",
                            check_equation(model, ax.eq),
                            check_equation(dual_m, dax.eq)))
    for i in th.locations:
        results.append(pair(
            f"annihilation[{i}]<->annihilation[{i}]",
            check_equation(model, annihilation_equation(th, i)),
            check_equation(dual_m, key_annihilation_equation(dual_th, i))))
    return SuiteReport("duality-semantic", tuple(results))
