"""Script front end: a small text language for decorated theories.

A script is a sequence of declarations (theories, generators, terms,
equations, proof blocks, models) and command directives (check, verify,
lemma, eval, prove, erase, expand, dualize). `parse_script` turns text into
a `Script`, `execute` runs the directives against the kernel, the finite
models, and the translators, and `print_script` is the inverse of parsing:
parse(print_script(s)) == s for every constructible Script.

Proof blocks are flat labeled step lists; `build_proof` folds them into a
kernel derivation and `derivation_to_proof` serializes a derivation back
into a block, so proofs travel as text.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Optional, Sequence, Union

from . import errors as E
from .exceptions import LEMMAS as EXC_LEMMAS
from .exceptions import build_exceptions_theory
from .exceptions import builtin_proof as _exc_builtin
from .exceptions import derive_lemma as _exc_lemma
from .exceptions import with_catch_all
from .kernel import (Derivation, Holds, Judgment, RULES, WellFormed,
                     axiom_node, check_derivation, gen_node, hyp_node, node,
                     saturate_prove)
from .models import (FiniteExceptionModel, FiniteStateModel, Valuation,
                     eval_exceptions, eval_states, verify_law_suite)
from .states import LEMMAS as STATE_LEMMAS
from .states import build_states_theory
from .states import builtin_proof as _states_builtin
from .states import derive_lemma as _states_lemma
from .terms import (CaseSum, Catch, CatchAll, Coerce, Comp, ConstCotuple,
                    FromEmpty, Gen, Id, Inj1, Inj2, LocTuple, Lookup,
                    PropCase, Proj1, Proj2, SemiCoprod, SemiProd, Term,
                    Throw, ToUnit, Update, term_to_text)
from .theory import (Equation, STRONG, Theory, WEAK, typecheck,
                     typecheck_equation)
from .translators import (dualize_theory, erase_theory,
                          expand_exceptions_equation, expand_states_equation)
from .types import (Coprod, EMPTY, Named, Param, Prod, TypeExpr, UNIT, Value)

REPORT_SCHEMA = "decor-report/1"

SUITES = ("states-seven", "exceptions-laws", "nesting-matrix",
          "duality-semantic")

_LEVEL_KEYWORDS = {"pure": 0, "accessor": 1, "modifier": 2,
                   "propagator": 1, "catcher": 2}

# names the term grammar claims for itself; declarations cannot reuse them
_RESERVED = frozenset({
    "l", "u", "t", "c", "id", "unit", "empty", "p1", "p2", "in1", "in2",
    "lsemi", "rsemi", "lsum", "rsum", "tuple", "cotuple", "case", "cases",
    "coerce", "catchall", "raise", "try", "catch", "handle", "throw",
    "theory", "gen", "term", "equation", "proof", "model", "check",
    "verify", "eval", "lemma", "prove", "erase", "expand", "dualize",
    "in", "for", "with", "on", "state", "budget", "from", "axiom", "hyp",
    "holds", "wf", "level", "states", "exceptions", "dual", "V", "P",
}) | frozenset(_LEVEL_KEYWORDS)

# instantiation argument kinds, by rule and key ("name" is a bare index)
_INST_KIND: dict[tuple[str, str], str] = {}
for _r in ("id", "0-id", "unit-arrow", "empty-arrow"):
    _INST_KIND[(_r, "at")] = "type"
for _r in ("loc-tuple", "const-cotuple"):
    _INST_KIND[(_r, "at")] = "name"
    _INST_KIND[(_r, "family")] = "family"
for _r in ("loc-tuple-unique", "const-cotuple-unique"):
    _INST_KIND[(_r, "family")] = "family"
    _INST_KIND[(_r, "g")] = "term"
for _r in ("binprod-proj", "bincoprod-inj"):
    _INST_KIND[(_r, "which")] = "int"
    _INST_KIND[(_r, "left")] = "type"
    _INST_KIND[(_r, "right")] = "type"


def _inst_kind(rule: str, key: str) -> str:
    return _INST_KIND.get((rule, key), "term")


# ------------------------------------------------------------------ lexer

@dataclass(frozen=True)
class Token:
    kind: str  # 'ident' | 'int' | 'sym' | 'eof'
    text: str
    line: int
    col: int


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*")
# rule names like 0-comp and 1-to-2 start with a digit
_NUMIDENT_RE = re.compile(r"[0-9]+(?:-[A-Za-z][A-Za-z0-9_-]*)")
_INT_RE = re.compile(r"[0-9]+")
_TWO_CHAR = ("==", "~~", "=>", "->")
_ONE_CHAR = "=:;,.(){}[]*+|"


def _lex(text: str) -> list[Token]:
    toks: list[Token] = []
    for ln, line in enumerate(text.splitlines(), start=1):
        i, n = 0, len(line)
        while i < n:
            ch = line[i]
            if ch in " \t":
                i += 1
                continue
            if ch == "#":
                break
            col = i + 1
            two = line[i:i + 2]
            if two in _TWO_CHAR:
                toks.append(Token("sym", two, ln, col))
                i += 2
                continue
            m = _NUMIDENT_RE.match(line, i)
            if m:
                toks.append(Token("ident", m.group(), ln, col))
                i = m.end()
                continue
            m = _INT_RE.match(line, i)
            if m:
                toks.append(Token("int", m.group(), ln, col))
                i = m.end()
                continue
            m = _IDENT_RE.match(line, i)
            if m:
                toks.append(Token("ident", m.group(), ln, col))
                i = m.end()
                continue
            if ch in _ONE_CHAR:
                toks.append(Token("sym", ch, ln, col))
                i += 1
                continue
            raise E.LexError(f"stray character {ch!r}", ln, col)
    toks.append(Token("eof", "", len(text.splitlines()) + 1, 1))
    return toks


# ------------------------------------------------------------------- AST

@dataclass(frozen=True)
class SrcPos:
    line: int = 0
    col: int = 0


_NOPOS = SrcPos()


@dataclass(frozen=True)
class TheoryDecl:
    name: str
    kind: str  # states | exceptions | plain-states | plain-exceptions | dual
    indices: tuple[tuple[str, int], ...] = ()
    source: Optional[str] = None  # the other theory, for dual
    catch_all: bool = False
    pos: SrcPos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class GenDecl:
    name: str
    theory: str
    level_kw: str
    dom: TypeExpr
    cod: TypeExpr
    table: Optional[tuple[int, ...]] = None
    pos: SrcPos = field(default=_NOPOS, compare=False)

    @property
    def level(self) -> int:
        return _LEVEL_KEYWORDS[self.level_kw]


@dataclass(frozen=True)
class TermDecl:
    name: str
    theory: str
    term: Term
    pos: SrcPos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class EquationDecl:
    name: str
    theory: str
    eq: Equation
    pos: SrcPos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class ModelDecl:
    name: str
    theory: str
    sizes: tuple[tuple[str, int], ...]
    pos: SrcPos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class ProofStep:
    label: str
    kind: str  # 'rule' | 'axiom' | 'gen' | 'hyp'
    name: str  # rule id, or the cited axiom/gen/hypothesis name
    inst: tuple[tuple[str, Any], ...] = ()
    premises: tuple[str, ...] = ()
    claim: Union[Equation, tuple[Term, int], None] = None  # hyp only


@dataclass(frozen=True)
class ProofDecl:
    name: str
    theory: str
    steps: tuple[ProofStep, ...]
    pos: SrcPos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class CheckProofCmd:
    proof: str
    theory: str
    pos: SrcPos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class VerifyCmd:
    suite: str
    theory: str
    model: Optional[str] = None
    pos: SrcPos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class LemmaCmd:
    lemma: str
    args: tuple[Any, ...]  # names, terms, or types, per the lemma signature
    theory: str
    pos: SrcPos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class EvalCmd:
    theory: str
    term: Term
    input_kind: str  # 'val' | 'exc'
    value: Union[int, tuple[str, int]]
    state: Optional[tuple[int, ...]] = None
    pos: SrcPos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class ProveCmd:
    theory: str
    eq: Equation
    budget: Optional[int] = None
    pos: SrcPos = field(default=_NOPOS, compare=False)


@dataclass(frozen=True)
class TranslateCmd:
    op: str  # 'erase' | 'expand' | 'dualize'
    theory: str
    pos: SrcPos = field(default=_NOPOS, compare=False)


Decl = Union[TheoryDecl, GenDecl, TermDecl, EquationDecl, ModelDecl,
             ProofDecl, CheckProofCmd, VerifyCmd, LemmaCmd, EvalCmd,
             ProveCmd, TranslateCmd]

_COMMAND_TYPES = (CheckProofCmd, VerifyCmd, LemmaCmd, EvalCmd, ProveCmd,
                  TranslateCmd)


@dataclass(frozen=True)
class Script:
    decls: tuple[Decl, ...]


# ----------------------------------------------------------------- parser

def _retarget_empty(body: Term, y: TypeExpr) -> Term:
    """Point a body ending in empty[..] at the handler's target type.

    `raise(i)` leaves its result type open (the sugar defaults it to P[i]);
    when such a body sits inside a handler, the empty[..] at the head of the
    composite is what fixes the codomain, so rewrite it to y.
    """
    if isinstance(body, FromEmpty):
        return FromEmpty(y)
    if isinstance(body, Comp):
        return Comp(_retarget_empty(body.after, y), body.before)
    return body


_THEORY_KINDS = ("states", "exceptions", "plain-states", "plain-exceptions")

_STATE_LEMMA_SIG = {
    "annihilation": ("i",),
    "final-uniqueness": ("f",),
    "commutation-6": ("i", "j"),
    "interaction-3": ("i",),
}
_EXC_LEMMA_SIG = {
    "key-annihilation": ("i",),
    "initial-uniqueness": ("f",),
    "catch-throw": ("i", "to"),
    "handler-commute": ("i", "j"),
    "handler-idempotent": ("i",),
}
_LEMMA_ARG_KIND = {"i": "name", "j": "name", "f": "term", "to": "type"}
# trailing parameters that may be omitted
_LEMMA_OPTIONAL = {"catch-throw": 1}


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0
        self.theories: dict[str, str] = {}  # name -> kind
        self.gens: dict[tuple[str, str], Gen] = {}
        self.terms: dict[tuple[str, str], Term] = {}
        self.names: set[str] = set()  # all declared names, for collisions

    # ---- token plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        tok = self.peek()
        if not self.at(kind, text):
            want = text if text is not None else kind
            raise E.ParseError(f"expected {want!r}, found {tok.text or 'end of input'!r}",
                               tok.line, tok.col)
        return self.next()

    def eat(self, kind: str, text: Optional[str] = None) -> bool:
        if self.at(kind, text):
            self.next()
            return True
        return False

    def pos(self) -> SrcPos:
        tok = self.peek()
        return SrcPos(tok.line, tok.col)

    def fail(self, msg: str) -> E.ParseError:
        tok = self.peek()
        return E.ParseError(msg, tok.line, tok.col)

    # ---- names

    def fresh_name(self, what: str) -> str:
        tok = self.expect("ident")
        if tok.text in _RESERVED:
            raise E.ParseError(f"{tok.text!r} is reserved", tok.line, tok.col)
        if tok.text in self.names:
            raise E.ParseError(f"{tok.text!r} is already declared",
                               tok.line, tok.col)
        self.names.add(tok.text)
        return tok.text

    def theory_ref(self) -> str:
        tok = self.expect("ident")
        if tok.text not in self.theories:
            raise E.ParseError(f"unknown theory {tok.text!r}", tok.line, tok.col)
        return tok.text

    # ---- types

    def type_atom(self) -> TypeExpr:
        tok = self.peek()
        if tok.kind == "int" and tok.text == "1":
            self.next()
            return UNIT
        if tok.kind == "int" and tok.text == "0":
            self.next()
            return EMPTY
        if tok.kind == "sym" and tok.text == "(":
            self.next()
            ty = self.type_expr()
            self.expect("sym", ")")
            return ty
        if tok.kind == "ident":
            self.next()
            if tok.text in ("V", "P") and self.eat("sym", "["):
                idx = self.expect("ident").text
                self.expect("sym", "]")
                return Value(idx) if tok.text == "V" else Param(idx)
            return Named(tok.text)
        raise self.fail(f"expected a type, found {tok.text!r}")

    def type_expr(self) -> TypeExpr:
        left = self.type_atom()
        if self.eat("sym", "*"):
            return Prod(left, self.type_expr())
        if self.eat("sym", "+"):
            return Coprod(left, self.type_expr())
        return left

    # ---- terms

    def term_expr(self, theory: str) -> Term:
        t = self.term_atom(theory)
        while self.eat("sym", "."):
            # `g . f` runs f first; keep the written association
            t = Comp(t, self.term_atom(theory))
        return t

    def _bracket_type(self) -> TypeExpr:
        self.expect("sym", "[")
        ty = self.type_expr()
        self.expect("sym", "]")
        return ty

    def _bracket_type2(self) -> tuple[TypeExpr, TypeExpr]:
        self.expect("sym", "[")
        a = self.type_expr()
        self.expect("sym", ",")
        b = self.type_expr()
        self.expect("sym", "]")
        return a, b

    def _paren_terms(self, theory: str, n: int) -> list[Term]:
        self.expect("sym", "(")
        out = [self.term_expr(theory)]
        while len(out) < n:
            self.expect("sym", ",")
            out.append(self.term_expr(theory))
        self.expect("sym", ")")
        return out

    def _family(self, theory: str) -> tuple[tuple[str, Term], ...]:
        self.expect("sym", "(")
        comps = []
        while True:
            idx = self.expect("ident").text
            self.expect("sym", ":")
            comps.append((idx, self.term_expr(theory)))
            if not self.eat("sym", ","):
                break
        self.expect("sym", ")")
        return tuple(comps)

    def _handler_clauses(self, theory: str
                         ) -> tuple[list[tuple[str, Term]], Optional[Term]]:
        self.expect("sym", "(")
        clauses: list[tuple[str, Term]] = []
        catch_all: Optional[Term] = None
        while True:
            if self.at("ident", "_"):
                self.next()
                self.expect("sym", "=>")
                catch_all = self.term_expr(theory)
            else:
                idx = self.expect("ident").text
                self.expect("sym", "=>")
                clauses.append((idx, self.term_expr(theory)))
            if not self.eat("sym", ","):
                break
        self.expect("sym", ")")
        return clauses, catch_all

    def term_atom(self, theory: str) -> Term:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "(":
            self.next()
            t = self.term_expr(theory)
            self.expect("sym", ")")
            return t
        if tok.kind != "ident":
            raise self.fail(f"expected a term, found {tok.text!r}")
        name = tok.text
        self.next()
        nxt = self.peek()
        if nxt.kind == "sym" and nxt.text == "[":
            if name == "l":
                self.next()
                idx = self.expect("ident").text
                self.expect("sym", "]")
                return Lookup(idx)
            if name == "u":
                self.next()
                idx = self.expect("ident").text
                self.expect("sym", "]")
                return Update(idx)
            if name == "t":
                self.next()
                idx = self.expect("ident").text
                self.expect("sym", "]")
                return Throw(idx)
            if name == "c":
                self.next()
                idx = self.expect("ident").text
                self.expect("sym", "]")
                return Catch(idx)
            if name == "id":
                return Id(self._bracket_type())
            if name == "unit":
                return ToUnit(self._bracket_type())
            if name == "empty":
                return FromEmpty(self._bracket_type())
            if name == "p1":
                return Proj1(*self._bracket_type2())
            if name == "p2":
                return Proj2(*self._bracket_type2())
            if name == "in1":
                return Inj1(*self._bracket_type2())
            if name == "in2":
                return Inj2(*self._bracket_type2())
            raise self.fail(f"{name!r} does not take [..] arguments")
        if nxt.kind == "sym" and nxt.text == "(":
            if name in ("lsemi", "rsemi", "lsum", "rsum"):
                a, b = self._paren_terms(theory, 2)
                if name == "lsemi":
                    return SemiProd(a, b, pure_on_left=True)
                if name == "rsemi":
                    return SemiProd(b, a, pure_on_left=False)
                if name == "lsum":
                    return SemiCoprod(a, b, pure_on_left=True)
                return SemiCoprod(b, a, pure_on_left=False)
            if name == "tuple":
                return LocTuple(self._family(theory))
            if name == "cotuple":
                return ConstCotuple(self._family(theory))
            if name == "case":
                g, k = self._paren_terms(theory, 2)
                return CaseSum(g, k)
            if name == "cases":
                g, h = self._paren_terms(theory, 2)
                return PropCase(g, h)
            if name == "coerce":
                (inner,) = self._paren_terms(theory, 1)
                return Coerce(inner)
            if name == "raise":
                self.next()
                idx = self.expect("ident").text
                to: TypeExpr = Param(idx)
                if self.eat("sym", ","):
                    to = self.type_expr()
                self.expect("sym", ")")
                return Comp(FromEmpty(to), Throw(idx))
            if name == "handle":
                self.expect("sym", "(")
                body = self.term_expr(theory)
                self.expect("sym", ",")
                clauses, catch_all = self._handler_clauses_tail(theory)
                self.expect("sym", ")")
                return self._build_handler(body, clauses, catch_all)
        if name == "try":
            body = self.term_expr(theory)
            self.expect("ident", "catch")
            clauses, catch_all = self._handler_clauses(theory)
            return self._build_handler(body, clauses, catch_all)
        if name == "catchall":
            return CatchAll()
        if (theory, name) in self.terms:
            return self.terms[(theory, name)]
        if (theory, name) in self.gens:
            return self.gens[(theory, name)]
        raise self.fail(f"unknown term or generator {name!r}")

    def _handler_clauses_tail(self, theory: str
                              ) -> tuple[list[tuple[str, Term]], Optional[Term]]:
        clauses: list[tuple[str, Term]] = []
        catch_all: Optional[Term] = None
        while True:
            if self.at("ident", "_"):
                self.next()
                self.expect("sym", "=>")
                catch_all = self.term_expr(theory)
            else:
                idx = self.expect("ident").text
                self.expect("sym", "=>")
                clauses.append((idx, self.term_expr(theory)))
            if not self.at("sym", ","):
                break
            self.next()
        return clauses, catch_all

    def _build_handler(self, body: Term, clauses: list[tuple[str, Term]],
                       catch_all: Optional[Term]) -> Term:
        # the same chain handle_term builds, but without a Theory at hand:
        # fold the clauses from the right onto the body, then coerce
        from .terms import cod as _cod
        if not clauses and catch_all is None:
            raise self.fail("a handler needs at least one clause")
        y = _cod(clauses[0][1] if clauses else catch_all)
        body = _retarget_empty(body, y)
        if catch_all is not None:
            chain: Term = Comp(catch_all, CatchAll())
            rest = clauses
        else:
            (last_i, last_g), rest = clauses[-1], clauses[:-1]
            chain = Comp(last_g, Catch(last_i))
        for i, g in reversed(rest):
            chain = Comp(CaseSum(g, chain), Catch(i))
        return Coerce(Comp(CaseSum(Id(y), chain), body))

    # ---- proof steps

    def _inst_value(self, theory: str, rule: str, key: str) -> Any:
        kind = _inst_kind(rule, key)
        if kind == "type":
            return self.type_expr()
        if kind == "name":
            return self.expect("ident").text
        if kind == "int":
            return int(self.expect("int").text)
        if kind == "family":
            return self._family(theory)
        return self.term_expr(theory)

    def proof_step(self, theory: str) -> ProofStep:
        label = self.expect("ident").text
        self.expect("sym", ":")
        head = self.expect("ident")
        kind, name = "rule", head.text
        inst: tuple[tuple[str, Any], ...] = ()
        claim: Union[Equation, tuple[Term, int], None] = None
        if head.text in ("axiom", "gen"):
            kind = head.text
            self.expect("sym", "(")
            name = self.expect("ident").text
            self.expect("sym", ")")
        elif head.text == "hyp":
            kind = "hyp"
            self.expect("sym", "(")
            name = self.expect("ident").text
            self.expect("sym", ")")
            if self.eat("ident", "holds"):
                lhs = self.term_expr(theory)
                op = self.expect("sym").text
                if op not in ("==", "~~"):
                    raise self.fail("expected == or ~~")
                rhs = self.term_expr(theory)
                claim = Equation(lhs, rhs, STRONG if op == "==" else WEAK)
            else:
                self.expect("ident", "wf")
                t = self.term_expr(theory)
                self.expect("ident", "level")
                claim = (t, int(self.expect("int").text))
        else:
            if name not in RULES:
                raise E.ParseError(f"unknown rule {name!r}", head.line, head.col)
            if self.eat("sym", "("):
                pairs = []
                if not self.at("sym", ")"):
                    while True:
                        key = self.expect("ident").text
                        self.expect("sym", "=")
                        pairs.append((key, self._inst_value(theory, name, key)))
                        if not self.eat("sym", ","):
                            break
                self.expect("sym", ")")
                inst = tuple(pairs)
        premises: tuple[str, ...] = ()
        if self.eat("ident", "from"):
            labels = [self.expect("ident").text]
            while self.eat("sym", ","):
                labels.append(self.expect("ident").text)
            premises = tuple(labels)
        self.expect("sym", ";")
        return ProofStep(label, kind, name, inst, premises, claim)

    # ---- declarations

    def decl(self) -> Decl:
        tok = self.peek()
        pos = SrcPos(tok.line, tok.col)
        if self.eat("ident", "theory"):
            return self.theory_decl(pos)
        if tok.kind == "ident" and tok.text in _LEVEL_KEYWORDS:
            return self.gen_decl(pos)
        if self.eat("ident", "term"):
            name = self.fresh_name("term")
            self.expect("ident", "in")
            th = self.theory_ref()
            self.expect("sym", "=")
            t = self.term_expr(th)
            self.terms[(th, name)] = t
            return TermDecl(name, th, t, pos)
        if self.eat("ident", "equation"):
            name = self.fresh_name("equation")
            self.expect("ident", "in")
            th = self.theory_ref()
            self.expect("sym", ":")
            lhs = self.term_expr(th)
            op = self.expect("sym").text
            if op not in ("==", "~~"):
                raise self.fail("expected == or ~~")
            rhs = self.term_expr(th)
            return EquationDecl(name, th,
                                Equation(lhs, rhs,
                                         STRONG if op == "==" else WEAK), pos)
        if self.eat("ident", "model"):
            name = self.fresh_name("model")
            self.expect("ident", "for")
            th = self.theory_ref()
            sizes = self.sized_indices()
            return ModelDecl(name, th, sizes, pos)
        if self.eat("ident", "proof"):
            name = self.fresh_name("proof")
            self.expect("ident", "in")
            th = self.theory_ref()
            self.expect("sym", "{")
            steps = []
            seen = set()
            while not self.at("sym", "}"):
                step = self.proof_step(th)
                if step.label in seen:
                    raise self.fail(f"duplicate step label {step.label!r}")
                seen.add(step.label)
                for p in step.premises:
                    if p not in seen:
                        raise self.fail(f"step {step.label!r} uses undefined "
                                        f"label {p!r}")
                steps.append(step)
            self.expect("sym", "}")
            if not steps:
                raise self.fail("empty proof block")
            return ProofDecl(name, th, tuple(steps), pos)
        if self.eat("ident", "check"):
            self.expect("ident", "proof")
            pname = self.expect("ident").text
            self.expect("ident", "in")
            return CheckProofCmd(pname, self.theory_ref(), pos)
        if self.eat("ident", "verify"):
            suite = self.expect("ident").text
            if suite not in SUITES:
                raise self.fail(f"unknown suite {suite!r}; "
                                f"one of {', '.join(SUITES)}")
            self.expect("ident", "in")
            th = self.theory_ref()
            model = None
            if self.eat("ident", "with"):
                model = self.expect("ident").text
            return VerifyCmd(suite, th, model, pos)
        if self.eat("ident", "lemma"):
            return self.lemma_cmd(pos)
        if self.eat("ident", "eval"):
            self.expect("ident", "in")
            th = self.theory_ref()
            self.expect("sym", ":")
            t = self.term_expr(th)
            self.expect("ident", "on")
            kind, value = self.eval_input()
            state = None
            if self.eat("ident", "state"):
                state = self.int_tuple()
            return EvalCmd(th, t, kind, value, state, pos)
        if self.eat("ident", "prove"):
            self.expect("ident", "in")
            th = self.theory_ref()
            self.expect("sym", ":")
            lhs = self.term_expr(th)
            op = self.expect("sym").text
            if op not in ("==", "~~"):
                raise self.fail("expected == or ~~")
            rhs = self.term_expr(th)
            budget = None
            if self.eat("ident", "budget"):
                budget = int(self.expect("int").text)
            return ProveCmd(th, Equation(lhs, rhs,
                                         STRONG if op == "==" else WEAK),
                            budget, pos)
        for op in ("erase", "expand", "dualize"):
            if self.eat("ident", op):
                return TranslateCmd(op, self.theory_ref(), pos)
        raise self.fail(f"expected a declaration or command, "
                        f"found {tok.text or 'end of input'!r}")

    def sized_indices(self) -> tuple[tuple[str, int], ...]:
        self.expect("sym", "(")
        out = []
        while True:
            idx = self.expect("ident").text
            self.expect("sym", ":")
            out.append((idx, int(self.expect("int").text)))
            if not self.eat("sym", ","):
                break
        self.expect("sym", ")")
        return tuple(out)

    def theory_decl(self, pos: SrcPos) -> TheoryDecl:
        name = self.fresh_name("theory")
        self.expect("sym", "=")
        kind_tok = self.expect("ident")
        kind = kind_tok.text
        if kind == "dual":
            self.expect("sym", "(")
            src = self.theory_ref()
            self.expect("sym", ")")
            self.theories[name] = "dual"
            return TheoryDecl(name, "dual", (), src, pos=pos)
        if kind not in _THEORY_KINDS:
            raise E.ParseError(f"unknown theory kind {kind!r}",
                               kind_tok.line, kind_tok.col)
        indices = self.sized_indices()
        catch_all = False
        if self.at("ident", "with"):
            self.next()
            self.expect("ident", "catchall")
            if kind != "exceptions":
                raise self.fail("only exceptions theories take catchall")
            catch_all = True
        self.theories[name] = kind
        return TheoryDecl(name, kind, indices, None, catch_all, pos)

    def gen_decl(self, pos: SrcPos) -> GenDecl:
        kw = self.expect("ident").text
        self.expect("ident", "gen")
        name = self.fresh_name("gen")
        self.expect("sym", ":")
        dom_ty = self.type_expr()
        self.expect("sym", "->")
        cod_ty = self.type_expr()
        self.expect("ident", "in")
        th = self.theory_ref()
        table = None
        if self.eat("sym", "="):
            self.expect("sym", "[")
            vals = [int(self.expect("int").text)]
            while self.eat("sym", ","):
                vals.append(int(self.expect("int").text))
            self.expect("sym", "]")
            table = tuple(vals)
        decl = GenDecl(name, th, kw, dom_ty, cod_ty, table, pos)
        self.gens[(th, name)] = Gen(name, dom_ty, cod_ty, decl.level)
        return decl

    def lemma_cmd(self, pos: SrcPos) -> LemmaCmd:
        name_tok = self.expect("ident")
        lemma = name_tok.text
        sig = _STATE_LEMMA_SIG.get(lemma) or _EXC_LEMMA_SIG.get(lemma)
        if sig is None:
            known = sorted(set(_STATE_LEMMA_SIG) | set(_EXC_LEMMA_SIG))
            raise E.ParseError(f"unknown lemma {lemma!r}; one of "
                               f"{', '.join(known)}", name_tok.line, name_tok.col)
        args: list[Any] = []
        # the theory is parsed after the args, so term args resolve against
        # the `in` clause; peek ahead for it
        save = self.i
        if self.eat("sym", "("):
            depth = 1
            while depth:
                t = self.next()
                if t.kind == "eof":
                    raise self.fail("unterminated lemma arguments")
                if t.kind == "sym" and t.text == "(":
                    depth += 1
                if t.kind == "sym" and t.text == ")":
                    depth -= 1
        self.expect("ident", "in")
        th = self.theory_ref()
        end = self.i
        self.i = save
        if self.eat("sym", "("):
            k = 0
            while not self.at("sym", ")"):
                if k >= len(sig):
                    raise self.fail(f"{lemma} takes at most {len(sig)} arguments")
                kind = _LEMMA_ARG_KIND[sig[k]]
                if kind == "name":
                    args.append(self.expect("ident").text)
                elif kind == "type":
                    args.append(self.type_expr())
                else:
                    args.append(self.term_expr(th))
                k += 1
                if not self.eat("sym", ","):
                    break
            self.expect("sym", ")")
        need = len(sig) - _LEMMA_OPTIONAL.get(lemma, 0)
        if len(args) < need:
            raise self.fail(f"{lemma} needs {need} argument(s)")
        self.i = end
        return LemmaCmd(lemma, tuple(args), th, pos)

    def eval_input(self) -> tuple[str, Union[int, tuple[str, int]]]:
        if self.at("int"):
            return "val", int(self.next().text)
        if self.eat("ident", "throw"):
            self.expect("sym", "(")
            idx = self.expect("ident").text
            self.expect("sym", ":")
            arg = int(self.expect("int").text)
            self.expect("sym", ")")
            return "exc", (idx, arg)
        if self.eat("sym", "("):
            # a type-annotated ordinary input: (i: 3) is the value 3
            self.expect("ident")
            self.expect("sym", ":")
            v = int(self.expect("int").text)
            self.expect("sym", ")")
            return "val", v
        raise self.fail("expected an input: INT, (i: INT), or throw(i: INT)")

    def int_tuple(self) -> tuple[int, ...]:
        self.expect("sym", "(")
        vals = [int(self.expect("int").text)]
        while self.eat("sym", ","):
            vals.append(int(self.expect("int").text))
        self.expect("sym", ")")
        return tuple(vals)

    def script(self) -> Script:
        decls = []
        while not self.at("eof"):
            decls.append(self.decl())
        return Script(tuple(decls))


def parse_script(text: str) -> Script:
    """Parse script text; positions are kept on declarations for errors."""
    return _Parser(text).script()


# ---------------------------------------------------------------- printer

def _type_text(ty: TypeExpr) -> str:
    return str(ty)


def _inst_text(rule: str, key: str, value: Any) -> str:
    kind = _inst_kind(rule, key)
    if kind == "family":
        inner = ", ".join(f"{i}: {term_to_text(t)}" for i, t in value)
        return f"({inner})"
    if kind == "type":
        return _type_text(value)
    return str(value) if kind in ("name", "int") else term_to_text(value)


def _eq_text(eq: Equation) -> str:
    op = "==" if eq.kind == STRONG else "~~"
    return f"{term_to_text(eq.lhs)} {op} {term_to_text(eq.rhs)}"


def _step_text(step: ProofStep) -> str:
    if step.kind == "axiom":
        head = f"axiom({step.name})"
    elif step.kind == "gen":
        head = f"gen({step.name})"
    elif step.kind == "hyp":
        if isinstance(step.claim, Equation):
            head = f"hyp({step.name}) holds {_eq_text(step.claim)}"
        else:
            t, lvl = step.claim
            head = f"hyp({step.name}) wf {term_to_text(t)} level {lvl}"
    else:
        args = ", ".join(f"{k}={_inst_text(step.name, k, v)}"
                         for k, v in step.inst)
        head = f"{step.name}({args})" if step.inst else step.name
    out = f"  {step.label}: {head}"
    if step.premises:
        out += " from " + ", ".join(step.premises)
    return out + ";"


def _sized_text(indices: Sequence[tuple[str, int]]) -> str:
    return "(" + ", ".join(f"{i}: {n}" for i, n in indices) + ")"


def _decl_text(d: Decl) -> str:
    if isinstance(d, TheoryDecl):
        if d.kind == "dual":
            return f"theory {d.name} = dual({d.source})"
        suffix = " with catchall" if d.catch_all else ""
        return f"theory {d.name} = {d.kind}{_sized_text(d.indices)}{suffix}"
    if isinstance(d, GenDecl):
        out = (f"{d.level_kw} gen {d.name} : {_type_text(d.dom)} -> "
               f"{_type_text(d.cod)} in {d.theory}")
        if d.table is not None:
            out += " = [" + ", ".join(str(v) for v in d.table) + "]"
        return out
    if isinstance(d, TermDecl):
        return f"term {d.name} in {d.theory} = {term_to_text(d.term)}"
    if isinstance(d, EquationDecl):
        return f"equation {d.name} in {d.theory} : {_eq_text(d.eq)}"
    if isinstance(d, ModelDecl):
        return f"model {d.name} for {d.theory} {_sized_text(d.sizes)}"
    if isinstance(d, ProofDecl):
        lines = [f"proof {d.name} in {d.theory} {{"]
        lines += [_step_text(s) for s in d.steps]
        lines.append("}")
        return "\n".join(lines)
    if isinstance(d, CheckProofCmd):
        return f"check proof {d.proof} in {d.theory}"
    if isinstance(d, VerifyCmd):
        out = f"verify {d.suite} in {d.theory}"
        if d.model:
            out += f" with {d.model}"
        return out
    if isinstance(d, LemmaCmd):
        parts = []
        sig = _STATE_LEMMA_SIG.get(d.lemma) or _EXC_LEMMA_SIG[d.lemma]
        for k, v in zip(sig, d.args):
            kind = _LEMMA_ARG_KIND[k]
            if kind == "name":
                parts.append(v)
            elif kind == "type":
                parts.append(_type_text(v))
            else:
                parts.append(term_to_text(v))
        args = f"({', '.join(parts)})" if parts else ""
        return f"lemma {d.lemma}{args} in {d.theory}"
    if isinstance(d, EvalCmd):
        if d.input_kind == "exc":
            name, arg = d.value
            inp = f"throw({name}: {arg})"
        else:
            inp = str(d.value)
        out = f"eval in {d.theory} : {term_to_text(d.term)} on {inp}"
        if d.state is not None:
            out += " state (" + ", ".join(str(v) for v in d.state) + ")"
        return out
    if isinstance(d, ProveCmd):
        out = f"prove in {d.theory} : {_eq_text(d.eq)}"
        if d.budget is not None:
            out += f" budget {d.budget}"
        return out
    if isinstance(d, TranslateCmd):
        return f"{d.op} {d.theory}"
    raise TypeError(f"not a declaration: {d!r}")


def print_script(script: Script) -> str:
    """Render a Script; parse_script inverts this exactly."""
    return "\n".join(_decl_text(d) for d in script.decls) + "\n"


# ------------------------------------------------- derivations as scripts

def derivation_to_proof(name: str, theory: str, d: Derivation) -> str:
    """Serialize a derivation as a proof block; shared subtrees get one label."""
    labels: dict[Derivation, str] = {}
    steps: list[ProofStep] = []

    def walk(n: Derivation) -> str:
        if n in labels:
            return labels[n]
        prem = tuple(walk(p) for p in n.premises)
        label = f"s{len(labels) + 1}"
        labels[n] = label
        if isinstance(n.rule, tuple):
            tag, nm = n.rule
            if tag == "hyp":
                concl = n.conclusion
                claim = (concl.eq if isinstance(concl, Holds)
                         else (concl.term, concl.level))
                steps.append(ProofStep(label, "hyp", nm, (), (), claim))
            else:
                steps.append(ProofStep(label, tag, nm))
        else:
            steps.append(ProofStep(label, "rule", n.rule, n.inst, prem))
        return label

    walk(d)
    block = ProofDecl(name, theory, tuple(steps))
    return _decl_text(block) + "\n"


def build_proof(theory: Theory, decl: ProofDecl) -> Derivation:
    """Fold a parsed proof block into a kernel derivation (the last step)."""
    by_label: dict[str, Derivation] = {}
    for step in decl.steps:
        if step.kind == "axiom":
            out = axiom_node(theory, step.name)
        elif step.kind == "gen":
            out = gen_node(theory, step.name)
        elif step.kind == "hyp":
            if isinstance(step.claim, Equation):
                j: Judgment = Holds(step.claim)
            else:
                t, lvl = step.claim
                j = WellFormed(t, lvl)
            out = hyp_node(theory, step.name, j)
        else:
            prem = [by_label[p] for p in step.premises]
            out = node(theory, step.name, prem, **dict(step.inst))
        by_label[step.label] = out
    return by_label[decl.steps[-1].label]


def derivation_json(d: Derivation) -> dict:
    """A nested-tree view of a derivation, for reports."""
    if isinstance(d.rule, tuple):
        rule = f"{d.rule[0]}({d.rule[1]})"
    else:
        rule = d.rule
    return {
        "rule": rule,
        "inst": {k: _inst_text(d.rule if isinstance(d.rule, str) else "",
                               k, v) for k, v in d.inst},
        "conclusion": str(d.conclusion),
        "premises": [derivation_json(p) for p in d.premises],
    }


def derivation_tree_lines(d: Derivation, indent: int = 0) -> list[str]:
    """Indented rule-tree rendering for text reports."""
    if isinstance(d.rule, tuple):
        head = f"{d.rule[0]}({d.rule[1]})"
    else:
        head = d.rule
        if d.inst:
            args = ", ".join(f"{k}={_inst_text(d.rule, k, v)}"
                             for k, v in d.inst)
            head += f"({args})"
    lines = [f"{'  ' * indent}{head}  |-  {d.conclusion}"]
    for p in d.premises:
        lines += derivation_tree_lines(p, indent + 1)
    return lines


# --------------------------------------------------------------- executor

@dataclass(frozen=True)
class ExecConfig:
    mode: Optional[str] = None  # CLI subcommand filter; None runs everything
    model_overrides: Mapping[str, int] = field(default_factory=dict)
    budget: Optional[int] = None
    fail_fast: bool = False


@dataclass(frozen=True)
class Outcome:
    kind: str
    target: str
    ok: bool
    detail: Mapping[str, Any]
    elapsed_ms: float  # text reports only; JSON stays byte-stable


@dataclass(frozen=True)
class Report:
    outcomes: tuple[Outcome, ...]

    @property
    def ok(self) -> bool:
        return all(o.ok for o in self.outcomes)


_MODE_RUNS = {
    "check": (CheckProofCmd, ProveCmd),
    "verify": (VerifyCmd, LemmaCmd),
    "eval": (EvalCmd,),
    "erase": (TranslateCmd,),
    "expand": (TranslateCmd,),
    "dualize": (TranslateCmd,),
}


class _Env:
    def __init__(self, config: ExecConfig):
        self.config = config
        self.theories: dict[str, Theory] = {}
        self.sizes: dict[str, dict[str, int]] = {}
        self.tables: dict[str, dict[str, tuple[int, ...]]] = {}
        self.equations: dict[str, tuple[str, Equation]] = {}
        self.proofs: dict[str, ProofDecl] = {}
        self.models: dict[str, tuple[str, dict[str, int]]] = {}

    def theory(self, name: str, pos: SrcPos) -> Theory:
        if name not in self.theories:
            raise E.ExecError(f"unknown theory {name!r}", pos.line, pos.col)
        return self.theories[name]

    def model_for(self, theory_name: str, model_name: Optional[str],
                  pos: SrcPos):
        th = self.theory(theory_name, pos)
        if model_name is not None:
            if model_name not in self.models:
                raise E.ExecError(f"unknown model {model_name!r}",
                                  pos.line, pos.col)
            mth, sizes = self.models[model_name]
            if mth != theory_name:
                raise E.ExecError(
                    f"model {model_name!r} is for theory {mth!r}",
                    pos.line, pos.col)
            sizes = dict(sizes)
        else:
            sizes = dict(self.sizes.get(theory_name, {}))
        for k, v in self.config.model_overrides.items():
            if k in sizes:
                sizes[k] = v
        val = Valuation(tables=dict(self.tables.get(theory_name, {})))
        if th.flavor == "states":
            return FiniteStateModel(th, sizes, val)
        if th.flavor == "exceptions":
            return FiniteExceptionModel(th, sizes, val)
        raise E.ExecError(f"theory {theory_name!r} has no model flavor",
                          pos.line, pos.col)


def _declare_theory(env: _Env, d: TheoryDecl) -> None:
    if d.kind == "dual":
        src = env.theories[d.source]
        built = replace(dualize_theory(src), name=d.name)
        env.sizes[d.name] = dict(env.sizes.get(d.source, {}))
        env.tables[d.name] = dict(env.tables.get(d.source, {}))
    else:
        names = [i for i, _ in d.indices]
        if d.kind in ("states", "plain-states"):
            built = build_states_theory(d.name, names)
        else:
            built = build_exceptions_theory(d.name, names)
            if d.catch_all:
                built = with_catch_all(built)
        if d.kind.startswith("plain-"):
            built = replace(erase_theory(built), name=d.name)
        env.sizes[d.name] = dict(d.indices)
        env.tables[d.name] = {}
    env.theories[d.name] = built


def _lemma_params(cmd: LemmaCmd) -> dict[str, Any]:
    sig = _STATE_LEMMA_SIG.get(cmd.lemma) or _EXC_LEMMA_SIG[cmd.lemma]
    return dict(zip(sig, cmd.args))


def _builtin_derivation(th: Theory, name: str) -> Derivation:
    """Resolve a named proof that ships with the library."""
    if th.flavor == "states":
        if name in ("pr1", "pr2", "pr3", "pr4", "pr5", "pr6", "pr7", "pr8"):
            return _states_builtin(th, name)
        if name in STATE_LEMMAS:
            return _states_lemma(th, name, _default_lemma_params(th, name))
    if th.flavor == "exceptions":
        if name in ("bridge-r", "bridge-l"):
            return _exc_builtin(th, name)
        if name in EXC_LEMMAS:
            return _exc_lemma(th, name, _default_lemma_params(th, name))
    raise E.UnknownLemma(f"no built-in proof {name!r} for theory {th.name!r}")


def _default_lemma_params(th: Theory, name: str) -> dict[str, Any]:
    if th.flavor == "states":
        i = th.locations[0]
        j = th.locations[1] if len(th.locations) > 1 else i
        if name == "final-uniqueness":
            return {"f": Comp(ToUnit(Value(i)), Lookup(i))}
        return {"i": i, "j": j}
    i = th.constructors[0]
    j = th.constructors[1] if len(th.constructors) > 1 else i
    if name == "initial-uniqueness":
        return {"f": FromEmpty(Param(i))}
    return {"i": i, "j": j}


def _law_rows(results) -> list[dict]:
    return [{"name": r.name, "status": r.status,
             "witness": _jsonable(r.witness), "points": r.points}
            for r in results]


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if v is None or isinstance(v, (bool, int, float, str)):
        return v
    return str(v)


def _theory_json(th: Theory, sizes: Mapping[str, int]) -> dict:
    out: dict[str, Any] = {"name": th.name, "flavor": th.flavor}
    if th.locations:
        out["locations"] = [{"name": i, "size": sizes.get(i)}
                            for i in th.locations]
    if th.constructors:
        out["constructors"] = [{"name": i, "size": sizes.get(i)}
                               for i in th.constructors]
    out["axioms"] = [{"name": a.name,
                      "lhs": term_to_text(a.eq.lhs),
                      "rhs": term_to_text(a.eq.rhs),
                      "kind": "strong" if a.eq.kind == STRONG else "weak"}
                     for a in th.axioms]
    if th.gens:
        out["gens"] = [{"name": g.name, "dom": str(g.dom),
                        "cod": str(g.cod), "level": g.dec} for g in th.gens]
    return out


def _run_check(env: _Env, cmd: CheckProofCmd) -> Outcome:
    th = env.theory(cmd.theory, cmd.pos)
    target = f"check proof {cmd.proof} in {cmd.theory}"
    try:
        if cmd.proof in env.proofs:
            decl = env.proofs[cmd.proof]
            if decl.theory != cmd.theory:
                raise E.ExecError(f"proof {cmd.proof!r} is in theory "
                                  f"{decl.theory!r}", cmd.pos.line, cmd.pos.col)
            d = build_proof(th, decl)
        else:
            d = _builtin_derivation(th, cmd.proof)
    except E.ScriptError:
        raise
    except E.DecorError as exc:
        return Outcome("check", target, False, {"error": str(exc)}, 0.0)
    res = check_derivation(th, d)
    detail: dict[str, Any] = {"valid": res.valid, "nodes": res.nodes,
                              "conclusion": str(d.conclusion)}
    if res.error:
        detail["error"] = res.error
    if res.hypotheses:
        detail["hypotheses"] = list(res.hypotheses)
    detail["tree"] = derivation_json(d)
    return Outcome("check", target, res.valid, detail, 0.0)


def _run_verify(env: _Env, cmd: VerifyCmd) -> Outcome:
    target = f"verify {cmd.suite} in {cmd.theory}"
    try:
        model = env.model_for(cmd.theory, cmd.model, cmd.pos)
        rep = verify_law_suite(model, cmd.suite)
    except E.ScriptError:
        raise
    except E.DecorError as exc:
        return Outcome("verify", target, False, {"error": str(exc)}, 0.0)
    detail = {"suite": cmd.suite, "model": model.describe(),
              "laws": _law_rows(rep.results),
              "holds": sum(r.holds for r in rep.results),
              "total": len(rep.results)}
    return Outcome("verify", target, rep.ok, detail, 0.0)


def _run_lemma(env: _Env, cmd: LemmaCmd) -> Outcome:
    th = env.theory(cmd.theory, cmd.pos)
    target = f"lemma {cmd.lemma} in {cmd.theory}"
    params = _lemma_params(cmd)
    try:
        if th.flavor == "states":
            d = _states_lemma(th, cmd.lemma, params)
        elif th.flavor == "exceptions":
            d = _exc_lemma(th, cmd.lemma, params)
        else:
            raise E.ExecError("lemmas need a states or exceptions theory",
                              cmd.pos.line, cmd.pos.col)
    except E.ScriptError:
        raise
    except E.DecorError as exc:
        return Outcome("lemma", target, False, {"error": str(exc)}, 0.0)
    res = check_derivation(th, d)
    detail = {"valid": res.valid, "nodes": res.nodes,
              "conclusion": str(d.conclusion)}
    if res.error:
        detail["error"] = res.error
    return Outcome("lemma", target, res.valid, detail, 0.0)


def _decode_input(model, dom_ty: TypeExpr, n: int, pos: SrcPos) -> Any:
    """An integer input names a carrier element by enumeration position."""
    car = model.carrier(dom_ty)
    if not 0 <= n < len(car):
        raise E.ExecError(f"input {n} is out of range for {dom_ty} "
                          f"({len(car)} elements)", pos.line, pos.col)
    return car[n]


def _run_eval(env: _Env, cmd: EvalCmd) -> Outcome:
    th = env.theory(cmd.theory, cmd.pos)
    target = f"eval in {cmd.theory}"
    try:
        model = env.model_for(cmd.theory, None, cmd.pos)
        dom_ty, _ = typecheck(th, cmd.term)
        if th.flavor == "states":
            if cmd.input_kind != "val":
                raise E.ExecError("states terms take ordinary inputs, "
                                  "not throw(..)", cmd.pos.line, cmd.pos.col)
            state = cmd.state
            if state is None:
                state = tuple(0 for _ in th.locations)
            if len(state) != len(th.locations):
                raise E.ExecError(f"state needs {len(th.locations)} entries",
                                  cmd.pos.line, cmd.pos.col)
            value = _decode_input(model, dom_ty, cmd.value, cmd.pos)
            out_val, out_state = eval_states(model, cmd.term, value, state)
            detail = {"term": term_to_text(cmd.term),
                      "input": _jsonable(value), "state": list(state),
                      "result": _jsonable(out_val),
                      "result_state": list(out_state)}
        else:
            if cmd.state is not None:
                raise E.ExecError("exceptions terms have no state",
                                  cmd.pos.line, cmd.pos.col)
            if cmd.input_kind == "val":
                inp = ("val", _decode_input(model, dom_ty, cmd.value, cmd.pos))
            else:
                inp = ("exc", tuple(cmd.value))
            res = eval_exceptions(model, cmd.term, inp)
            detail = {"term": term_to_text(cmd.term),
                      "input": _jsonable(inp), "result": _jsonable(res)}
    except E.ScriptError:
        raise
    except E.DecorError as exc:
        return Outcome("eval", target, False, {"error": str(exc)}, 0.0)
    return Outcome("eval", target, True, detail, 0.0)


def _run_prove(env: _Env, cmd: ProveCmd) -> Outcome:
    th = env.theory(cmd.theory, cmd.pos)
    target = f"prove in {cmd.theory}: {_eq_text(cmd.eq)}"
    budget = cmd.budget or env.config.budget or 4
    try:
        res = saturate_prove(th, cmd.eq, budget=budget)
    except E.ScriptError:
        raise
    except E.DecorError as exc:
        return Outcome("prove", target, False, {"error": str(exc)}, 0.0)
    detail = {"status": res.status, "rounds": res.rounds,
              "facts": res.facts, "reason": res.reason, "budget": budget}
    if res.derivation is not None:
        detail["nodes"] = check_derivation(th, res.derivation).nodes
        detail["tree"] = derivation_json(res.derivation)
    return Outcome("prove", target, res.proven, detail, 0.0)


def _run_translate(env: _Env, cmd: TranslateCmd) -> Outcome:
    th = env.theory(cmd.theory, cmd.pos)
    sizes = env.sizes.get(cmd.theory, {})
    target = f"{cmd.op} {cmd.theory}"
    try:
        if cmd.op == "erase":
            out = erase_theory(th)
            kind = ("plain-states" if out.locations else "plain-exceptions")
            idx = out.locations or out.constructors
            decl = (f"theory {out.name} = {kind}"
                    f"{_sized_text([(i, sizes.get(i)) for i in idx])}")
            detail = {"dsl": decl, "theory": _theory_json(out, sizes)}
        elif cmd.op == "dualize":
            out = dualize_theory(th)
            kind = "states" if out.flavor == "states" else "exceptions"
            idx = out.locations or out.constructors
            decl = (f"theory {out.name} = {kind}"
                    f"{_sized_text([(i, sizes.get(i)) for i in idx])}")
            detail = {"dsl": decl, "theory": _theory_json(out, sizes)}
        else:
            rows = []
            for ax in th.axioms:
                if th.flavor == "states":
                    l, r = expand_states_equation(th, ax.eq)
                elif th.flavor == "exceptions":
                    l, r = expand_exceptions_equation(th, ax.eq)
                else:
                    raise E.ExecError("expand needs a states or exceptions "
                                      "theory", cmd.pos.line, cmd.pos.col)
                rows.append({"axiom": ax.name, "lhs": str(l), "rhs": str(r),
                             "collapses": l == r})
            detail = {"axioms": rows}
    except E.ScriptError:
        raise
    except E.DecorError as exc:
        return Outcome(cmd.op, target, False, {"error": str(exc)}, 0.0)
    return Outcome(cmd.op, target, True, detail, 0.0)


def execute(script: Script, config: Optional[ExecConfig] = None) -> Report:
    """Process declarations in order and run the (mode-filtered) commands.

    Declaration problems (bad names, ill-typed terms) raise ScriptError;
    command failures are recorded in the report instead.
    """
    config = config or ExecConfig()
    env = _Env(config)
    runs = _MODE_RUNS.get(config.mode) if config.mode else None
    outcomes: list[Outcome] = []

    for d in script.decls:
        if isinstance(d, TheoryDecl):
            try:
                _declare_theory(env, d)
            except E.ScriptError:
                raise
            except E.DecorError as exc:
                raise E.ExecError(str(exc), d.pos.line, d.pos.col)
            continue
        if isinstance(d, GenDecl):
            th = env.theory(d.theory, d.pos)
            g = Gen(d.name, d.dom, d.cod, d.level)
            try:
                env.theories[d.theory] = th.with_gen(g)
                typecheck(env.theories[d.theory], g)
            except E.DecorError as exc:
                raise E.ExecError(str(exc), d.pos.line, d.pos.col)
            if d.table is not None:
                env.tables[d.theory][d.name] = d.table
            continue
        if isinstance(d, TermDecl):
            try:
                typecheck(env.theory(d.theory, d.pos), d.term)
            except E.DecorError as exc:
                raise E.ExecError(str(exc), d.pos.line, d.pos.col)
            continue
        if isinstance(d, EquationDecl):
            try:
                typecheck_equation(env.theory(d.theory, d.pos), d.eq)
            except E.DecorError as exc:
                raise E.ExecError(str(exc), d.pos.line, d.pos.col)
            env.equations[d.name] = (d.theory, d.eq)
            continue
        if isinstance(d, ModelDecl):
            env.theory(d.theory, d.pos)
            env.models[d.name] = (d.theory, dict(d.sizes))
            continue
        if isinstance(d, ProofDecl):
            env.theory(d.theory, d.pos)
            env.proofs[d.name] = d
            continue
        # commands
        if runs is not None and not isinstance(d, runs):
            continue
        if isinstance(d, TranslateCmd) and config.mode and d.op != config.mode:
            continue
        t0 = time.perf_counter()
        if isinstance(d, CheckProofCmd):
            out = _run_check(env, d)
        elif isinstance(d, VerifyCmd):
            out = _run_verify(env, d)
        elif isinstance(d, LemmaCmd):
            out = _run_lemma(env, d)
        elif isinstance(d, EvalCmd):
            out = _run_eval(env, d)
        elif isinstance(d, ProveCmd):
            out = _run_prove(env, d)
        else:
            out = _run_translate(env, d)
        elapsed = (time.perf_counter() - t0) * 1000.0
        outcomes.append(Outcome(out.kind, out.target, out.ok, out.detail,
                                elapsed))
        if config.fail_fast and not out.ok:
            break
    return Report(tuple(outcomes))


# ---------------------------------------------------------------- reports

def report_json(report: Report) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "ok": report.ok,
        "commands": [{"kind": o.kind, "target": o.target, "ok": o.ok,
                      "detail": _jsonable(o.detail)}
                     for o in report.outcomes],
    }


def _witness_text(w: Optional[dict]) -> str:
    if not w:
        return ""
    inner = ", ".join(f"{k}={v}" for k, v in w.items())
    return f"  [{inner}]"


def _outcome_text(o: Outcome) -> list[str]:
    mark = "ok  " if o.ok else "FAIL"
    lines = [f"{mark}  {o.target}  ({o.elapsed_ms:.1f} ms)"]
    if "error" in o.detail:
        lines.append(f"      {o.detail['error']}")
    if o.kind == "verify":
        for row in o.detail.get("laws", []):
            lines.append(f"      {row['status']:<6} {row['name']}"
                         f"{_witness_text(row.get('witness'))}")
    if o.kind == "eval" and o.ok:
        if "result_state" in o.detail:
            lines.append(f"      result {o.detail['result']} "
                         f"state {tuple(o.detail['result_state'])}")
        else:
            lines.append(f"      result {o.detail['result']}")
    if o.kind == "prove":
        lines.append(f"      status {o.detail.get('status')} "
                     f"rounds {o.detail.get('rounds')} "
                     f"facts {o.detail.get('facts')}")
    if o.kind in ("erase", "dualize") and "dsl" in o.detail:
        lines.append(f"      {o.detail['dsl']}")
    if o.kind == "expand":
        for row in o.detail.get("axioms", []):
            op = "==" if row["collapses"] else "=?="
            lines.append(f"      {row['axiom']}: {row['lhs']} {op} {row['rhs']}")
    return lines


def emit_report(report: Report, format: str = "text",
                trees: bool = True) -> bytes:
    """Render a report; JSON output is byte-identical for equal inputs."""
    if format == "json":
        text = json.dumps(report_json(report), indent=2, sort_keys=True)
        return (text + "\n").encode("utf-8")
    if format != "text":
        raise ValueError(f"unknown format {format!r}")
    lines: list[str] = []
    for o in report.outcomes:
        lines += _outcome_text(o)
        if trees and "tree" in o.detail:
            lines += _tree_text(o.detail["tree"], 3)
    lines.append("all commands succeeded" if report.ok
                 else "some commands failed")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _tree_text(tree: dict, indent: int) -> list[str]:
    pad = "  " * indent
    inst = tree.get("inst") or {}
    args = ", ".join(f"{k}={v}" for k, v in inst.items())
    head = tree["rule"] + (f"({args})" if args else "")
    lines = [f"{pad}{head}  |-  {tree['conclusion']}"]
    for p in tree["premises"]:
        lines += _tree_text(p, indent + 1)
    return lines
