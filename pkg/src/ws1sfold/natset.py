"""The NatSet base program and the syntactic classes built on top of it."""

from __future__ import annotations

from collections import Counter
from functools import lru_cache

from .program import Program
from .progtext import parse_clauses
from .terms import CONS, NIL, NO, YES, ZERO, Atom, Clause, Fn, Literal, Term, Var, atom_vars, term_vars

NAT, SET, LEQ, MEM = "nat", "set", "leq", "mem"
TYPE_PREDS = frozenset({NAT, SET})
RESERVED = frozenset({NAT, SET, LEQ, MEM})

_NATSET_TEXT = """\
nat(0).
nat(s(N)) :- nat(N).
set([]).
set([y|S]) :- set(S).
set([n|S]) :- set(S).
leq(0,N).
leq(s(N1),s(N2)) :- leq(N1,N2).
mem(0,[y|S]).
mem(s(N),[B|S]) :- mem(N,S).
"""


@lru_cache(maxsize=None)
def natset_program() -> Program:
    clauses = [c.with_id(None, "natset") for c in parse_clauses(_NATSET_TEXT)]
    return Program(tuple(clauses))


def is_type_atom(a: Atom) -> bool:
    return a.pred in TYPE_PREDS and len(a.args) == 1 and type(a.args[0]) is Var


# -- regular natset-typed programs ---------------------------------------------------

def _head_term_vars(t: Term) -> tuple[list[str], list[str]] | None:
    """Split a head term's variables into (recursion vars, dead vars).

    Dead vars must not reach the body: a bare variable argument, or the
    element slot of ``[B|S]``.
    """
    if type(t) is Var:
        return [], [t.name]
    if t == ZERO or t == NIL:
        return [], []
    if t.functor == "s" and type(t.args[0]) is Var:
        return [t.args[0].name], []
    if t.functor == CONS and type(t.args[1]) is Var:
        bit = t.args[0]
        if bit == YES or bit == NO:
            return [t.args[1].name], []
        if type(bit) is Var:
            return [t.args[1].name], [bit.name]
    return None


def is_linear(a: Atom) -> bool:
    vs = list(atom_vars(a))
    return len(vs) == len(set(vs))


def is_regular_clause(c: Clause) -> bool:
    if not is_linear(c.head):
        return False
    live, dead = [], []
    for t in c.head.args:
        split = _head_term_vars(t)
        if split is None:
            return False
        live += split[0]
        dead += split[1]
    if not c.body:
        return True
    if len(c.body) != 1 or not c.body[0].positive:
        return False
    b = c.body[0].atom
    if not all(type(t) is Var for t in b.args) or not is_linear(b):
        return False
    return all(t.name in live for t in b.args)


def is_regular_natset(p: Program) -> bool:
    return all(is_regular_clause(c) for c in p)


# -- natset-typed definitions -----------------------------------------------------

def _is_individual_term(t: Term) -> bool:
    while type(t) is Fn and t.functor == "s":
        t = t.args[0]
    return type(t) is Var or t == ZERO


def is_natset_typed_definition(c: Clause) -> bool:
    head = c.head.args
    if not all(type(t) is Var for t in head) or len({t.name for t in head}) != len(head):
        return False
    nat_vars, set_vars = set(), set()
    for lit in c.body:
        a = lit.atom
        if lit.positive and is_type_atom(a):
            (nat_vars if a.pred == NAT else set_vars).add(a.args[0].name)
    if nat_vars & set_vars:
        return False
    for lit in c.body:
        for t in lit.atom.args:
            if not _is_individual_term(t):
                return False
            if type(t) is Fn and any(v in set_vars for v in term_vars(t)):
                return False
    typed = nat_vars | set_vars
    return all(v in typed for v in c.variables())


# -- heights ----------------------------------------------------------------------

def _height(t: Term) -> int:
    if type(t) is Var or not t.args:
        return 0
    return 1 + max(_height(a) for a in t.args)


def literal_height(l: Literal | Atom) -> int:
    a = l.atom if isinstance(l, Literal) else l
    if not a.args:
        return 0
    return 1 + max(_height(t) for t in a.args)


def predicate_counts(p: Program) -> Counter:
    return Counter(c.head.key for c in p)
