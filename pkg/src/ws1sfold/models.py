"""Definitions, extended definitions and model computations."""

from __future__ import annotations

import itertools
from typing import Iterable

from .natset import LEQ, MEM, NAT, SET
from .program import Program, StratificationError
from .terms import (
    Atom,
    Clause,
    Var,
    decode_nat,
    decode_set,
    instance_of,
    nat_term,
    set_term,
    subst_atom,
    term_vars,
)


def _key(pred) -> tuple[str, int]:
    return pred if isinstance(pred, tuple) else (pred, 0)


def def_of(pred, p: Program) -> Program:
    """Clauses of ``p`` defining ``pred`` (a name for nullary, or a (name, arity) key)."""
    k = _key(pred)
    return Program(tuple(c for c in p if c.head.key == k), check_strata=False)


def depends_closure(keys: Iterable[tuple[str, int]], p: Program) -> list[tuple[str, int]]:
    seen = list(dict.fromkeys(keys))
    i = 0
    while i < len(seen):
        for c in p.definition(seen[i]):
            for l in c.body:
                if l.atom.key not in seen:
                    seen.append(l.atom.key)
        i += 1
    return seen


def ext_def_of(pred, p: Program) -> Program:
    """Def* closure through positive and negative dependencies, in program order."""
    keys = set(depends_closure([_key(pred)], p))
    return Program(tuple(c for c in p if c.head.key in keys), check_strata=False)


def is_propositional(p: Program) -> bool:
    return all(not c.head.args and all(not l.atom.args for l in c.body) for c in p)


def propositional_perfect_model(p: Program) -> frozenset[str]:
    if not is_propositional(p):
        raise ValueError("program is not propositional")
    strata = p.strata
    if strata is None:
        raise StratificationError("program is not stratified")
    model: set[str] = set()
    for level in sorted(set(strata.values())):
        layer = [c for c in p if strata[c.head.key] == level]
        changed = True
        while changed:
            changed = False
            for c in layer:
                if c.head.pred in model:
                    continue
                if all((l.atom.pred in model) == l.positive for l in c.body):
                    model.add(c.head.pred)
                    changed = True
    return frozenset(model)


def nonempty_predicates(p: Program) -> set[tuple[str, int]]:
    """Predicates with a nonempty least model, for definite programs whose
    clauses are regular (every body-atom tuple extends to a ground head)."""
    live: set[tuple[str, int]] = set()
    changed = True
    while changed:
        changed = False
        for c in p:
            if c.head.key not in live and all(l.atom.key in live for l in c.body):
                live.add(c.head.key)
                changed = True
    return live


def prune_useless(p: Program) -> Program:
    """Drop clauses with a positive body atom whose predicate has no facts at all."""
    live = nonempty_predicates(p)
    return Program(
        tuple(c for c in p if all(l.atom.key in live for l in c.body if l.positive)),
        check_strata=p.check_strata,
    )


# -- bounded evaluation of natset-typed hierarchies ---------------------------------

class BoundedEvaluator:
    """Top-down evaluation of a stratified program made of natset-typed definitions.

    Non-head variables range over naturals <= ``bound`` and subsets of
    ``{0..bound}`` according to their type atoms; NatSet predicates are
    computed arithmetically.  Predicates with several clauses are allowed
    as long as each clause is a natset-typed definition.
    """

    def __init__(self, p: Program, bound: int):
        self.p = p
        self.bound = bound
        self.memo: dict[Atom, bool] = {}
        self.nat_dom = [nat_term(k) for k in range(bound + 1)]
        self.set_dom = [
            set_term(m)
            for r in range(bound + 2)
            for m in itertools.combinations(range(bound + 1), r)
        ]

    def holds(self, a: Atom) -> bool:
        if a.pred in (NAT, SET, LEQ, MEM) and not self.p.definition(a.key):
            return _natset_truth(a)
        hit = self.memo.get(a)
        if hit is None:
            hit = any(self._clause_holds(c, a) for c in self.p.definition(a.key))
            self.memo[a] = hit
        return hit

    def _clause_holds(self, c: Clause, a: Atom) -> bool:
        theta = instance_of(Atom(c.head.pred, c.head.args), a)
        if theta is None:
            return False
        sorts: dict[str, str] = {}
        for l in c.body:
            if l.positive and l.atom.pred in (NAT, SET) and type(l.atom.args[0]) is Var:
                sorts.setdefault(l.atom.args[0].name, l.atom.pred)
        free = [v for v in dict.fromkeys(v for l in c.body for t in l.atom.args for v in term_vars(t)) if v not in theta]
        missing = [v for v in free if v not in sorts]
        if missing:
            raise ValueError(f"untyped variables {missing} in {c}")
        doms = [self.nat_dom if sorts[v] == NAT else self.set_dom for v in free]
        body = c.body
        for values in itertools.product(*doms):
            s = dict(theta)
            s.update(zip(free, values))
            if all(self.holds(subst_atom(l.atom, s)) == l.positive for l in body):
                return True
        return False


def _natset_truth(a: Atom) -> bool:
    args = a.args
    if a.pred == NAT:
        return decode_nat(args[0]) is not None
    if a.pred == SET:
        return decode_set(args[0]) is not None
    if a.pred == LEQ:
        x, y = decode_nat(args[0]), decode_nat(args[1])
        return x is not None and y is not None and x <= y
    if a.pred == MEM:
        x, s = decode_nat(args[0]), decode_set(args[1])
        return x is not None and s is not None and x in s
    raise ValueError(a.pred)

