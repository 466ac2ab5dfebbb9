"""Typed Lloyd-Topor transformation from statements to natset-typed definitions."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .formula import (
    IND,
    And,
    Exists,
    Formula,
    In,
    ITerm,
    Leq,
    NameSupply,
    Not,
    Pred,
    SortedVar,
    Typed,
    TypedFormula,
    conjuncts,
    free_vars,
)
from .natset import LEQ, MEM, NAT, RESERVED, SET, is_natset_typed_definition
from .program import Program
from .terms import Atom, Clause, Literal, Term, Var, nat_term, succ


class LloydToporError(ValueError):
    pass


@dataclass(frozen=True)
class Hierarchy:
    defs: tuple[Clause, ...]
    main: str

    def program(self) -> Program:
        return Program(self.defs)

    def __str__(self) -> str:
        from .progtext import format_program

        return format_program(self.defs, main=self.main)


def check_hierarchy(h: Hierarchy | Sequence[Clause]) -> bool:
    defs = h.defs if isinstance(h, Hierarchy) else tuple(h)
    seen: set[tuple[str, int]] = set()
    for d in defs:
        key = d.head.key
        if key in seen or any(l.atom.key == key for l in d.body):
            return False
        if not is_natset_typed_definition(d):
            return False
        seen.update(l.atom.key for l in d.body)
        seen.add(key)
    return not isinstance(h, Hierarchy) or not defs or defs[-1].head.pred == h.main


# -- rules A.1-A.4 over conjunct lists ------------------------------------------------

@dataclass
class _Stmt:
    name: str
    params: tuple[SortedVar, ...]
    body: list[Formula]


def _flatten(fs: Iterable[Formula]) -> list[Formula]:
    out: list[Formula] = []
    for f in fs:
        out.extend(conjuncts(f))
    return out


def _step(st: _Stmt, new_pred: Callable[[Formula, tuple[SortedVar, ...]], Pred]) -> bool:
    """Apply one rule at the leftmost reducible conjunct; False if none applies."""
    for i, g in enumerate(st.body):
        if isinstance(g, Not) and isinstance(g.arg, Not):  # A.1
            repl = conjuncts(g.arg.arg)
        elif isinstance(g, Not) and isinstance(g.arg, And):  # A.2
            repl = [Not(new_pred(g.arg, tuple(free_vars(g.arg))))]
        elif isinstance(g, Not) and isinstance(g.arg, Exists):  # A.3
            repl = [Not(new_pred(g.arg.body, tuple(free_vars(g.arg))))]
        elif isinstance(g, Exists):  # A.4; binders are already unique
            repl = conjuncts(g.body)
        else:
            continue
        st.body[i:i + 1] = repl
        return True
    return False


def lt_statements(
    name: str,
    params: Sequence[SortedVar],
    body: Formula,
    new_name: Callable[[], str],
) -> list[_Stmt]:
    """Run A.1-A.4 from ``name(params) <- body``; result in hierarchy order."""
    created: list[_Stmt] = []
    queue: deque[_Stmt] = deque()

    def new_pred(b: Formula, args: tuple[SortedVar, ...]) -> Pred:
        st = _Stmt(new_name(), args, _flatten([b]))
        queue.append(st)
        return Pred(st.name, tuple(ITerm(v) if v.sort == IND else v for v in args))

    queue.append(_Stmt(name, tuple(params), _flatten([body])))
    while queue:
        st = queue.popleft()
        while _step(st, new_pred):
            pass
        created.append(st)
    return created[::-1]


# -- step B and conversion to clauses ------------------------------------------------

class _VarNames:
    """Maps formula variables to clause variable names (capitalised, unique)."""

    def __init__(self, names: Iterable[str]):
        names = list(dict.fromkeys(names))
        keep = {n for n in names if n[0].isupper()}
        self.supply = NameSupply(keep)
        self.map: dict[str, str] = {n: n for n in keep}
        for n in names:
            if n not in self.map:
                base = n[0].upper() + n[1:].replace("'", "p") if n[0] != "_" else "V" + n
                self.map[n] = self.supply.fresh(base)

    def __call__(self, v: SortedVar) -> Var:
        return Var(self.map[v.name])


def _iterm(t: ITerm, names: _VarNames) -> Term:
    base: Term = nat_term(0) if t.var is None else names(t.var)
    for _ in range(t.k):
        base = succ(base)
    return base


def _arg(a, names: _VarNames) -> Term:
    return _iterm(a, names) if isinstance(a, ITerm) else names(a)


def _literal(f: Formula, names: _VarNames) -> Literal:
    positive = True
    if isinstance(f, Not):
        positive, f = False, f.arg
    if isinstance(f, Leq):
        a = Atom(LEQ, (_iterm(f.left, names), _iterm(f.right, names)))
    elif isinstance(f, In):
        a = Atom(MEM, (_iterm(f.elem, names), names(f.set)))
    elif isinstance(f, Typed):
        a = Atom(NAT if f.var.sort == IND else SET, (names(f.var),))
    elif isinstance(f, Pred):
        a = Atom(f.name, tuple(_arg(x, names) for x in f.args))
    else:
        raise LloydToporError(f"unexpected {type(f).__name__} in clause body")
    return Literal(positive, a)


def _body_vars(body: Sequence[Formula]) -> list[SortedVar]:
    out: list[SortedVar] = []
    for g in body:
        out.extend(free_vars(g))
    return list(dict.fromkeys(out))


def type_clause_body(params: Sequence[SortedVar], body: Sequence[Formula]) -> list[Formula]:
    """Step B: nat atoms then set atoms over head-then-body variable order."""
    order = list(dict.fromkeys([*params, *_body_vars(body)]))
    prefix = [Typed(v) for v in order if v.sort == IND] + [Typed(v) for v in order if v.sort != IND]
    rest = [g for g in body if not isinstance(g, Typed)]
    return prefix + rest


def _to_clause(st: _Stmt, names: _VarNames) -> Clause:
    head = Atom(st.name, tuple(names(v) for v in st.params))
    body = tuple(_literal(g, names) for g in type_clause_body(st.params, st.body))
    return Clause(head, body, None, "lt")


def default_new_names(used: Iterable[str] = ()) -> Callable[[], str]:
    taken = set(used) | RESERVED
    counter = itertools.count(1)

    def fresh() -> str:
        name = f"newp{next(counter)}"
        while name in taken:
            name = f"newp{next(counter)}"
        taken.add(name)
        return name

    return fresh


def _all_formula_names(stmts: Sequence[_Stmt]) -> list[str]:
    out = []
    for st in stmts:
        out.extend(v.name for v in st.params)
        out.extend(v.name for v in _body_vars(st.body))
    return out


def lt_transform(
    f: str,
    tf: TypedFormula,
    head_vars: Sequence[SortedVar] | None = None,
    new_name: Callable[[], str] | None = None,
) -> Hierarchy:
    """Cls(f, tf): the hierarchy of natset-typed definitions for ``f``.

    ``head_vars`` fixes the argument order of ``f`` (default: free-variable
    order); ``new_name`` supplies names for the auxiliary predicates.
    """
    if f in RESERVED:
        raise LloydToporError(f"predicate name {f!r} is reserved")
    params = tuple(v.var for v in tf.free_type_prefix)
    if head_vars is not None:
        head_vars = tuple(head_vars)
        if sorted(head_vars, key=str) != sorted(params, key=str) or len(set(head_vars)) != len(head_vars):
            raise LloydToporError("head variables must be a permutation of the free variables")
        params = head_vars
    if new_name is None:
        new_name = default_new_names([f, *_pred_names(tf.body)])
    stmts = lt_statements(f, params, tf.formula(), new_name)
    names = _VarNames(_all_formula_names(stmts))
    defs = tuple(_to_clause(st, names) for st in stmts)
    return Hierarchy(defs, f)


def _pred_names(f: Formula) -> set[str]:
    out: set[str] = set()

    def go(g):
        if isinstance(g, Pred):
            out.add(g.name)
        elif isinstance(g, Not):
            go(g.arg)
        elif isinstance(g, And):
            go(g.left)
            go(g.right)
        elif isinstance(g, Exists):
            go(g.body)

    go(f)
    return out
