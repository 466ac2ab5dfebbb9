"""First-order terms, atoms, literals and clauses over the NatSet signature.

The signature is ``0``, ``s/1``, ``[]`` and list cells ``[B|S]`` whose head
``B`` is one of the constants ``y``/``n`` (or a variable, as in NatSet's
membership clause).  Substitutions are plain dicts from variable names to
terms and are always kept idempotent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Fn:
    functor: str
    args: tuple = ()

    def __str__(self) -> str:
        from .progtext import format_term

        return format_term(self)


Term = Union[Var, Fn]

ZERO = Fn("0")
NIL = Fn("[]")
YES = Fn("y")
NO = Fn("n")
CONS = "."


def succ(t: Term) -> Fn:
    return Fn("s", (t,))


def cons(bit: Term, tail: Term) -> Fn:
    return Fn(CONS, (bit, tail))


def nat_term(k: int) -> Term:
    t: Term = ZERO
    for _ in range(k):
        t = succ(t)
    return t


def set_term(members: Iterable[int], length: int | None = None) -> Term:
    """Canonical list encoding of a finite set; ``length`` pads with ``n``."""
    members = set(members)
    if members and min(members) < 0:
        raise ValueError("sets contain natural numbers only")
    size = max(members) + 1 if members else 0
    if length is None:
        length = size
    if length < size:
        raise ValueError(f"length {length} too short for {sorted(members)}")
    t: Term = NIL
    for i in reversed(range(length)):
        t = cons(YES if i in members else NO, t)
    return t


def decode_nat(t: Term) -> int | None:
    k = 0
    while isinstance(t, Fn) and t.functor == "s":
        t = t.args[0]
        k += 1
    return k if t == ZERO else None


def decode_set(t: Term) -> frozenset[int] | None:
    out, i = set(), 0
    while isinstance(t, Fn) and t.functor == CONS:
        bit, t = t.args
        if bit == YES:
            out.add(i)
        elif bit != NO:
            return None
        i += 1
    return frozenset(out) if t == NIL else None


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def key(self) -> tuple[str, int]:
        return (self.pred, len(self.args))

    def __str__(self) -> str:
        from .progtext import format_atom

        return format_atom(self)


@dataclass(frozen=True, slots=True)
class Literal:
    positive: bool
    atom: Atom

    def negate(self) -> Literal:
        return Literal(not self.positive, self.atom)

    def __str__(self) -> str:
        from .progtext import format_literal

        return format_literal(self)


def pos(atom: Atom) -> Literal:
    return Literal(True, atom)


def neg(atom: Atom) -> Literal:
    return Literal(False, atom)


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple[Literal, ...] = ()
    id: int | None = field(default=None, compare=False)
    origin: str = field(default="", compare=False)

    @property
    def is_unit(self) -> bool:
        return not self.body

    def variables(self) -> list[str]:
        return unique(itertools.chain(atom_vars(self.head), body_vars(self.body)))

    def existential_vars(self) -> list[str]:
        head = set(atom_vars(self.head))
        return [v for v in unique(body_vars(self.body)) if v not in head]

    def with_id(self, cid: int | None, origin: str | None = None) -> Clause:
        return Clause(self.head, self.body, cid, self.origin if origin is None else origin)

    def __str__(self) -> str:
        from .progtext import format_clause

        return format_clause(self)


Substitution = dict
Unifiable = Union[Var, Fn, Atom]


# -- traversal ---------------------------------------------------------------

def term_vars(t: Term) -> Iterator[str]:
    if type(t) is Var:
        yield t.name
    else:
        for a in t.args:
            yield from term_vars(a)


def atom_vars(a: Atom) -> Iterator[str]:
    for t in a.args:
        yield from term_vars(t)


def body_vars(body: Iterable[Literal]) -> Iterator[str]:
    for lit in body:
        yield from atom_vars(lit.atom)


def unique(xs: Iterable) -> list:
    return list(dict.fromkeys(xs))


def is_ground_term(t: Term) -> bool:
    return next(term_vars(t), None) is None


def is_ground(a: Atom) -> bool:
    return next(atom_vars(a), None) is None


def term_height(t: Term) -> int:
    if type(t) is Var or not t.args:
        return 0
    return 1 + max(term_height(a) for a in t.args)


# -- substitution --------------------------------------------------------------

def subst_term(t: Term, s: Mapping[str, Term]) -> Term:
    if type(t) is Var:
        return s.get(t.name, t)
    if not t.args:
        return t
    return Fn(t.functor, tuple([subst_term(a, s) for a in t.args]))


def subst_atom(a: Atom, s: Mapping[str, Term]) -> Atom:
    if not a.args:
        return a
    return Atom(a.pred, tuple([subst_term(t, s) for t in a.args]))


def subst_literal(lit: Literal, s: Mapping[str, Term]) -> Literal:
    return Literal(lit.positive, subst_atom(lit.atom, s))


def subst_clause(c: Clause, s: Mapping[str, Term]) -> Clause:
    return Clause(
        subst_atom(c.head, s),
        tuple(subst_literal(l, s) for l in c.body),
        c.id,
        c.origin,
    )


def rename_clause(c: Clause, fresh: Iterator[str]) -> Clause:
    """Rename every variable of ``c`` using names drawn from ``fresh``."""
    s = {v: Var(next(fresh)) for v in c.variables()}
    return subst_clause(c, s)


def fresh_names(prefix: str = "_G") -> Iterator[str]:
    return (f"{prefix}{i}" for i in itertools.count(1))


# -- unification ---------------------------------------------------------------

def _walk(t: Term, b: dict) -> Term:
    while type(t) is Var and t.name in b:
        t = b[t.name]
    return t


def _occurs(name: str, t: Term, b: dict) -> bool:
    t = _walk(t, b)
    if type(t) is Var:
        return t.name == name
    return any(_occurs(name, a, b) for a in t.args)


def _resolve(t: Term, b: dict) -> Term:
    t = _walk(t, b)
    if type(t) is Var or not t.args:
        return t
    return Fn(t.functor, tuple(_resolve(a, b) for a in t.args))


def _as_terms(x: Unifiable) -> tuple | None:
    return (Fn(x.pred, x.args),) if isinstance(x, Atom) else (x,)


def may_unify(t1: Term, t2: Term) -> bool:
    """Cheap necessary condition for unifiability: no functor clash."""
    if type(t1) is Var or type(t2) is Var:
        return True
    if t1.functor != t2.functor or len(t1.args) != len(t2.args):
        return False
    return all(map(may_unify, t1.args, t2.args))


def heads_may_unify(a: Atom, b: Atom) -> bool:
    return a.pred == b.pred and len(a.args) == len(b.args) and all(map(may_unify, a.args, b.args))


def unify(t1: Unifiable, t2: Unifiable) -> Substitution | None:
    """Most general unifier with occurs check, or ``None``.

    Variable-variable bindings are oriented so that ``t1``'s names survive.
    """
    if isinstance(t1, Atom) != isinstance(t2, Atom):
        return None
    b: dict[str, Term] = {}
    stack = [(_as_terms(t1)[0], _as_terms(t2)[0])]
    while stack:
        x, y = stack.pop()
        x, y = _walk(x, b), _walk(y, b)
        if x == y:
            continue
        if type(y) is Var:
            if _occurs(y.name, x, b):
                return None
            b[y.name] = x
        elif type(x) is Var:
            if _occurs(x.name, y, b):
                return None
            b[x.name] = y
        elif x.functor != y.functor or len(x.args) != len(y.args):
            return None
        else:
            stack.extend(zip(x.args, y.args))
    return {v: _resolve(t, b) for v, t in b.items()}


def instance_of(general: Unifiable, specific: Unifiable) -> Substitution | None:
    """One-way matching: ``theta`` with ``general . theta == specific``."""
    if isinstance(general, Atom) != isinstance(specific, Atom):
        return None
    theta: dict[str, Term] = {}
    stack = [(_as_terms(general)[0], _as_terms(specific)[0])]
    while stack:
        g, s = stack.pop()
        if type(g) is Var:
            bound = theta.get(g.name)
            if bound is None:
                theta[g.name] = s
            elif bound != s:
                return None
        elif type(s) is Var or g.functor != s.functor or len(g.args) != len(s.args):
            return None
        else:
            stack.extend(zip(g.args, s.args))
    return theta


# -- canonical forms -------------------------------------------------------------

def _spine(t: Term, names: Mapping[str, int], local: dict[str, int]) -> tuple:
    if type(t) is Var:
        if t.name in names:
            return ("v", names[t.name])
        return ("?", local.setdefault(t.name, len(local)))
    return (t.functor, tuple(_spine(a, names, local) for a in t.args))


def _literal_key(lit: Literal, names: Mapping[str, int]) -> tuple:
    local: dict[str, int] = {}
    return (
        0 if lit.positive else 1,
        lit.atom.pred,
        len(lit.atom.args),
        tuple(_spine(a, names, local) for a in lit.atom.args),
    )


def normalize_clause(c: Clause) -> Clause:
    """Dedup body literals, sort them canonically, renumber variables V0, V1, ...

    Literals sort on (sign, predicate, arity, argument spine) where head
    variables carry their number and other variables a literal-local index.
    Ties keep their relative order, which makes the operation idempotent.
    """
    head_names = {v: i for i, v in enumerate(unique(atom_vars(c.head)))}
    body = sorted(unique(c.body), key=lambda l: _literal_key(l, head_names))
    order = unique(itertools.chain(atom_vars(c.head), body_vars(body)))
    s = {v: Var(f"V{i}") for i, v in enumerate(order)}
    return Clause(
        subst_atom(c.head, s),
        tuple(subst_literal(l, s) for l in body),
        c.id,
        c.origin,
    )


def _match_terms(a: Term, b: Term, fwd: dict, bwd: dict, trail: list) -> bool:
    if type(a) is Var:
        if type(b) is not Var:
            return False
        x, y = fwd.get(a.name), bwd.get(b.name)
        if x is None and y is None:
            fwd[a.name] = b.name
            bwd[b.name] = a.name
            trail.append(a.name)
            return True
        return x == b.name and y == a.name
    if type(b) is Var or a.functor != b.functor or len(a.args) != len(b.args):
        return False
    return all(_match_terms(x, y, fwd, bwd, trail) for x, y in zip(a.args, b.args))


def _undo(trail: list, mark: int, fwd: dict, bwd: dict) -> None:
    while len(trail) > mark:
        name = trail.pop()
        del bwd[fwd.pop(name)]


def _shape(t: Term) -> tuple:
    if type(t) is Var:
        return ("_",)
    return (t.functor, tuple(_shape(a) for a in t.args))


def literal_shape(lit: Literal) -> tuple:
    return (lit.positive, lit.atom.pred, tuple(_shape(a) for a in lit.atom.args))


def match_literal_sets(
    xs: Iterable[Literal],
    ys: Iterable[Literal],
    fwd: dict[str, str] | None = None,
    allowed=None,
) -> dict[str, str] | None:
    """Find a variable bijection mapping the literal set ``xs`` onto ``ys``.

    ``fwd`` seeds the bijection; ``allowed(x_var, y_var)`` may veto pairs.
    Both sides are treated as sets (duplicates ignored).  Returns the
    complete renaming or ``None``.
    """
    xs, ys = unique(xs), unique(ys)
    if len(xs) != len(ys):
        return None
    fwd = dict(fwd or {})
    bwd = {v: k for k, v in fwd.items()}
    if len(bwd) != len(fwd):
        return None
    by_shape: dict[tuple, list[Literal]] = {}
    for y in ys:
        by_shape.setdefault(literal_shape(y), []).append(y)
    cands = []
    for x in xs:
        options = by_shape.get(literal_shape(x))
        if not options:
            return None
        cands.append((x, options))
    cands.sort(key=lambda p: len(p[1]))
    used: set[int] = set()
    trail: list[str] = []

    def ok_pairs(mark: int) -> bool:
        return allowed is None or all(allowed(n, fwd[n]) for n in trail[mark:])

    def go(i: int) -> bool:
        if i == len(cands):
            return True
        x, options = cands[i]
        for y in options:
            if id(y) in used:
                continue
            mark = len(trail)
            if all(_match_terms(a, b, fwd, bwd, trail) for a, b in zip(x.atom.args, y.atom.args)) and ok_pairs(mark):
                used.add(id(y))
                if go(i + 1):
                    return True
                used.discard(id(y))
            _undo(trail, mark, fwd, bwd)
        return False

    return fwd if go(0) else None


def variant_eq(c1: Clause, c2: Clause, modulo_head_pred: bool = False) -> bool:
    """Clause variance up to renaming, body order and literal multiplicity."""
    if len(c1.head.args) != len(c2.head.args):
        return False
    if not modulo_head_pred and c1.head.pred != c2.head.pred:
        return False
    if normalize_clause(c1) == normalize_clause(c2):
        return True
    fwd: dict[str, str] = {}
    bwd: dict[str, str] = {}
    trail: list[str] = []
    for a, b in zip(c1.head.args, c2.head.args):
        if not _match_terms(a, b, fwd, bwd, trail):
            return False
    return match_literal_sets(c1.body, c2.body, fwd) is not None
