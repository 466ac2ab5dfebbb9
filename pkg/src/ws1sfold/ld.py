"""Depth-first LD resolution for definite programs."""

from __future__ import annotations

from typing import Sequence

from .program import Program
from .terms import Atom, Clause, Fn, Term, Var, atom_vars, unique


class BudgetExhausted(RuntimeError):
    """The step budget ran out before the SLD tree was exhausted."""


class NegationNotSupported(ValueError):
    pass


def _walk(t: Term, b: dict) -> Term:
    while type(t) is Var:
        nxt = b.get(t.name)
        if nxt is None:
            return t
        t = nxt
    return t


def _occurs(name: str, t: Term, b: dict) -> bool:
    t = _walk(t, b)
    if type(t) is Var:
        return t.name == name
    return any(_occurs(name, a, b) for a in t.args)


def _unify(x: Term, y: Term, b: dict, trail: list) -> bool:
    stack = [(x, y)]
    while stack:
        x, y = stack.pop()
        x, y = _walk(x, b), _walk(y, b)
        if x is y or x == y:
            continue
        if type(x) is Var:
            if _occurs(x.name, y, b):
                return False
            b[x.name] = y
            trail.append(x.name)
        elif type(y) is Var:
            if _occurs(y.name, x, b):
                return False
            b[y.name] = x
            trail.append(y.name)
        elif x.functor != y.functor or len(x.args) != len(y.args):
            return False
        else:
            stack.extend(zip(x.args, y.args))
    return True


def _resolve(t: Term, b: dict) -> Term:
    t = _walk(t, b)
    if type(t) is Var or not t.args:
        return t
    return Fn(t.functor, tuple(_resolve(a, b) for a in t.args))


def _rename(t: Term, suffix: str) -> Term:
    if type(t) is Var:
        return Var(t.name + suffix)
    if not t.args:
        return t
    return Fn(t.functor, tuple(_rename(a, suffix) for a in t.args))


class _Compiled:
    __slots__ = ("head", "body")

    def __init__(self, c: Clause):
        self.head = Fn(c.head.pred, c.head.args)
        self.body = tuple(Fn(l.atom.pred, l.atom.args) for l in c.body)


def _compile(p: Program) -> dict[tuple[str, int], list[_Compiled]]:
    table: dict[tuple[str, int], list[_Compiled]] = {}
    for c in p:
        if any(not l.positive for l in c.body):
            raise NegationNotSupported(f"negative literal in clause {c}")
        table.setdefault(c.head.key, []).append(_Compiled(c))
    return table


class Resolver:
    """Reusable LD interpreter over a fixed definite program."""

    def __init__(self, p: Program):
        self.table = _compile(p)

    def solve(self, goal: Sequence[Atom], budget: int = 10**6) -> dict[str, Term] | None:
        """First answer restricted to the goal variables, or ``None`` on finite failure.

        Raises :class:`BudgetExhausted` once ``budget`` resolution steps are spent.
        """
        goal_vars = unique(v for a in goal for v in atom_vars(a))
        b: dict[str, Term] = {}
        trail: list[str] = []
        # goals are cons lists (atom, rest); choicepoints hold alternatives
        goals = None
        for a in reversed(goal):
            goals = (Fn(a.pred, a.args), goals)
        choices: list[tuple] = []
        steps = 0
        counter = 0
        alts: list | None = None
        alt_i = 0
        while True:
            if alts is None:
                if goals is None:
                    return {v: _resolve(Var(v), b) for v in goal_vars}
                sel, _ = goals
                alts = self.table.get((sel.functor, len(sel.args)), [])
                alt_i = 0
            if alt_i >= len(alts):
                if not choices:
                    return None
                goals, alts, alt_i, mark = choices.pop()
                while len(trail) > mark:
                    del b[trail.pop()]
                continue
            steps += 1
            if steps > budget:
                raise BudgetExhausted(f"budget of {budget} steps exhausted")
            cl = alts[alt_i]
            sel, rest = goals
            mark = len(trail)
            counter += 1
            suffix = f"#{counter}"
            head = _rename(cl.head, suffix)
            if _unify(sel, head, b, trail):
                if alt_i + 1 < len(alts):
                    choices.append((goals, alts, alt_i + 1, mark))
                new_goals = rest
                for atom in reversed(cl.body):
                    new_goals = (_rename(atom, suffix), new_goals)
                goals = new_goals
                alts = None
            else:
                while len(trail) > mark:
                    del b[trail.pop()]
                alt_i += 1


def ld_resolve(p: Program, goal: Sequence[Atom], budget: int = 10**6) -> dict[str, Term] | None:
    return Resolver(p).solve(goal, budget)
