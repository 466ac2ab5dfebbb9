"""Unfold/fold transformation rules with side-condition checking and tracing.

The clause-level operations (:func:`unfold_positive`, :func:`unfold_negative`,
:func:`fold_clause`) are pure.  :class:`Workspace` applies them to a mutable
program and records :class:`DerivationStep` entries; :class:`TransformState`
wraps a frozen snapshot for callers that want value semantics.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .models import depends_closure, is_propositional, propositional_perfect_model
from .program import Program, StratificationError, stratify
from .progtext import format_clause, format_term
from .terms import (
    Atom,
    Clause,
    Literal,
    Term,
    Var,
    atom_vars,
    heads_may_unify,
    instance_of,
    subst_atom,
    subst_clause,
    subst_literal,
    term_vars,
    unify,
    unique,
    variant_eq,
)

R1, R2POS, R2NEG, R3, R4, NORMALIZE, ADD_ATOM = "R1", "R2pos", "R2neg", "R3", "R4", "normalize", "add_atom"
RULES = (R1, R2POS, R2NEG, R3, R4, NORMALIZE, ADD_ATOM)


class RuleError(ValueError):
    """A rule's applicability condition does not hold."""


# -- pure clause operations -------------------------------------------------------

def dedupe(body: Iterable[Literal]) -> tuple[Literal, ...]:
    return tuple(unique(body))


def rename_apart(d: Clause, avoid: set[str]) -> Clause:
    """Rename the variables of ``d`` that clash with ``avoid`` (minimal renaming)."""
    names = d.variables()
    if not avoid.intersection(names):
        return d
    taken = set(avoid) | set(names)
    s: dict[str, Term] = {}
    for v in names:
        if v in avoid:
            stem = v.rstrip("0123456789") or v
            i = 1
            while f"{stem}{i}" in taken:
                i += 1
            taken.add(f"{stem}{i}")
            s[v] = Var(f"{stem}{i}")
    return subst_clause(d, s)


def _check_pos(c: Clause, pos: int) -> Literal:
    if not 0 <= pos < len(c.body):
        raise RuleError(f"position {pos} out of range for a body of {len(c.body)} literals")
    return c.body[pos]


Marked = list[tuple[Clause, tuple[bool, ...]]]


def _dedupe_marked(head: Atom, pairs: Iterable[tuple[Literal, bool]]) -> tuple[Clause, tuple[bool, ...]]:
    merged: dict[Literal, bool] = {}
    for l, m in pairs:
        merged[l] = merged.get(l, False) or m
    return Clause(head, tuple(merged)), tuple(merged.values())


def unfold_positive_marked(c: Clause, pos: int, defining: Sequence[Clause], marks: Sequence[bool]) -> Marked:
    """Positive unfolding; ``marks`` flags body literals and follows them into the results."""
    lit = _check_pos(c, pos)
    if not lit.positive:
        raise RuleError("positive unfolding needs a positive literal")
    avoid = set(c.variables())
    out = []
    for d in defining:
        if not heads_may_unify(lit.atom, d.head):
            continue
        r = rename_apart(d, avoid)
        theta = unify(lit.atom, r.head)
        if theta is None:
            continue
        pairs = [
            *zip(c.body[:pos], marks[:pos]),
            *((l, False) for l in r.body),
            *zip(c.body[pos + 1:], marks[pos + 1:]),
        ]
        out.append(_dedupe_marked(subst_atom(c.head, theta), ((subst_literal(l, theta), m) for l, m in pairs)))
    return out


def _complementary(lits: Sequence[Literal]) -> bool:
    s = set(lits)
    return any(l.negate() in s for l in lits if l.positive)


def unfold_negative_marked(c: Clause, pos: int, defining: Sequence[Clause], marks: Sequence[bool]) -> Marked:
    lit = _check_pos(c, pos)
    if lit.positive:
        raise RuleError("negative unfolding needs a negative literal")
    a = lit.atom
    avoid = set(c.variables())
    bodies = []
    for d in defining:
        if not heads_may_unify(a, d.head):
            continue
        d = rename_apart(d, avoid)
        if unify(a, d.head) is None:
            continue
        theta = instance_of(d.head, a)
        if theta is None:
            raise RuleError(f"{a} is not an instance of the head of {format_clause(d)}")
        if d.existential_vars():
            raise RuleError(f"clause {format_clause(d)} has existential variables")
        bodies.append(tuple(subst_literal(l, theta) for l in d.body))
    g1 = list(zip(c.body[:pos], marks[:pos]))
    g2 = list(zip(c.body[pos + 1:], marks[pos + 1:]))
    if not bodies:
        return [_dedupe_marked(c.head, g1 + g2)]
    if any(not b for b in bodies):
        return []
    out, seen = [], set()
    for choice in itertools.product(*bodies):
        made = _dedupe_marked(c.head, g1 + [(l.negate(), False) for l in choice] + g2)
        key = frozenset(made[0].body)
        if key in seen or _complementary(made[0].body):
            continue
        seen.add(key)
        out.append(made)
    return out


def unfold_positive(c: Clause, pos: int, defining: Sequence[Clause]) -> list[Clause]:
    return [k for k, _ in unfold_positive_marked(c, pos, defining, (False,) * len(c.body))]


def unfold_negative(c: Clause, pos: int, defining: Sequence[Clause]) -> list[Clause]:
    return [k for k, _ in unfold_negative_marked(c, pos, defining, (False,) * len(c.body))]


def _match_into(pattern: Sequence[Literal], body: Sequence[Literal], theta: dict) -> Iterable[tuple[dict, tuple[int, ...]]]:
    """Embeddings of ``pattern`` into distinct positions of ``body`` extending ``theta``."""

    def go(i: int, th: dict, used: tuple[int, ...]):
        if i == len(pattern):
            yield th, used
            return
        p = pattern[i]
        for j, l in enumerate(body):
            if j in used or l.positive != p.positive or l.atom.key != p.atom.key:
                continue
            m = instance_of(p.atom, l.atom)
            if m is None or any(k in th and th[k] != t for k, t in m.items()):
                continue
            ext = {**th, **m}
            yield from go(i + 1, ext, used + (j,))

    yield from go(0, dict(theta), ())


def fold_conditions_hold(c: Clause, d: Clause, theta: Mapping[str, Term], used: Sequence[int]) -> bool:
    rest = [l for j, l in enumerate(c.body) if j not in used]
    outside = set(v for v in Clause(c.head, tuple(rest)).variables())
    d_vars = unique(v for l in d.body for v in atom_vars(l.atom))
    for x in d.existential_vars():
        t = theta.get(x)
        if type(t) is not Var or t.name in outside:
            return False
        for y in d_vars:
            if y != x and t.name in term_vars(theta.get(y, Var(y))):
                return False
    return True


def fold_clause(c: Clause, d: Clause, theta: Mapping[str, Term] | None = None) -> tuple[Clause, dict]:
    """Fold ``c`` using definition ``d``; returns the folded clause and the substitution used."""
    body = dedupe(c.body)
    c = Clause(c.head, body, c.id, c.origin)
    pattern = dedupe(d.body)
    for th, used in _match_into(pattern, body, dict(theta or {})):
        if theta is not None and any(v not in th for v in d.variables()):
            continue
        if not fold_conditions_hold(c, d, th, used):
            continue
        first = min(used)
        new_lit = Literal(True, subst_atom(d.head, th))
        out = tuple(new_lit if j == first else l for j, l in enumerate(body) if j == first or j not in used)
        return Clause(c.head, out), th
    raise RuleError(f"cannot fold {format_clause(c)} using {format_clause(d)}")


# -- trace -----------------------------------------------------------------------

@dataclass(frozen=True)
class DerivationStep:
    rule: str
    inputs: tuple[int, ...] = ()
    outputs: tuple[int, ...] = ()
    position: int | None = None
    theta: tuple[tuple[str, Term], ...] = ()
    pred: tuple[str, int] | None = None
    p0_atom: bool = False
    justification: str | None = None
    pre: tuple[Clause, ...] = field(default=(), compare=False)
    post: tuple[Clause, ...] = field(default=(), compare=False)

    def to_json(self) -> dict:
        out = {"rule": self.rule, "inputs": list(self.inputs), "outputs": list(self.outputs)}
        if self.position is not None:
            out["position"] = self.position
        if self.theta:
            out["theta"] = {k: format_term(v) for k, v in self.theta}
        if self.pred is not None:
            out["pred"] = f"{self.pred[0]}/{self.pred[1]}"
        if self.rule == R2POS:
            out["p0_atom"] = self.p0_atom
        if self.justification is not None:
            out["justification"] = self.justification
        out["pre"] = [format_clause(c) for c in self.pre]
        out["post"] = [format_clause(c) for c in self.post]
        return out


def trace_to_json(trace: Sequence[DerivationStep], indent: int | None = 1) -> str:
    return json.dumps([s.to_json() for s in trace], indent=indent)


def audit_theorem4(trace) -> bool:
    """Every definition used for folding is unfolded w.r.t. an atom of the initial program."""
    steps = getattr(trace, "trace", trace)
    used = {s.inputs[1] for s in steps if s.rule == R3}
    unfolded = {s.inputs[0] for s in steps if s.rule == R2POS and s.p0_atom}
    return used <= unfolded


# -- workspace -------------------------------------------------------------------

class Workspace:
    """Mutable program under transformation, with Defs and a derivation trace."""

    def __init__(self, p0: Program | Sequence[Clause], renumber: bool = True):
        self.clauses: dict[int, Clause] = {}
        self.by_pred: dict[tuple[str, int], list[int]] = {}
        self.defs: dict[int, Clause] = {}
        self.trace: list[DerivationStep] = []
        self.next_id = 1
        p0 = tuple(p0)
        for c in p0:
            cid = c.id if not renumber and c.id is not None else self.next_id
            self._insert(c.with_id(cid))
            self.next_id = max(self.next_id, cid + 1)
        self.p0 = tuple(self.clauses.values())
        self.p0_preds = frozenset(_preds_of(self.p0))
        self.def_preds: set[tuple[str, int]] = set()

    # storage
    def _insert(self, c: Clause) -> Clause:
        self.clauses[c.id] = c
        self.by_pred.setdefault(c.head.key, []).append(c.id)
        return c

    def _remove(self, cid: int) -> Clause:
        c = self.clauses.pop(cid)
        self.by_pred[c.head.key].remove(cid)
        return c

    def _new(self, c: Clause, origin: str) -> Clause:
        c = Clause(c.head, c.body, self.next_id, origin)
        self.next_id += 1
        return self._insert(c)

    def get(self, cid: int) -> Clause:
        try:
            return self.clauses[cid]
        except KeyError:
            raise RuleError(f"no clause with id {cid}") from None

    def definition(self, key: tuple[str, int]) -> list[Clause]:
        return [self.clauses[i] for i in self.by_pred.get(key, ())]

    def program(self, check_strata: bool = True) -> Program:
        return Program(tuple(self.clauses.values()), check_strata=check_strata)

    def check_stratified(self) -> None:
        if stratify(self.clauses.values()) is None:
            raise StratificationError("transformation produced a non-stratified program")

    # rules
    def define(self, c: Clause) -> Clause:
        key = c.head.key
        name = c.head.pred
        if any(k[0] == name for k in self.p0_preds | self.def_preds):
            raise RuleError(f"predicate {name} is not fresh")
        args = c.head.args
        if not all(type(t) is Var for t in args) or len({t.name for t in args}) != len(args):
            raise RuleError("head arguments must be distinct variables")
        body_vars = set(Clause(Atom("_", ()), c.body).variables())
        if any(t.name not in body_vars for t in args):
            raise RuleError("head variables must occur in the body")
        new = self._new(c, R1)
        self.defs[new.id] = new
        self.def_preds.add(key)
        self.def_preds.update(_preds_of([new]))
        self.trace.append(DerivationStep(R1, (), (new.id,), post=(new,)))
        return new

    def unfold(self, cid: int, pos: int) -> list[Clause]:
        return [k for k, _ in self.unfold_marked(cid, pos)]

    def unfold_marked(self, cid: int, pos: int, marks: Sequence[bool] | None = None) -> Marked:
        c = self.get(cid)
        lit = _check_pos(c, pos)
        if marks is None:
            marks = (False,) * len(c.body)
        defining = self.definition(lit.atom.key)
        if lit.positive:
            kids = unfold_positive_marked(c, pos, defining, marks)
            rule = R2POS
        else:
            kids = unfold_negative_marked(c, pos, defining, marks)
            rule = R2NEG
        self._remove(cid)
        made = [(self._new(k, rule), m) for k, m in kids]
        self.trace.append(
            DerivationStep(
                rule,
                (cid,),
                tuple(k.id for k, _ in made),
                position=pos,
                pred=lit.atom.key,
                p0_atom=lit.atom.key in self.p0_preds,
                pre=(c,),
                post=tuple(k for k, _ in made),
            )
        )
        return made

    def fold(self, cid: int, did: int, theta: Mapping[str, Term] | None = None) -> Clause:
        c = self.get(cid)
        d = self.defs.get(did)
        if d is None:
            raise RuleError(f"clause {did} is not a definition")
        folded, th = fold_clause(c, d, theta)
        self._remove(cid)
        new = self._new(folded, R3)
        self.trace.append(
            DerivationStep(R3, (cid, did), (new.id,), theta=tuple(sorted(th.items())), pre=(c,), post=(new,))
        )
        return new

    def prop_simplify(self, key: tuple[str, int] | str) -> list[Clause]:
        if isinstance(key, str):
            key = (key, 0)
        closure = depends_closure([key], _ProgramView(self))
        ext = [c for k in closure for c in self.definition(k)]
        ext_prog = Program(tuple(ext), check_strata=False)
        if any(k[1] for k in closure) or not is_propositional(ext_prog):
            raise RuleError(f"extended definition of {key[0]} is not propositional")
        holds = key[0] in propositional_perfect_model(ext_prog)
        old = self.definition(key)
        if holds and len(old) == 1 and not old[0].body:
            made = old
        else:
            for c in old:
                self._remove(c.id)
            made = [self._new(Clause(Atom(key[0], ())), R4)] if holds else []
        self.trace.append(
            DerivationStep(R4, tuple(c.id for c in old), tuple(c.id for c in made), pred=key, pre=tuple(old), post=tuple(made))
        )
        return made

    def add_atom(self, cid: int, atom: Atom, justification: str, decider: Callable[[str], bool]) -> Clause:
        c = self.get(cid)
        if not decider(justification):
            raise RuleError(f"strengthening of clause {cid} with {atom} is not justified")
        self._remove(cid)
        new = self._new(Clause(c.head, dedupe(c.body + (Literal(True, atom),))), ADD_ATOM)
        self.trace.append(
            DerivationStep(ADD_ATOM, (cid,), (new.id,), justification=justification, pre=(c,), post=(new,))
        )
        return new

    def normalize(self, cid: int, renamed: Clause) -> Clause:
        c = self.get(cid)
        if not variant_eq(c, renamed):
            raise RuleError("normalization must produce a variant clause")
        self._remove(cid)
        new = self._new(renamed, NORMALIZE)
        self.trace.append(DerivationStep(NORMALIZE, (cid,), (new.id,), pre=(c,), post=(new,)))
        return new

    def delete_subsumed(self, cid: int, by: int) -> None:
        """Optional subsumption step: drop ``cid`` when an instance of clause ``by``."""
        c, d = self.get(cid), self.get(by)
        th = instance_of(d.head, c.head)
        if th is None or not any(True for _ in _match_into(dedupe(d.body), c.body, th)):
            raise RuleError(f"clause {cid} is not subsumed by clause {by}")
        self._remove(cid)
        self.trace.append(DerivationStep("subsume", (cid, by), (), pre=(c,)))


def _preds_of(clauses: Iterable[Clause]) -> set[tuple[str, int]]:
    out = set()
    for c in clauses:
        out.add(c.head.key)
        out.update(l.atom.key for l in c.body)
    return out


class _ProgramView:
    """Adapter giving :func:`depends_closure` access to a workspace."""

    def __init__(self, ws: Workspace):
        self.ws = ws

    def definition(self, key):
        return self.ws.definition(key)


# -- immutable state --------------------------------------------------------------

@dataclass(frozen=True)
class TransformState:
    p0: Program
    current: Program
    defs: tuple[Clause, ...] = ()
    trace: tuple[DerivationStep, ...] = ()
    next_id: int = 1

    def clause(self, cid: int) -> Clause:
        c = self.current.by_id.get(cid)
        if c is None:
            raise RuleError(f"no clause with id {cid}")
        return c

    def _workspace(self) -> Workspace:
        ws = Workspace.__new__(Workspace)
        ws.clauses = {c.id: c for c in self.current}
        ws.by_pred = {}
        for c in self.current:
            ws.by_pred.setdefault(c.head.key, []).append(c.id)
        ws.defs = {d.id: d for d in self.defs}
        ws.trace = list(self.trace)
        ws.next_id = self.next_id
        ws.p0 = self.p0.clauses
        ws.p0_preds = frozenset(_preds_of(self.p0))
        ws.def_preds = _preds_of(self.defs) | {d.head.key for d in self.defs}
        return ws

    @staticmethod
    def _freeze(ws: Workspace, p0: Program) -> TransformState:
        return TransformState(
            p0,
            Program(tuple(ws.clauses.values())),
            tuple(ws.defs.values()),
            tuple(ws.trace),
            ws.next_id,
        )

    def apply(self, fn: Callable[[Workspace], object]) -> TransformState:
        ws = self._workspace()
        fn(ws)
        return self._freeze(ws, self.p0)


def initial_state(p0: Program | Sequence[Clause]) -> TransformState:
    ws = Workspace(p0)
    program = Program(tuple(ws.clauses.values()))
    return TransformState(program, program, (), (), ws.next_id)


def rule_definition(st: TransformState, c: Clause) -> TransformState:
    return st.apply(lambda ws: ws.define(c))


def rule_unfold_pos(st: TransformState, cid: int, pos: int) -> TransformState:
    if not _check_pos(st.clause(cid), pos).positive:
        raise RuleError("literal at position is negative")
    return st.apply(lambda ws: ws.unfold(cid, pos))


def rule_unfold_neg(st: TransformState, cid: int, pos: int) -> TransformState:
    if _check_pos(st.clause(cid), pos).positive:
        raise RuleError("literal at position is positive")
    return st.apply(lambda ws: ws.unfold(cid, pos))


def rule_fold(st: TransformState, cid: int, did: int, theta: Mapping[str, Term] | None = None) -> TransformState:
    return st.apply(lambda ws: ws.fold(cid, did, theta))


def rule_prop_simplify(st: TransformState, pred) -> TransformState:
    return st.apply(lambda ws: ws.prop_simplify(pred))


def rule_add_atom(
    st: TransformState, cid: int, atom: Atom, justification: str, decider: Callable[[str], bool]
) -> TransformState:
    return st.apply(lambda ws: ws.add_atom(cid, atom, justification, decider))


def rule_normalize(st: TransformState, cid: int) -> TransformState:
    from .terms import normalize_clause

    return st.apply(lambda ws: ws.normalize(cid, normalize_clause(st.clause(cid))))


# -- replay ----------------------------------------------------------------------

def replay(p0: Program | Sequence[Clause], trace: Sequence[DerivationStep]) -> Workspace:
    """Re-run a trace from ``p0`` and check that every step reproduces its outputs."""
    ws = Workspace(p0)
    for i, s in enumerate(trace):
        if s.rule == R1:
            made = [ws.define(s.post[0])]
        elif s.rule in (R2POS, R2NEG):
            made = ws.unfold(s.inputs[0], s.position)
        elif s.rule == R3:
            made = [ws.fold(s.inputs[0], s.inputs[1], dict(s.theta))]
        elif s.rule == R4:
            made = ws.prop_simplify(s.pred)
        elif s.rule == ADD_ATOM:
            made = [ws.add_atom(s.inputs[0], s.post[0].body[-1].atom, s.justification or "", lambda _: True)]
        elif s.rule == NORMALIZE:
            made = [ws.normalize(s.inputs[0], s.post[0])]
        elif s.rule == "subsume":
            ws.delete_subsumed(s.inputs[0], s.inputs[1])
            made = []
        else:
            raise RuleError(f"unknown rule {s.rule}")
        if tuple(c.id for c in made) != s.outputs or tuple(made) != s.post:
            raise RuleError(f"replay diverged at step {i} ({s.rule})")
    return ws
