"""The unfold/definition-fold strategy turning a hierarchy into a regular program."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .lloyd_topor import Hierarchy
from .natset import NAT, RESERVED, SET, is_natset_typed_definition, is_regular_clause, literal_height
from .program import Program
from .rules import R4, DerivationStep, RuleError, Workspace
from .terms import (
    CONS,
    Atom,
    Clause,
    Literal,
    Term,
    Var,
    atom_vars,
    is_ground,
    literal_shape,
    match_literal_sets,
    subst_clause,
    unique,
    variant_eq,
)


class StrategyDiverged(RuntimeError):
    """A resource guard of the strategy was exceeded."""


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class StrategyConfig:
    max_while_iterations: int = 1000
    max_unfold_ground_steps: int = 100_000
    check_invariants_each_step: bool = False

    def __post_init__(self):
        if self.max_while_iterations < 1 or self.max_unfold_ground_steps < 1:
            raise ValueError("strategy budgets must be positive")


@dataclass(frozen=True)
class SynthesisResult:
    p0: Program
    transf_p: Program
    defs: tuple[Clause, ...]
    trace: tuple[DerivationStep, ...]
    main: str | None = None
    new_preds: tuple[str, ...] = ()

    def definition(self, pred: str) -> list[Clause]:
        return [c for c in self.transf_p if c.head.pred == pred]


def new_pred_names(used: Iterable[str] = (), prefix: str = "new") -> Callable[[], str]:
    taken = set(used) | RESERVED
    counter = itertools.count(1)

    def fresh() -> str:
        while True:
            name = f"{prefix}{next(counter)}"
            if name not in taken:
                taken.add(name)
                return name

    return fresh


# -- invariants -------------------------------------------------------------------

@dataclass(frozen=True)
class StepState:
    """Snapshot of one iteration of the inner loop, for invariant checks."""

    transf_p: tuple[Clause, ...]
    in_defs: tuple[Clause, ...]
    defs: tuple[Clause, ...]
    transf_p0: tuple[Clause, ...]
    in_defs0: tuple[Clause, ...]
    defs0: tuple[Clause, ...]


def check_step_invariants(state: StepState) -> list[str]:
    """Violated structural invariants of the strategy, as messages (empty when all hold)."""
    problems = []
    for c in state.transf_p:
        if not is_regular_clause(c):
            problems.append(f"clause not regular: {c}")
    for d in state.in_defs:
        if not is_natset_typed_definition(d):
            problems.append(f"definition not natset-typed: {d}")
    known = {c.head.key for c in state.transf_p0} | {c.head.key for c in state.in_defs0}
    known |= {l.atom.key for c in state.transf_p0 for l in c.body}
    known |= {d.head.key for d in state.defs0}  # predicates whose definition became empty
    max_h = max((literal_height(l) for d in state.defs0 for l in d.body), default=0)
    max_v = max((len(d.variables()) for d in state.defs0), default=0)
    for d in state.defs:
        for l in d.body:
            if l.atom.key not in known:
                problems.append(f"body predicate {l.atom.pred} of {d} is new")
            if literal_height(l) > max_h:
                problems.append(f"literal {l} of {d} exceeds height {max_h}")
        if len(d.variables()) > max_v:
            problems.append(f"{d} has more than {max_v} variables")
    # (d) is about definitions introduced by folding; the input definitions may repeat
    initial = set(state.defs0)
    for d1, d2 in itertools.combinations(state.defs, 2):
        if d1 in initial and d2 in initial:
            continue
        if variant_eq(d1, d2, modulo_head_pred=True):
            problems.append(f"variant definitions {d1} and {d2}")
    return problems


# -- definition index ----------------------------------------------------------------

def _var_class_shape(l: Literal, head: set[str]) -> tuple:
    def sh(t: Term):
        if type(t) is Var:
            return "h" if t.name in head else "e"
        return (t.functor, tuple(sh(a) for a in t.args))

    return (l.positive, l.atom.pred, tuple(sh(a) for a in l.atom.args))


def _body_key(body: Sequence[Literal], head: set[str]) -> tuple:
    return (len(head), tuple(sorted(map(repr, {_var_class_shape(l, head) for l in body}))))


class _DefIndex:
    def __init__(self):
        self.table: dict[tuple, list[Clause]] = {}

    def add(self, d: Clause) -> None:
        head = set(atom_vars(d.head))
        self.table.setdefault(_body_key(d.body, head), []).append(d)

    def lookup(self, body: Sequence[Literal], head: set[str]) -> tuple[Clause, dict[str, Term]] | None:
        for d in self.table.get(_body_key(body, head), ()):
            dh = set(atom_vars(d.head))
            fwd = match_literal_sets(d.body, body, allowed=lambda x, y: (x in dh) == (y in head))
            if fwd is not None:
                return d, {k: Var(v) for k, v in fwd.items()}
        return None


# -- the strategy ----------------------------------------------------------------------

class _Run:
    def __init__(self, p0: Program, config: StrategyConfig, new_name: Callable[[], str]):
        self.ws = Workspace(p0)
        self.config = config
        self.new_name = new_name
        self.index = _DefIndex()
        self.new_preds: list[str] = []

    def unfold_phase(self, work: list[tuple[int, tuple[bool, ...]]], pick) -> list[tuple[int, tuple[bool, ...]]]:
        done = []
        budget = self.config.max_unfold_ground_steps
        while work:
            cid, marks = work.pop(0)
            c = self.ws.clauses[cid]
            pos = pick(c, marks)
            if pos is None:
                done.append((cid, marks))
                continue
            marks = marks[:pos] + (False,) + marks[pos + 1:]
            kids = self.ws.unfold_marked(cid, pos, marks)
            work[0:0] = [(k.id, m) for k, m in kids]
            budget -= 1
            if budget < 0:
                raise StrategyDiverged(f"more than {self.config.max_unfold_ground_steps} unfolding steps")
        return done

    def unfold_all(self, d: Clause) -> list[int]:
        c = self.ws.clauses[d.id]
        marks = tuple(l.positive for l in c.body)
        u1 = self.unfold_phase([(d.id, marks)], _leftmost_marked)
        u1 = [(cid, tuple(not l.positive for l in self.ws.clauses[cid].body)) for cid, _ in u1]
        u2 = self.unfold_phase(u1, _leftmost_marked)
        u3 = self.unfold_phase(u2, _leftmost_ground)
        return [cid for cid, _ in u3]

    def fold_all(self, cids: list[int]) -> list[Clause]:
        new_defs = []
        for cid in cids:
            c = self.ws.clauses[cid]
            if c.is_unit:
                continue
            head = set(atom_vars(c.head))
            found = self.index.lookup(c.body, head)
            if found is None:
                args = [v for v in unique(atom_vars(c.head)) if any(v in atom_vars(l.atom) for l in c.body)]
                name = self.new_name()
                d = self.ws.define(Clause(Atom(name, tuple(Var(v) for v in args)), c.body))
                self.index.add(d)
                self.new_preds.append(name)
                new_defs.append(d)
                theta = {v: Var(v) for v in d.variables()}
            else:
                d, theta = found
            self.ws.fold(cid, d.id, theta)
        return new_defs

    def snapshot(self, in_defs, transf_p0, in_defs0, defs0) -> StepState:
        in_ids = {d.id for d in in_defs}
        transf = tuple(c for c in self.ws.clauses.values() if c.id not in in_ids)
        return StepState(transf, tuple(in_defs), tuple(self.ws.defs.values()), transf_p0, in_defs0, defs0)

    def simplify(self) -> None:
        prog = self.ws.program(check_strata=False)
        strata = prog.strata or {}
        keys = sorted({c.head.key for c in prog if not c.head.args}, key=lambda k: (strata.get(k, 0), k))
        for k in keys:
            old = self.ws.definition(k)
            if len(old) == 1 and old[0].is_unit:
                continue
            try:
                self.ws.prop_simplify(k)
            except RuleError:
                continue

    def run(self, hierarchy: Sequence[Clause]) -> None:
        for d_i in hierarchy:
            transf_p0 = tuple(self.ws.clauses.values())
            d = self.ws.define(d_i)
            self.index.add(d)
            in_defs = [d]
            defs0 = tuple(self.ws.defs.values())
            for _ in range(self.config.max_while_iterations):
                if not in_defs:
                    break
                folded = []
                for d in in_defs:
                    folded.extend(self.unfold_all(d))
                new_defs = self.fold_all(folded)
                if self.config.check_invariants_each_step:
                    problems = check_step_invariants(self.snapshot(new_defs, transf_p0, (d_i,), defs0))
                    if problems:
                        raise InvariantViolation("; ".join(problems))
                in_defs = new_defs
            if in_defs:
                raise StrategyDiverged(f"more than {self.config.max_while_iterations} iterations for {d_i.head.pred}")
            self.simplify()

    def prettify(self) -> None:
        p0_ids = {c.id for c in self.ws.p0}
        for cid in list(self.ws.clauses):
            c = self.ws.clauses[cid]
            if cid in p0_ids:
                continue
            renamed = pretty_variables(c)
            if renamed != c:
                self.ws.normalize(cid, renamed)


def _leftmost_marked(c: Clause, marks: tuple[bool, ...]) -> int | None:
    return next((i for i, m in enumerate(marks) if m), None)


def _leftmost_ground(c: Clause, marks) -> int | None:
    return next((i for i, l in enumerate(c.body) if is_ground(l.atom)), None)


def _var_sorts(c: Clause) -> dict[str, str]:
    sorts: dict[str, str] = {}

    def walk(t: Term, sort: str | None):
        if type(t) is Var:
            if sort:
                sorts.setdefault(t.name, sort)
        elif t.functor == "s":
            walk(t.args[0], NAT)
        elif t.functor == CONS:
            walk(t.args[1], SET)

    for t in c.head.args:
        walk(t, None)
    for l in c.body:
        if l.atom.pred in (NAT, SET) and type(l.atom.args[0]) is Var:
            sorts.setdefault(l.atom.args[0].name, l.atom.pred)
    return sorts


def pretty_variables(c: Clause) -> Clause:
    """Rename individual variables to N, N1, ... and set variables to S, S1, ..."""
    sorts = _var_sorts(c)
    counters = {NAT: 0, SET: 0, None: 0}
    stem = {NAT: "N", SET: "S", None: "X"}
    s = {}
    for v in c.variables():
        sort = sorts.get(v)
        i = counters[sort]
        counters[sort] += 1
        s[v] = Var(stem[sort] + (str(i) if i else ""))
    return subst_clause(c, s)


def synthesize(
    p0: Program,
    hierarchy: Hierarchy | Sequence[Clause],
    config: StrategyConfig = StrategyConfig(),
    new_name: Callable[[], str] | None = None,
) -> SynthesisResult:
    """Transform ``p0`` plus the hierarchy's definitions into a regular program."""
    defs = hierarchy.defs if isinstance(hierarchy, Hierarchy) else tuple(hierarchy)
    if new_name is None:
        used = {c.head.pred for c in itertools.chain(p0, defs)}
        used |= {l.atom.pred for c in itertools.chain(p0, defs) for l in c.body}
        new_name = new_pred_names(used)
    run = _Run(p0, config, new_name)
    run.run(defs)
    run.prettify()
    return SynthesisResult(
        Program(run.ws.p0, check_strata=False),
        run.ws.program(),
        tuple(run.ws.defs.values()),
        tuple(run.ws.trace),
        defs[-1].head.pred if defs else None,
        tuple(run.new_preds),
    )
