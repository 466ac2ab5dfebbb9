"""Mutual exclusion for the dynamic bakery protocol.

A state <W,U> is a pair of finite sets of counters, passed as two set
arguments.  The protocol predicates are synthesized from the formula
library in ``assets/dbakery.ws1s``; the closed facts below are decided, and
the derivation script ``assets/dbakery.script`` transforms the reachability
program plus

    ur(W,U) :- unsafe(W,U), reach(W,U).

into a program whose clauses for ur (and the auxiliary p1) are all
recursive, so that no reachable state is unsafe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib.resources import files

from .decide import PredicateRegistry, decide, register_text
from .formula import parse_formula
from .models import depends_closure, ext_def_of
from .program import Program
from .progtext import format_clause, parse_clauses
from .rules import audit_theorem4, initial_state
from .script import ScriptError, run_script
from .strategy import StrategyConfig

PROPERTY = "ur"
AUXILIARY = "p1"
Q_LISTED = ("6", "7", "14", "15")

_ALL = "all2 W all2 U all2 W1 all2 U1 "


@dataclass(frozen=True)
class Fact:
    name: str
    formula: str
    expected: bool


FACTS = (
    Fact("init-unsafe", "~ex2 W ex2 U (unsafe(W, U) & init(W, U))", True),
    Fact("cre-unsafe", _ALL + "(unsafe(W1, U1) & cre(W, U, W1, U1) => unsafe(W, U))", True),
    Fact("rel-unsafe", _ALL + "(unsafe(W1, U1) & rel(W, U, W1, U1) => unsafe(W, U))", True),
    Fact("use-unsafe", _ALL + "(unsafe(W1, U1) & use(W, U, W1, U1) => unsafe(W, U))", False),
    Fact("init-c", "~ex2 W ex2 U (c(W, U) & init(W, U))", True),
    Fact("use-c", "~ex2 W ex2 U ex2 W1 ex2 U1 (c(W1, U1) & use(W, U, W1, U1))", True),
    Fact("cre-c", _ALL + "(c(W1, U1) & cre(W, U, W1, U1) => c(W, U))", True),
    Fact("rel-c", _ALL + "(c(W1, U1) & rel(W, U, W1, U1) => unsafe(W, U))", True),
    Fact("use-unsafe-c", _ALL + "(unsafe(W1, U1) & use(W, U, W1, U1) => c(W, U))", True),
)


def asset(name: str) -> str:
    return files(__package__).joinpath("assets", name).read_text()


def library_text() -> str:
    return asset("dbakery.ws1s")


def script_text() -> str:
    return asset("dbakery.script")


def reach_program() -> list:
    return parse_clauses(asset("reach.lp"))


@dataclass(frozen=True)
class FactResult:
    fact: Fact
    value: bool

    @property
    def ok(self) -> bool:
        return self.value == self.fact.expected


@dataclass(frozen=True)
class DBakeryReport:
    facts: tuple[FactResult, ...]
    scripted: bool
    script_error: str | None = None
    q: tuple[tuple[str, str], ...] = ()
    recursive: tuple[str, ...] = ()
    all_recursive: bool | None = None
    audit: bool | None = None
    state_pairs: bool = True
    decisions: tuple[tuple[str, bool], ...] = field(default=(), compare=False)

    @property
    def facts_ok(self) -> bool:
        return all(r.ok for r in self.facts)

    @property
    def q_labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.q)

    @property
    def matches_listed(self) -> bool:
        return self.q_labels == Q_LISTED

    @property
    def proved(self) -> bool:
        return bool(
            self.scripted
            and self.script_error is None
            and self.facts_ok
            and self.all_recursive
            and self.audit
            and self.q
        )

    def summary(self) -> dict:
        return {
            "facts": [
                {"name": r.fact.name, "formula": r.fact.formula, "expected": r.fact.expected, "value": r.value, "ok": r.ok}
                for r in self.facts
            ],
            "facts_ok": self.facts_ok,
            "state_pairs": self.state_pairs,
            "scripted": self.scripted,
            "script_error": self.script_error,
            "q": [{"label": label, "clause": text} for label, text in self.q],
            "q_matches_listed": self.matches_listed,
            "recursive_predicates": list(self.recursive),
            "all_recursive": self.all_recursive,
            "fold_audit": self.audit,
            "mutual_exclusion_proved": self.proved,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=1)

    def to_text(self) -> str:
        lines = ["facts:"]
        for r in self.facts:
            mark = "ok" if r.ok else "MISMATCH"
            lines.append(f"  {r.fact.name:<13} {str(r.value).upper():<5} (expected {str(r.fact.expected).upper()}) {mark}")
        if not self.state_pairs:
            lines.append("state predicates: odd number of set arguments")
        if not self.scripted:
            lines.append("no derivation script: facts only")
            return "\n".join(lines) + "\n"
        if self.script_error:
            lines.append(f"script failed: {self.script_error}")
        else:
            lines.append("program Q:")
            lines.extend(f"  {label:>3}. {text}" for label, text in self.q)
            lines.append(f"labels {', '.join(self.q_labels)}" + ("" if self.matches_listed else f" (listed: {', '.join(Q_LISTED)})"))
            lines.append(f"all clauses of {', '.join(self.recursive) or PROPERTY} recursive: {'yes' if self.all_recursive else 'NO'}")
            lines.append(f"folding definitions unfolded on initial atoms: {'yes' if self.audit else 'NO'}")
        lines.append("mutual exclusion " + ("PROVED" if self.proved else "NOT proved"))
        return "\n".join(lines) + "\n"


def recursive_check(q: Program, pred: str = PROPERTY) -> tuple[tuple[str, ...], bool]:
    """Predicates of Def*(pred) that depend on pred, and whether each of their
    clauses calls one of them (so none has a finite derivation)."""
    closure = ext_def_of((pred, _arity(q, pred)), q)
    heads = list(dict.fromkeys(c.head.key for c in closure))
    rec = [k for k in heads if (pred, _arity(q, pred)) in depends_closure([k], q)]
    ok = all(
        any(l.positive and l.atom.key in rec for l in c.body)
        for c in closure
        if c.head.key in rec
    )
    return tuple(k[0] for k in rec), ok


def _arity(p: Program, pred: str) -> int:
    return next((len(c.head.args) for c in p if c.head.pred == pred), 2)


def _state_pairs(reg: PredicateRegistry) -> bool:
    protocol = ("init", "cre", "use", "rel", "unsafe", "c")
    return all(e.sorts.count("set") % 2 == 0 for e in reg.entries if e.name in protocol)


def verify_dbakery(
    reg: PredicateRegistry | None = None,
    library: str | None = None,
    script: str | None = None,
    facts: tuple[Fact, ...] = FACTS,
    config: StrategyConfig = StrategyConfig(),
) -> DBakeryReport:
    """Register the protocol, decide the facts and replay the derivation.

    ``reg`` may hold an already registered library; otherwise ``library``
    (default: the bundled one) is registered into a fresh registry.  An empty
    ``script`` checks the facts only.
    """
    if reg is None:
        reg = register_text(library_text() if library is None else library, config=config)
    cache: dict = {}

    def decider(text: str) -> bool:
        key = parse_formula(text, reg.signatures)
        if key not in cache:
            cache[key] = decide(key, reg, config).value
        return cache[key]

    results = tuple(FactResult(f, decider(f.formula)) for f in facts)
    script = script_text() if script is None else script
    pairs = _state_pairs(reg)
    if not script.strip():
        return DBakeryReport(results, False, state_pairs=pairs)
    p0 = Program(reg.program.clauses + tuple(reach_program()))
    try:
        run = run_script(script, initial_state(p0), decider)
    except ScriptError as e:
        return DBakeryReport(results, True, str(e), state_pairs=pairs)
    q = run.state.current
    rec, ok = recursive_check(q)
    rec_keys = set(rec)
    labelled = tuple(
        (label, format_clause(c)) for label, c in run.labelled() if c.head.pred in rec_keys
    )
    labelled = tuple(sorted(labelled, key=lambda x: (not x[0].isdigit(), int(x[0]) if x[0].isdigit() else 0, x[0])))
    return DBakeryReport(
        results,
        True,
        None,
        labelled,
        rec,
        ok,
        audit_theorem4(run.state.trace),
        pairs,
        tuple(sorted(run.decisions.items())),
    )
