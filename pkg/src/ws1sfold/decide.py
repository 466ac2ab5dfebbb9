"""Deciding closed formulas, compositional predicate synthesis and ground queries."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .formula import (
    IND,
    BINARY,
    QUANT,
    Definition,
    Formula,
    Not,
    Pred,
    SortedVar,
    Typed,
    conj,
    desugar,
    explicit_type,
    free_vars,
    parse_formula,
    parse_library,
    pretty,
)
from .ld import ld_resolve
from .lloyd_topor import default_new_names, lt_transform
from .models import ext_def_of, nonempty_predicates
from .natset import RESERVED, natset_program
from .program import Program
from .progtext import format_program, parse_clauses
from .rules import DerivationStep
from .strategy import StrategyConfig, SynthesisResult, new_pred_names, synthesize
from .terms import Atom, Clause, Term, is_ground, nat_term, set_term

MAIN = "f"


class RegistryError(ValueError):
    pass


@dataclass(frozen=True)
class Entry:
    name: str
    params: tuple[SortedVar, ...]
    fragment: tuple[Clause, ...]
    source: str
    result: SynthesisResult | None = field(default=None, repr=False, compare=False)

    @property
    def sorts(self) -> tuple[str, ...]:
        return tuple(v.sort for v in self.params)

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class PredicateRegistry:
    """Synthesized predicates over NatSet; an immutable value."""

    entries: tuple[Entry, ...] = ()

    def __contains__(self, name: str) -> bool:
        return any(e.name == name for e in self.entries)

    def entry(self, name: str) -> Entry:
        for e in self.entries:
            if e.name == name:
                return e
        raise RegistryError(f"predicate {name!r} is not registered")

    @property
    def signatures(self) -> dict[str, tuple[str, ...]]:
        return {e.name: e.sorts for e in self.entries}

    @cached_property
    def program(self) -> Program:
        clauses = list(natset_program())
        for e in self.entries:
            clauses.extend(e.fragment)
        return Program(tuple(clauses))

    def used_names(self) -> set[str]:
        return {c.head.pred for c in self.program} | set(RESERVED)

    def manifest(self) -> dict:
        return {
            e.name: {"params": [v.name for v in e.params], "sorts": list(e.sorts), "formula": e.source}
            for e in self.entries
        }

    def program_text(self) -> str:
        return format_program([c for e in self.entries for c in e.fragment])

    def dumps(self) -> tuple[str, str]:
        """Program text and JSON manifest."""
        return self.program_text(), json.dumps(self.manifest(), indent=1)

    @classmethod
    def loads(cls, program_text: str, manifest_json: str) -> PredicateRegistry:
        manifest = json.loads(manifest_json)
        clauses = parse_clauses(program_text)
        entries = []
        claimed: set[str] = set()
        for name, m in manifest.items():
            p = Program(tuple(clauses), check_strata=False)
            keys = [k for k in _closure(p, name) if k[0] not in claimed]
            frag = tuple(c for c in clauses if c.head.key in keys)
            claimed.update(k[0] for k in keys)
            params = tuple(SortedVar(v, s) for v, s in zip(m["params"], m["sorts"]))
            entries.append(Entry(name, params, frag, m["formula"]))
        return cls(tuple(entries))


def _closure(p: Program, name: str) -> list[tuple[str, int]]:
    return [c.head.key for c in ext_def_of((name, _arity(p, name)), p)]


def _arity(p: Program, name: str) -> int:
    for c in p:
        if c.head.pred == name:
            return len(c.head.args)
    return 0


@dataclass(frozen=True)
class Verdict:
    value: bool
    program: Program
    trace: tuple[DerivationStep, ...] = field(repr=False)
    result: SynthesisResult | None = field(default=None, repr=False, compare=False)

    def __bool__(self) -> bool:
        return self.value


def _called(f: Formula) -> set[str]:
    out: set[str] = set()

    def go(g):
        if isinstance(g, Pred):
            out.add(g.name)
        elif isinstance(g, Not):
            go(g.arg)
        elif isinstance(g, BINARY):
            go(g.left)
            go(g.right)
        elif isinstance(g, QUANT):
            go(g.body)

    go(f)
    return out


def _check_calls(f: Formula, reg: PredicateRegistry) -> None:
    for name in sorted(_called(f)):
        if name not in reg:
            raise RegistryError(f"predicate {name!r} is not registered")


def _as_formula(phi: Formula | str, reg: PredicateRegistry) -> Formula:
    return parse_formula(phi, reg.signatures) if isinstance(phi, str) else phi


def decide(phi: Formula | str, reg: PredicateRegistry = PredicateRegistry(), config: StrategyConfig = StrategyConfig()) -> Verdict:
    """Truth of a closed formula: synthesize ``f <- phi`` and look for the unit clause ``f``."""
    phi = _as_formula(phi, reg)
    if free_vars(phi):
        raise ValueError(f"formula has free variables {[v.name for v in free_vars(phi)]}")
    _check_calls(phi, reg)
    used = reg.used_names() | _called(phi)
    main = MAIN if MAIN not in used else new_pred_names(used, prefix=MAIN)()
    used.add(main)
    h = lt_transform(main, explicit_type(desugar(phi)), new_name=default_new_names(used))
    res = synthesize(reg.program, h, config, new_name=new_pred_names(used | {c.head.pred for c in h.defs}))
    value = Clause(Atom(main)) in set(res.transf_p)
    return Verdict(value, res.transf_p, res.trace, res)


def synthesize_predicate(
    name: str,
    phi: Formula | str | Definition,
    reg: PredicateRegistry = PredicateRegistry(),
    params: Sequence[SortedVar] | None = None,
    config: StrategyConfig = StrategyConfig(),
    source: str | None = None,
) -> PredicateRegistry:
    """Register ``name`` as the synthesized program for ``phi`` (head order ``params``)."""
    if isinstance(phi, Definition):
        params = phi.params if params is None else params
        source = source or phi.source or str(phi)
        phi = phi.body
    elif isinstance(phi, str):
        source = source or phi
        phi = parse_formula(phi, reg.signatures)
    used = reg.used_names()
    if name in used or name in reg:
        raise RegistryError(f"predicate name {name!r} is already in use")
    _check_calls(phi, reg)
    params = tuple(free_vars(phi)) if params is None else tuple(params)
    unused = [v for v in params if v not in free_vars(phi)]
    if unused:
        phi = conj([*map(Typed, unused), phi])
    used |= {name}
    h = lt_transform(name, explicit_type(desugar(phi)), head_vars=params, new_name=default_new_names(used))
    res = synthesize(reg.program, h, config, new_name=new_pred_names(used | {c.head.pred for c in h.defs}))
    fragment = _fragment(res, name, len(params))
    entry = Entry(name, params, fragment, source or pretty(phi), res)
    return PredicateRegistry(reg.entries + (entry,))


def _fragment(res: SynthesisResult, name: str, arity: int) -> tuple[Clause, ...]:
    """The new clauses reachable from ``name``, without useless ones."""
    old = {c.id for c in res.p0}
    live = nonempty_predicates(res.transf_p)
    reach = ext_def_of((name, arity), res.transf_p)
    return tuple(
        c.with_id(None)
        for c in reach
        if c.id not in old and c.head.key in live and all(l.atom.key in live for l in c.body)
    )


def register_library(defs: Iterable[Definition], reg: PredicateRegistry = PredicateRegistry(), config: StrategyConfig = StrategyConfig()) -> PredicateRegistry:
    for d in defs:
        reg = synthesize_predicate(d.name, d, reg, config=config)
    return reg


def register_text(text: str, reg: PredicateRegistry = PredicateRegistry(), config: StrategyConfig = StrategyConfig()) -> PredicateRegistry:
    """Parse and register a formula library, allowing calls to already registered predicates."""
    return register_library(parse_library(text, reg.signatures), reg, config)


def encode(value, sort: str | None = None) -> Term:
    """Ground term for a natural number or a finite set (terms pass through)."""
    if isinstance(value, (int,)) and not isinstance(value, bool):
        if sort not in (None, IND) or value < 0:
            raise ValueError(f"cannot encode {value!r} as a set")
        return nat_term(value)
    if isinstance(value, (set, frozenset, list, tuple)):
        if sort == IND:
            raise ValueError(f"cannot encode {value!r} as an individual")
        return set_term(value)
    return value


def query(reg: PredicateRegistry, name: str, args: Sequence, budget: int = 10**6) -> bool:
    e = reg.entry(name)
    if len(args) != e.arity:
        raise ValueError(f"{name} takes {e.arity} arguments, got {len(args)}")
    goal = Atom(name, tuple(encode(a, s) for a, s in zip(args, e.sorts)))
    if not is_ground(goal):
        raise ValueError("query arguments must be ground")
    return ld_resolve(reg.program, [goal], budget) is not None
