"""Programs: ordered clause sequences with a predicate index and strata."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import networkx as nx

from .terms import Clause


class StratificationError(ValueError):
    pass


def dependency_graph(clauses: Iterable[Clause]) -> nx.DiGraph:
    """Edges head -> body predicate, labelled ``negative`` when any occurrence is."""
    g = nx.DiGraph()
    for c in clauses:
        h = c.head.key
        g.add_node(h)
        for lit in c.body:
            b = lit.atom.key
            if g.has_edge(h, b):
                g[h][b]["negative"] |= not lit.positive
            else:
                g.add_edge(h, b, negative=not lit.positive)
    return g


def stratify(clauses: Iterable[Clause]) -> dict[tuple[str, int], int] | None:
    """Minimal stratum per predicate, or ``None`` if a cycle passes through negation."""
    g = dependency_graph(clauses)
    cond = nx.condensation(g)
    members = cond.graph["mapping"]
    for u, v, d in g.edges(data=True):
        if d["negative"] and members[u] == members[v]:
            return None
    level: dict[int, int] = {}
    for comp in reversed(list(nx.topological_sort(cond))):
        lv = 0
        for node in cond.nodes[comp]["members"]:
            for _, b, d in g.out_edges(node, data=True):
                if members[b] != comp:
                    lv = max(lv, level[members[b]] + (1 if d["negative"] else 0))
        level[comp] = lv
    return {p: level[members[p]] for p in g.nodes}


@dataclass(frozen=True)
class Program:
    clauses: tuple[Clause, ...] = ()
    check_strata: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        if self.check_strata and self.has_negation and self.strata is None:
            raise StratificationError("program is not stratified")

    @cached_property
    def index(self) -> dict[tuple[str, int], tuple[Clause, ...]]:
        idx: dict[tuple[str, int], list[Clause]] = {}
        for c in self.clauses:
            idx.setdefault(c.head.key, []).append(c)
        return {k: tuple(v) for k, v in idx.items()}

    @cached_property
    def by_id(self) -> dict[int, Clause]:
        return {c.id: c for c in self.clauses if c.id is not None}

    @cached_property
    def has_negation(self) -> bool:
        return any(not l.positive for c in self.clauses for l in c.body)

    @cached_property
    def strata(self) -> dict[tuple[str, int], int] | None:
        return stratify(self.clauses)

    def definition(self, key: tuple[str, int]) -> tuple[Clause, ...]:
        return self.index.get(key, ())

    def predicates(self) -> set[tuple[str, int]]:
        out = set()
        for c in self.clauses:
            out.add(c.head.key)
            out.update(l.atom.key for l in c.body)
        return out

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __add__(self, other: Program | Iterable[Clause]) -> Program:
        return Program(self.clauses + tuple(other))

    def __str__(self) -> str:
        from .progtext import format_program

        return format_program(self)
