"""Prolog-style program text: printing and parsing.

    max([y|S], 0) :- new1(S).
    g :- nat(X), \\+ h(X).

Lists print as ``[y,n|S]`` or ``[y,n]``; ``leq``/``mem`` stand for the
order and membership relations.  ``%`` and ``#`` start line comments.
"""

from __future__ import annotations

import re
from typing import Iterator

from .program import Program
from .terms import CONS, NIL, Atom, Clause, Fn, Literal, Term, Var


class ProgramSyntaxError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line, self.col = line, col


# -- printing --------------------------------------------------------------------

def format_term(t: Term) -> str:
    if type(t) is Var:
        return t.name
    if t.functor == CONS:
        items = []
        while type(t) is Fn and t.functor == CONS:
            items.append(format_term(t.args[0]))
            t = t.args[1]
        inner = ",".join(items)
        return f"[{inner}]" if t == NIL else f"[{inner}|{format_term(t)}]"
    if not t.args:
        return t.functor
    return f"{t.functor}({','.join(format_term(a) for a in t.args)})"


def format_atom(a: Atom) -> str:
    if not a.args:
        return a.pred
    return f"{a.pred}({','.join(format_term(t) for t in a.args)})"


def format_literal(l: Literal) -> str:
    return format_atom(l.atom) if l.positive else "\\+ " + format_atom(l.atom)


def format_clause(c: Clause) -> str:
    if not c.body:
        return format_atom(c.head) + "."
    return f"{format_atom(c.head)} :- {', '.join(format_literal(l) for l in c.body)}."


def format_program(p: Program | list[Clause], main: str | None = None) -> str:
    lines = [f"# main: {main}"] if main else []
    lines.extend(format_clause(c) for c in p)
    return "\n".join(lines) + "\n" if lines else ""


# -- parsing ---------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>[%\#][^\n]*)
  | (?P<neck>:-)
  | (?P<naf>\\\+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*|0|\[\])
  | (?P<punct>[()\[\],|.])
    """,
    re.VERBOSE,
)


def _tokens(text: str) -> Iterator[tuple[str, str, int, int]]:
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ProgramSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            yield kind, m.group(), line, m.start() - start + 1
        pos = m.end()
    yield "eof", "", line, pos - start + 1


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_tokens(text))
        self.i = 0

    def peek(self) -> tuple[str, str, int, int]:
        return self.toks[self.i]

    def take(self, value: str | None = None, kind: str | None = None) -> str:
        k, v, line, col = self.toks[self.i]
        if (value is not None and v != value) or (kind is not None and k != kind):
            want = value if value is not None else kind
            raise ProgramSyntaxError(f"expected {want!r}, found {v or 'end of input'!r}", line, col)
        self.i += 1
        return v

    def at(self, value: str) -> bool:
        return self.toks[self.i][1] == value

    def term(self) -> Term:
        if self.at("["):
            return self.list_term()
        name = self.take(kind="ident")
        if name == "[]":
            return NIL
        if name[0].isupper() or name[0] == "_":
            return Var(name)
        if self.at("("):
            self.take("(")
            args = [self.term()]
            while self.at(","):
                self.take(",")
                args.append(self.term())
            self.take(")")
            return Fn(name, tuple(args))
        return Fn(name)

    def list_term(self) -> Term:
        self.take("[")
        items = [self.term()]
        while self.at(","):
            self.take(",")
            items.append(self.term())
        tail: Term = NIL
        if self.at("|"):
            self.take("|")
            tail = self.term()
        self.take("]")
        for it in reversed(items):
            tail = Fn(CONS, (it, tail))
        return tail

    def atom(self) -> Atom:
        _, v, line, col = self.peek()
        name = self.take(kind="ident")
        if name[0].isupper() or name[0] == "_" or name in ("0", "[]"):
            raise ProgramSyntaxError(f"bad predicate name {name!r}", line, col)
        args: list[Term] = []
        if self.at("("):
            self.take("(")
            args.append(self.term())
            while self.at(","):
                self.take(",")
                args.append(self.term())
            self.take(")")
        return Atom(name, tuple(args))

    def literal(self) -> Literal:
        if self.at("\\+"):
            self.take("\\+")
            return Literal(False, self.atom())
        return Literal(True, self.atom())

    def clause(self) -> Clause:
        head = self.atom()
        body = []
        if self.at(":-"):
            self.take(":-")
            body.append(self.literal())
            while self.at(","):
                self.take(",")
                body.append(self.literal())
        self.take(".")
        return Clause(head, tuple(body))


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.take(kind="eof")
    return t


def parse_atom(text: str) -> Atom:
    p = _Parser(text)
    a = p.atom()
    p.take(kind="eof")
    return a


def parse_clause(text: str) -> Clause:
    text = text.strip()
    if not text.endswith("."):
        text += "."
    p = _Parser(text)
    c = p.clause()
    p.take(kind="eof")
    return c


def parse_clauses(text: str) -> list[Clause]:
    p = _Parser(text)
    out = []
    while p.peek()[0] != "eof":
        out.append(p.clause())
    return out


def parse_program(text: str, check_strata: bool = True) -> Program:
    return Program(tuple(parse_clauses(text)), check_strata=check_strata)


def read_main(text: str) -> str | None:
    m = re.search(r"^#\s*main:\s*(\S+)", text, re.MULTILINE)
    return m.group(1) if m else None
