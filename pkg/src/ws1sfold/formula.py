"""WS1S formulas: syntax tree, concrete syntax, desugaring and explicit typing.

Concrete syntax::

    ex1 N phi | ex2 S phi | all1 N phi | all2 S phi
    phi <=> psi | phi => psi | phi | psi | phi & psi | ~phi
    n <= m | n < m | n = m | n ~= m | n in S
    p(t1, ..., tk)            # registered predicate or set macro
    nat(N) | set(S)           # type atoms

Individual terms are ``0``, variables and ``s(n)``.  A file may hold a bare
formula or definitions ``name(X1,...,Xk) := phi;``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union

IND = "ind"
SET = "set"


class FormulaSyntaxError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line, self.col = line, col


class SortError(FormulaSyntaxError):
    pass


@dataclass(frozen=True, slots=True)
class SortedVar:
    name: str
    sort: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class ITerm:
    """``s^k(0)`` when ``var`` is None, else ``s^k(var)``."""

    var: SortedVar | None = None
    k: int = 0

    def __str__(self) -> str:
        base = self.var.name if self.var else "0"
        return "s(" * self.k + base + ")" * self.k


ZERO = ITerm()


def ivar(name: str, k: int = 0) -> ITerm:
    return ITerm(SortedVar(name, IND), k)


def svar(name: str) -> SortedVar:
    return SortedVar(name, SET)


# -- nodes -----------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Leq:
    left: ITerm
    right: ITerm


@dataclass(frozen=True, slots=True)
class In:
    elem: ITerm
    set: SortedVar


@dataclass(frozen=True, slots=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Exists:
    var: SortedVar
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Typed:
    """Type atom ``nat(X)`` or ``set(X)``."""

    var: SortedVar


@dataclass(frozen=True, slots=True)
class Pred:
    """Atom over a registered predicate; args are ITerms or set variables."""

    name: str
    args: tuple


# sugar

@dataclass(frozen=True, slots=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Forall:
    var: SortedVar
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Eq:
    left: ITerm
    right: ITerm


@dataclass(frozen=True, slots=True)
class Neq:
    left: ITerm
    right: ITerm


@dataclass(frozen=True, slots=True)
class Lt:
    left: ITerm
    right: ITerm


@dataclass(frozen=True, slots=True)
class Macro:
    """Set-algebra shorthand; see :data:`MACROS`."""

    name: str
    args: tuple


Formula = Union[Leq, In, Not, And, Exists, Typed, Pred, Or, Implies, Iff, Forall, Eq, Neq, Lt, Macro]

CORE = (Leq, In, Not, And, Exists, Typed, Pred)
BINARY = (And, Or, Implies, Iff)
QUANT = (Exists, Forall)

# name -> argument sorts
MACROS: dict[str, tuple[str, ...]] = {
    "seteq": (SET, SET),  # X = Y
    "union": (SET, SET, SET),  # Z = X u Y
    "ins": (SET, SET, IND),  # Z = X u {n}
    "del": (SET, SET, IND),  # Z = X - {n}
    "single": (SET, IND),  # Z = {n}
}


def conj(fs: Iterable[Formula]) -> Formula | None:
    out = None
    for f in fs:
        out = f if out is None else And(out, f)
    return out


def conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


# -- traversal -------------------------------------------------------------------

def _arg_vars(a) -> Iterator[SortedVar]:
    if isinstance(a, ITerm):
        if a.var is not None:
            yield a.var
    else:
        yield a


def _occurrences(f: Formula, bound: frozenset) -> Iterator[SortedVar]:
    """Free variable occurrences, left to right."""
    if isinstance(f, (Leq, Eq, Neq, Lt)):
        for t in (f.left, f.right):
            if t.var is not None and t.var not in bound:
                yield t.var
    elif isinstance(f, In):
        for v in (*_arg_vars(f.elem), f.set):
            if v not in bound:
                yield v
    elif isinstance(f, Typed):
        if f.var not in bound:
            yield f.var
    elif isinstance(f, (Pred, Macro)):
        for a in f.args:
            for v in _arg_vars(a):
                if v not in bound:
                    yield v
    elif isinstance(f, Not):
        yield from _occurrences(f.arg, bound)
    elif isinstance(f, BINARY):
        yield from _occurrences(f.left, bound)
        yield from _occurrences(f.right, bound)
    elif isinstance(f, QUANT):
        yield from _occurrences(f.body, bound | {f.var})
    else:
        raise TypeError(f"not a formula: {f!r}")


def free_vars(f: Formula) -> list[SortedVar]:
    return list(dict.fromkeys(_occurrences(f, frozenset())))


def all_names(f: Formula) -> set[str]:
    out: set[str] = set()

    def go(g):
        if isinstance(g, QUANT):
            out.add(g.var.name)
            go(g.body)
        elif isinstance(g, Not):
            go(g.arg)
        elif isinstance(g, BINARY):
            go(g.left)
            go(g.right)
        else:
            out.update(v.name for v in _occurrences(g, frozenset()))

    go(f)
    return out


def binders(f: Formula) -> list[SortedVar]:
    out = []

    def go(g):
        if isinstance(g, QUANT):
            out.append(g.var)
            go(g.body)
        elif isinstance(g, Not):
            go(g.arg)
        elif isinstance(g, BINARY):
            go(g.left)
            go(g.right)

    go(f)
    return out


def is_core(f: Formula) -> bool:
    if isinstance(f, (Leq, In, Typed, Pred)):
        return True
    if isinstance(f, Not):
        return is_core(f.arg)
    if isinstance(f, And):
        return is_core(f.left) and is_core(f.right)
    if isinstance(f, Exists):
        return is_core(f.body)
    return False


def node_count(f: Formula) -> int:
    if isinstance(f, Not):
        return 1 + node_count(f.arg)
    if isinstance(f, BINARY):
        return 1 + node_count(f.left) + node_count(f.right)
    if isinstance(f, QUANT):
        return 1 + node_count(f.body)
    return 1


# -- substitution and renaming -------------------------------------------------------

def _sub_iterm(t: ITerm, s: Mapping[SortedVar, object]) -> ITerm:
    if t.var is None or t.var not in s:
        return t
    r = s[t.var]
    if isinstance(r, SortedVar):
        return ITerm(r, t.k)
    return ITerm(r.var, r.k + t.k)


def _sub_arg(a, s):
    if isinstance(a, ITerm):
        return _sub_iterm(a, s)
    r = s.get(a, a)
    if not isinstance(r, SortedVar):
        raise SortError(f"set variable {a} replaced by an individual term")
    return r


def substitute(f: Formula, s: Mapping[SortedVar, object]) -> Formula:
    """Replace free variables; individual variables map to ITerms (or variables),
    set variables to set variables.  Binders are assumed not to capture."""
    if not s:
        return f
    if isinstance(f, (Leq, Eq, Neq, Lt)):
        return type(f)(_sub_iterm(f.left, s), _sub_iterm(f.right, s))
    if isinstance(f, In):
        return In(_sub_iterm(f.elem, s), _sub_arg(f.set, s))
    if isinstance(f, Typed):
        r = s.get(f.var, f.var)
        if isinstance(r, SortedVar):
            return Typed(r)
        return _typed_term(r)
    if isinstance(f, (Pred, Macro)):
        return type(f)(f.name, tuple(_sub_arg(a, s) for a in f.args))
    if isinstance(f, Not):
        return Not(substitute(f.arg, s))
    if isinstance(f, BINARY):
        return type(f)(substitute(f.left, s), substitute(f.right, s))
    if isinstance(f, QUANT):
        inner = {k: v for k, v in s.items() if k != f.var}
        return type(f)(f.var, substitute(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


def _typed_term(t: ITerm) -> Formula:
    # nat(s^k(x)) holds iff nat(x); nat(s^k(0)) always
    if t.var is None:
        return Leq(ZERO, ZERO)
    return Typed(t.var)


class NameSupply:
    """Fresh names avoiding a growing set of used names."""

    def __init__(self, used: Iterable[str] = ()):
        self.used = set(used)

    def fresh(self, base: str) -> str:
        stem = re.sub(r"\d+$", "", base) or base
        if base not in self.used:
            self.used.add(base)
            return base
        for i in itertools.count(1):
            cand = f"{stem}{i}"
            if cand not in self.used:
                self.used.add(cand)
                return cand
        raise AssertionError


def rename_apart(f: Formula, avoid: Iterable[str] = ()) -> Formula:
    """Rename binders so each is bound once and none clashes with a free name."""
    free = {v.name for v in free_vars(f)}
    supply = NameSupply(free | set(avoid))

    def go(g, env):
        if isinstance(g, QUANT):
            name = supply.fresh(g.var.name)
            nv = SortedVar(name, g.var.sort)
            env2 = dict(env)
            env2[g.var] = nv
            return type(g)(nv, go(g.body, env2))
        if isinstance(g, Not):
            return Not(go(g.arg, env))
        if isinstance(g, BINARY):
            return type(g)(go(g.left, env), go(g.right, env))
        return substitute(g, env)

    return go(f, {})


# -- desugaring ------------------------------------------------------------------

def _macro_body(m: Macro, x: SortedVar) -> Formula:
    xt = ITerm(x)
    a = m.args
    if m.name == "seteq":
        return Iff(In(xt, a[0]), In(xt, a[1]))
    if m.name == "union":
        return Iff(In(xt, a[0]), Or(In(xt, a[1]), In(xt, a[2])))
    if m.name == "ins":
        return Iff(In(xt, a[0]), Or(In(xt, a[1]), Eq(xt, a[2])))
    if m.name == "del":
        return Iff(In(xt, a[0]), And(In(xt, a[1]), Neq(xt, a[2])))
    if m.name == "single":
        return Iff(In(xt, a[0]), Eq(xt, a[1]))
    raise ValueError(f"unknown macro {m.name}")


def expand_macro(m: Macro, supply: NameSupply) -> Formula:
    x = SortedVar(supply.fresh("x"), IND)
    return Forall(x, _macro_body(m, x))


def desugar(f: Formula) -> Formula:
    supply = NameSupply(all_names(f))

    def go(g):
        if isinstance(g, (Leq, In, Typed, Pred)):
            return g
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, And):
            return And(go(g.left), go(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, go(g.body))
        if isinstance(g, Forall):
            return Not(Exists(g.var, Not(go(g.body))))
        if isinstance(g, Or):
            return Not(And(Not(go(g.left)), Not(go(g.right))))
        if isinstance(g, Implies):
            return Not(And(go(g.left), Not(go(g.right))))
        if isinstance(g, Iff):
            return And(go(Implies(g.left, g.right)), go(Implies(g.right, g.left)))
        if isinstance(g, Eq):
            return And(Leq(g.left, g.right), Leq(g.right, g.left))
        if isinstance(g, Neq):
            return Not(go(Eq(g.left, g.right)))
        if isinstance(g, Lt):
            return Leq(ITerm(g.left.var, g.left.k + 1), g.right)
        if isinstance(g, Macro):
            return go(expand_macro(g, supply))
        raise TypeError(f"not a formula: {g!r}")

    return rename_apart(go(f))


# -- explicit typing -----------------------------------------------------------------

@dataclass(frozen=True)
class TypedFormula:
    free_type_prefix: tuple[Typed, ...]
    body: Formula

    def formula(self) -> Formula:
        return conj([*self.free_type_prefix, self.body])

    def __str__(self) -> str:
        return pretty(self.formula())


def type_quantifiers(f: Formula) -> Formula:
    if isinstance(f, Exists):
        return Exists(f.var, And(Typed(f.var), type_quantifiers(f.body)))
    if isinstance(f, Not):
        return Not(type_quantifiers(f.arg))
    if isinstance(f, And):
        return And(type_quantifiers(f.left), type_quantifiers(f.right))
    if isinstance(f, (Leq, In, Typed, Pred)):
        return f
    raise ValueError(f"explicit typing needs a core formula, got {type(f).__name__}")


def explicit_type(f: Formula) -> TypedFormula:
    return TypedFormula(tuple(Typed(v) for v in free_vars(f)), type_quantifiers(f))


# -- printing --------------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_OPS = {Iff: "<=>", Implies: "=>", Or: "|", And: "&"}
_QNAME = {(Exists, IND): "ex1", (Exists, SET): "ex2", (Forall, IND): "all1", (Forall, SET): "all2"}


def pretty(f: Formula) -> str:
    def go(g, prec: int, last: bool) -> str:
        if isinstance(g, Leq):
            return f"{g.left} <= {g.right}"
        if isinstance(g, Lt):
            return f"{g.left} < {g.right}"
        if isinstance(g, Eq):
            return f"{g.left} = {g.right}"
        if isinstance(g, Neq):
            return f"{g.left} ~= {g.right}"
        if isinstance(g, In):
            return f"{g.elem} in {g.set}"
        if isinstance(g, Typed):
            return f"{'nat' if g.var.sort == IND else 'set'}({g.var})"
        if isinstance(g, (Pred, Macro)):
            return f"{g.name}({', '.join(str(a) for a in g.args)})"
        if isinstance(g, Not):
            if isinstance(g.arg, (Leq, Lt, Eq, Neq, In)):
                return f"~({go(g.arg, 0, True)})"
            return "~" + go(g.arg, 5, last)
        if isinstance(g, QUANT):
            body = g.body
            inner = go(body, 0, True) if isinstance(body, QUANT) else f"({go(body, 0, True)})"
            s = f"{_QNAME[(type(g), g.var.sort)]} {g.var} {inner}"
            return s if last else f"({s})"
        if isinstance(g, BINARY):
            p = _PREC[type(g)]
            s = f"{go(g.left, p, False)} {_OPS[type(g)]} {go(g.right, p + 1, last or p < prec)}"
            return f"({s})" if p < prec else s
        raise TypeError(f"not a formula: {g!r}")

    return go(f, 0, True)


# -- parsing ---------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<op><=>|=>|<=|~=|:=|[<=&|~(),;:])
  | (?P<num>0)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

_QUANTS = {"ex1": (Exists, IND), "ex2": (Exists, SET), "all1": (Forall, IND), "all2": (Forall, SET)}
_KEYWORDS = set(_QUANTS) | {"in"}


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    out = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, start = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            out.append((kind, m.group(), line, m.start() - start + 1))
        pos = m.end()
    out.append(("eof", "", line, pos - start + 1))
    return out


class _Scope:
    """Sort bookkeeping: bound variables by scope, free variables globally."""

    def __init__(self, free: dict[str, str] | None = None):
        self.stack: list[tuple[str, str]] = []
        self.free: dict[str, str] = {} if free is None else free

    def use(self, name: str, sort: str, line: int, col: int) -> SortedVar:
        for n, s in reversed(self.stack):
            if n == name:
                if s != sort:
                    raise SortError(f"variable {name} is {_sort_word(s)} but used as {_sort_word(sort)}", line, col)
                return SortedVar(name, s)
        known = self.free.setdefault(name, sort)
        if known != sort:
            raise SortError(f"variable {name} is {_sort_word(known)} but used as {_sort_word(sort)}", line, col)
        return SortedVar(name, sort)


def _sort_word(s: str) -> str:
    return "an individual" if s == IND else "a set"


class _FormulaParser:
    def __init__(self, text: str, signatures: Mapping[str, tuple[str, ...]] | None = None):
        self.toks = _tokenize(text)
        self.i = 0
        self.sigs = dict(signatures or {})

    # token helpers
    def peek(self, off: int = 0):
        return self.toks[min(self.i + off, len(self.toks) - 1)]

    def at(self, value: str, off: int = 0) -> bool:
        k, v, _, _ = self.peek(off)
        return v == value and k != "eof"

    def take(self, value: str | None = None, kind: str | None = None) -> str:
        k, v, line, col = self.peek()
        ok = (value is None or v == value) and (kind is None or k == kind) and (k != "eof" or kind == "eof")
        if not ok:
            want = value if value is not None else kind
            raise FormulaSyntaxError(f"expected {want!r}, found {v or 'end of input'!r}", line, col)
        self.i += 1
        return v

    def error(self, msg: str):
        _, _, line, col = self.peek()
        return FormulaSyntaxError(msg, line, col)

    # grammar
    def formula(self, sc: _Scope) -> Formula:
        return self.binary(sc, 0)

    def quant(self, sc: _Scope) -> Formula:
        cls, sort = _QUANTS[self.take(kind="ident")]
        _, name, line, col = self.peek()
        self.take(kind="ident")
        if name in _KEYWORDS:
            raise FormulaSyntaxError(f"reserved word {name!r} used as a variable", line, col)
        sc.stack.append((name, sort))
        try:
            body = self.formula(sc)
        finally:
            sc.stack.pop()
        return cls(SortedVar(name, sort), body)

    _LEVELS = [("<=>", Iff), ("=>", Implies), ("|", Or), ("&", And)]

    def binary(self, sc: _Scope, level: int) -> Formula:
        if level == len(self._LEVELS):
            return self.neg(sc)
        op, cls = self._LEVELS[level]
        left = self.binary(sc, level + 1)
        while self.at(op):
            self.take(op)
            left = cls(left, self.binary(sc, level + 1))
        return left

    def neg(self, sc: _Scope) -> Formula:
        if self.at("~"):
            self.take("~")
            return Not(self.neg(sc))
        if self.at("("):
            self.take("(")
            f = self.formula(sc)
            self.take(")")
            return f
        if self.peek()[0] == "ident" and self.peek()[1] in _QUANTS:
            return self.quant(sc)
        return self.atom(sc)

    def iterm(self, sc: _Scope) -> ITerm:
        k = 0
        while self.at("s") and self.at("(", 1):
            self.take("s")
            self.take("(")
            k += 1
        kind, v, line, col = self.peek()
        if kind == "num":
            self.take()
            t = ITerm(None, k)
        elif kind == "ident" and v not in _KEYWORDS:
            self.take()
            t = ITerm(sc.use(v, IND, line, col), k)
        else:
            raise FormulaSyntaxError(f"expected an individual term, found {v or 'end of input'!r}", line, col)
        for _ in range(k):
            self.take(")")
        return t

    def set_var(self, sc: _Scope) -> SortedVar:
        kind, v, line, col = self.peek()
        if kind != "ident" or v in _KEYWORDS:
            raise FormulaSyntaxError(f"expected a set variable, found {v or 'end of input'!r}", line, col)
        self.take()
        return sc.use(v, SET, line, col)

    def atom(self, sc: _Scope) -> Formula:
        kind, v, line, col = self.peek()
        if kind == "ident" and self.at("(", 1) and v != "s":
            return self.call(sc)
        left = self.iterm(sc)
        kind, op, line, col = self.peek()
        if op == "in":
            self.take()
            return In(left, self.set_var(sc))
        rels = {"<=": Leq, "<": Lt, "=": Eq, "~=": Neq}
        if op not in rels:
            raise FormulaSyntaxError(f"expected a relation after {left}, found {op or 'end of input'!r}", line, col)
        self.take()
        return rels[op](left, self.iterm(sc))

    def call(self, sc: _Scope) -> Formula:
        _, name, line, col = self.peek()
        self.take()
        self.take("(")
        if name in ("nat", "set"):
            sort = IND if name == "nat" else SET
            _, v, l2, c2 = self.peek()
            self.take(kind="ident")
            self.take(")")
            return Typed(sc.use(v, sort, l2, c2))
        if name in self.sigs:  # registered predicates shadow macros
            sorts, cls = self.sigs[name], Pred
        elif name in MACROS:
            sorts, cls = MACROS[name], Macro
        else:
            raise FormulaSyntaxError(f"unknown predicate {name!r}", line, col)
        args = []
        for i, sort in enumerate(sorts):
            if i:
                self.take(",")
            args.append(self.iterm(sc) if sort == IND else self.set_var(sc))
        if not self.at(")"):
            raise self.error(f"{name} takes {len(sorts)} arguments")
        self.take(")")
        return cls(name, tuple(args))

    def param(self, sc: _Scope) -> str:
        """A parameter name with an optional sort annotation ``X: set`` or ``n: ind``."""
        name = self.take(kind="ident")
        if self.at(":"):
            self.take(":")
            _, word, line, col = self.peek()
            sorts = {"ind": IND, "set": SET}
            if word not in sorts:
                raise FormulaSyntaxError(f"unknown sort {word!r}", line, col)
            self.take()
            sc.free[name] = sorts[word]
        return name

    def definition(self) -> tuple[str, list[str], Formula, dict[str, str]]:
        _, name, line, col = self.peek()
        self.take(kind="ident")
        self.take("(")
        sc = _Scope()
        params = [self.param(sc)]
        while self.at(","):
            self.take(",")
            params.append(self.param(sc))
        self.take(")")
        self.take(":=")
        body = self.formula(sc)
        return name, params, body, sc.free


def parse_formula(text: str, signatures: Mapping[str, tuple[str, ...]] | None = None) -> Formula:
    p = _FormulaParser(text, signatures)
    f = p.formula(_Scope())
    p.take(kind="eof")
    return rename_apart(f)


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple[SortedVar, ...]
    body: Formula
    source: str = ""

    @property
    def sorts(self) -> tuple[str, ...]:
        return tuple(v.sort for v in self.params)

    def __str__(self) -> str:
        return f"{self.name}({', '.join(v.name for v in self.params)}) := {pretty(self.body)};"


def _check_definition(name, params, body, free, line=0, col=0) -> Definition:
    if len(set(params)) != len(params):
        raise FormulaSyntaxError(f"repeated parameter in {name}", line, col)
    extra = [v for v in free if v not in params]
    if extra:
        raise FormulaSyntaxError(f"{name}: free variables {extra} are not parameters", line, col)
    missing = [v for v in params if v not in free]
    if missing:
        raise SortError(f"{name}: cannot infer the sort of unused parameters {missing}", line, col)
    body = rename_apart(body)
    return Definition(name, tuple(SortedVar(v, free[v]) for v in params), body)


def parse_library(text: str, signatures: Mapping[str, tuple[str, ...]] | None = None) -> list[Definition]:
    """Definitions ``name(X,...) := phi;`` in order; later ones may call earlier ones."""
    p = _FormulaParser(text, signatures)
    out = []
    while p.peek()[0] != "eof":
        start = p.i
        _, _, line, col = p.peek()
        name, params, body, free = p.definition()
        d = _check_definition(name, params, body, free, line, col)
        toks = p.toks[start:p.i]
        if p.peek()[0] != "eof":
            p.take(";")
        d = Definition(d.name, d.params, d.body, _source(text, toks))
        p.sigs[name] = d.sorts
        out.append(d)
    return out


def _source(text: str, toks) -> str:
    lines = text.splitlines()
    (_, _, l0, c0), (_, v1, l1, c1) = toks[0], toks[-1]
    if l0 == l1:
        return lines[l0 - 1][c0 - 1:c1 - 1 + len(v1)]
    chunk = [lines[l0 - 1][c0 - 1:]] + lines[l0:l1 - 1] + [lines[l1 - 1][:c1 - 1 + len(v1)]]
    return "\n".join(chunk)


def parse_formula_file(text: str, signatures=None) -> Definition | Formula:
    """A file holding either one definition or a bare formula."""
    toks = _tokenize(text)
    if len(toks) > 2 and toks[0][0] == "ident" and toks[1][1] == "(" and any(t[1] == ":=" for t in toks):
        defs = parse_library(text, signatures)
        if len(defs) != 1:
            raise FormulaSyntaxError(f"expected one definition, found {len(defs)}")
        return defs[0]
    return parse_formula(text, signatures)
