"""Bounded semantic evaluation of WS1S formulas.

Quantified individuals range over ``0..bound`` and quantified sets over the
subsets of ``{0..bound}``, encoded as bitmasks.  Each nesting depth of
quantifiers owns one numpy axis, so a quantifier is a single reduction.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .formula import (
    IND,
    And,
    Definition,
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
    all_names,
    desugar,
    free_vars,
    rename_apart,
    substitute,
    BINARY,
    QUANT,
)

MAX_BOUND = 20


def inline_predicates(f: Formula, defs: Mapping[str, Definition]) -> Formula:
    """Replace predicate atoms by their defining formulas, renaming binders apart."""
    supply = NameSupply(all_names(f))

    def go(g):
        if isinstance(g, Pred):
            d = defs.get(g.name)
            if d is None:
                raise KeyError(f"no definition for predicate {g.name!r}")
            body = rename_apart(go(d.body), supply.used)
            supply.used |= all_names(body)
            return substitute(body, dict(zip(d.params, g.args)))
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, BINARY):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, QUANT):
            return type(g)(g.var, go(g.body))
        return g

    return go(f)


def _depth(f: Formula) -> int:
    if isinstance(f, Exists):
        return 1 + _depth(f.body)
    if isinstance(f, Not):
        return _depth(f.arg)
    if isinstance(f, And):
        return max(_depth(f.left), _depth(f.right))
    return 0


def _value(a, sort: str) -> int:
    if sort == IND:
        if isinstance(a, bool) or not isinstance(a, (int, np.integer)) or a < 0:
            raise ValueError(f"individual value must be a natural number, got {a!r}")
        return int(a)
    mask = 0
    for x in a:
        if x < 0:
            raise ValueError(f"set value contains negative element {x}")
        mask |= 1 << int(x)
    return mask


def _check_bound(a, sort: str, bound: int, name: str) -> None:
    big = a if sort == IND else (max(a) if a else -1)
    if big > bound:
        raise ValueError(f"value of {name} exceeds bound {bound}")


def eval_bounded(
    f: Formula,
    assignment: Mapping = (),
    bound: int = 6,
    defs: Mapping[str, Definition] | None = None,
) -> bool:
    """Truth of ``f`` with quantifiers relativized to ``bound``.

    ``assignment`` maps variable names (or :class:`SortedVar`) to naturals
    and finite sets.
    """
    if not 0 <= bound <= MAX_BOUND:
        raise ValueError(f"bound must lie in 0..{MAX_BOUND}")
    g = desugar(inline_predicates(f, defs or {}))
    given = {(k.name if isinstance(k, SortedVar) else k): v for k, v in dict(assignment).items()}
    env: dict[SortedVar, object] = {}
    for v in free_vars(g):
        if v.name not in given:
            raise KeyError(f"assignment misses free variable {v.name}")
        _check_bound(given[v.name], v.sort, bound, v.name)
        env[v] = np.int64(_value(given[v.name], v.sort))
    return bool(_Evaluator(bound, _depth(g)).run(g, env))


class _Evaluator:
    def __init__(self, bound: int, depth: int):
        self.bound = bound
        self.ndim = max(depth, 1)
        self.domains = {}
        for d in range(depth):
            shape = [1] * self.ndim
            shape[d] = -1
            self.domains[(d, IND)] = np.arange(bound + 1, dtype=np.int64).reshape(shape)
            self.domains[(d, "set")] = np.arange(1 << (bound + 1), dtype=np.int64).reshape(shape)

    def run(self, f: Formula, env) -> np.ndarray:
        out = self.ev(f, env, 0)
        return np.all(out) if out.size == 1 else out

    def full(self, x) -> np.ndarray:
        x = np.asarray(x)
        return x.reshape([1] * self.ndim) if x.ndim == 0 else x

    def term(self, t: ITerm, env):
        return t.k if t.var is None else env[t.var] + t.k

    def ev(self, f: Formula, env, depth: int) -> np.ndarray:
        if isinstance(f, Leq):
            return self.full(self.term(f.left, env) <= self.term(f.right, env))
        if isinstance(f, In):
            x = np.minimum(self.term(f.elem, env), 62)
            return self.full(((env[f.set] >> x) & 1).astype(bool))
        if isinstance(f, Typed):
            return self.full(True)
        if isinstance(f, Not):
            return np.logical_not(self.ev(f.arg, env, depth))
        if isinstance(f, And):
            left = self.ev(f.left, env, depth)
            if not left.any():
                return left
            return np.logical_and(left, self.ev(f.right, env, depth))
        if isinstance(f, Exists):
            inner = dict(env)
            inner[f.var] = self.domains[(depth, f.var.sort)]
            body = self.ev(f.body, inner, depth + 1)
            return np.any(body, axis=depth, keepdims=True)
        raise TypeError(f"cannot evaluate {type(f).__name__}")


def eval_stable(
    f: Formula,
    b_lo: int,
    b_hi: int,
    defs: Mapping[str, Definition] | None = None,
) -> tuple[bool, bool]:
    """Value at ``b_hi`` and whether every bound in ``b_lo..b_hi`` agrees."""
    if b_lo > b_hi:
        raise ValueError("b_lo must not exceed b_hi")
    g = inline_predicates(f, defs or {})
    if free_vars(g):
        raise ValueError(f"formula is not closed: free {[v.name for v in free_vars(g)]}")
    values = [eval_bounded(g, {}, b) for b in range(b_lo, b_hi + 1)]
    return values[-1], len(set(values)) == 1
