"""Seeded random closed formulas over both sorts, as source text."""

import random

CONNECTIVES = ["&", "|", "=>", "<=>"]
QUANTS = {"ind": ("ex1", "all1"), "set": ("ex2", "all2")}


def _iterm(rng, inds):
    if inds and rng.random() < 0.8:
        v = rng.choice(inds)
        return f"s({v})" if rng.random() < 0.25 else v
    return rng.choice(["0", "s(0)", "s(s(0))"])


def _atom(rng, inds, sets):
    if sets and rng.random() < 0.5:
        return f"{_iterm(rng, inds)} in {rng.choice(sets)}"
    op = rng.choice(["<=", "<=", "<", "="])
    return f"{_iterm(rng, inds)} {op} {_iterm(rng, inds)}"


def _gen(rng, inds, sets, quants, size):
    if quants and (not inds and not sets or rng.random() < 0.55):
        sort = quants[0]
        name = ("x", "y", "z")[len(inds)] if sort == "ind" else ("S", "T", "U")[len(sets)]
        q = rng.choice(QUANTS[sort])
        new_inds, new_sets = (inds + [name], sets) if sort == "ind" else (inds, sets + [name])
        return f"{q} {name} ({_gen(rng, new_inds, new_sets, quants[1:], size)})"
    if not quants and (size <= 1 or rng.random() < 0.3):
        lit = _atom(rng, inds, sets)
        return f"~({lit})" if rng.random() < 0.3 else lit
    left = _gen(rng, inds, sets, [], max(size // 2, 1))
    right = _gen(rng, inds, sets, quants, max(size - size // 2, 1))
    op = rng.choice(CONNECTIVES)
    body = f"{left} {op} {right}" if rng.random() < 0.5 else f"{right} {op} {left}"
    return f"~({body})" if rng.random() < 0.2 else f"({body})"


def closed_formulas(count, seed=0, max_size=4):
    """``count`` distinct closed formulas, each quantifying over both sorts, depth <= 3."""
    rng = random.Random(seed)
    out: list[str] = []
    while len(out) < count:
        depth = rng.choice([2, 3, 3])
        quants = ["ind", "set"] + [rng.choice(["ind", "ind", "set"]) for _ in range(depth - 2)]
        rng.shuffle(quants)
        text = _gen(rng, [], [], quants, rng.randint(1, max_size))
        if text not in out:
            out.append(text)
    return out


def eval_widening(f, base: int, step: int) -> bool:
    """Closed core formula, where a quantifier at nesting depth d ranges up to base + step * d.

    Inner quantifiers see more values than outer ones, so witnesses just past
    an outer value stay visible.  Sets are bitmasks.
    """
    from ws1sfold.formula import IND, And, Exists, In, Leq, Not, Typed, desugar

    def term(t, env):
        return t.k if t.var is None else env[t.var] + t.k

    def ev(g, env, depth):
        if isinstance(g, Leq):
            return term(g.left, env) <= term(g.right, env)
        if isinstance(g, In):
            return bool(env[g.set] >> term(g.elem, env) & 1)
        if isinstance(g, Typed):
            return True
        if isinstance(g, Not):
            return not ev(g.arg, env, depth)
        if isinstance(g, And):
            return ev(g.left, env, depth) and ev(g.right, env, depth)
        if isinstance(g, Exists):
            top = base + step * depth
            dom = range(top + 1) if g.var.sort == IND else range(1 << (top + 1))
            return any(ev(g.body, {**env, g.var: v}, depth + 1) for v in dom)
        raise TypeError(type(g).__name__)

    return ev(desugar(f), {}, 0)


def curated_value(text):
    """Oracle value of a closed formula when the uniform relativization is stable on 2..10
    and the widening relativization agrees with it; None when the formula is left out."""
    from ws1sfold.formula import parse_formula
    from ws1sfold.oracle import eval_stable

    f = parse_formula(text)
    value, stable = eval_stable(f, 2, 10)
    widened = {eval_widening(f, b, 3) for b in (2, 3)}
    return value if stable and widened == {value} else None
