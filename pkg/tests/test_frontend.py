import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ws1sfold.formula import (
    IND,
    SET,
    And,
    Exists,
    Forall,
    FormulaSyntaxError,
    ITerm,
    In,
    Leq,
    Not,
    Or,
    SortError,
    SortedVar,
    Typed,
    desugar,
    explicit_type,
    free_vars,
    is_core,
    node_count,
    parse_formula,
    parse_library,
    pretty,
)
from ws1sfold.oracle import eval_bounded, eval_stable

N, S, N1 = SortedVar("N", IND), SortedVar("S", SET), SortedVar("N1", IND)
MU = "N in S & ~ex1 N1 (N1 in S & ~(N1 <= N))"


def iv(v, k=0):
    return ITerm(v, k)


def test_parse_mu():
    want = And(In(iv(N), S), Not(Exists(N1, And(In(iv(N1), S), Not(Leq(iv(N1), iv(N)))))))
    assert parse_formula(MU) == want


def test_parse_atoms():
    assert parse_formula("0 <= 0") == Leq(ITerm(None, 0), ITerm(None, 0))
    assert parse_formula("s(s(X)) <= 0") == Leq(iv(SortedVar("X", IND), 2), ITerm(None, 0))


def test_parse_example1_sugar():
    f = parse_formula("all1 X ex1 Y (X <= Y)")
    assert isinstance(f, Forall) and isinstance(f.body, Exists)
    assert f.var.sort == IND and f.body.var.sort == IND


def test_pretty_round_trip():
    for text in [MU, "all1 X ex1 Y (X <= Y)", "ex2 S (0 in S | ~(s(0) in S))", "ex1 X (X < s(X) <=> X ~= s(X))"]:
        f = parse_formula(text)
        assert parse_formula(pretty(f)) == f


def test_sort_errors():
    with pytest.raises(SortError):
        parse_formula("S <= N & N in S")
    with pytest.raises(SortError):
        parse_formula("ex2 X (X <= 0)")


def test_syntax_error_position():
    with pytest.raises(FormulaSyntaxError) as e:
        parse_formula("0 <= ")
    assert (e.value.line, e.value.col) == (1, 6)


def test_free_variables_become_free():
    assert free_vars(parse_formula(MU)) == [N, S]
    assert free_vars(parse_formula("all1 X ex1 Y (X <= Y)")) == []
    assert free_vars(In(iv(N), S)) == [N, S]


def test_desugar_forall():
    X, Y = SortedVar("X", IND), SortedVar("Y", IND)
    got = desugar(parse_formula("all1 X ex1 Y (X <= Y)"))
    assert got == Not(Exists(X, Not(Exists(Y, Leq(iv(X), iv(Y))))))


def test_desugar_shorthands():
    a, b = SortedVar("A", IND), SortedVar("B", IND)
    assert desugar(parse_formula("A < B")) == Leq(iv(a, 1), iv(b))
    assert desugar(parse_formula("A = B")) == And(Leq(iv(a), iv(b)), Leq(iv(b), iv(a)))
    p, q = Leq(iv(a), iv(b)), Leq(iv(b), iv(a))
    assert desugar(Or(p, q)) == Not(And(Not(p), Not(q)))


def test_desugar_idempotent_and_core():
    for text in [MU, "all2 S ex1 N (N in S => N <= N)", "ex1 X (X < s(X) <=> X ~= s(X))"]:
        d = desugar(parse_formula(text))
        assert is_core(d)
        assert desugar(d) == d


def test_explicit_type_mu():
    t = explicit_type(desugar(parse_formula(MU)))
    assert t.free_type_prefix == (Typed(N), Typed(S))
    assert pretty(t.formula()) == "nat(N) & set(S) & (N in S & ~ex1 N1 (nat(N1) & (N1 in S & ~(N1 <= N))))"


def test_explicit_type_small():
    t = explicit_type(parse_formula("0 <= 0"))
    assert t.free_type_prefix == () and t.body == Leq(ITerm(None, 0), ITerm(None, 0))
    t = explicit_type(parse_formula("ex1 Y (X <= Y)"))
    assert pretty(t.formula()) == "nat(X) & ex1 Y (nat(Y) & X <= Y)"


def test_explicit_type_counts_nodes():
    for text in [MU, "all1 X ex1 Y (X <= Y)", "ex2 T ex1 K (K in T & ~(K in S))"]:
        d = desugar(parse_formula(text))
        quants = sum(1 for _ in _quantifiers(d))
        t = explicit_type(d)
        # one type atom per quantifier plus one per free variable, each joined by an And
        assert node_count(t.formula()) == node_count(d) + 2 * (quants + len(free_vars(d)))


def _quantifiers(f):
    if isinstance(f, Exists):
        yield f
        yield from _quantifiers(f.body)
    elif isinstance(f, Not):
        yield from _quantifiers(f.arg)
    elif isinstance(f, And):
        yield from _quantifiers(f.left)
        yield from _quantifiers(f.right)


def test_eval_bounded_examples():
    mu = parse_formula(MU)
    assert eval_bounded(mu, {"N": 2, "S": {0, 2}}, 5)
    assert not eval_bounded(mu, {"N": 0, "S": {0, 2}}, 5)
    assert eval_bounded(parse_formula("0 <= 0"), {}, 0)
    with pytest.raises(KeyError):
        eval_bounded(mu, {"N": 2}, 5)


def test_eval_stable_examples():
    assert eval_stable(parse_formula("all1 X ex1 Y (X <= Y)"), 2, 8) == (True, True)
    assert eval_stable(parse_formula("ex1 X (s(0) <= X)"), 2, 8) == (True, True)
    assert eval_stable(parse_formula("~(0 <= 0)"), 0, 4) == (False, True)
    with pytest.raises(ValueError):
        eval_stable(parse_formula(MU), 0, 3)


def test_eval_stable_flags_bound_artifacts():
    # every natural has a strict successor, but not below the bound
    value, stable = eval_stable(parse_formula("all1 X ex1 Y (X < Y)"), 2, 6)
    assert not value and stable
    value, stable = eval_stable(parse_formula("ex2 S (s(s(s(0))) in S)"), 2, 5)
    assert value and not stable


def test_mu_against_python_max():
    mu = parse_formula(MU)
    for r in range(5):
        for members in itertools.combinations(range(5), r):
            for n in range(5):
                want = bool(members) and n == max(members)
                assert eval_bounded(mu, {"N": n, "S": set(members)}, 4) == want


def test_library_parsing():
    defs = parse_library("e(X) := ~ex1 x (x in X);\nm(X, n) := n in X & e(X) | ~e(X);")
    assert [d.name for d in defs] == ["e", "m"]
    assert defs[1].sorts == (SET, IND)


# -- compositional semantics -----------------------------------------------------

_NAT_VARS = [SortedVar("A", IND), SortedVar("B", IND)]
_SET_VARS = [SortedVar("P", SET)]


def _atoms():
    terms = st.builds(ITerm, st.sampled_from([None, *_NAT_VARS]), st.integers(0, 2))
    leq = st.builds(Leq, terms, terms)
    mem = st.builds(In, terms, st.sampled_from(_SET_VARS))
    return st.one_of(leq, mem)


formulas = st.recursive(
    _atoms(),
    lambda sub: st.one_of(st.builds(Not, sub), st.builds(And, sub, sub)),
    max_leaves=6,
)
assignments = st.fixed_dictionaries(
    {"A": st.integers(0, 4), "B": st.integers(0, 4), "P": st.sets(st.integers(0, 4), max_size=4)}
)


@settings(max_examples=150, deadline=None)
@given(formulas, formulas, assignments)
def test_eval_is_compositional(f, g, a):
    assert eval_bounded(Not(f), a, 4) == (not eval_bounded(f, a, 4))
    assert eval_bounded(And(f, g), a, 4) == (eval_bounded(f, a, 4) and eval_bounded(g, a, 4))


@settings(max_examples=60, deadline=None)
@given(formulas)
def test_positive_existentials_stay_true(f):
    # ex-only positive formulas: once true at some bound they stay true
    if any(isinstance(x, Not) for x in _nodes(f)):
        return
    closed = f
    for v in _SET_VARS + _NAT_VARS:
        closed = Exists(v, closed)
    seen = False
    for b in range(1, 6):
        value = eval_bounded(closed, {}, b)
        assert value or not seen
        seen = seen or value


def _nodes(f):
    yield f
    for attr in ("arg", "left", "right", "body"):
        sub = getattr(f, attr, None)
        if sub is not None:
            yield from _nodes(sub)
