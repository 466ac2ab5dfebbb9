import itertools

import pytest

from conftest import same_modulo_names
from ws1sfold.formula import And, Exists, Not, desugar, explicit_type, free_vars, parse_formula, parse_library
from ws1sfold.lloyd_topor import Hierarchy, LloydToporError, check_hierarchy, lt_transform
from ws1sfold.models import BoundedEvaluator
from ws1sfold.natset import is_natset_typed_definition, natset_program
from ws1sfold.oracle import eval_bounded
from ws1sfold.progtext import parse_clauses
from ws1sfold.terms import Atom, nat_term, set_term

MU = "max(S, N) := N in S & ~ex1 N1 (N1 in S & ~(N1 <= N));"

MAX_CLS = parse_clauses("""
newp(S,N) :- nat(N), nat(N1), set(S), mem(N1,S), \\+ leq(N1,N).
max(S,N) :- nat(N), set(S), mem(N,S), \\+ newp(S,N).
""")

EXAMPLE1_CLS = parse_clauses("""
h(X) :- nat(X), nat(Y), leq(X,Y).
g :- nat(X), \\+ h(X).
f :- \\+ g.
""")


def max_hierarchy():
    d, = parse_library(MU)
    return lt_transform("max", explicit_type(desugar(d.body)), head_vars=d.params)


def test_max_clauses():
    h = max_hierarchy()
    assert same_modulo_names(h.defs, MAX_CLS, fixed={"max"})
    # exact shapes, names included up to the newp numbering
    assert [str(c) for c in h.defs] == [
        "newp1(S,N) :- nat(N), nat(N1), set(S), mem(N1,S), \\+ leq(N1,N).",
        "max(S,N) :- nat(N), set(S), mem(N,S), \\+ newp1(S,N).",
    ]


def test_example1_clauses():
    h = lt_transform("f", explicit_type(desugar(parse_formula("all1 X ex1 Y (X <= Y)"))))
    assert same_modulo_names(h.defs, EXAMPLE1_CLS, fixed={"f"})
    assert h.main == "f" and h.defs[-1].head.pred == "f"


def test_literal_body():
    h = lt_transform("f", explicit_type(parse_formula("0 <= 0")))
    assert [str(c) for c in h.defs] == ["f :- leq(0,0)."]


def test_reserved_name():
    with pytest.raises(LloydToporError):
        lt_transform("nat", explicit_type(parse_formula("0 <= 0")))


def test_check_hierarchy():
    h = max_hierarchy()
    assert check_hierarchy(h)
    assert not check_hierarchy(tuple(reversed(h.defs)))
    assert check_hierarchy(())
    assert not check_hierarchy(Hierarchy(h.defs, "newp1"))


SUITE = [
    ("p(N, S) := N in S & ~ex1 M (M in S & ~(M <= N));", 4),
    ("p(S) := ~ex1 x (x in S);", 4),
    ("p(N, S) := all1 M (M in S => s(M) <= N);", 4),
    ("p(S, T) := all1 x (x in S <=> x in T);", 3),
    ("p(N) := ex1 M (s(M) = N) | N = 0;", 4),
    ("p(S, N) := ~(N in S) & ex1 M (M in S & N < M);", 4),
]


def _a2_a3_count(f) -> int:
    """Negated conjunctions and negated quantifiers, after double negations cancel."""
    if isinstance(f, Not):
        if isinstance(f.arg, Not):
            return _a2_a3_count(f.arg.arg)
        if isinstance(f.arg, (And, Exists)):
            return 1 + _a2_a3_count(f.arg)
        return 0
    if isinstance(f, And):
        return _a2_a3_count(f.left) + _a2_a3_count(f.right)
    if isinstance(f, Exists):
        return _a2_a3_count(f.body)
    return 0


@pytest.mark.parametrize("text,bound", SUITE)
def test_clauses_are_typed_definitions(text, bound):
    d, = parse_library(text)
    core = desugar(d.body)
    h = lt_transform("p", explicit_type(core), head_vars=d.params)
    assert check_hierarchy(h)
    assert all(is_natset_typed_definition(c) for c in h.defs)
    assert len(h.defs) == 1 + _a2_a3_count(core)


@pytest.mark.parametrize("text,bound", SUITE)
def test_clauses_preserve_meaning(text, bound):
    # the bound is safe: every inner quantifier is only ever satisfied by
    # values below the largest free value, so bounded search is exact
    d, = parse_library(text)
    h = lt_transform("p", explicit_type(desugar(d.body)), head_vars=d.params)
    ev = BoundedEvaluator(natset_program() + h.defs, bound + 1)
    doms = []
    for v in d.params:
        if v.sort == "ind":
            doms.append(list(range(bound + 1)))
        else:
            doms.append([set(m) for r in range(bound + 1) for m in itertools.combinations(range(bound), r)])
    for values in itertools.product(*doms):
        sigma = dict(zip((v.name for v in d.params), values))
        want = eval_bounded(d.body, sigma, bound + 1)
        args = tuple(nat_term(x) if isinstance(x, int) else set_term(x) for x in values)
        assert ev.holds(Atom("p", args)) == want, sigma


def test_free_variable_order_is_default_head():
    h = lt_transform("q", explicit_type(desugar(parse_formula("N in S"))))
    assert str(h.defs[-1].head) == "q(N,S)"
    assert [v.name for v in free_vars(parse_formula("N in S"))] == ["N", "S"]
