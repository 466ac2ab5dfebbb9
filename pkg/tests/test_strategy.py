import pytest

from conftest import contract_problems, random_ground_queries, same_modulo_names
from ws1sfold.formula import desugar, explicit_type, parse_formula, parse_library
from ws1sfold.ld import ld_resolve
from ws1sfold.lloyd_topor import lt_transform
from ws1sfold.models import ext_def_of, prune_useless
from ws1sfold.natset import natset_program
from ws1sfold.oracle import eval_bounded
from ws1sfold.progtext import parse_clause, parse_clauses
from ws1sfold.strategy import (
    InvariantViolation,
    StepState,
    StrategyConfig,
    StrategyDiverged,
    check_step_invariants,
    synthesize,
)
from ws1sfold.terms import Atom, decode_nat, decode_set, nat_term, set_term, variant_eq

MAX_PROGRAM = parse_clauses("""
max([y|S],0) :- new1(S).
max([y|S],s(N)) :- max(S,N).
max([n|S],s(N)) :- max(S,N).
new1([]).
new1([n|S]) :- new1(S).
""")

EXAMPLE1_NEW = parse_clauses("""
h(0).
h(0) :- new1.
h(s(X)) :- h(X).
new1.
f.
""")

CHECKED = StrategyConfig(check_invariants_each_step=True)


def max_hierarchy():
    d, = parse_library("max(S, N) := N in S & ~ex1 N1 (N1 in S & ~(N1 <= N));")
    return lt_transform("max", explicit_type(desugar(d.body)), head_vars=d.params)


def example1_hierarchy():
    return lt_transform("f", explicit_type(desugar(parse_formula("all1 X ex1 Y (X <= Y)"))))


def new_clauses(res):
    old = {c.id for c in res.p0}
    return [c for c in res.transf_p if c.id not in old]


def max_part(res):
    """Clauses reachable from max, without the ones that can never succeed."""
    old = {c.id for c in res.p0}
    return [c for c in prune_useless(ext_def_of(("max", 2), res.transf_p)) if c.id not in old]


def test_max_program():
    res = synthesize(natset_program(), max_hierarchy(), CHECKED)
    assert same_modulo_names(max_part(res), MAX_PROGRAM, fixed={"max"})
    assert res.main == "max"
    assert contract_problems(res) == []


def test_max_program_text():
    res = synthesize(natset_program(), max_hierarchy())
    assert [str(c) for c in max_part(res)] == [
        "new3([]).",
        "new3([n|S]) :- new3(S).",
        "max([y|S],0) :- new3(S).",
        "max([y|S],s(N)) :- max(S,N).",
        "max([n|S],s(N)) :- max(S,N).",
    ]


def test_example1_program():
    res = synthesize(natset_program(), example1_hierarchy(), CHECKED)
    assert same_modulo_names(new_clauses(res), EXAMPLE1_NEW, fixed={"f"})
    assert [str(c) for c in res.transf_p][:9] == [str(c) for c in natset_program()]
    assert contract_problems(res) == []


def test_example1_reuses_definitions():
    res = synthesize(natset_program(), example1_hierarchy())
    # one predicate introduced by folding: new1 <- nat(Y)
    assert len(res.new_preds) == 1
    d = [d for d in res.defs if d.head.pred == res.new_preds[0]]
    assert len(d) == 1 and variant_eq(d[0], parse_clause(f"{res.new_preds[0]} :- nat(Y)."))


def test_empty_hierarchy():
    res = synthesize(natset_program(), ())
    assert res.transf_p.clauses == natset_program().clauses
    assert res.trace == () and res.main is None


def test_deterministic():
    a = synthesize(natset_program(), max_hierarchy())
    b = synthesize(natset_program(), max_hierarchy())
    assert [str(c) for c in a.transf_p] == [str(c) for c in b.transf_p]
    assert a.trace == b.trace


def test_invariants_hold_through_the_max_run():
    # the checked config raises InvariantViolation on the first failing step
    synthesize(natset_program(), max_hierarchy(), CHECKED)


def test_invariant_d_fires_on_a_duplicated_definition():
    d1 = parse_clause("new1(S) :- set(S), mem(N,S).")
    d2 = parse_clause("new2(T) :- set(T), mem(M,T).")
    start = tuple(natset_program())
    state = StepState(start, (d2,), (d1, d2), start, (d1,), (d1,))
    problems = check_step_invariants(state)
    assert any("variant" in p for p in problems)


def test_invariants_a_to_c_fire():
    start = tuple(natset_program())
    d0 = parse_clause("p(X) :- nat(X), leq(X,Y).")
    bad = parse_clause("q(X) :- nat(X), r(s(s(X)),Y,Z).")
    problems = check_step_invariants(StepState(start, (), (d0, bad), start, (d0,), (d0,)))
    assert any("is new" in p for p in problems)
    assert any("height" in p for p in problems)
    assert any("variables" in p for p in problems)


def test_initial_state_is_clean():
    start = tuple(natset_program())
    assert check_step_invariants(StepState(start, (), (), start, (), ())) == []


def test_config_validation():
    with pytest.raises(ValueError):
        StrategyConfig(max_while_iterations=0)
    with pytest.raises(ValueError):
        StrategyConfig(max_unfold_ground_steps=0)


def test_budget_exhaustion_is_reported():
    with pytest.raises(StrategyDiverged):
        synthesize(natset_program(), max_hierarchy(), StrategyConfig(max_while_iterations=1))


def test_checked_run_aborts_on_violation(monkeypatch):
    import ws1sfold.strategy as strategy

    monkeypatch.setattr(strategy, "check_step_invariants", lambda state: ["injected"])
    with pytest.raises(InvariantViolation):
        synthesize(natset_program(), max_hierarchy(), CHECKED)


def test_max_program_answers_ground_queries():
    res = synthesize(natset_program(), max_hierarchy())
    mu = parse_formula("N in S & ~ex1 N1 (N1 in S & ~(N1 <= N))")
    for goal in random_ground_queries(res, 100, seed=1):
        got = ld_resolve(res.transf_p, [goal], budget=10**5) is not None
        if goal.pred != "max":
            continue
        members, k = set(decode_set(goal.args[0])), decode_nat(goal.args[1])
        bound = max([k, *members, 0])
        assert got == eval_bounded(mu, {"N": k, "S": members}, bound)


def test_padding_does_not_change_answers():
    res = synthesize(natset_program(), max_hierarchy())
    for members in [{0}, {1, 3}, {2}]:
        for pad in range(max(members) + 1, 9):
            goal = Atom("max", (set_term(members, pad), nat_term(max(members))))
            assert ld_resolve(res.transf_p, [goal]) is not None
