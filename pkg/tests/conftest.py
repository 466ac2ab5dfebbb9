import itertools
import time
from dataclasses import dataclass

import pytest

from ws1sfold.decide import register_text
from ws1sfold.natset import RESERVED
from ws1sfold.terms import Clause, variant_eq

SETS_LIB = """
max(S, N) := N in S & ~ex1 N1 (N1 in S & ~(N1 <= N));
empty(X) := ~ex1 x (x in X);
"""


def rename_preds(c: Clause, m: dict) -> Clause:
    from ws1sfold.terms import Atom, Literal

    def at(a):
        return Atom(m.get(a.pred, a.pred), a.args)

    return Clause(at(c.head), tuple(Literal(l.positive, at(l.atom)) for l in c.body))


def same_modulo_names(actual, expected, fixed=()) -> bool:
    """Equal as clause multisets up to variable renaming and a bijective renaming
    of the predicates outside ``fixed``."""
    actual, expected = list(actual), list(expected)
    if len(actual) != len(expected):
        return False
    keep = set(fixed) | set(RESERVED)
    free_a = sorted({p for c in actual for p in _preds(c)} - keep)
    free_e = sorted({p for c in expected for p in _preds(c)} - keep)
    if len(free_a) != len(free_e):
        return False
    for perm in itertools.permutations(free_e):
        m = dict(zip(free_a, perm))
        left = [rename_preds(c, m) for c in actual]
        if _multiset_variant(left, expected):
            return True
    return False


def _preds(c):
    yield c.head.pred
    for l in c.body:
        yield l.atom.pred


def _multiset_variant(xs, ys) -> bool:
    ys = list(ys)
    for x in xs:
        hit = next((i for i, y in enumerate(ys) if variant_eq(x, y)), None)
        if hit is None:
            return False
        ys.pop(hit)
    return not ys


@pytest.fixture(scope="session")
def sets_reg():
    return register_text(SETS_LIB)


@dataclass
class DBakeryRun:
    reg: object
    report: object
    seconds: float


@pytest.fixture(scope="session")
def dbakery_run():
    """One full verification from a fresh registry, timed end to end."""
    from ws1sfold.dbakery import library_text, verify_dbakery

    t0 = time.perf_counter()
    reg = register_text(library_text())
    report = verify_dbakery(reg)
    return DBakeryRun(reg, report, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def dbakery_report(dbakery_run):
    return dbakery_run.report


# -- output contract of a synthesis run ----------------------------------------------

def contract_problems(res) -> list[str]:
    """Regularity, the nullary contract and the folding audit for one synthesis result."""
    from ws1sfold.models import ext_def_of
    from ws1sfold.natset import is_regular_natset
    from ws1sfold.rules import audit_theorem4

    problems = []
    if not is_regular_natset(res.transf_p):
        problems.append("output is not regular")
    for key in sorted({c.head.key for c in res.transf_p if not c.head.args}):
        ext = list(ext_def_of(key, res.transf_p))
        if len(ext) != 1 or ext[0].body:
            problems.append(f"nullary {key[0]} has extended definition {[str(c) for c in ext]}")
    if not audit_theorem4(res.trace):
        problems.append("folding audit failed")
    return problems


def random_ground_queries(res, count, seed, size=8):
    """Ground atoms over the predicates of an output program, with argument sizes <= size."""
    import random

    from ws1sfold.terms import Atom, nat_term, set_term

    rng = random.Random(seed)
    program = getattr(res, "transf_p", res)
    sorts = _pred_sorts(program)
    keys = sorted(sorts)
    out = []
    for _ in range(count):
        pred, n = rng.choice(keys)
        args = []
        for s in sorts[(pred, n)]:
            if s == "nat":
                args.append(nat_term(rng.randint(0, size)))
            else:
                k = rng.randint(0, size)
                args.append(set_term({x for x in range(k) if rng.random() < 0.5}, k))
        out.append(Atom(pred, tuple(args)))
    return out


def _pred_sorts(p) -> dict:
    """Argument sorts of each predicate, read off the head terms of its clauses."""
    from ws1sfold.terms import Fn

    sorts: dict = {}
    for c in p:
        got = sorts.setdefault(c.head.key, [None] * len(c.head.args))
        for i, t in enumerate(c.head.args):
            if isinstance(t, Fn):
                got[i] = "nat" if t.functor in ("0", "s") else "set"
    # unresolved positions: follow variables into body calls with known sorts
    changed = True
    while changed:
        changed = False
        for c in p:
            where = {}
            for l in c.body:
                known = sorts.get(l.atom.key)
                for i, t in enumerate(l.atom.args):
                    name = getattr(t, "name", None)
                    if name is not None and known and known[i]:
                        where[name] = known[i]
            head = sorts[c.head.key]
            for i, t in enumerate(c.head.args):
                name = getattr(t, "name", None)
                if head[i] is None and name in where:
                    head[i] = where[name]
                    changed = True
    return {k: tuple(s or "nat" for s in v) for k, v in sorts.items()}


# -- acceptance report ------------------------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
