"""Command line: ws1sfold {parse,synthesize,decide,query,oracle,script,verify-dbakery,emit}.

Exit codes: 0 success or TRUE, 1 FALSE or failed verification, 2 bad
input, 3 strategy invariant violated or budget exhausted.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from pathlib import Path

from .dbakery import verify_dbakery
from .decide import PredicateRegistry, RegistryError, decide, query, register_text, synthesize_predicate
from .formula import Definition, FormulaSyntaxError, desugar, explicit_type, parse_formula_file, parse_library
from .lloyd_topor import LloydToporError
from .oracle import eval_bounded, eval_stable
from .progtext import ProgramSyntaxError, format_clause, format_program, parse_clauses, parse_program, parse_term, read_main
from .program import Program, StratificationError
from .rules import initial_state, trace_to_json
from .script import ScriptError, run_script
from .strategy import InvariantViolation, StrategyConfig, StrategyDiverged
from .terms import decode_nat, decode_set, set_term

OK, FALSE, USAGE, INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(arg: str) -> str:
    """A formula given inline, or the contents of a file."""
    if arg == "-":
        return sys.stdin.read()
    if os.path.isfile(arg):
        return Path(arg).read_text()
    return arg


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _config(a) -> StrategyConfig:
    return StrategyConfig(a.max_iterations, a.max_unfold, a.check_invariants)


def _registry(a) -> PredicateRegistry:
    reg = PredicateRegistry()
    for lib in a.lib or ():
        reg = register_text(Path(lib).read_text(), reg, _config(a))
    return reg


def _verdict(value: bool) -> int:
    print("TRUE" if value else "FALSE")
    return OK if value else FALSE


def cmd_parse(a) -> int:
    sigs = {}
    for lib in a.lib or ():
        for d in parse_library(Path(lib).read_text(), sigs):
            sigs[d.name] = d.sorts
    f = parse_formula_file(_read(a.formula), sigs)
    if isinstance(f, Definition):
        print(f"{f.name}({', '.join(v.name for v in f.params)}) := {explicit_type(desugar(f.body))};")
    else:
        print(explicit_type(desugar(f)))
    return OK


def cmd_synthesize(a) -> int:
    reg = _registry(a)
    f = parse_formula_file(_read(a.formula), reg.signatures)
    name = a.name or (f.name if isinstance(f, Definition) else None)
    if name is None:
        raise UsageError("a bare formula needs --name")
    reg = synthesize_predicate(name, f, reg, config=_config(a))
    e = reg.entry(name)
    clauses = e.result.transf_p if a.full else e.fragment
    _write(a.output, format_program(clauses, main=name))
    if a.trace_out:
        Path(a.trace_out).write_text(trace_to_json(e.result.trace) + "\n")
    return OK


def cmd_decide(a) -> int:
    reg = _registry(a)
    v = decide(parse_formula_file(_read(a.formula), reg.signatures), reg, _config(a))
    if a.trace_out:
        _write(a.trace_out, trace_to_json(v.trace) + "\n")
    if a.program_out:
        _write(a.program_out, format_program(v.program))
    return _verdict(v.value)


_SET = re.compile(r"^\{\s*(\d+(\s*,\s*\d+)*)?\s*\}$")


def _query_arg(text: str, length: int | None):
    text = text.strip()
    if text.isdigit():
        return int(text)
    m = _SET.match(text)
    if m:
        members = {int(x) for x in re.findall(r"\d+", text)}
        return set_term(members, length) if length else members
    return parse_term(text)


def cmd_query(a) -> int:
    reg = _registry(a)
    args = [_query_arg(x, a.length) for x in a.args]
    return _verdict(query(reg, a.name, args, a.budget))


def _assignment(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"assignment {item!r} is not NAME=VALUE")
        v = _query_arg(value, None)
        if not isinstance(v, (int, set)):
            t = v
            v = decode_nat(t)
            if v is None:
                v = decode_set(t)
            if v is None:
                raise UsageError(f"cannot read {value!r} as a natural or a set")
        out[name.strip()] = v
    return out


def cmd_oracle(a) -> int:
    defs = {}
    for lib in a.lib or ():
        for d in parse_library(Path(lib).read_text(), {k: v.sorts for k, v in defs.items()}):
            defs[d.name] = d
    f = parse_formula_file(_read(a.formula), {k: v.sorts for k, v in defs.items()})
    if isinstance(f, Definition):
        raise UsageError("oracle takes a formula, not a definition")
    if a.assign or a.bound is not None:
        bound = 6 if a.bound is None else a.bound
        return _verdict(eval_bounded(f, _assignment(a.assign), bound, defs))
    value, stable = eval_stable(f, a.lo, a.hi, defs)
    print(("TRUE" if value else "FALSE") + ("" if stable else f" (unstable on {a.lo}..{a.hi})"))
    return OK if value else FALSE


def cmd_script(a) -> int:
    reg = _registry(a)
    clauses = list(reg.program.clauses)
    for prog in a.program or ():
        clauses.extend(parse_clauses(Path(prog).read_text()))
    start = initial_state(Program(tuple(clauses)))
    config = _config(a)
    run = run_script(Path(a.script).read_text(), start, lambda phi: decide(phi, reg, config).value)
    old = {c.id for c in start.current}
    lines = [f"{run.label_of(c.id) or '#' + str(c.id)}: {format_clause(c)}" for c in run.state.current if c.id not in old]
    _write(a.output, "\n".join(lines) + ("\n" if lines else ""))
    if a.trace_out:
        Path(a.trace_out).write_text(trace_to_json(run.state.trace) + "\n")
    return OK


def cmd_verify(a) -> int:
    library = Path(a.library).read_text() if a.library else None
    script = "" if a.facts_only else (Path(a.script).read_text() if a.script else None)
    report = verify_dbakery(library=library, script=script, config=_config(a))
    sys.stdout.write(report.to_json() + "\n" if a.format == "json" else report.to_text())
    if a.json_out:
        Path(a.json_out).write_text(report.to_json() + "\n")
    if not report.scripted:
        return OK if report.facts_ok else FALSE
    return OK if report.proved else FALSE


def cmd_emit(a) -> int:
    text = _read(a.program)
    p = parse_program(text, check_strata=False)
    _write(a.output, format_program(p, main=read_main(text)))
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ws1sfold", description="WS1S formulas to logic programs by unfold/fold.")
    sub = ap.add_subparsers(dest="command", required=True)

    def strategy_flags(p):
        p.add_argument("--lib", action="append", metavar="FILE", help="formula library to register first (repeatable)")
        p.add_argument("--max-iterations", type=int, default=1000, metavar="K")
        p.add_argument("--max-unfold", type=int, default=100_000, metavar="K")
        p.add_argument("--check-invariants", action="store_true", help="check the strategy invariants after every step")

    p = sub.add_parser("parse", help="print the desugared, explicitly typed formula")
    p.add_argument("formula", help="formula text, a file, or - for stdin")
    p.add_argument("--lib", action="append", metavar="FILE")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("synthesize", help="synthesize the program of a definition")
    p.add_argument("formula")
    p.add_argument("--name", help="predicate name (default: the definition's)")
    p.add_argument("-o", "--output")
    p.add_argument("--trace-out", metavar="FILE")
    p.add_argument("--full", action="store_true", help="print NatSet and the initial program too")
    strategy_flags(p)
    p.set_defaults(fn=cmd_synthesize)

    p = sub.add_parser("decide", help="decide a closed formula")
    p.add_argument("formula")
    p.add_argument("--trace-out", metavar="FILE")
    p.add_argument("--program-out", metavar="FILE")
    strategy_flags(p)
    p.set_defaults(fn=cmd_decide)

    p = sub.add_parser("query", help="ground query against a registered predicate")
    p.add_argument("name")
    p.add_argument("args", nargs="*", help="naturals, {0,2} sets, or ground terms")
    p.add_argument("--budget", type=int, default=10**6)
    p.add_argument("--length", type=int, help="pad set lists to this length")
    strategy_flags(p)
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("oracle", help="evaluate a formula by bounded enumeration")
    p.add_argument("formula")
    p.add_argument("--lib", action="append", metavar="FILE")
    p.add_argument("--lo", type=int, default=2)
    p.add_argument("--hi", type=int, default=10)
    p.add_argument("--bound", type=int, help="evaluate at this bound only")
    p.add_argument("--assign", action="append", metavar="NAME=VALUE", help="value of a free variable")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("script", help="replay a derivation script")
    p.add_argument("script")
    p.add_argument("--program", action="append", metavar="FILE", help="program file added to the initial program")
    p.add_argument("-o", "--output")
    p.add_argument("--trace-out", metavar="FILE")
    strategy_flags(p)
    p.set_defaults(fn=cmd_script)

    p = sub.add_parser("verify-dbakery", help="mutual exclusion of the dynamic bakery protocol")
    p.add_argument("--library", metavar="FILE", help="replacement formula library")
    p.add_argument("--script", metavar="FILE", help="replacement derivation script")
    p.add_argument("--facts-only", action="store_true")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--json-out", metavar="FILE")
    p.add_argument("--max-iterations", type=int, default=1000, metavar="K")
    p.add_argument("--max-unfold", type=int, default=100_000, metavar="K")
    p.add_argument("--check-invariants", action="store_true")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("emit", help="parse and reprint a program file")
    p.add_argument("program")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_emit)
    return ap


def run(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        return a.fn(a)
    except (InvariantViolation, StrategyDiverged) as e:
        print(f"ws1sfold: {e}", file=sys.stderr)
        return INTERNAL
    except ScriptError as e:
        print(f"ws1sfold: script: {e}", file=sys.stderr)
        return FALSE
    except (
        UsageError,
        FormulaSyntaxError,
        ProgramSyntaxError,
        StratificationError,
        RegistryError,
        LloydToporError,
        ValueError,
        KeyError,
        OSError,
    ) as e:
        print(f"ws1sfold: {e}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())
