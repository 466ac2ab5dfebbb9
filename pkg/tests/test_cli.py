import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from ws1sfold.cli import run
from ws1sfold.progtext import parse_program

ROOT = Path(__file__).resolve().parent.parent
MAX = str(ROOT / "formulas" / "max.ws1s")
SETS = str(ROOT / "formulas" / "sets.ws1s")


def cli(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_decide_exit_codes(capsys):
    assert cli(capsys, "decide", "all1 X ex1 Y (X <= Y)")[:2] == (0, "TRUE\n")
    assert cli(capsys, "decide", "~(0 <= 0)")[:2] == (1, "FALSE\n")


def test_decide_from_file(capsys):
    code, out, _ = cli(capsys, "decide", str(ROOT / "formulas" / "example1.ws1s"))
    assert (code, out) == (0, "TRUE\n")


def test_bad_input_exit_codes(capsys):
    assert cli(capsys, "decide", "0 <= ")[0] == 2
    assert cli(capsys, "decide", "ex1 X (X <= Y)")[0] == 2
    assert cli(capsys, "decide", "ex2 S nope(S)")[0] == 2
    assert cli(capsys, "frobnicate")[0] == 2
    assert cli(capsys, "synthesize", "N in S")[0] == 2


def test_budget_exhaustion_exit_code(capsys):
    code, _, err = cli(capsys, "synthesize", MAX, "--max-iterations", "1")
    assert code == 3 and "iterations" in err


def test_synthesize_max(capsys, tmp_path):
    trace = tmp_path / "trace.json"
    code, out, _ = cli(capsys, "synthesize", MAX, "--trace-out", str(trace))
    assert code == 0
    body = [line for line in out.splitlines() if line and not line.startswith("#")]
    assert len(body) == 5
    assert "max([y|S],s(N)) :- max(S,N)." in body
    steps = json.loads(trace.read_text())
    assert steps[0]["rule"] == "R1"


def test_synthesize_output_round_trips(capsys, tmp_path):
    out = tmp_path / "max.lp"
    assert cli(capsys, "synthesize", MAX, "-o", str(out))[0] == 0
    code, again, _ = cli(capsys, "emit", str(out))
    assert code == 0 and again == out.read_text()
    assert parse_program(again, check_strata=False)


def test_query_and_oracle(capsys):
    assert cli(capsys, "query", "max", "{0,2}", "2", "--lib", MAX)[:2] == (0, "TRUE\n")
    assert cli(capsys, "query", "max", "{0,2}", "0", "--lib", MAX)[:2] == (1, "FALSE\n")
    assert cli(capsys, "query", "empty", "{}", "--length", "3", "--lib", SETS)[:2] == (0, "TRUE\n")
    assert cli(capsys, "query", "max", "{1}", "--lib", MAX)[0] == 2
    code, out, _ = cli(capsys, "oracle", "N in S & ~ex1 N1 (N1 in S & ~(N1 <= N))", "--assign", "N=2", "--assign", "S={0,2}")
    assert (code, out) == (0, "TRUE\n")
    code, out, _ = cli(capsys, "oracle", "all1 X ex1 Y (X < Y)")
    assert (code, out) == (1, "FALSE\n")


def test_parse(capsys):
    code, out, _ = cli(capsys, "parse", "0 <= 0")
    assert (code, out) == (0, "0 <= 0\n")
    code, out, _ = cli(capsys, "parse", MAX)
    assert code == 0 and out.startswith("max(S, N) := nat(N) & set(S)")


def test_script(capsys, tmp_path):
    script = tmp_path / "s.script"
    script.write_text("def p(X) :- nat(X).  -> 1\nunfold+ 1 1  -> 2 3\n")
    code, out, _ = cli(capsys, "script", str(script))
    assert code == 0
    assert out.splitlines()[0] == "2: p(0)."
    script.write_text("unfold+ nosuch 1\n")
    code, _, err = cli(capsys, "script", str(script))
    assert code == 1 and "line 1" in err


def _subprocess(args, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    return subprocess.run([sys.executable, "-m", "ws1sfold", *args], capture_output=True, text=True, env=env, cwd=ROOT)


def test_output_ignores_hash_seed():
    runs = [_subprocess(["synthesize", MAX], seed) for seed in (0, 1, 12345)]
    assert all(r.returncode == 0 for r in runs)
    assert len({r.stdout for r in runs}) == 1


@pytest.mark.parametrize("args", [["decide", "all1 X ex1 Y (X <= Y)"], ["emit", "p(0). p(s(X)) :- p(X)."]])
def test_module_entry_point(args):
    r = _subprocess(args, 0)
    assert r.returncode == 0 and r.stdout
