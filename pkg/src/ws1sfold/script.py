"""Line-oriented derivation scripts driving the transformation rules.

Commands (positions are 1-based)::

    def <clause>                         introduce a definition
    unfold+ <cid> <pos>                  unfold w.r.t. a positive literal
    unfold- <cid> <pos>                  unfold w.r.t. a negative literal
    fold <cid> <did>                     fold using a definition
    simplify <pred>                      propositional simplification
    addatom <cid> <atom> justify <phi>   strengthen a body, phi decided true
    remove <cid> justify <phi>           delete a clause whose body phi refutes
    assert-contains <clause>             a variant is in the program
    assert-absent <pred>                 no clause has this head predicate

Any command may end with ``-> name ...`` to label the clauses it produces.
A clause reference is a label, or a numeric id when no such label exists.
``addatom`` moves the old label to the strengthened clause.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from .progtext import ProgramSyntaxError, format_clause, parse_atom, parse_clause
from .rules import (
    TransformState,
    rule_add_atom,
    rule_definition,
    rule_fold,
    rule_prop_simplify,
    rule_unfold_neg,
    rule_unfold_pos,
)
from .terms import Atom, variant_eq

FALSE = "false"


class ScriptError(RuntimeError):
    def __init__(self, msg: str, line: int = 0):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


@dataclass
class ScriptRun:
    state: TransformState
    labels: dict[str, int] = field(default_factory=dict)
    decisions: dict[str, bool] = field(default_factory=dict)

    def ref(self, token: str, line: int, definition: bool = False) -> int:
        if token in self.labels:
            cid = self.labels[token]
        elif token.isdigit():
            cid = int(token)
        else:
            raise ScriptError(f"unknown clause label {token!r}", line)
        if definition:
            if not any(d.id == cid for d in self.state.defs):
                raise ScriptError(f"clause {token} is not a definition", line)
        elif cid not in self.state.current.by_id:
            raise ScriptError(f"clause {token} is no longer in the program", line)
        return cid

    def label_of(self, cid: int) -> str | None:
        for k, v in self.labels.items():
            if v == cid:
                return k
        return None

    def labelled(self, pred: str | None = None) -> list[tuple[str, object]]:
        """(label, clause) pairs of the current program, optionally for one head predicate."""
        out = []
        for c in self.state.current:
            if pred is None or c.head.pred == pred:
                out.append((self.label_of(c.id) or f"#{c.id}", c))
        return out


_ARROW = re.compile(r"\s+->\s+(?P<names>[^\s].*)$")


def _split(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line or line.startswith("#"):
            continue
        names: list[str] = []
        m = _ARROW.search(line)
        if m:
            names = m.group("names").split()
            line = line[: m.start()].strip()
        cmd, _, rest = line.partition(" ")
        yield n, cmd, rest.strip(), names


def _position(token: str, line: int) -> int:
    if not token.isdigit() or int(token) < 1:
        raise ScriptError(f"bad position {token!r}", line)
    return int(token) - 1


def run_script(
    text: str,
    state: TransformState,
    decider: Callable[[str], bool] | None = None,
) -> ScriptRun:
    """Replay ``text`` from ``state``; ``decider`` settles justification formulas."""
    run = ScriptRun(state)

    def decide(phi: str) -> bool:
        if decider is None:
            raise ScriptError("script needs a decider for justifications")
        if phi not in run.decisions:
            run.decisions[phi] = bool(decider(phi))
        return run.decisions[phi]

    for line, cmd, rest, names in _split(text):
        before = {c.id for c in run.state.current}
        try:
            run.state = _step(run, cmd, rest, line, decide)
        except ScriptError:
            raise
        except (ValueError, ProgramSyntaxError, RuntimeError) as e:
            raise ScriptError(f"{cmd}: {e}", line) from e
        made = [c.id for c in run.state.current if c.id not in before]
        if cmd == "addatom" and not names:
            old = rest.split()[0]
            names = [old] if old in run.labels else []
        if len(names) > len(made):
            raise ScriptError(f"{len(names)} labels for {len(made)} new clauses", line)
        for name, cid in zip(names, made):
            run.labels[name] = cid
    return run


def _step(run: ScriptRun, cmd: str, rest: str, line: int, decide) -> TransformState:
    st = run.state
    args = rest.split()
    if cmd == "def":
        return rule_definition(st, parse_clause(rest))
    if cmd in ("unfold+", "unfold-"):
        if len(args) != 2:
            raise ScriptError(f"{cmd} takes a clause and a position", line)
        rule = rule_unfold_pos if cmd == "unfold+" else rule_unfold_neg
        return rule(st, run.ref(args[0], line), _position(args[1], line))
    if cmd == "fold":
        if len(args) != 2:
            raise ScriptError("fold takes a clause and a definition", line)
        return rule_fold(st, run.ref(args[0], line), run.ref(args[1], line, definition=True))
    if cmd == "simplify":
        name, _, arity = rest.partition("/")
        return rule_prop_simplify(st, (name, int(arity or 0)))
    if cmd == "addatom":
        head, sep, phi = rest.partition(" justify ")
        if not sep:
            raise ScriptError("addatom needs 'justify <formula>'", line)
        cid_tok, _, atom_text = head.partition(" ")
        return rule_add_atom(st, run.ref(cid_tok, line), parse_atom(atom_text.strip()), phi.strip(), decide)
    if cmd == "remove":
        head, sep, phi = rest.partition(" justify ")
        if not sep:
            raise ScriptError("remove needs 'justify <formula>'", line)
        cid = run.ref(head.strip(), line)
        st = rule_add_atom(st, cid, Atom(FALSE), phi.strip(), decide)
        new = st.current.clauses[-1]
        return rule_unfold_pos(st, new.id, len(new.body) - 1)
    if cmd == "assert-contains":
        want = parse_clause(rest)
        if not any(variant_eq(c, want) for c in st.current):
            raise ScriptError(f"no variant of {format_clause(want)} in the program", line)
        return st
    if cmd == "assert-absent":
        name = rest.strip()
        hits = [c for c in st.current if c.head.pred == name]
        if hits:
            raise ScriptError(f"{name} still has {len(hits)} clauses", line)
        return st
    raise ScriptError(f"unknown command {cmd!r}", line)
