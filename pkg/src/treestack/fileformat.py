"""Line-oriented text format for automata, and pipeline descriptors.

Automaton files::

    alphabet a b
    labels *
    states q0 q1 q2
    initial q0
    final q2
    restriction 1
    trans q0 a eq @ push 1 * q1
    trans q1 b true down q2

``#`` starts a comment line; ``# claimed_k K``, ``# degree D`` and
``# note TEXT`` are metadata comments written by the generator.  Tokens may be parenthesized
groups, which is how generated state ids and structured labels appear.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import (
    DOWN,
    ID,
    TRUE,
    Automaton,
    Down,
    Eq,
    Id,
    Meta,
    Push,
    Set,
    Transition,
    TruePred,
    Up,
    explicit_automaton,
)
from .errors import ParseError
from .labels import canonical, parse_label, render_sexpr, parse_sexpr, split_tokens_at

SECTIONS = ("alphabet", "labels", "states", "initial", "final", "restriction", "trans")


def hash_letter(i: int) -> str:
    return f"#{i}" if i < 10 else f"#{{{i}}}"


def _state_token(tok: str, line: int) -> str:
    if tok.startswith("("):
        return render_sexpr(parse_sexpr(tok, line))
    return tok


def _int_token(tok: str, line: int, col: int) -> int:
    if not tok.isdigit():
        raise ParseError(f"expected a non-negative integer, got {tok!r}", line, col)
    return int(tok)


def _parse_transition(toks: list, line: int) -> Transition:
    pos = 1

    def take(what: str):
        nonlocal pos
        if pos >= len(toks):
            col = toks[-1][1] + len(toks[-1][0]) if toks else 1
            raise ParseError(f"missing {what}", line, col)
        tok = toks[pos]
        pos += 1
        return tok

    src, _ = take("source state")
    inp, _ = take("input")
    kind, col = take("predicate")
    if kind == "true":
        pred = TRUE
    elif kind == "eq":
        lab, lcol = take("predicate label")
        pred = Eq(_label(lab, line, lcol))
    else:
        raise ParseError(f"predicate must be 'true' or 'eq', got {kind!r}", line, col)
    op, col = take("instruction")
    if op == "id":
        instr = ID
    elif op == "down":
        instr = DOWN
    elif op == "up":
        n, ncol = take("child index")
        instr = Up(_int_token(n, line, ncol))
    elif op == "push":
        n, ncol = take("child index")
        lab, lcol = take("pushed label")
        instr = Push(_int_token(n, line, ncol), _label(lab, line, lcol))
    elif op == "set":
        lab, lcol = take("label")
        instr = Set(_label(lab, line, lcol))
    else:
        raise ParseError(f"unknown instruction {op!r}", line, col)
    dst, _ = take("target state")
    if pos != len(toks):
        raise ParseError("trailing tokens", line, toks[pos][1])
    return Transition(
        _state_token(src, line),
        None if inp == "eps" else inp,
        pred,
        instr,
        _state_token(dst, line),
    )


def _label(tok: str, line: int, col: int):
    try:
        return parse_label(tok, line)
    except ParseError as exc:
        raise ParseError(str(exc).split(": ", 1)[-1], line, col) from None


def _read_meta(comment: str, meta: dict):
    key, _, rest = comment[1:].strip().partition(" ")
    rest = rest.strip()
    if key in ("claimed_k", "degree") and rest.isdigit():
        meta[key] = int(rest)
    elif key == "note" and rest:
        meta.setdefault("notes", []).append(rest)


def _meta_lines(claimed_k, degree_meta, notes) -> list:
    lines = []
    if claimed_k is not None:
        lines.append(f"# claimed_k {claimed_k}")
    if degree_meta is not None:
        lines.append(f"# degree {degree_meta}")
    lines += [f"# note {n}" for n in notes]
    return lines


def parse_automaton(text: str) -> Automaton:
    terminals, labels, states, finals, transitions = [], [], [], [], []
    initial = None
    meta: dict = {}
    saw_section = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            _read_meta(stripped, meta)
            continue
        toks = split_tokens_at(raw, lineno)
        head, col = toks[0]
        args = [t for t, _ in toks[1:]]
        if head not in SECTIONS:
            raise ParseError(f"unknown section {head!r}", lineno, col)
        saw_section = True
        if head == "alphabet":
            terminals.extend(args)
        elif head == "labels":
            labels.extend(_label(t, lineno, c) for t, c in toks[1:])
        elif head == "states":
            states.extend(_state_token(t, lineno) for t in args)
        elif head == "initial":
            if len(args) != 1:
                raise ParseError("initial takes exactly one state", lineno, col)
            if initial is not None:
                raise ParseError("initial state given twice", lineno, col)
            initial = _state_token(args[0], lineno)
        elif head == "final":
            finals.extend(_state_token(t, lineno) for t in args)
        elif head == "restriction":
            if len(args) != 1:
                raise ParseError("restriction takes one integer", lineno, col)
            meta["claimed_k"] = _int_token(args[0], lineno, toks[1][1])
        else:
            transitions.append(_parse_transition(toks, lineno))
    if not saw_section:
        raise ParseError("no automaton content", 1)
    if initial is None:
        raise ParseError("missing initial state", 1)
    return explicit_automaton(
        states, terminals, labels, initial, finals, transitions,
        Meta(meta.get("claimed_k"), meta.get("degree"), tuple(meta.get("notes", ()))),
    )


def render_transition(t: Transition) -> str:
    x = "eps" if t.input is None else t.input
    return f"trans {t.src} {x} {t.pred} {t.instr} {t.dst}"


def render_automaton(aut: Automaton) -> str:
    lines = _meta_lines(aut.meta.claimed_k, aut.meta.declared_degree, aut.meta.notes)
    lines.append(" ".join(["alphabet", *aut.terminals]))
    lines.append(" ".join(["labels", *(canonical(l) for l in aut.labels)]))
    lines.append(" ".join(["states", *(str(q) for q in aut.states)]))
    lines.append(f"initial {aut.initial}")
    order = {q: i for i, q in enumerate(aut.states)}
    finals = sorted(aut.finals, key=lambda q: (order.get(q, len(order)), str(q)))
    lines.append(" ".join(["final", *(str(q) for q in finals)]))
    if aut.meta.claimed_k is not None:
        lines.append(f"restriction {aut.meta.claimed_k}")
    lines.extend(render_transition(t) for t in aut.transitions)
    return "\n".join(lines) + "\n"


# -- pipeline descriptors ----------------------------------------------------

STAGES = ("hash", "perm", "closure")


@dataclass(frozen=True)
class PipelineDescriptor:
    base: str
    n: int
    stage: str
    sigma: Optional[tuple] = None
    claimed_k: Optional[int] = None
    degree: Optional[int] = None
    notes: tuple = ()


def is_descriptor(text: str) -> bool:
    for raw in text.splitlines():
        s = raw.strip()
        if s and not s.startswith("#"):
            return s == "pipeline"
    return False


def parse_descriptor(text: str) -> PipelineDescriptor:
    fields: dict = {}
    meta: dict = {}
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s:
            continue
        if s.startswith("#"):
            _read_meta(s, meta)
            continue
        if not seen_header:
            if s != "pipeline":
                raise ParseError("descriptor must start with 'pipeline'", lineno, 1)
            seen_header = True
            continue
        key, _, rest = s.partition(" ")
        if key not in ("base", "N", "sigma", "stage"):
            raise ParseError(f"unknown descriptor field {key!r}", lineno, 1)
        fields[key] = rest.strip()
    for key in ("base", "N", "stage"):
        if key not in fields:
            raise ParseError(f"descriptor lacks {key!r}", 1)
    if fields["stage"] not in STAGES:
        raise ParseError(f"unknown stage {fields['stage']!r}", 1)
    if not fields["N"].isdigit():
        raise ParseError(f"N must be a positive integer, got {fields['N']!r}", 1)
    sigma = None
    if "sigma" in fields:
        if not all(x.isdigit() for x in fields["sigma"].split()):
            raise ParseError("sigma must list integers", 1)
        sigma = tuple(int(x) for x in fields["sigma"].split())
        if sorted(sigma) != list(range(1, len(sigma) + 1)):
            raise ParseError("sigma is not a permutation", 1)
    return PipelineDescriptor(
        fields["base"], int(fields["N"]), fields["stage"], sigma,
        meta.get("claimed_k"), meta.get("degree"), tuple(meta.get("notes", ())),
    )


def render_descriptor(d: PipelineDescriptor) -> str:
    lines = _meta_lines(d.claimed_k, d.degree, d.notes)
    lines += ["pipeline", f"base {d.base}", f"N {d.n}"]
    if d.sigma is not None:
        lines.append("sigma " + " ".join(str(i) for i in d.sigma))
    lines.append(f"stage {d.stage}")
    return "\n".join(lines) + "\n"
