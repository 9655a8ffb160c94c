"""Tree labels and their canonical s-expression forms.

Every label has exactly one canonical text form, and two labels are equal
iff their canonical forms are equal.  Besides the user-facing plain tokens
the module defines the structured labels generated by the constructions:
special-vertex markers, composite Phase-One labels, box markers, and the
symbolic ``Choice`` used by the runner to defer an unobserved guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

from .errors import ParseError

SOUTH = "south"


class _CachedHash:
    """Structured labels are hashed constantly during search; cache the hash."""

    __slots__ = ()

    def __hash__(self) -> int:
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
            object.__setattr__(self, "_hash", h)
            return h


@dataclass(frozen=True)
class RootMark:
    def __str__(self) -> str:
        return "@"


@dataclass(frozen=True)
class DashMark:
    def __str__(self) -> str:
        return "-"


ROOT = RootMark()
DASH = DashMark()


@dataclass(frozen=True)
class Plain:
    token: str

    def __str__(self) -> str:
        return self.token


@dataclass(frozen=True)
class Special(_CachedHash):
    """Marker written on the vertex created when hash ``index`` is read."""

    index: int
    src: str
    dst: str
    label: "Label"
    __hash__ = _CachedHash.__hash__

    def __str__(self) -> str:
        return canonical(self)


@dataclass(frozen=True)
class Composite(_CachedHash):
    """Label of a guessed vertex: history columns, compass, current label, children.

    ``history`` holds one entry per hash block, either ``None`` (an unused
    column) or a pair ``(status, label)``.  ``compass`` holds one entry per
    special index, a child index or ``SOUTH``.  ``kids`` records the child
    indices pushed below this vertex while the tree was being guessed.
    """

    history: tuple
    compass: tuple
    third: "Label"
    kids: frozenset = frozenset()
    __hash__ = _CachedHash.__hash__

    def __str__(self) -> str:
        return canonical(self)

    def column(self, i: int):
        return self.history[i - 1]

    def with_column(self, i: int, entry) -> "Composite":
        hist = list(self.history)
        hist[i - 1] = entry
        return Composite(tuple(hist), self.compass, self.third, self.kids)

    def with_third(self, third: "Label") -> "Composite":
        return Composite(self.history, self.compass, third, self.kids)

    def with_kid(self, n: int) -> "Composite":
        return Composite(self.history, self.compass, self.third, self.kids | {n})


@dataclass(frozen=True)
class Box(_CachedHash):
    """Checked-vertex marker; ``pending`` lists children not yet visited."""

    pending: frozenset = frozenset()
    __hash__ = _CachedHash.__hash__

    def __str__(self) -> str:
        return canonical(self)


@dataclass(frozen=True)
class Choice(_CachedHash):
    """A label that is one of ``options``, not yet pinned down by any test."""

    options: frozenset
    __hash__ = _CachedHash.__hash__

    def __str__(self) -> str:
        return canonical(self)


Label = Union[RootMark, DashMark, Plain, Special, Composite, Box, Choice]

RESERVED_TOKENS = frozenset({"@", "-", "box", "south", "%", "eps"})


def options_of(label: Label) -> frozenset:
    if isinstance(label, Choice):
        return label.options
    return frozenset((label,))


def make_choice(options) -> Label:
    """Collapse an option set: one option is the label itself."""
    flat = set()
    for opt in options:
        flat |= options_of(opt)
    if not flat:
        raise ValueError("empty choice")
    if len(flat) == 1:
        return next(iter(flat))
    return Choice(frozenset(flat))


# -- rendering ---------------------------------------------------------------


def _render_column(col) -> str:
    if col is None:
        return "%"
    n, c = col
    return f"({n} {canonical(c)})"


@lru_cache(maxsize=None)
def canonical(label: Label) -> str:
    if isinstance(label, RootMark):
        return "@"
    if isinstance(label, DashMark):
        return "-"
    if isinstance(label, Plain):
        return label.token
    if isinstance(label, Special):
        return f"(spec {label.index} {label.src} {label.dst} {canonical(label.label)})"
    if isinstance(label, Composite):
        hist = " ".join(_render_column(c) for c in label.history)
        cmp_ = " ".join(str(x) for x in label.compass)
        text = f"(lab (h {hist}) (cmp {cmp_}) {canonical(label.third)}"
        if label.kids:
            text += " (kids " + " ".join(str(n) for n in sorted(label.kids)) + ")"
        return text + ")"
    if isinstance(label, Box):
        if not label.pending:
            return "box"
        return "(box " + " ".join(str(n) for n in sorted(label.pending)) + ")"
    if isinstance(label, Choice):
        return "(any " + " ".join(sorted(canonical(o) for o in label.options)) + ")"
    raise TypeError(f"not a label: {label!r}")


def sort_key(label: Label) -> str:
    return canonical(label)


# -- s-expressions -----------------------------------------------------------


def split_tokens(text: str, line: int = 0) -> list:
    """Split ``text`` on whitespace, keeping parenthesized groups whole."""
    return [tok for tok, _ in split_tokens_at(text, line)]


def split_tokens_at(text: str, line: int = 0) -> list:
    """Like ``split_tokens`` but pairs each token with its 1-based column."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        start = i
        if ch == "(":
            depth = 0
            while i < n:
                if text[i] == "(":
                    depth += 1
                elif text[i] == ")":
                    depth -= 1
                    if depth == 0:
                        i += 1
                        break
                i += 1
            if depth != 0:
                raise ParseError("unbalanced parenthesis", line, start + 1)
        elif ch == ")":
            raise ParseError("unexpected ')'", line, start + 1)
        else:
            while i < n and not text[i].isspace() and text[i] not in "()":
                i += 1
        tokens.append((text[start:i], start + 1))
    return tokens


def parse_sexpr(text: str, line: int = 0):
    """Parse one s-expression into nested lists of atom strings."""
    text = text.strip()
    if not text:
        raise ParseError("empty expression", line, 1)
    if not text.startswith("("):
        if any(ch.isspace() or ch in "()" for ch in text):
            raise ParseError(f"bad atom {text!r}", line, 1)
        return text
    if not text.endswith(")"):
        raise ParseError(f"bad group {text!r}", line, 1)
    return [parse_sexpr(tok, line) for tok in split_tokens(text[1:-1], line)]


def render_sexpr(node) -> str:
    if isinstance(node, str):
        return node
    return "(" + " ".join(render_sexpr(x) for x in node) + ")"


def _int(node, line: int) -> int:
    if not isinstance(node, str) or not node.lstrip("-").isdigit():
        raise ParseError(f"expected integer, got {render_sexpr(node)!r}", line, 1)
    return int(node)


def _int_set(nodes, line: int) -> frozenset:
    return frozenset(_int(x, line) for x in nodes)


def _label_from(node, line: int) -> Label:
    if isinstance(node, str):
        if node == "@":
            return ROOT
        if node == "-":
            return DASH
        if node == "box":
            return Box()
        return Plain(node)
    if not node:
        raise ParseError("empty label group", line, 1)
    head = node[0]
    if head == "spec" and len(node) == 5:
        return Special(
            _int(node[1], line),
            render_sexpr(node[2]),
            render_sexpr(node[3]),
            _label_from(node[4], line),
        )
    if head == "lab" and len(node) in (4, 5):
        hist_node, cmp_node = node[1], node[2]
        if not isinstance(hist_node, list) or hist_node[:1] != ["h"]:
            raise ParseError("composite label needs (h ...)", line, 1)
        if not isinstance(cmp_node, list) or cmp_node[:1] != ["cmp"]:
            raise ParseError("composite label needs (cmp ...)", line, 1)
        history = []
        for col in hist_node[1:]:
            if col == "%":
                history.append(None)
            elif isinstance(col, list) and len(col) == 2:
                history.append((_int(col[0], line), _label_from(col[1], line)))
            else:
                raise ParseError(f"bad history column {render_sexpr(col)!r}", line, 1)
        compass = tuple(x if x == SOUTH else _int(x, line) for x in cmp_node[1:])
        kids = frozenset()
        if len(node) == 5:
            kid_node = node[4]
            if not isinstance(kid_node, list) or kid_node[:1] != ["kids"]:
                raise ParseError("expected (kids ...)", line, 1)
            kids = _int_set(kid_node[1:], line)
        return Composite(tuple(history), compass, _label_from(node[3], line), kids)
    if head == "box":
        return Box(_int_set(node[1:], line))
    if head == "any" and len(node) >= 2:
        return make_choice(_label_from(x, line) for x in node[1:])
    raise ParseError(f"unknown label form {render_sexpr(node)!r}", line, 1)


def parse_label(text: str, line: int = 0) -> Label:
    return _label_from(parse_sexpr(text, line), line)


def column_label(col) -> Optional[Label]:
    return None if col is None else col[1]
