"""The block-permuting automaton, generated from transition schemas.

Given the end-marked automaton ``A`` (degree D) and its marker-pushing
variant ``A_N``, the automaton built here reads

    #s1 w_s1 #(s1+1)  #s2 w_s2 #(s2+1)  ...

for a permutation s and accepts iff ``#1 w_1 #2 ... #N w_N #(N+1)`` is
accepted by ``A_N``.  It works in three phases on a tree whose vertex 1
stands for the root of an ``A_N`` run:

* guess: build a copy of the final ``A_N`` tree, every vertex carrying a
  history array (per block: visit status 0/1/2 and the label it will have
  when the block ends), a compass (per marker: which child leads to it),
  the label it carries now, and the set of children pushed below it;
* simulate: for each block in the permuted order, walk to the block's
  start marker and simulate ``A_N`` reading that block, moving instead of
  pushing, promoting history entries on first visit and on guessed last
  exit, until the push of the next marker is simulated;
* check: walk the guessed tree depth-first and accept only if every
  history array is settled and consistent.

States are tuples tagged by their first component:

``("start", j)``        building the root copy and the outer markers
``("bin", bits)``       guessing the tree; bits record which markers exist
``("then", instr, q)``  second half of a two-step move
``("aleph", i)``        locating the start marker of block i
``("loc", sp)``         at that marker, about to read its hash
``("blk", sp)``         back on the marker's parent, opening the block
``("sim", q, i)``       simulating state q of ``A_N`` inside block i
``("arrive", q, i)``    just moved to an existing vertex
``("create", q, i, c)`` just moved to a vertex that ``A_N`` would push
``("bend", i, sp)``     at the next marker, about to read its hash
``("ret", i)``          walking back to vertex 1
``("beth", i)``         block i finished
``("p3", tag)``         the final check
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..core import (
    DOWN,
    ID,
    TRUE,
    Automaton,
    Down,
    Eq,
    Id,
    Meta,
    Push,
    Schema,
    SchematicSource,
    Set,
    Transition,
    Up,
)
from ..errors import ContractError
from ..fileformat import hash_letter
from ..labels import (
    DASH,
    ROOT,
    SOUTH,
    Box,
    Composite,
    Special,
    make_choice,
)
from ..oracle import Permutation
from .basic import is_hash_letter

ACCEPT = ("p3", "accept")
START = ("start", 0)

NOTES = (
    "root-copy push reads no input and tests for @",
    "each set-then-move step goes through an intermediate state",
    "guessed vertices record their pushed children for the final check",
)


@dataclass(frozen=True)
class PipelineMeta:
    n: int
    k: int
    degree: int
    sigma: Permutation

    def __post_init__(self):
        if self.n < 1 or self.k < 1 or self.degree < 0:
            raise ContractError("N and k must be positive and D non-negative")
        if self.sigma.size != self.n:
            raise ContractError(f"permutation {self.sigma} does not act on 1..{self.n}")


def specials_by_index(a_n: Automaton, n: int) -> dict:
    """Marker labels that ``A_N`` can push, grouped by hash index."""
    out = {i: [] for i in range(1, n + 2)}
    for t in a_n.transitions:
        if isinstance(t.instr, Push) and isinstance(t.instr.label, Special):
            sp = t.instr.label
            if sp not in out[sp.index]:
                out[sp.index].append(sp)
    return out


def _t(src, label, instr, dst, x=None) -> Transition:
    return Transition(src, x, Eq(label), instr, dst)


def _choice(items):
    items = list(items)
    return make_choice(items) if items else None


def fresh_histories(n: int, labels) -> list:
    """History arrays of a vertex not yet visited in any block."""
    out = []
    for j in range(1, n + 1):
        for cs in itertools.product(labels, repeat=n - j + 1):
            out.append((None,) * (j - 1) + tuple((0, c) for c in cs))
    return out


def root_copy_choice(meta: PipelineMeta):
    n, d = meta.n, meta.degree
    hist = ((1, ROOT),) + ((0, ROOT),) * (n - 1)
    middle = [list(range(1, d + 1)) + [d + i] for i in range(2, n + 1)]
    return make_choice(
        Composite(hist, (d + 1,) + mid + (d + n + 1,), ROOT)
        for mid in itertools.product(*middle)
    )


def child_choice(meta: PipelineMeta, histories, compass: tuple, ell: int):
    d = meta.degree
    domains = [
        list(range(1, d + 1)) + [d + i] if x == ell else [SOUTH]
        for i, x in enumerate(compass, 1)
    ]
    return _choice(
        Composite(h, cmp, DASH) for h in histories for cmp in itertools.product(*domains)
    )


# -- guessing phase ------------------------------------------------------------


def phase_one_schemas(meta: PipelineMeta, specials: dict, labels) -> list:
    n, d = meta.n, meta.degree
    root_copy = root_copy_choice(meta)
    marker = {i: _choice(specials[i]) for i in specials}
    histories = fresh_histories(n, labels)
    first = meta.sigma.images[0]

    def start(state, label):
        stage = state[1]
        if stage == 0 and label == ROOT:
            return [_t(state, label, Push(1, root_copy), ("start", 1))]
        if stage in (1, 3) and isinstance(label, Composite):
            idx = 1 if stage == 1 else n + 1
            if marker[idx] is None:
                return []
            after = ("then", Push(d + idx, marker[idx]), ("start", stage + 1))
            return [_t(state, label, Set(label.with_kid(d + idx)), after)]
        if stage in (2, 4) and isinstance(label, Special):
            if stage == 2:
                return [_t(state, label, DOWN, ("start", 3))]
            return [_t(state, label, DOWN, ("bin", (1,) + (0,) * (n - 1) + (1,)))]
        return []

    def binary(state, label):
        bits = state[1]
        if isinstance(label, Special):
            return [_t(state, label, DOWN, state)]
        if not isinstance(label, Composite):
            return []
        out = []
        for i in range(2, n + 1):
            if bits[i - 1] == 0 and label.compass[i - 1] == d + i and marker[i] is not None:
                nbits = bits[: i - 1] + (1,) + bits[i:]
                after = ("then", Push(d + i, marker[i]), ("bin", nbits))
                out.append(_t(state, label, Set(label.with_kid(d + i)), after))
        for ell in range(1, d + 1):
            child = child_choice(meta, histories, label.compass, ell)
            if child is not None:
                after = ("then", Push(ell, child), state)
                out.append(_t(state, label, Set(label.with_kid(ell)), after))
        if label.third == DASH:
            out.append(_t(state, label, DOWN, state))
        if label.third == ROOT and all(bits):
            out.append(_t(state, label, ID, ("aleph", first)))
        return out

    return [
        Schema("guess-root", frozenset({"start"}), start),
        Schema("guess-tree", frozenset({"bin"}), binary),
    ]


def then_schema() -> Schema:
    def then(state, label):
        return [Transition(state, None, TRUE, state[1], state[2])]

    return Schema("then", frozenset({"then"}), then)


# -- simulation of one block ---------------------------------------------------


def _exits(state, label: Composite, i: int, x, move, target, last_only=False) -> list:
    col = label.column(i)
    if col is None or col[0] != 1:
        return []
    out = []
    if not last_only:
        out.append(_t(state, label, move, target, x))
    if col[1] == label.third:
        closed = label.with_column(i, (2, col[1]))
        out.append(_t(state, label, Set(closed), ("then", move, target), x))
    return out


def subroutine_schemas(meta: PipelineMeta, i: int, a_n: Automaton, specials: dict) -> list:
    n, d = meta.n, meta.degree
    hash_i = hash_letter(i)
    own_markers = frozenset(specials[i])

    def locate(state, label):
        if state[1] != i:
            return []
        if isinstance(label, Composite):
            x = label.compass[i - 1]
            return [] if x == SOUTH else [_t(state, label, Up(x), state)]
        if label in own_markers:
            return [_t(state, label, ID, ("loc", label))]
        return []

    def at_marker(state, label):
        sp = state[1]
        if sp.index != i or label != sp:
            return []
        return [_t(state, label, DOWN, ("blk", sp), hash_i)]

    def open_block(state, label):
        sp = state[1]
        if sp.index != i or not isinstance(label, Composite):
            return []
        col = label.column(i)
        if i == 1:
            if col != (1, ROOT) or sp.label != ROOT:
                return []
            opened = label.with_third(sp.label)
        else:
            prev = label.column(i - 1)
            if col is None or col[0] != 0 or prev is None or prev[1] != sp.label:
                return []
            opened = label.with_column(i, (1, col[1])).with_third(sp.label)
        return [_t(state, label, Set(opened), ("sim", sp.dst, i))]

    def simulate(state, label):
        q, blk = state[1], state[2]
        if blk != i or not isinstance(label, Composite):
            return []
        third = label.third
        out = []
        for t in a_n.source.from_state(q):
            if is_hash_letter(t.input):
                continue
            if isinstance(t.pred, Eq) and t.pred.label != third:
                continue
            instr, x, q2 = t.instr, t.input, t.dst
            if isinstance(instr, Id):
                out.append(_t(state, label, ID, ("sim", q2, i), x))
            elif isinstance(instr, Set):
                if third != ROOT:
                    out.append(_t(state, label, Set(label.with_third(instr.label)), ("sim", q2, i), x))
            elif isinstance(instr, Down):
                if third != ROOT:
                    out += _exits(state, label, i, x, DOWN, ("arrive", q2, i))
            elif isinstance(instr, Up):
                if instr.n <= d:
                    out += _exits(state, label, i, x, Up(instr.n), ("arrive", q2, i))
            elif isinstance(instr, Push):
                pushed = instr.label
                if isinstance(pushed, Special):
                    if pushed.index == i + 1 and instr.n == d + i + 1:
                        out += _exits(state, label, i, x, Up(instr.n), ("bend", i, pushed), last_only=True)
                elif instr.n <= d:
                    out += _exits(state, label, i, x, Up(instr.n), ("create", q2, i, pushed))
        return out

    def arrive(state, label):
        q2, blk = state[1], state[2]
        if blk != i or not isinstance(label, Composite):
            return []
        col = label.column(i)
        if col is not None and col[0] == 1:
            return [_t(state, label, ID, ("sim", q2, i))]
        if i > 1 and col is not None and col[0] == 0:
            prev = label.column(i - 1)
            if prev is not None:
                opened = label.with_column(i, (1, col[1])).with_third(prev[1])
                return [_t(state, label, Set(opened), ("sim", q2, i))]
        return []

    def create(state, label):
        q2, blk, pushed = state[1], state[2], state[3]
        if blk != i or not isinstance(label, Composite):
            return []
        col = label.column(i)
        if col is None or col[0] != 0:
            return []
        if i > 1 and label.column(i - 1) is not None:
            return []
        made = label.with_column(i, (1, col[1])).with_third(pushed)
        return [_t(state, label, Set(made), ("sim", q2, i))]

    def block_end(state, label):
        blk, sp = state[1], state[2]
        if blk != i or label != sp:
            return []
        return [_t(state, label, DOWN, ("ret", i), hash_letter(i + 1))]

    def go_back(state, label):
        if state[1] != i or not isinstance(label, Composite):
            return []
        if label.third == ROOT:
            return [_t(state, label, ID, ("beth", i))]
        return [_t(state, label, DOWN, state)]

    return [
        Schema(f"locate-{i}", frozenset({"aleph"}), locate),
        Schema(f"read-open-{i}", frozenset({"loc"}), at_marker),
        Schema(f"open-{i}", frozenset({"blk"}), open_block),
        Schema(f"simulate-{i}", frozenset({"sim"}), simulate),
        Schema(f"arrive-{i}", frozenset({"arrive"}), arrive),
        Schema(f"create-{i}", frozenset({"create"}), create),
        Schema(f"read-close-{i}", frozenset({"bend"}), block_end),
        Schema(f"return-{i}", frozenset({"ret"}), go_back),
    ]


# -- glue and final check ----------------------------------------------------


def phase_two_glue(meta: PipelineMeta) -> list:
    """Transitions chaining the blocks in permuted order (as concrete tuples)."""
    order = meta.sigma.images
    return [
        Transition(("beth", order[j]), None, TRUE, ID, ("aleph", order[j + 1]))
        for j in range(len(order) - 1)
    ]


def history_settled(label: Composite) -> bool:
    """True iff every block has either left the vertex for good or never touched it."""
    hist = label.history
    cols = [c for c in hist if c is not None]
    if not cols:
        return False
    if all(c[1] == ROOT for c in cols) and len(cols) == len(hist):
        return hist[0][0] == 2 and all(c[0] in (0, 2) for c in cols)
    first = next(j for j, c in enumerate(hist) if c is not None)
    if hist[first][0] != 2:
        return False
    for j in range(first + 1, len(hist)):
        status, lab = hist[j]
        if status not in (0, 2):
            return False
        if status == 0 and lab != hist[j - 1][1]:
            return False
    return True


def phase_three_schemas(meta: PipelineMeta) -> list:
    last = meta.sigma.images[-1]

    def leave_last_block(state, label):
        if state[1] != last:
            return []
        return [Transition(state, None, TRUE, ID, ("p3", "enter"))]

    def check(state, label):
        tag = state[1]
        if tag == "enter":
            if isinstance(label, Composite):
                if not history_settled(label):
                    return []
                return [_t(state, label, Set(Box(label.kids)), ("p3", "scan"))]
            if isinstance(label, Special):
                return [_t(state, label, DOWN, ("p3", "scan"))]
            return []
        if tag == "scan":
            if label == ROOT:
                return [_t(state, label, ID, ACCEPT)]
            if isinstance(label, Box):
                if not label.pending:
                    return [_t(state, label, DOWN, state)]
                m = min(label.pending)
                after = ("then", Up(m), ("p3", "enter"))
                return [_t(state, label, Set(Box(label.pending - {m})), after)]
        return []

    return [
        Schema("finish", frozenset({"beth"}), leave_last_block),
        Schema("check", frozenset({"p3"}), check),
    ]


def _glue_schema(glue: list) -> Schema:
    by_src = {}
    for t in glue:
        by_src.setdefault(t.src, []).append(t)

    def chain(state, label):
        return by_src.get(state, [])

    return Schema("chain", frozenset({"beth"}), chain)


def build_A_sigma(a: Automaton, a_n: Automaton, meta: PipelineMeta) -> Automaton:
    if a.meta.declared_degree != meta.degree:
        raise ContractError(
            f"recorded degree {a.meta.declared_degree} differs from meta degree {meta.degree}"
        )
    if a_n.meta.declared_degree != meta.degree + meta.n + 1:
        raise ContractError("marker automaton degree does not match N and D")
    specials = specials_by_index(a_n, meta.n)
    labels = [c for c in a.labels if not isinstance(c, Special)]
    schemas = phase_one_schemas(meta, specials, labels) + [then_schema()]
    for i in range(1, meta.n + 1):
        schemas += subroutine_schemas(meta, i, a_n, specials)
    schemas.append(_glue_schema(phase_two_glue(meta)))
    schemas += phase_three_schemas(meta)
    d, n = meta.degree, meta.n
    source = SchematicSource(schemas, range(1, d + n + 2), a.terminals)
    return Automaton(
        terminals=a.terminals,
        initial=START,
        finals=frozenset({ACCEPT}),
        source=source,
        meta=Meta(claimed_k=meta.k + n + 3, declared_degree=d + n + 1, notes=NOTES),
    )
