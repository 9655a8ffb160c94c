"""Tree stacks, instructions, transitions and automata.

A tree stack is a labeled tree (a prefix-closed set of addresses, each a
tuple of positive integers, with the root ``()`` labeled ``@``) together
with a cursor address.  Instructions are partial functions on tree stacks.
An automaton pairs finite-state control with a transition source, which is
either an explicit list or a generator keyed on (state, cursor label).
"""

from __future__ import annotations

import weakref
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Sequence

from .errors import ContractError, InputError
from .labels import (
    ROOT,
    Choice,
    Label,
    Plain,
    RootMark,
    Special,
    canonical,
    make_choice,
    options_of,
)

Address = tuple


def render_address(addr: Address) -> str:
    return "." if not addr else ".".join(str(n) for n in addr)


def parse_address(text: str) -> Address:
    text = text.strip()
    if text in ("", ".", "ε"):
        return ()
    return tuple(int(part) for part in text.split("."))


# -- labeled trees -------------------------------------------------------------


class LabeledTree:
    """Immutable prefix-closed labeled tree.

    Built via ``from_mapping`` when the invariants should be checked; the
    instruction functions go through the unchecked internal constructor.
    """

    __slots__ = ("_labels", "_key", "_hash")

    def __init__(self, labels: dict):
        self._labels = labels
        self._key = None
        self._hash = None

    @classmethod
    def initial(cls) -> "LabeledTree":
        return cls({(): ROOT})

    @classmethod
    def from_mapping(cls, mapping) -> "LabeledTree":
        labels = {tuple(a): lab for a, lab in dict(mapping).items()}
        if labels.get(()) != ROOT:
            raise InputError("root must be labeled @")
        for addr, lab in labels.items():
            if any(not isinstance(n, int) or n < 1 for n in addr):
                raise InputError(f"bad address {addr!r}")
            if addr and addr[:-1] not in labels:
                raise InputError(f"domain not prefix-closed at {render_address(addr)}")
            if addr and lab == ROOT:
                raise InputError("only the root may carry @")
        return cls(labels)

    def __getitem__(self, addr: Address) -> Label:
        return self._labels[addr]

    def __contains__(self, addr: Address) -> bool:
        return addr in self._labels

    def __len__(self) -> int:
        return len(self._labels)

    def get(self, addr: Address, default=None):
        return self._labels.get(addr, default)

    def addresses(self) -> list:
        return sorted(self._labels)

    def items(self) -> list:
        return [(a, self._labels[a]) for a in sorted(self._labels)]

    def as_dict(self) -> dict:
        return dict(self._labels)

    def children(self, addr: Address) -> list:
        depth = len(addr)
        return sorted(
            a[-1] for a in self._labels if len(a) == depth + 1 and a[:depth] == addr
        )

    def with_label(self, addr: Address, label: Label) -> "LabeledTree":
        labels = dict(self._labels)
        labels[addr] = label
        return LabeledTree(labels)

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(self.items())
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, LabeledTree) and self.key() == other.key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{render_address(a)}: {canonical(l)}" for a, l in self.items())
        return f"LabeledTree({{{body}}})"


@dataclass(frozen=True)
class TreeStack:
    tree: LabeledTree
    cursor: Address = ()

    @classmethod
    def initial(cls) -> "TreeStack":
        return cls(LabeledTree.initial(), ())

    @property
    def label(self) -> Label:
        return self.tree[self.cursor]


# -- predicates and instructions ---------------------------------------------


@dataclass(frozen=True)
class TruePred:
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class Eq:
    label: Label

    def __str__(self) -> str:
        return f"eq {canonical(self.label)}"


TRUE = TruePred()
Predicate = object


@dataclass(frozen=True)
class Id:
    def __str__(self) -> str:
        return "id"


@dataclass(frozen=True)
class Down:
    def __str__(self) -> str:
        return "down"


@dataclass(frozen=True)
class Up:
    n: int

    def __str__(self) -> str:
        return f"up {self.n}"


@dataclass(frozen=True)
class Push:
    n: int
    label: Label

    def __str__(self) -> str:
        return f"push {self.n} {canonical(self.label)}"


@dataclass(frozen=True)
class Set:
    label: Label

    def __str__(self) -> str:
        return f"set {canonical(self.label)}"


ID = Id()
DOWN = Down()
Instruction = object


def apply_instruction(ts: TreeStack, instr) -> Optional[TreeStack]:
    """Apply ``instr``; ``None`` where the instruction is undefined."""
    cursor = ts.cursor
    if isinstance(instr, Id):
        return ts
    if isinstance(instr, Push):
        child = cursor + (instr.n,)
        if child in ts.tree:
            return None
        return TreeStack(ts.tree.with_label(child, instr.label), child)
    if isinstance(instr, Up):
        child = cursor + (instr.n,)
        if child not in ts.tree:
            return None
        return TreeStack(ts.tree, child)
    if isinstance(instr, Down):
        if not cursor:
            return None
        return TreeStack(ts.tree, cursor[:-1])
    if isinstance(instr, Set):
        if not cursor:
            return None
        return TreeStack(ts.tree.with_label(cursor, instr.label), cursor)
    raise TypeError(f"not an instruction: {instr!r}")


def predicate_holds(ts: TreeStack, pred) -> bool:
    if isinstance(pred, TruePred):
        return True
    return bool(options_of(ts.label) & options_of(pred.label))


def visited_address(cursor: Address, instr) -> Optional[Address]:
    """Address visited from below by ``instr`` fired at ``cursor``, if any."""
    if isinstance(instr, (Push, Up)):
        return cursor + (instr.n,)
    return None


# -- transitions and sources -------------------------------------------------


@dataclass(frozen=True)
class Transition:
    src: object
    input: Optional[str]
    pred: object
    instr: object
    dst: object

    def render(self) -> str:
        x = "eps" if self.input is None else self.input
        return f"{self.src},{x},{self.pred},{self.instr},{self.dst}"


def _pred_matches(pred, label: Label) -> bool:
    return isinstance(pred, TruePred) or pred.label == label


class ExplicitSource:
    """A finite transition list, indexed by source state."""

    def __init__(self, transitions: Iterable[Transition]):
        seen = set()
        unique = []
        for t in transitions:
            if t not in seen:
                seen.add(t)
                unique.append(t)
        self.transitions = tuple(unique)
        self._by_src = defaultdict(list)
        for t in self.transitions:
            self._by_src[t.src].append(t)

    def from_state(self, state) -> list:
        return self._by_src.get(state, [])

    def candidates(self, state, label: Label) -> list:
        return [t for t in self._by_src.get(state, ()) if _pred_matches(t.pred, label)]

    def push_indices(self) -> frozenset:
        return frozenset(t.instr.n for t in self.transitions if isinstance(t.instr, Push))

    def inputs(self) -> frozenset:
        return frozenset(t.input for t in self.transitions if t.input is not None)


@dataclass(frozen=True)
class Schema:
    """A transition family for states with a given tag.

    ``instantiate(state, label)`` returns the transitions leaving ``state``
    whose predicate is satisfied by the concrete cursor label ``label``.
    """

    name: str
    tags: frozenset
    instantiate: Callable


class SchematicSource:
    """Transitions generated on demand from schemas, with memoization."""

    def __init__(self, schemas: Sequence[Schema], push_indices: Iterable[int], inputs: Iterable[str]):
        self.schemas = tuple(schemas)
        self._push_indices = frozenset(push_indices)
        self._inputs = frozenset(inputs)
        self._by_tag = defaultdict(list)
        for schema in self.schemas:
            for tag in schema.tags:
                self._by_tag[tag].append(schema)
        self._cache: dict = {}

    def candidates(self, state, label: Label) -> list:
        key = (state, label)
        hit = self._cache.get(key)
        if hit is None:
            hit = []
            for schema in self._by_tag.get(state[0], ()):
                hit.extend(schema.instantiate(state, label))
            self._cache[key] = hit
        return hit

    def push_indices(self) -> frozenset:
        return self._push_indices

    def inputs(self) -> frozenset:
        return self._inputs


class MappedSource:
    """Wraps a source, renaming inputs (``None`` means erased to ε)."""

    def __init__(self, inner, rename: Callable):
        self.inner = inner
        self.rename = rename
        self._cache: dict = {}

    def candidates(self, state, label: Label) -> list:
        key = (state, label)
        hit = self._cache.get(key)
        if hit is None:
            hit = [replace(t, input=self.rename(t.input)) for t in self.inner.candidates(state, label)]
            self._cache[key] = hit
        return hit

    def push_indices(self) -> frozenset:
        return self.inner.push_indices()

    def inputs(self) -> frozenset:
        return frozenset(y for y in (self.rename(x) for x in self.inner.inputs()) if y is not None)


class UnionSource:
    """Disjoint union of sources; states are ``(index, inner_state)`` pairs."""

    def __init__(self, parts: Sequence, initial, inner_initials: Sequence):
        self.parts = tuple(parts)
        self.initial = initial
        self.inner_initials = tuple(inner_initials)
        self._cache: dict = {}

    def candidates(self, state, label: Label) -> list:
        if state == self.initial:
            return [
                Transition(self.initial, None, TRUE, ID, (idx, q0))
                for idx, q0 in enumerate(self.inner_initials)
            ]
        key = (state, label)
        hit = self._cache.get(key)
        if hit is None:
            idx, inner = state
            hit = [
                Transition((idx, t.src), t.input, t.pred, t.instr, (idx, t.dst))
                for t in self.parts[idx].candidates(inner, label)
            ]
            self._cache[key] = hit
        return hit

    def push_indices(self) -> frozenset:
        out = frozenset()
        for p in self.parts:
            out |= p.push_indices()
        return out

    def inputs(self) -> frozenset:
        out = frozenset()
        for p in self.parts:
            out |= p.inputs()
        return out


# -- automata ----------------------------------------------------------------


@dataclass(frozen=True)
class Meta:
    claimed_k: Optional[int] = None
    declared_degree: Optional[int] = None
    notes: tuple = ()


@dataclass(frozen=True)
class Automaton:
    """Finite control plus a transition source.

    ``states`` and ``labels`` are ``None`` for generated automata whose
    state and label sets are only known implicitly.
    """

    terminals: tuple
    initial: object
    finals: frozenset
    source: object
    states: Optional[tuple] = None
    labels: Optional[tuple] = None
    meta: Meta = field(default_factory=Meta)

    @property
    def explicit(self) -> bool:
        return isinstance(self.source, ExplicitSource)

    @property
    def transitions(self) -> tuple:
        if not self.explicit:
            raise ContractError("automaton has no explicit transition list")
        return self.source.transitions


def explicit_automaton(
    states: Iterable,
    terminals: Iterable[str],
    labels: Iterable[Label],
    initial,
    finals: Iterable,
    transitions: Iterable[Transition],
    meta: Meta = Meta(),
) -> Automaton:
    return Automaton(
        terminals=_ordered(terminals),
        initial=initial,
        finals=frozenset(finals),
        source=ExplicitSource(transitions),
        states=_ordered(states),
        labels=_ordered(labels),
        meta=meta,
    )


def _ordered(items: Iterable) -> tuple:
    return tuple(dict.fromkeys(items))


def with_transitions(aut: Automaton, transitions, **changes) -> Automaton:
    changes.setdefault("source", ExplicitSource(transitions))
    return replace(aut, **changes)


# -- stepping ------------------------------------------------------------------


def _group_key(t: Transition):
    instr = t.instr
    if isinstance(instr, Set):
        kind = ("set",)
    else:
        kind = (instr,)
    return (t.input, t.dst, kind)


_GROUP_CACHES: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _grouped(source, state, label: Choice) -> list:
    cache = _GROUP_CACHES.setdefault(source, {})
    key = (state, label)
    hit = cache.get(key)
    if hit is not None:
        return hit
    groups: dict = {}
    for opt in sorted(label.options, key=canonical):
        for t in source.candidates(state, opt):
            key_t = _group_key(t)
            entry = groups.get(key_t)
            if entry is None:
                entry = groups[key_t] = ([], [], t)
            entry[0].append(opt)
            if isinstance(t.instr, Set):
                entry[1].append(t.instr.label)
    hit = []
    for opts, values, proto in groups.values():
        instr = Set(make_choice(values)) if values else proto.instr
        hit.append(Transition(proto.src, proto.input, Eq(make_choice(opts)), instr, proto.dst))
    cache[key] = hit
    return hit


def moves(aut: Automaton, state, ts: TreeStack) -> list:
    """All (transition, successor stack) pairs enabled at (state, ts).

    When the cursor label is a ``Choice``, transitions are computed per
    option and grouped: a group's predicate narrows the cursor label to the
    options that produced it, and Set values of a group merge into a new
    choice.  This is exact because an unobserved option can only be
    distinguished by later predicate tests.
    """
    label = ts.label
    out = []
    if isinstance(label, Choice):
        for t in _grouped(aut.source, state, label):
            narrowed = t.pred.label
            base = ts if narrowed == label else TreeStack(ts.tree.with_label(ts.cursor, narrowed), ts.cursor)
            nxt = apply_instruction(base, t.instr)
            if nxt is not None:
                out.append((t, nxt))
        return out
    for t in aut.source.candidates(state, label):
        nxt = apply_instruction(ts, t.instr)
        if nxt is not None:
            out.append((t, nxt))
    return out


def step(aut: Automaton, state, ts: TreeStack, t: Transition, next_input: Optional[str]):
    """Fire ``t`` at (state, ts) reading ``next_input``; ``None`` if undefined."""
    if t.src != state or t.input != next_input:
        return None
    if not isinstance(t.pred, TruePred):
        common = options_of(ts.label) & options_of(t.pred.label)
        if not common:
            return None
        narrowed = make_choice(common)
        if narrowed != ts.label:
            ts = TreeStack(ts.tree.with_label(ts.cursor, narrowed), ts.cursor)
    nxt = apply_instruction(ts, t.instr)
    if nxt is None:
        return None
    return t.dst, nxt


def enabled_transitions(aut: Automaton, state, ts: TreeStack, next_input: Optional[str]) -> list:
    return [t for t, _ in moves(aut, state, ts) if t.input == next_input]


# -- validation ----------------------------------------------------------------


@dataclass
class Report:
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list:
        return [f"error: {v}" for v in self.violations] + [f"warning: {w}" for w in self.warnings]


def _labels_in(label: Label):
    yield label
    if isinstance(label, Choice):
        for o in label.options:
            yield o


def validate(aut: Automaton) -> Report:
    """Check the structural well-formedness of an explicit automaton."""
    rep = Report()
    if not aut.explicit:
        if aut.initial is None:
            rep.violations.append("no initial state")
        return rep
    states = set(aut.states or ())
    labels = set(aut.labels or ())
    terminals = set(aut.terminals)
    if aut.initial not in states:
        rep.violations.append(f"initial state {aut.initial} is not declared")
    for f in sorted(aut.finals, key=str):
        if f not in states:
            rep.violations.append(f"final state {f} is not declared")
    for lab in aut.labels or ():
        if isinstance(lab, RootMark):
            rep.violations.append("@ may not be declared as a label")
    for x in aut.terminals:
        if x in ("eps", "-"):
            rep.violations.append(f"terminal {x!r} is reserved")
    pushes, ups = set(), set()
    for idx, t in enumerate(aut.transitions, 1):
        where = f"transition {idx} ({t.render()})"
        for end in (t.src, t.dst):
            if end not in states:
                rep.violations.append(f"{where}: unknown state {end}")
        if t.input is not None and t.input not in terminals:
            rep.violations.append(f"{where}: unknown terminal {t.input}")
        if isinstance(t.pred, Eq):
            lab = t.pred.label
            if not isinstance(lab, RootMark) and lab not in labels:
                rep.violations.append(f"{where}: unknown label {canonical(lab)}")
        instr = t.instr
        if isinstance(instr, (Push, Up)):
            if instr.n < 1:
                rep.violations.append(f"{where}: child index must be positive")
        if isinstance(instr, (Push, Set)):
            lab = instr.label
            if isinstance(lab, RootMark):
                rep.violations.append(f"{where}: @ may not be written")
            elif lab not in labels:
                rep.violations.append(f"{where}: unknown label {canonical(lab)}")
        if isinstance(instr, Push):
            pushes.add(instr.n)
        elif isinstance(instr, Up):
            ups.add(instr.n)
    for n in sorted(ups - pushes):
        if n >= 1:
            rep.warnings.append(f"up {n} has no matching push and can never fire")
    return rep


def degree(aut: Automaton) -> int:
    """Number of distinct push indices."""
    return len(aut.source.push_indices())


# -- normalization -------------------------------------------------------------


def _swap_index(instr, a: int, b: int):
    if isinstance(instr, (Push, Up)) and instr.n in (a, b):
        return replace(instr, n=b if instr.n == a else a)
    return instr


def normalize_degree(aut: Automaton) -> Automaton:
    """Renumber children so that push indices are exactly 1..degree.

    Indices are exchanged pairwise (j with j-1), which renames children
    consistently and so leaves the language and visit counts unchanged.
    """
    transitions = list(aut.transitions)
    while True:
        pushes = {t.instr.n for t in transitions if isinstance(t.instr, Push)}
        gap = next((j for j in sorted(pushes) if j >= 2 and j - 1 not in pushes), None)
        if gap is None:
            break
        transitions = [replace(t, instr=_swap_index(t.instr, gap, gap - 1)) for t in transitions]
    return with_transitions(aut, transitions)


def fresh_state(taken, base: str) -> str:
    name = f"${base}"
    n = 0
    while name in taken:
        n += 1
        name = f"${base}{n}"
    return name


def normalize_root_accept(aut: Automaton) -> Automaton:
    """Equivalent automaton whose single final state is entered at the root."""
    taken = set(aut.states)
    ret = fresh_state(taken, "r")
    taken.add(ret)
    acc = fresh_state(taken, "acc")
    extra = []
    for f in sorted(aut.finals, key=str):
        extra.append(Transition(f, None, TRUE, DOWN, ret))
        extra.append(Transition(f, None, Eq(ROOT), ID, acc))
    extra.append(Transition(ret, None, TRUE, DOWN, ret))
    extra.append(Transition(ret, None, Eq(ROOT), ID, acc))
    return with_transitions(
        aut,
        list(aut.transitions) + extra,
        states=aut.states + (ret, acc),
        finals=frozenset({acc}),
    )
