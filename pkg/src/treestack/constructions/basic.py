"""Closure building blocks: hash insertion, products, end markers, unions."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from ..core import (
    DOWN,
    ID,
    TRUE,
    Automaton,
    Eq,
    ExplicitSource,
    MappedSource,
    Meta,
    Push,
    Set,
    Transition,
    UnionSource,
    Up,
    degree,
    explicit_automaton,
    fresh_state,
    normalize_root_accept,
)
from ..errors import ContractError, InputError
from ..fileformat import hash_letter
from ..labels import ROOT, Special, canonical

_HASH = re.compile(r"^#(\d|\{\d+\})$")


def is_hash_letter(x: Optional[str]) -> bool:
    return x is not None and bool(_HASH.match(x))


def hash_index(x: str) -> int:
    body = x[1:]
    return int(body.strip("{}"))


def hash_letters(n: int) -> list:
    """The end-marker letters #1 .. #(n+1)."""
    return [hash_letter(i) for i in range(1, n + 2)]


def lift_inverse_erasing(aut: Automaton, letters: Iterable[str]) -> Automaton:
    """Allow any number of the given letters anywhere in the input."""
    letters = list(dict.fromkeys(letters))
    clash = set(letters) & set(aut.terminals)
    if clash:
        raise InputError(f"letters already in the alphabet: {sorted(clash)}")
    if not letters:
        return aut
    loops = [Transition(q, x, TRUE, ID, q) for q in aut.states for x in letters]
    return explicit_automaton(
        aut.states, aut.terminals + tuple(letters), aut.labels, aut.initial,
        aut.finals, list(aut.transitions) + loops, aut.meta,
    )


@dataclass(frozen=True)
class FiniteAcceptor:
    states: tuple
    alphabet: tuple
    initial: str
    finals: frozenset
    delta: dict

    def accepts(self, word: Sequence[str]) -> bool:
        q = self.initial
        for x in word:
            q = self.delta.get((q, x))
            if q is None:
                return False
        return q in self.finals


def hash_order_dfa(n: int, sigma: Iterable[str]) -> FiniteAcceptor:
    """Words over sigma with #2 .. #n each once, in increasing order."""
    if n < 1:
        raise InputError("N must be positive")
    sigma = tuple(sigma)
    states = tuple(f"p{j}" for j in range(1, n + 1))
    delta = {}
    for j, p in enumerate(states, 1):
        for x in sigma:
            delta[(p, x)] = p
        if j < n:
            delta[(p, hash_letter(j + 1))] = states[j]
    alphabet = sigma + tuple(hash_letter(j) for j in range(2, n + 1))
    return FiniteAcceptor(states, alphabet, states[0], frozenset({states[-1]}), delta)


def trim(aut: Automaton) -> Automaton:
    """Drop states that lie on no control path from the initial to a final state."""
    succ, pred = {}, {}
    for t in aut.transitions:
        succ.setdefault(t.src, set()).add(t.dst)
        pred.setdefault(t.dst, set()).add(t.src)

    def reach(starts, edges):
        seen = set(starts)
        todo = deque(starts)
        while todo:
            q = todo.popleft()
            for r in edges.get(q, ()):
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        return seen

    live = reach([aut.initial], succ) & reach(list(aut.finals), pred)
    live.add(aut.initial)
    return explicit_automaton(
        [q for q in aut.states if q in live], aut.terminals, aut.labels, aut.initial,
        [q for q in aut.finals if q in live],
        [t for t in aut.transitions if t.src in live and t.dst in live],
        aut.meta,
    )


def _pair(q, p) -> str:
    return f"($x {q} {p})"


def product_with_dfa(aut: Automaton, dfa: FiniteAcceptor) -> Automaton:
    """Intersect with a finite acceptor; unreachable pairs are dropped."""
    by_src = {}
    for t in aut.transitions:
        by_src.setdefault(t.src, []).append(t)
    start = (aut.initial, dfa.initial)
    seen = {start}
    order = [start]
    todo = deque([start])
    transitions = []
    while todo:
        q, p = todo.popleft()
        for t in by_src.get(q, ()):
            if t.input is None:
                p2 = p
            else:
                p2 = dfa.delta.get((p, t.input))
                if p2 is None:
                    continue
            nxt = (t.dst, p2)
            transitions.append(Transition(_pair(q, p), t.input, t.pred, t.instr, _pair(*nxt)))
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                todo.append(nxt)
    finals = [_pair(q, p) for q, p in order if q in aut.finals and p in dfa.finals]
    terminals = [x for x in aut.terminals if x in set(dfa.alphabet)]
    return trim(explicit_automaton(
        [_pair(q, p) for q, p in order], terminals, aut.labels, _pair(*start),
        finals, transitions, aut.meta,
    ))


def wrap_endmarkers(aut: Automaton, n: int) -> Automaton:
    """Accept #1 u #(n+1) for every u accepted by ``aut``.

    The automaton is first made root-accepting so that the closing marker
    is read with the cursor at the root.  The result records its degree.
    """
    inner = normalize_root_accept(aut)
    taken = set(inner.states)
    q0 = fresh_state(taken, "q0")
    taken.add(q0)
    qf = fresh_state(taken, "qf")
    first, last = hash_letter(1), hash_letter(n + 1)
    clash = {first, last} & set(inner.terminals)
    if clash:
        raise InputError(f"end markers already in the alphabet: {sorted(clash)}")
    extra = [Transition(q0, first, Eq(ROOT), ID, inner.initial)]
    extra += [Transition(f, last, Eq(ROOT), ID, qf) for f in sorted(inner.finals, key=str)]
    out = explicit_automaton(
        (q0,) + inner.states + (qf,),
        (first,) + inner.terminals + (last,),
        inner.labels, q0, [qf], extra + list(inner.transitions),
        replace(inner.meta, declared_degree=degree(inner)),
    )
    return out


MARKER_NOTES = (
    "up moves to never-pushed children are dropped",
    "marker labels range only over labels the cursor can carry at that point",
)


def _gadget(tag: str, sp: Special) -> str:
    return f"(${tag} {sp.index} {sp.src} {sp.dst} {canonical(sp.label)})"


def _gadget_labels(t: Transition, labels: Sequence) -> list:
    """Labels the cursor can carry right after ``t``'s instruction fires."""
    instr = t.instr
    if isinstance(instr, (Set, Push)):
        return [instr.label]
    if isinstance(instr, Up):
        return list(labels)
    if instr == ID and isinstance(t.pred, Eq):
        return [t.pred.label]
    return [ROOT] + list(labels)


def specialize_hashes(aut: Automaton, n: int) -> Automaton:
    """Make every hash read leave a marked vertex behind.

    Reading #i from state q into q2 becomes: the original predicate and
    instruction into a gadget state, a push of the marker at child D+i,
    then reading #i while moving back down into q2.  D is the recorded
    degree of ``aut``; up moves to children that are never pushed are
    dropped so they cannot reach a marker.
    """
    d = aut.meta.declared_degree
    if d is None:
        raise ContractError("automaton lacks a recorded degree")
    pushes = aut.source.push_indices()
    if pushes and max(pushes) != d:
        raise ContractError(f"recorded degree {d} does not match push indices {sorted(pushes)}")
    hashes = {hash_letter(i): i for i in range(1, n + 2)}
    labels = list(aut.labels)
    out, gadget_states, specials = [], [], []
    for t in aut.transitions:
        if isinstance(t.instr, Up) and t.instr.n not in pushes:
            continue
        i = hashes.get(t.input)
        if i is None:
            out.append(t)
            continue
        for c in _gadget_labels(t, labels):
            sp = Special(i, str(t.src), str(t.dst), c)
            g1, g2 = _gadget("g1", sp), _gadget("g2", sp)
            out.append(Transition(t.src, None, t.pred, t.instr, g1))
            out.append(Transition(g1, None, Eq(c), Push(d + i, sp), g2))
            out.append(Transition(g2, t.input, Eq(sp), DOWN, t.dst))
            if sp not in specials:
                specials.append(sp)
                gadget_states += [g1, g2]
    return explicit_automaton(
        aut.states + tuple(gadget_states), aut.terminals, labels + specials,
        aut.initial, aut.finals, out,
        replace(aut.meta, declared_degree=d + n + 1, notes=aut.meta.notes + MARKER_NOTES),
    )


def erase_hashes(aut: Automaton) -> Automaton:
    """Read every hash letter as the empty word."""

    def rename(x):
        return None if is_hash_letter(x) else x

    terminals = tuple(x for x in aut.terminals if not is_hash_letter(x))
    if aut.explicit:
        ts = [replace(t, input=rename(t.input)) for t in aut.transitions]
        return replace(aut, terminals=terminals, source=ExplicitSource(ts))
    return replace(aut, terminals=terminals, source=MappedSource(aut.source, rename))


def union_automata(parts: Sequence[Automaton]) -> Automaton:
    """Nondeterministic choice between the given automata."""
    parts = list(parts)
    if not parts:
        raise InputError("union of no automata")
    terminals = []
    for a in parts:
        terminals.extend(a.terminals)
    ks = [a.meta.claimed_k for a in parts if a.meta.claimed_k is not None]
    meta = Meta(
        claimed_k=max(ks) if ks else None,
        declared_degree=max(len(a.source.push_indices()) for a in parts),
        notes=tuple(dict.fromkeys(n for a in parts for n in a.meta.notes)),
    )
    if all(a.explicit for a in parts):
        start = "$start"
        states, labels, finals = [start], [], []
        transitions = []
        for idx, a in enumerate(parts):
            name = lambda q, idx=idx: f"($u {idx} {q})"
            states += [name(q) for q in a.states]
            labels += list(a.labels)
            finals += [name(q) for q in a.finals]
            transitions.append(Transition(start, None, TRUE, ID, name(a.initial)))
            transitions += [
                Transition(name(t.src), t.input, t.pred, t.instr, name(t.dst)) for t in a.transitions
            ]
        return explicit_automaton(states, terminals, labels, start, finals, transitions, meta)
    start = "$start"
    finals = frozenset((idx, f) for idx, a in enumerate(parts) for f in a.finals)
    source = UnionSource([a.source for a in parts], start, [a.initial for a in parts])
    return Automaton(tuple(dict.fromkeys(terminals)), start, finals, source, meta=meta)
