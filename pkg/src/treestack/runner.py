"""Budgeted breadth-first execution of tree-stack automata."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    Automaton,
    Down,
    LabeledTree,
    Push,
    TreeStack,
    Up,
    moves,
    render_address,
    step,
    visited_address,
)
from .errors import ContractError, InputError
from .labels import ROOT, canonical


@dataclass(frozen=True)
class Budget:
    max_steps: int = 10_000
    max_nodes: int = 200
    max_configs: int = 1_000_000

    def __post_init__(self):
        if min(self.max_steps, self.max_nodes, self.max_configs) < 1:
            raise InputError("budget caps must be positive")


@dataclass(frozen=True)
class Configuration:
    state: object
    ts: TreeStack
    visits: tuple = ()
    consumed: tuple = ()

    @classmethod
    def initial(cls, aut: Automaton) -> "Configuration":
        return cls(aut.initial, TreeStack.initial(), (), ())

    def visit_map(self) -> dict:
        return dict(self.visits)


@dataclass(frozen=True)
class RunTrace:
    transitions: tuple
    configurations: tuple

    def __len__(self) -> int:
        return len(self.transitions)

    @property
    def word(self) -> tuple:
        return tuple(t.input for t in self.transitions if t.input is not None)

    @property
    def last(self) -> Configuration:
        return self.configurations[-1]


@dataclass(frozen=True)
class Accepted:
    trace: RunTrace


@dataclass(frozen=True)
class Rejected:
    pass


@dataclass(frozen=True)
class BudgetExhausted:
    reason: str


def _bump(visits: tuple, addr) -> tuple:
    counts = dict(visits)
    counts[addr] = counts.get(addr, 0) + 1
    return tuple(sorted(counts.items()))


class _Search:
    """Shared breadth-first engine for membership and enumeration."""

    def __init__(self, aut: Automaton, k: int, budget: Budget):
        if k < 1:
            raise InputError("k must be positive")
        self.aut = aut
        self.k = k
        self.budget = budget
        self.parents: dict = {}
        self.capped: Optional[str] = None

    def _cap(self, reason: str):
        if self.capped is None:
            self.capped = reason

    def successors(self, cfg: Configuration, allow):
        """Yield new configurations; ``allow(letter, consumed)`` filters reads."""
        for t, ts2 in moves(self.aut, cfg.state, cfg.ts):
            if t.input is not None and not allow(t.input, cfg.consumed):
                continue
            if len(ts2.tree) > self.budget.max_nodes:
                self._cap("max_nodes")
                continue
            visits = cfg.visits
            addr = visited_address(cfg.ts.cursor, t.instr)
            if addr is not None:
                visits = _bump(visits, addr)
                if dict(visits)[addr] > self.k:
                    continue
            consumed = cfg.consumed if t.input is None else cfg.consumed + (t.input,)
            nxt = Configuration(t.dst, ts2, visits, consumed)
            if nxt in self.parents:
                continue
            if len(self.parents) >= self.budget.max_configs:
                self._cap("max_configs")
                return
            self.parents[nxt] = (cfg, t)
            yield nxt

    def run(self, allow, on_config, start: Optional[Configuration] = None):
        """Breadth-first sweep; ``on_config`` returning True stops the search."""
        if start is None:
            start = Configuration.initial(self.aut)
        self.parents[start] = (None, None)
        frontier = [start]
        depth = 0
        while frontier:
            nxt_frontier = []
            for cfg in frontier:
                if on_config(cfg):
                    return cfg
                if depth >= self.budget.max_steps:
                    if any(True for _ in moves(self.aut, cfg.state, cfg.ts)):
                        self._cap("max_steps")
                    continue
                nxt_frontier.extend(self.successors(cfg, allow))
                if self.capped == "max_configs":
                    return None
            frontier = nxt_frontier
            depth += 1
        return None

    def trace_to(self, cfg: Configuration) -> RunTrace:
        transitions, configs = [], []
        cur = cfg
        while cur is not None:
            parent, t = self.parents[cur]
            configs.append(cur)
            if t is not None:
                transitions.append(t)
            cur = parent
        return RunTrace(tuple(reversed(transitions)), tuple(reversed(configs)))


def _check_word(aut: Automaton, word: Sequence[str]):
    alphabet = set(aut.terminals)
    for x in word:
        if x not in alphabet:
            raise InputError(f"letter {x!r} is not in the input alphabet")


def accepts(
    aut: Automaton,
    word: Sequence[str],
    k: int,
    budget: Budget = Budget(),
    start: Optional[Configuration] = None,
):
    """Search for a k-restricted accepting run reading exactly ``word``.

    ``start`` resumes the search from a given configuration instead of the
    initial one; its ``consumed`` field must be a prefix of ``word``.
    """
    word = tuple(word)
    _check_word(aut, word)
    if start is not None and word[: len(start.consumed)] != start.consumed:
        raise InputError("start configuration has consumed a different prefix")
    search = _Search(aut, k, budget)
    finals = aut.finals
    n = len(word)

    def allow(x, consumed):
        return len(consumed) < n and word[len(consumed)] == x

    def hit(cfg):
        return cfg.state in finals and len(cfg.consumed) == n

    found = search.run(allow, hit, start)
    if found is not None:
        return Accepted(search.trace_to(found))
    if search.capped:
        return BudgetExhausted(search.capped)
    return Rejected()


@dataclass(frozen=True)
class SliceResult:
    words: frozenset
    complete: bool
    witnesses: dict

    def __iter__(self):
        return iter((self.words, self.complete))


def enumerate_slice(aut: Automaton, max_len: int, k: int, budget: Budget = Budget()) -> SliceResult:
    """All words of length at most ``max_len`` with a k-restricted accepting run.

    ``complete`` is False when some budget cap cut the search short.  The
    shortest witness trace per word is kept in ``witnesses``.
    """
    if max_len < 0:
        raise InputError("max_len must be non-negative")
    search = _Search(aut, k, budget)
    finals = aut.finals
    found: dict = {}

    def allow(x, consumed):
        return len(consumed) < max_len

    def hit(cfg):
        if cfg.state in finals and cfg.consumed not in found:
            found[cfg.consumed] = cfg
        return False

    search.run(allow, hit)
    witnesses = {w: search.trace_to(cfg) for w, cfg in found.items()}
    return SliceResult(frozenset(found), search.capped is None, witnesses)


# -- trace analysis ----------------------------------------------------------


def visit_counts(trace: RunTrace) -> dict:
    counts: dict = {}
    for cfg, t in zip(trace.configurations, trace.transitions):
        addr = visited_address(cfg.ts.cursor, t.instr)
        if addr is not None:
            counts[addr] = counts.get(addr, 0) + 1
    return counts


def restriction_degree(trace: RunTrace) -> int:
    return max(visit_counts(trace).values(), default=0)


def final_tree(trace: RunTrace) -> LabeledTree:
    last = trace.last
    if last.ts.cursor != ():
        raise ContractError("run does not end with the cursor at the root")
    return last.ts.tree


def replay(aut: Automaton, transitions: Sequence) -> RunTrace:
    """Re-execute ``transitions`` from the initial configuration."""
    cfg = Configuration.initial(aut)
    configs = [cfg]
    for t in transitions:
        out = step(aut, cfg.state, cfg.ts, t, t.input)
        if out is None:
            raise ContractError(f"transition {t.render()} is not applicable")
        state, ts = out
        visits = cfg.visits
        addr = visited_address(cfg.ts.cursor, t.instr)
        if addr is not None:
            visits = _bump(visits, addr)
        consumed = cfg.consumed if t.input is None else cfg.consumed + (t.input,)
        cfg = Configuration(state, ts, visits, consumed)
        configs.append(cfg)
    return RunTrace(tuple(transitions), tuple(configs))


def _domain(tree) -> frozenset:
    if isinstance(tree, LabeledTree):
        return frozenset(tree.addresses())
    return frozenset(tuple(a) for a in tree)


def check_add_root(t0, t1) -> bool:
    """True iff ``t1`` is ``t0`` grafted onto a fresh root with one child."""
    d0, d1 = _domain(t0), _domain(t1)
    if () not in d1 or (1,) not in d1:
        return False
    if any(a and a[0] != 1 for a in d1):
        return False
    return {a[1:] for a in d1 if a} == set(d0)


def render_trace(trace: RunTrace) -> str:
    lines = []
    for idx, (t, cfg) in enumerate(zip(trace.transitions, trace.configurations[1:]), 1):
        ts = cfg.ts
        lines.append(
            "\t".join((str(idx), t.render(), render_address(ts.cursor), canonical(ts.label)))
        )
    return "\n".join(lines)
