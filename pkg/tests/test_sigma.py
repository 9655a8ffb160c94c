import pytest

from treestack.constructions import (
    ACCEPT,
    START,
    PipelineMeta,
    build_A_sigma,
    history_settled,
    phase_two_glue,
)
from treestack.core import Push, TreeStack, moves, with_transitions
from treestack.errors import ContractError
from treestack.labels import DASH, ROOT, Box, Composite, Plain, Special
from treestack.oracle import Permutation
from treestack.runner import (
    Accepted,
    Budget,
    Configuration,
    Rejected,
    accepts,
    check_add_root,
    final_tree,
    replay,
    restriction_degree,
)

STAR = Plain("*")


def meta(n, sigma, k=1, d=1):
    return PipelineMeta(n, k, d, Permutation(sigma))


def test_glue():
    glue = phase_two_glue(meta(2, (2, 1)))
    assert [(t.src, t.dst) for t in glue] == [(("beth", 2), ("aleph", 1))]
    assert phase_two_glue(meta(1, (1,))) == []
    three = phase_two_glue(meta(3, (1, 2, 3)))
    assert [(t.src, t.dst) for t in three] == [
        (("beth", 1), ("aleph", 2)),
        (("beth", 2), ("aleph", 3)),
    ]


def test_meta_checks():
    with pytest.raises(ContractError):
        meta(2, (1,))
    with pytest.raises(ContractError):
        PipelineMeta(0, 1, 1, Permutation(()))


def test_build_checks_degree(anbn_stages):
    with pytest.raises(ContractError):
        build_A_sigma(anbn_stages.wrapped, anbn_stages.marked, meta(2, (1, 2), d=3))


def test_first_move_pushes_root_copy(anbn_sigma_runs):
    aut, _ = anbn_sigma_runs[(2, 1)]
    first = moves(aut, START, TreeStack.initial())
    assert len(first) == 1
    t, ts = first[0]
    assert t.input is None and isinstance(t.instr, Push) and t.instr.n == 1
    assert ts.cursor == (1,)


def test_after_start_in_binary_state(anbn_sigma_runs):
    _, res = anbn_sigma_runs[(1, 2)]
    trace = next(iter(res.witnesses.values()))
    states = [c.state for c in trace.configurations]
    first_bin = next(s for s in states if s[0] == "bin")
    assert first_bin == ("bin", (1, 0, 1))


@pytest.mark.parametrize(
    "hist, ok",
    [
        (((2, ROOT), (0, ROOT)), True),
        (((2, ROOT), (2, ROOT)), True),
        (((1, ROOT), (2, ROOT)), False),
        (((2, STAR), (1, STAR)), False),
        ((None, (2, STAR)), True),
        ((None, (0, STAR)), False),
        (((2, STAR), (0, DASH)), False),
        (((2, STAR), (0, STAR)), True),
    ],
)
def test_history_settled(hist, ok):
    assert history_settled(Composite(hist, ("south", "south", "south"), STAR)) is ok


# -- runs of the permuted automaton with hashes kept ---------------------------


def blocks_of(word):
    """Split a permuted hashed word into its blocks, keyed by opening hash."""
    blocks, cur = {}, None
    for x in word:
        if x.startswith("#"):
            if cur is None:
                cur = int(x[1:])
                blocks[cur] = ()
            else:
                cur = None
        else:
            blocks[cur] += (x,)
    return blocks


def unpermuted(word, n=2):
    blocks = blocks_of(word)
    out = ("#1",)
    for j in range(1, n + 1):
        out += blocks[j] + (f"#{j + 1}",)
    return out


def markers_only(marked, used):
    keep = [
        t for t in marked.transitions
        if not (isinstance(t.instr, Push) and isinstance(t.instr.label, Special)
                and t.instr.label not in used)
    ]
    return with_transitions(marked, keep)


def specials(tree, drop_first=False):
    return {
        (a[1:] if drop_first else a): lab
        for a, lab in tree.items()
        if isinstance(lab, Special)
    }


@pytest.mark.parametrize("sigma", [(1, 2), (2, 1)])
def test_word_shape(anbn_sigma_runs, sigma):
    _, res = anbn_sigma_runs[sigma]
    assert res.words
    for word in res.words:
        hashes = [x for x in word if x.startswith("#")]
        expected = []
        for j in sigma:
            expected += [f"#{j}", f"#{j + 1}"]
        assert hashes == expected


@pytest.mark.parametrize("sigma", [(1, 2), (2, 1)])
def test_matched_runs_add_root_and_markers(anbn_sigma_runs, anbn_stages, sigma):
    _, res = anbn_sigma_runs[sigma]
    for word, trace in res.witnesses.items():
        t1 = final_tree(trace)
        sp1 = specials(t1, drop_first=True)
        matched = markers_only(anbn_stages.marked, set(sp1.values()))
        verdict = accepts(matched, unpermuted(word), anbn_stages.k)
        assert isinstance(verdict, Accepted), word
        t0 = final_tree(verdict.trace)
        assert check_add_root(t0, t1), word
        assert specials(t0) == sp1, word


@pytest.mark.parametrize("sigma", [(1, 2), (2, 1)])
def test_guessing_ends_before_reading(anbn_sigma_runs, sigma):
    _, res = anbn_sigma_runs[sigma]
    for trace in res.witnesses.values():
        states = [c.state for c in trace.configurations]
        start = states.index(("aleph", sigma[0]))
        later = trace.transitions[start:]
        assert not any(isinstance(t.instr, Push) for t in later)
        assert all(t.input is None for t in trace.transitions[:start])


@pytest.mark.parametrize("sigma", [(1, 2), (2, 1)])
def test_checked_vertices_are_boxed(anbn_sigma_runs, sigma):
    _, res = anbn_sigma_runs[sigma]
    for trace in res.witnesses.values():
        for addr, lab in final_tree(trace).items():
            if len(addr) >= 1 and not isinstance(lab, Special):
                assert lab == Box(), (addr, lab)


@pytest.mark.parametrize("sigma", [(1, 2), (2, 1)])
def test_traces_replay_and_respect_bound(anbn_sigma_runs, sigma):
    aut, res = anbn_sigma_runs[sigma]
    for trace in res.witnesses.values():
        assert restriction_degree(trace) <= aut.meta.claimed_k
        assert replay(aut, trace.transitions).configurations == trace.configurations
        assert trace.last.state == ACCEPT and trace.last.ts.cursor == ()


# -- negative control ------------------------------------------------------------


def checking_configuration(aut, word):
    trace = accepts(aut, word, 6, Budget(max_nodes=9)).trace
    idx = next(i for i, c in enumerate(trace.configurations) if c.state == ("p3", "enter"))
    return trace.configurations[idx]


def inject_open_column(cfg):
    """Rewrite one guessed vertex so a block appears never to have left it."""
    tree = cfg.ts.tree
    for addr, lab in tree.items():
        if isinstance(lab, Composite) and len(addr) >= 2:
            for i, col in enumerate(lab.history, 1):
                if col is not None:
                    bad = lab.with_column(i, (1, col[1]))
                    ts = TreeStack(tree.with_label(addr, bad), cfg.ts.cursor)
                    return Configuration(cfg.state, ts, cfg.visits, cfg.consumed), addr
    raise AssertionError("no guessed vertex to corrupt")


def test_open_column_blocks_the_check(anbn_sigma_runs):
    aut, _ = anbn_sigma_runs[(2, 1)]
    label = Composite(((1, STAR), (2, STAR)), ("south",) * 3, STAR)
    # no transition leaves the check state at such a vertex
    assert aut.source.candidates(("p3", "enter"), label) == []
    settled = label.with_column(1, (2, STAR))
    assert aut.source.candidates(("p3", "enter"), settled)


def test_open_column_makes_run_reject(anbn_sigma_runs):
    aut, _ = anbn_sigma_runs[(2, 1)]
    word = ("#2", "b", "#3", "#1", "a", "#2")
    cfg = checking_configuration(aut, word)
    assert isinstance(accepts(aut, word, 6, start=cfg), Accepted)
    bad, _ = inject_open_column(cfg)
    assert isinstance(accepts(aut, word, 6, start=bad), Rejected)


def test_two_counter_language_membership():
    from treestack.constructions import prepare, sigma_automaton
    from treestack.fixtures import fixture_automaton

    base = fixture_automaton("anbmcndm")
    stages = prepare(base, 2)
    budget = Budget(max_nodes=9)
    cases = [
        ((1, 2), "#1 a b c d #2 #2 #3", True),
        ((2, 1), "#2 c d #3 #1 a b #2", True),
        ((2, 1), "#2 d c #3 #1 a b #2", False),
    ]
    for sigma, word, member in cases:
        aut = sigma_automaton(base, 2, Permutation(sigma), stages=stages)
        verdict = accepts(aut, word.split(), aut.meta.claimed_k, budget)
        # guessing is unbounded, so a non-member ends in a budget verdict
        assert isinstance(verdict, Accepted) is member, (sigma, word)
