import pytest

from treestack.core import DOWN, TRUE, Eq, Push, Transition, Up, explicit_automaton
from treestack.errors import ContractError, InputError
from treestack.labels import ROOT, Plain
from treestack.oracle import fixture
from treestack.runner import (
    Accepted,
    Budget,
    BudgetExhausted,
    Configuration,
    Rejected,
    accepts,
    check_add_root,
    enumerate_slice,
    final_tree,
    render_trace,
    replay,
    restriction_degree,
    visit_counts,
)

STAR = Plain("*")


def test_example_accepts_aabccd(example):
    verdict = accepts(example, tuple("aabccd"), 2)
    assert isinstance(verdict, Accepted)
    assert verdict.trace.word == tuple("aabccd")
    assert verdict.trace.last.state == "q9"


@pytest.mark.parametrize("word", ["abdc", "aabcd", "", "ab"])
def test_example_rejects(example, word):
    assert isinstance(accepts(example, tuple(word), 2), Rejected)


def test_unknown_letter(example):
    with pytest.raises(InputError):
        accepts(example, ("z",), 2)


def test_k_must_be_positive(example):
    with pytest.raises(InputError):
        accepts(example, ("a",), 0)


def test_restriction_prunes(example):
    # the example needs two visits on the path to the b-branch
    assert isinstance(accepts(example, tuple("abcd"), 1), Rejected)


def test_anbn_slice(anbn):
    res = enumerate_slice(anbn, 8, 1)
    assert res.complete
    assert res.words == fixture("anbn", 8).words


def test_budget_exhausted():
    loop = explicit_automaton(
        ["s", "f"], ["a"], [STAR], "s", ["f"],
        [Transition("s", None, TRUE, Push(1, STAR), "t"), Transition("t", None, TRUE, Up(1), "s")]
        + [Transition("s", None, TRUE, Push(1, STAR), "s")],
    )
    verdict = accepts(loop, ("a",), 3, Budget(max_nodes=5))
    assert isinstance(verdict, BudgetExhausted)
    assert verdict.reason == "max_nodes"
    assert not enumerate_slice(loop, 1, 3, Budget(max_nodes=5)).complete


def test_budget_caps_positive():
    with pytest.raises(InputError):
        Budget(max_steps=0)


def test_replay_matches_search(example):
    for word, trace in enumerate_slice(example, 8, 2).witnesses.items():
        again = replay(example, trace.transitions)
        assert again.configurations == trace.configurations
        assert again.word == word
        assert restriction_degree(again) <= 2


def test_replay_rejects_inapplicable(example):
    t = Transition("q0", "b", TRUE, DOWN, "q1")
    with pytest.raises(ContractError):
        replay(example, [t])


def test_visit_counts_and_final_tree(anbn):
    trace = accepts(anbn, tuple("aabb"), 1).trace
    assert visit_counts(trace) == {(1,): 1, (1, 1): 1}
    tree = final_tree(trace)
    assert tree.addresses() == [(), (1,), (1, 1)]


def test_final_tree_requires_root_cursor():
    aut = explicit_automaton(
        ["s", "f"], ["a"], [STAR], "s", ["f"], [Transition("s", "a", Eq(ROOT), Push(1, STAR), "f")]
    )
    trace = accepts(aut, ("a",), 1).trace
    with pytest.raises(ContractError):
        final_tree(trace)


def test_start_configuration(anbn):
    trace = accepts(anbn, tuple("ab"), 1).trace
    mid = trace.configurations[2]
    assert isinstance(accepts(anbn, tuple("ab"), 1, start=mid), Accepted)
    with pytest.raises(InputError):
        accepts(anbn, tuple("bb"), 1, start=mid)


def test_check_add_root():
    t0 = [(), (1,), (2,), (1, 1)]
    t1 = [(), (1,), (1, 1), (1, 2), (1, 1, 1)]
    assert check_add_root(t0, t1)
    assert not check_add_root(t0, t1 + [(2,)])
    assert not check_add_root(t0, t1[:-1])


def test_render_trace(anbn):
    text = render_trace(accepts(anbn, tuple("ab"), 1).trace)
    first = text.splitlines()[0].split("\t")
    assert first == ["1", "q0,a,eq @,push 1 *,q1", "1", "*"]


def test_larger_budget_keeps_verdict(example):
    word = tuple("aabbccdd")
    small = accepts(example, word, 2, Budget(max_steps=40))
    large = accepts(example, word, 2, Budget(max_steps=400, max_nodes=400))
    assert isinstance(small, Accepted) and isinstance(large, Accepted)
    assert isinstance(accepts(example, tuple("abdc"), 2, Budget(max_steps=400)), Rejected)
    assert isinstance(accepts(example, tuple("abdc"), 2), Rejected)


def test_visits_grow_along_a_trace(example):
    trace = accepts(example, tuple("aabccd"), 2).trace
    prev: dict = {}
    for cfg in trace.configurations:
        cur = cfg.visit_map()
        assert all(cur.get(a, 0) >= n for a, n in prev.items())
        assert () not in cur
        assert set(cur) <= set(cfg.ts.tree.addresses())
        prev = cur


def test_max_len_zero(example):
    assert enumerate_slice(example, 0, 2).words == frozenset()
    eps = explicit_automaton(["s"], ["a"], [], "s", ["s"], [])
    assert enumerate_slice(eps, 0, 1).words == {()}
