import pytest

from treestack.errors import InputError, ParseError
from treestack.oracle import (
    ALL,
    LanguageSlice,
    Permutation,
    all_permutations,
    cn_slice,
    compare_slices,
    cyclic_shift_slice,
    fixture,
    parse_slice,
    parse_word,
    render_slice,
    render_word,
    splits,
)


def words(*texts):
    return frozenset(tuple(t) for t in texts)


def test_anbn_fixture():
    assert fixture("anbn", 6).words == words("ab", "aabb", "aaabbb")


def test_anbmcndm_fixture_size():
    s = fixture("anbmcndm", 12)
    assert len(s.words) == 15
    assert ("a", "b", "b", "c", "d", "d") in s.words


def test_singleton_fixture():
    assert fixture("singleton(abc)", 3).words == words("abc")
    assert fixture("singleton(abc)", 2).words == frozenset()
    assert fixture("singleton(x y)", 2).words == {("x", "y")}


def test_unknown_fixture():
    with pytest.raises(InputError):
        fixture("nope", 3)


def test_splits_count():
    # n-1 cut points among len+1 positions, with repetition
    assert len(list(splits(tuple("abc"), 2))) == 4
    assert list(splits((), 3)) == [((), (), ())]


def test_n1_is_identity():
    s = fixture("anbn", 6)
    assert cn_slice(s, 1).words == s.words


def test_c2_of_ab_is_cyclic_shift():
    s = LanguageSlice(words("ab"), 2)
    assert cn_slice(s, 2).words == words("ab", "ba")
    assert cn_slice(s, 2).words == cyclic_shift_slice(s).words


def test_c3_of_abc():
    s = fixture("singleton(abc)", 3)
    assert cn_slice(s, 3).words == words("abc", "acb", "bac", "bca", "cab", "cba")


def test_c2_of_anbn_swap_has_twelve_words():
    s = fixture("anbn", 6)
    out = cn_slice(s, 2, Permutation((2, 1)))
    assert len(out.words) == 12
    assert ("b", "a") in out.words


def test_c2_equals_cyclic_shift_on_anbn():
    s = fixture("anbn", 8)
    assert cn_slice(s, 2).words == cyclic_shift_slice(s).words


def test_empty_word_closure():
    s = LanguageSlice(frozenset({()}), 0)
    assert cn_slice(s, 3).words == {()}


def test_permutation_validation():
    with pytest.raises(InputError):
        Permutation((1, 1))
    assert Permutation.parse("2 1").images == (2, 1)
    assert Permutation.parse("2,1") == Permutation((2, 1))
    assert len(all_permutations(3)) == 6
    with pytest.raises(InputError):
        cn_slice(fixture("anbn", 2), 3, Permutation((2, 1)))


def test_slice_rejects_overlong_word():
    with pytest.raises(InputError):
        LanguageSlice(words("abc"), 2)


def test_compare_slices():
    left = LanguageSlice(words("ab", "ba"), 2)
    right = LanguageSlice(words("ab"), 2, complete=False)
    diff = compare_slices(left, right)
    assert not diff.equal
    assert diff.only_left == [("b", "a")]
    assert any("incomplete" in c for c in diff.caveats)
    with pytest.raises(InputError):
        compare_slices(left, LanguageSlice(frozenset(), 3))


def test_word_rendering():
    assert render_word(()) == "-"
    assert parse_word("-") == ()
    assert parse_word("#1 a #2") == ("#1", "a", "#2")


def test_slice_roundtrip():
    s = cn_slice(fixture("anbn", 4), 2, ALL)
    back = parse_slice(render_slice(s))
    assert back == s


def test_slice_header_required():
    with pytest.raises(ParseError):
        parse_slice("a b\n")


@pytest.mark.parametrize("name", ["anbn", "anbmcndm", "abc-star", "singleton(abc)"])
def test_fixture_automata_match_generators(name):
    from treestack.fixtures import fixture_automaton
    from treestack.runner import enumerate_slice

    aut = fixture_automaton(name)
    for bound in range(0, 11):
        res = enumerate_slice(aut, bound, aut.meta.claimed_k)
        assert res.complete
        assert res.words == fixture(name, bound).words, bound


def test_closure_preserves_lengths_and_grows():
    s = fixture("anbmcndm", 8)
    once = cn_slice(s, 3)
    assert {len(w) for w in once.words} <= {len(w) for w in s.words}
    assert cn_slice(once, 3).words >= once.words
    assert once.words >= s.words
