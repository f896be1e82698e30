import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from addcube import core_word as cw
from addcube import oracle as oc


@pytest.mark.parametrize("word, k, want", [
    ("000", 3, (0, 1)),
    ("00", 2, (0, 1)),
    ("0314", 3, None),
    ("1203", 2, (0, 2)),  # 1+2 == 0+3
    ("4130", 2, None),
    ("21102", 3, None),
    ("3321111", 3, (3, 1)),
])
def test_small_witnesses(word, k, want):
    got = oc.find_additive_power(word, k)
    assert (None if got is None else (got.start, got.block_len)) == want


def test_witness_blocks_equal_sum():
    w = [1, 2, 0, 3, 3, 0, 1, 1, 1]
    wit = oc.find_additive_power(w, 3)
    blocks = wit.blocks(w)
    assert len({len(b) for b in blocks}) == 1 and len({sum(b) for b in blocks}) == 1


def test_tie_break_least_start_then_length():
    assert oc.find_additive_power("111111", 3) == oc.PowerWitness(0, 1, 3)
    # long cube at 0 wins over a short one at 4
    w = "1304" + "222"
    got = oc.find_additive_power(w, 3)
    assert got == oc.PowerWitness(0, 2, 3) == oc.naive_additive_power(w, 3)


def test_prefix_of_w_has_no_cube():
    assert oc.find_additive_power(cw.fixed_point_prefix(20000), 3) is None


def test_prefix_of_w_has_squares():
    assert oc.find_additive_power(cw.fixed_point_prefix(100), 2) is not None


def test_fast_vs_naive_random():
    rng = random.Random(42)
    for _ in range(1000):
        n = rng.randint(0, 200)
        w = [rng.choice((0, 1, 3, 4)) for _ in range(n)]
        assert oc.find_additive_power(w, 3) == oc.naive_additive_power(w, 3)


@settings(max_examples=300)
@given(st.lists(st.integers(0, 9), max_size=40), st.integers(2, 4))
def test_fast_vs_naive_property(w, k):
    assert oc.find_additive_power(w, k) == oc.naive_additive_power(w, k)


@settings(max_examples=300)
@given(st.lists(st.integers(0, 4), max_size=30), st.integers(2, 3))
def test_abelian_implies_additive(w, k):
    if oc.naive_abelian_power(w, k) is not None:
        assert oc.naive_additive_power(w, k) is not None


@settings(max_examples=300)
@given(st.lists(st.integers(0, 1), max_size=30), st.integers(2, 3))
def test_binary_abelian_equals_additive(w, k):
    assert oc.naive_abelian_power(w, k) == oc.naive_additive_power(w, k)


def test_k_validation():
    with pytest.raises(ValueError):
        oc.find_additive_power("01", 1)
    with pytest.raises(ValueError):
        oc.dfs_longest((0, 1), 1)
    with pytest.raises(ValueError):
        oc.dfs_longest((0, 1), 2, budget=0)


def test_alphabet_parse():
    assert oc.IntAlphabet.parse("0,1,2").letters == (0, 1, 2)
    assert oc.IntAlphabet.parse("{2,0,1}").letters == (0, 1, 2)
    assert oc.IntAlphabet.parse("012").letters == (0, 1, 2)
    assert oc.IntAlphabet.parse("0,10").letters == (0, 10)
    for bad in ("", "0,0", "-1,2", "a,b"):
        with pytest.raises(ValueError):
            oc.IntAlphabet.parse(bad)


def test_parse_and_format_word():
    assert oc.parse_word("0314\n") == [0, 3, 1, 4]
    assert oc.parse_word("0,10,2") == [0, 10, 2]
    assert oc.parse_word("") == []
    assert oc.format_word([0, 10, 2]) == "0,10,2"
    assert oc.format_word([0, 3]) == "03"
    with pytest.raises(ValueError):
        oc.parse_word("03x")


def test_dfs_trivial_alphabets():
    r = oc.dfs_longest((0,), 2, budget=5)
    assert r.exhausted and r.word == [0]
    r = oc.dfs_longest((0, 1), 2, budget=5)
    assert r.exhausted and len(r.word) == 3


def test_dfs_results_are_validated():
    r = oc.dfs_longest((0, 1, 2), 3, max_len=300, budget=20)
    assert len(r.word) == 300 and not r.exhausted
    assert oc.find_additive_power(r.word, 3) is None


def test_dfs_is_lexicographically_least():
    # ascending order: the first found word of each length is the lex-least valid one
    r = oc.dfs_longest((0, 1, 2), 3, max_len=8, budget=5)
    valid = [w for w in itertools.product((0, 1, 2), repeat=8) if oc.naive_additive_power(w, 3) is None
             and all(oc.naive_additive_power(w[:j], 3) is None for j in range(8))]
    assert tuple(r.word) == min(valid)


def test_dfs_seed():
    seed = [2, 1, 0]
    r = oc.dfs_longest((0, 1, 2), 3, max_len=50, budget=5, seed=seed)
    assert r.word[:3] == seed and len(r.word) == 50
    with pytest.raises(ValueError):
        oc.dfs_longest((0, 1, 2), 3, seed=[1, 1, 1])


def test_suffix_check_matches_full_oracle():
    rng = random.Random(4)
    for _ in range(500):
        w = [rng.randint(0, 3) for _ in range(rng.randint(1, 40))]
        prefix = [0]
        for a in w:
            prefix.append(prefix[-1] + a)
        clean_before = oc.find_additive_power(w[:-1], 2) is None if len(w) > 1 else True
        if clean_before:
            assert oc._suffix_free(prefix, 2) == (oc.find_additive_power(w, 2) is None)


def test_exhaustive_small_cases():
    assert oc.exhaustive_max_length((0,), 2).max_len == 1
    binary = oc.exhaustive_max_length((0, 1), 2)
    assert binary.max_len == 3 and binary.witness_count == 2
    # brute force over all binary words of length 4
    assert all(oc.naive_additive_power(w, 2) for w in itertools.product((0, 1), repeat=4))


def test_exhaustive_four_letter_alphabet():
    r = oc.exhaustive_max_length(oc.IntAlphabet((0, 1, 2, 3)), 2)
    assert r.max_len <= 60
    assert r.max_len == 50 and r.witness_count == 16
    assert oc.find_additive_power(r.witness, 2) is None


def test_exhaustive_ceiling():
    with pytest.raises(oc.DepthCeilingExceeded):
        oc.exhaustive_max_length((0, 1, 2), 3, ceiling=40)
