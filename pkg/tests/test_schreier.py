from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from aslab.schreier import (
    SchreierSet,
    WeightMap,
    enumerate_maximal,
    enumerate_maximal_weighted,
    greedy_decompose,
    is_maximal,
    is_member,
    min_pieces,
    weights,
)


def test_membership_examples():
    assert is_member([3, 5, 7], 1)
    assert not is_member([2, 3, 4], 1)
    assert is_member([2, 3, 4, 5, 6, 7], 2)
    assert is_member([], 0) and is_member([], 3)
    assert is_member([9], 0) and not is_member([4, 5], 0)


def test_maximal_examples():
    assert is_maximal([2, 5], 1)
    assert not is_maximal([3, 5], 1)
    assert is_maximal([2, 3, 4, 5, 6, 7], 2)
    assert not is_maximal([], 1)
    with pytest.raises(ValueError):
        is_maximal([2, 3, 4], 1)


def test_maximal_superset_search_within_20():
    F = (2, 3, 4, 5, 6, 7)
    for g in range(1, 21):
        if g not in F:
            assert not is_member(sorted(F + (g,)), 2)


def test_weight_examples():
    assert dict(weights([5], 0)) == {5: 1}
    assert dict(weights([3, 4, 6], 1)) == {3: Fraction(1, 3), 4: Fraction(1, 3), 6: Fraction(1, 3)}
    W = weights([2, 3, 4, 5, 6, 7], 2)
    assert dict(W) == {2: Fraction(1, 4), 3: Fraction(1, 4), 4: Fraction(1, 8), 5: Fraction(1, 8),
                       6: Fraction(1, 8), 7: Fraction(1, 8)}
    assert W.total() == 1 and W.sums_to_one()
    with pytest.raises(ValueError):
        weights([3, 5], 1)


def test_decompose_examples():
    assert [b.elements for b in greedy_decompose([2, 3, 4, 5, 6, 7], 1, 2)] == [(2, 3), (4, 5, 6, 7)]
    assert [b.elements for b in greedy_decompose([1], 0, 1)] == [(1,)]
    assert [b.elements for b in greedy_decompose([3, 4, 5], 1, 1)] == [(3, 4, 5)]
    with pytest.raises(ValueError):
        greedy_decompose([3, 5], 1, 1)


def test_enumeration_examples():
    assert list(enumerate_maximal(1, 2, 4)) == [(2, 3), (2, 4)]
    assert list(enumerate_maximal(1, 1, 10)) == [(1,)]
    assert list(enumerate_maximal(0, 3, 3)) == [(3,)]
    assert list(enumerate_maximal(2, 3, 8)) == []  # needs three consecutive S_1-maximal pieces
    with pytest.raises(ValueError):
        list(enumerate_maximal(4, 1, 5))


def test_enumeration_counts_small():
    # brute force over all subsets of [1, 12] with the given minimum
    for k in (1, 2):
        for first in (1, 2, 3):
            brute = []
            rest = range(first + 1, 13)
            for r in range(0, 12):
                for c in combinations(rest, r):
                    F = (first,) + c
                    if is_member(F, k) and is_maximal(F, k):
                        brute.append(F)
            assert sorted(enumerate_maximal(k, first, 12)) == sorted(brute)


def test_enumerated_weights_match_direct():
    for F, W in enumerate_maximal_weighted(2, 2, 16):
        assert dict(W) == dict(weights(F, 2))


def test_schreier_set_json_roundtrip():
    s = SchreierSet((2, 3, 4), 1)
    assert SchreierSet.from_json(s.to_json()) == s
    W = weights([2, 3, 4, 5, 6, 7], 2)
    assert dict(WeightMap.from_json(W.to_json())) == dict(W)
    with pytest.raises(ValueError):
        SchreierSet((3, 2), 1)


def test_min_pieces():
    assert min_pieces([2, 3, 4, 5, 6, 7], 1) == 2
    assert min_pieces([1, 2, 3], 0) == 3


sets = st.lists(st.integers(1, 25), min_size=1, max_size=9, unique=True).map(sorted)


@settings(max_examples=300)
@given(sets, st.integers(0, 2), st.lists(st.integers(0, 4), min_size=9, max_size=9))
def test_spreading(F, k, bumps):
    if not is_member(F, k):
        return
    G, prev = [], 0
    for f, b in zip(F, bumps):
        g = max(f + b, prev + 1)
        G.append(g)
        prev = g
    assert is_member(G, k)


@settings(max_examples=300)
@given(sets, st.integers(0, 2), st.data())
def test_hereditary(F, k, data):
    if not is_member(F, k):
        return
    drop = data.draw(st.sets(st.sampled_from(F)))
    assert is_member([f for f in F if f not in drop], k)


_MAXIMAL = {(k, first): list(enumerate_maximal_weighted(k, first, 22))
            for k in (2, 3) for first in range(1, 7)}


def test_order_three_with_large_minimum_is_empty():
    # three order-2 pieces starting at 3 already end far beyond 22
    assert _MAXIMAL[3, 3] == [] and len(_MAXIMAL[3, 1]) == 1


@settings(max_examples=200)
@given(st.integers(1, 6), st.integers(1, 2), st.data())
def test_decompose_weights_coherence(first, l, data):
    k_total = l + 1
    found = _MAXIMAL[k_total, first]
    if not found:
        return
    F, W = data.draw(st.sampled_from(found))
    blocks = greedy_decompose(F, l, k_total)
    leaders = [b.elements[0] for b in blocks]
    G = weights(leaders, k_total - l)
    for b in blocks:
        Wb = weights(b)
        for j in b.elements:
            assert W[j] == G[b.elements[0]] * Wb[j]
