from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from aslab.fdd import (
    BlockStructure,
    LrNorm,
    TNorm,
    block_norms,
    duality_check,
    lift_up_norm,
    press_bracket,
    press_norm_bounds,
)
from aslab.norms import FinVec, NormParams
from aslab.scalars import Verdict, compare

T1 = TNorm(NormParams("T", Fraction(1, 2), 1))


def vec(d):
    return FinVec({i: Fraction(c) for i, c in d.items()})


def test_single_block_collapse():
    s = BlockStructure((2, 3, 2), LrNorm("1"), T1)
    z = vec({3: 1, 5: -2})
    assert block_norms(s, z) == {2: 3}
    assert lift_up_norm(s, z).exact() == 3
    assert press_bracket(s, z).exact() == 3
    b = press_norm_bounds(s, z)
    assert b.lower.exact() == b.upper.exact() == 3


def test_zero_vector():
    s = BlockStructure((2, 2), LrNorm("2"), T1)
    assert lift_up_norm(s, FinVec()).exact() == 0
    assert press_bracket(s, FinVec()).exact() == 0
    b = press_norm_bounds(s, FinVec())
    assert (b.lower.exact(), b.upper.exact()) == (0, 0)


def test_lift_up_on_singleton_blocks():
    # with l_1 base, the single interval [3, 5] already has profile 3 e_3
    s = BlockStructure((1,) * 6, LrNorm("1"), T1)
    assert lift_up_norm(s, vec({3: 1, 4: 1, 5: 1})).exact() == 3
    # with l_inf base the best profile is the vector itself
    s = BlockStructure((1,) * 6, LrNorm("inf"), T1)
    assert lift_up_norm(s, vec({3: 1, 4: 1, 5: 1})).exact() == Fraction(3, 2)


def test_bracket_two_singletons():
    z = vec({1: 1, 2: 1})
    assert press_bracket(BlockStructure((1, 1), LrNorm("1"), LrNorm("1")), z).exact() == 2
    assert press_bracket(BlockStructure((1, 1), LrNorm("1"), LrNorm("inf")), z).exact() == 1


def test_duality_examples():
    s = BlockStructure((1,), LrNorm("2"), LrNorm("2"))
    assert duality_check(s, vec({1: 1}), vec({1: 1})) is Verdict.HOLDS
    s = BlockStructure((2, 2, 2), LrNorm("2"), LrNorm("2"))
    assert duality_check(s, FinVec(), vec({1: 3, 4: -1})) is Verdict.HOLDS
    with pytest.raises(ValueError):
        duality_check(BlockStructure((1, 1), LrNorm("2"), T1), vec({1: 1}), vec({1: 1}))


def test_block_cap():
    s = BlockStructure((1,) * 21, LrNorm("1"), T1)
    with pytest.raises(ValueError):
        press_bracket(s, vec({1: 1}))


def test_structure_json_roundtrip():
    s = BlockStructure((2, 2, 3), LrNorm("2"), T1)
    assert BlockStructure.from_json(s.to_json()) == s
    obj = {"blocks": [2, 2, 3], "base": {"lr": "2"},
           "outer": {"family": "T", "theta": ["1", "2"], "q": 1}}
    assert BlockStructure.from_json(obj) == s


def test_lr_duals():
    assert LrNorm("1").dual() == LrNorm("inf")
    assert LrNorm("2", (Fraction(4),)).dual() == LrNorm("2", (Fraction(1, 4),))
    assert LrNorm("2").value({1: Fraction(3), 2: Fraction(4)}) == 5


# ---------------------------------------------------------------------------
# properties

sizes = st.lists(st.integers(1, 2), min_size=1, max_size=6)
entries = st.integers(-3, 3)


@st.composite
def instances(draw, outer=None):
    blocks = tuple(draw(sizes))
    N = sum(blocks)
    z = FinVec({i: Fraction(draw(entries)) for i in range(1, N + 1)})
    base = LrNorm(draw(st.sampled_from(["1", "inf"])))
    out = outer or draw(st.sampled_from([T1, LrNorm("1"), LrNorm("inf")]))
    return BlockStructure(blocks, base, out), z


@settings(max_examples=80, deadline=None)
@given(instances())
def test_fast_search_matches_exhaustive(inst):
    s, z = inst
    assert compare(press_bracket(s, z).exact(), press_bracket(s, z, exhaustive=True).exact()) == 0
    assert compare(lift_up_norm(s, z).exact(), lift_up_norm(s, z, exhaustive=True).exact()) == 0


@settings(max_examples=60, deadline=None)
@given(instances(outer=LrNorm("1")))
def test_bracket_matches_partition_enumeration(inst):
    # independent enumeration of all interval partitions of the block range
    s, z = inst
    B = s.count
    bn = block_norms(s, z)
    best = None
    for r in range(B):
        for cuts in combinations(range(2, B + 1), r):
            starts = (1,) + cuts
            ends = tuple(c - 1 for c in cuts) + (B,)
            prof = [s.base_value(s.project(z, a, b)) for a, b in zip(starts, ends)]
            v = sum(prof)
            best = v if best is None else min(best, v)
    if not bn:
        best = 0
    assert press_bracket(s, z).exact() == best


@settings(max_examples=80, deadline=None)
@given(instances())
def test_sandwich(inst):
    s, z = inst
    b = press_norm_bounds(s, z)
    br = press_bracket(s, z).exact()
    assert compare(b.lower.exact(), b.upper.exact()) <= 0
    assert compare(b.upper.exact(), br) <= 0


@settings(max_examples=60, deadline=None)
@given(instances(), st.data())
def test_bracket_subadditive(inst, data):
    s, z = inst
    cut = data.draw(st.integers(1, s.count))
    z1 = s.project(z, 1, cut)
    z2 = z.restrict(s.block_range(cut)[1] + 1, None) if cut < s.count else FinVec()
    lhs = press_bracket(s, z1 + z2).exact()
    rhs = press_bracket(s, z1).exact() + press_bracket(s, z2).exact()
    assert compare(lhs, rhs) <= 0


@settings(max_examples=60, deadline=None)
@given(instances(), st.data())
def test_shrink_monotone(inst, data):
    s, z = inst
    n = data.draw(st.integers(1, s.count))
    t = data.draw(st.sampled_from([Fraction(0), Fraction(1, 2)]))
    lo, hi = s.block_range(n)
    shrunk = FinVec({i: (c * t if lo <= i <= hi else c) for i, c in z.coords.items()})
    assert compare(press_norm_bounds(s, shrunk).upper.exact(),
                   press_norm_bounds(s, z).upper.exact()) <= 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 2), min_size=1, max_size=4), st.data())
def test_duality_l2(blocks, data):
    s = BlockStructure(tuple(blocks), LrNorm("2"), LrNorm("2"))
    N = s.dimension
    f = FinVec({i: Fraction(data.draw(entries)) for i in range(1, N + 1)}, dual=True)
    z = FinVec({i: Fraction(data.draw(entries)) for i in range(1, N + 1)})
    assert duality_check(s, f, z) is Verdict.HOLDS
