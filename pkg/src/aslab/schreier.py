"""Schreier families, maximal sets and their repeated-average weights.

A set is passed either as a :class:`SchreierSet` or as an increasing
sequence of positive integers together with an explicit order ``k``.

    >>> is_member([2, 3, 4, 5, 6, 7], 2)
    True
    >>> dict(weights([3, 4, 6], 1))
    {3: Fraction(1, 3), 4: Fraction(1, 3), 6: Fraction(1, 3)}
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

from .scalars import frac_from_json, frac_to_json

__all__ = [
    "SchreierSet",
    "WeightMap",
    "is_member",
    "is_maximal",
    "weights",
    "greedy_decompose",
    "enumerate_maximal",
    "enumerate_maximal_weighted",
    "min_pieces",
]

MAX_ENUM_ORDER = 3


@dataclass(frozen=True)
class SchreierSet:
    elements: tuple[int, ...]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "elements", _as_tuple(self.elements))
        if self.k < 0:
            raise ValueError("order must be nonnegative")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def to_json(self) -> dict:
        return {"k": self.k, "elements": list(self.elements)}

    @classmethod
    def from_json(cls, obj) -> "SchreierSet":
        return cls(tuple(int(e) for e in obj["elements"]), int(obj["k"]))


def _as_tuple(F) -> tuple[int, ...]:
    t = tuple(int(e) for e in F)
    if any(e < 1 for e in t):
        raise ValueError("Schreier sets contain positive integers only")
    if any(a >= b for a, b in zip(t, t[1:])):
        raise ValueError("elements must be strictly increasing")
    return t


def _unpack(F, k) -> tuple[tuple[int, ...], int]:
    if isinstance(F, SchreierSet):
        if k is not None and k != F.k:
            raise ValueError("conflicting orders")
        return F.elements, F.k
    if k is None:
        raise ValueError("order k required for a plain sequence")
    if k < 0:
        raise ValueError("order must be nonnegative")
    return _as_tuple(F), k


# ---------------------------------------------------------------------------
# membership


class _Search:
    """Memoized decomposition search over contiguous slices of one set."""

    def __init__(self, F: tuple[int, ...]):
        self.F = F
        self._member: dict = {}
        self._pieces: dict = {}

    def member(self, a: int, b: int, k: int) -> bool:
        if b - a <= 1:
            return True
        if k == 0:
            return False
        key = (a, b, k)
        hit = self._member.get(key)
        if hit is None:
            hit = self.pieces(a, b, k - 1) <= self.F[a]
            self._member[key] = hit
        return hit

    def pieces(self, a: int, b: int, k: int) -> int:
        """Fewest consecutive nonempty S_k pieces covering ``F[a:b]``."""
        if a >= b:
            return 0
        key = (a, b, k)
        hit = self._pieces.get(key)
        if hit is None:
            best = b - a  # singletons always work
            for j in range(a + 1, b + 1):
                if not self.member(a, j, k):
                    break  # hereditary: longer prefixes fail too
                c = 1 + self.pieces(j, b, k)
                if c < best:
                    best = c
            hit = best
            self._pieces[key] = hit
        return hit

    def longest_prefix(self, a: int, k: int) -> int:
        b = a + 1
        while b < len(self.F) and self.member(a, b + 1, k):
            b += 1
        return b


def is_member(F, k: int | None = None) -> bool:
    """Whether ``F`` lies in the Schreier family of order ``k``."""
    F, k = _unpack(F, k)
    return _Search(F).member(0, len(F), k)


def min_pieces(F, k: int) -> int:
    """Fewest consecutive S_k pieces whose union is ``F``."""
    F = _as_tuple(F)
    return _Search(F).pieces(0, len(F), k)


def is_maximal(F, k: int | None = None) -> bool:
    """Maximality in S_k via the one-point extension ``F + {max F + 1}``."""
    F, k = _unpack(F, k)
    if not is_member(F, k):
        raise ValueError(f"{F} is not in S_{k}")
    if not F:
        return False
    return not is_member(F + (F[-1] + 1,), k)


# ---------------------------------------------------------------------------
# decompositions and weights


def greedy_decompose(F, l: int, k: int | None = None) -> list[SchreierSet]:
    """Split a maximal set of order ``k`` into consecutive maximal prefixes in S_l.

    ``k`` is the total order (the order of ``F``); the minima of the returned
    blocks form a maximal set of order ``k - l``.
    """
    F, k = _unpack(F, k)
    if l < 0 or l > k:
        raise ValueError("need 0 <= l <= order of F")
    if not is_maximal(F, k):
        raise ValueError(f"{F} is not maximal in S_{k}")
    return [SchreierSet(b, l) for b in _greedy_blocks(F, l)]


def _greedy_blocks(F: tuple[int, ...], l: int) -> list[tuple[int, ...]]:
    search = _Search(F)
    out = []
    a = 0
    while a < len(F):
        b = search.longest_prefix(a, l)
        out.append(F[a:b])
        a = b
    return out


class WeightMap(Mapping):
    """Weights stored as runs ``(elements, denominator)``; each weight is ``1/den``."""

    __slots__ = ("runs", "_dict")

    def __init__(self, runs):
        self.runs = tuple(runs)
        self._dict = None

    def _materialize(self) -> dict:
        if self._dict is None:
            self._dict = {j: Fraction(1, d) for els, d in self.runs for j in els}
        return self._dict

    def __getitem__(self, j):
        return self._materialize()[j]

    def __iter__(self):
        for els, _ in self.runs:
            yield from els

    def __len__(self):
        return sum(len(els) for els, _ in self.runs)

    def _numerator(self) -> tuple[int, int]:
        # sum of weights as (numerator, common denominator)
        runs = self.runs
        if len(runs) == 1:
            els, d = runs[0]
            return len(els), d
        L = 1
        for _, d in runs:
            L = L * d // math.gcd(L, d)
        num = 0
        for els, d in runs:
            num += len(els) * (L // d)
        return num, L

    def total(self) -> Fraction:
        """Exact sum of all weights."""
        if not self.runs:
            return Fraction(0)
        return Fraction(*self._numerator())

    def sums_to_one(self) -> bool:
        """Integer-only test of ``total() == 1``."""
        num, den = self._numerator()
        return num == den

    def restrict(self, elements) -> dict:
        s = set(elements)
        return {j: w for j, w in self.items() if j in s}

    def to_json(self) -> dict:
        return {str(j): frac_to_json(w) for j, w in self.items()}

    @classmethod
    def from_json(cls, obj) -> "WeightMap":
        runs = []
        for j in sorted(obj, key=int):
            w = frac_from_json(obj[j])
            if w.numerator != 1:
                raise ValueError("weights are reciprocals of integers")
            runs.append(((int(j),), w.denominator))
        return cls(runs)

    def __repr__(self):
        return f"WeightMap({dict(self)})"


def _weight_runs(F: tuple[int, ...], k: int) -> list:
    if k == 0:
        return [(F, 1)]
    blocks = _greedy_blocks(F, k - 1)
    n = F[0]
    runs = []
    for B in blocks:
        runs.extend((els, d * n) for els, d in _weight_runs(B, k - 1))
    return runs


def weights(F, k: int | None = None, validate: bool = True) -> WeightMap:
    """Repeated-average weights of a maximal set of order ``k``."""
    F, k = _unpack(F, k)
    if validate and (not F or not is_maximal(F, k)):
        raise ValueError(f"{F} is not maximal in S_{k}")
    return WeightMap(_weight_runs(F, k))


# ---------------------------------------------------------------------------
# enumeration


def _check_order(k: int) -> None:
    if not 0 <= k <= MAX_ENUM_ORDER:
        raise ValueError(f"enumeration supports orders 0..{MAX_ENUM_ORDER}")


def enumerate_maximal(k: int, min_first: int, max_element: int) -> Iterator[tuple[int, ...]]:
    """Every maximal set of order ``k`` with the given minimum and max <= bound."""
    _check_order(k)
    for F, _ in _max_runs(k, min_first, max_element):
        yield F


def enumerate_maximal_weighted(k: int, min_first: int,
                               max_element: int) -> Iterator[tuple[tuple[int, ...], WeightMap]]:
    """Like :func:`enumerate_maximal` but also yields each set's weights.

    The weights are assembled block by block during the walk, which shares
    work between sets with common prefixes.
    """
    _check_order(k)
    for F, runs in _max_runs(k, min_first, max_element):
        yield F, WeightMap(runs)


def _max_runs(k: int, first: int, hi: int):
    if first < 1 or _min_end(k, first, 1, hi) > hi:
        return
    if k == 0:
        yield (first,), (((first,), 1),)
        return
    if k == 1:
        if first == 1:
            yield (1,), (((1,), 1),)
            return
        lead = (first,)
        for rest in combinations(range(first + 1, hi + 1), first - 1):
            F = lead + rest
            yield F, ((F, first),)
        return
    n = first
    yield from _blocks(k - 1, n, n, 0, first, hi, (), ())


@lru_cache(maxsize=None)
def _min_end(k: int, start: int, count: int, cap: int | None = None) -> int:
    """Smallest possible max element of ``count`` consecutive maximal S_k sets from ``start``.

    Once the running value exceeds ``cap`` the search stops and returns it.
    """
    if k == 0:
        return start + count - 1
    if k == 1:
        # maximal S_1 sets from s end at 2s - 1, so c of them end at s 2^c - 1
        return start * 2 ** count - 1
    end = start - 1
    for _ in range(count):
        s = end + 1
        end = _min_end(k - 1, s, s, cap)
        if cap is not None and end > cap:
            break
    return end


def _blocks(k: int, n: int, start: int, done: int, exact_first, hi: int, acc, runs):
    if done == n:
        yield acc, runs
        return
    if _min_end(k, exact_first or start, n - done, hi) > hi:
        return
    starts = [exact_first] if exact_first is not None else range(start, hi + 1)
    if k == 1 and done == n - 1 and done > 0:
        # last block of order 1, inlined: it dominates the count
        for s in starts:
            lead = (s,)
            d = s * n
            for rest in combinations(range(s + 1, hi + 1), s - 1):
                B = lead + rest
                yield acc + B, runs + ((B, d),)
        return
    for s in starts:
        for B, bruns in _max_runs(k, s, hi):
            scaled = tuple((els, d * n) for els, d in bruns)
            yield from _blocks(k, n, B[-1] + 1, done + 1, None, hi, acc + B, runs + scaled)
