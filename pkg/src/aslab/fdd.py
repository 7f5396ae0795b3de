"""Press-down and lift-up norms over finite block decompositions.

A :class:`BlockStructure` splits ``[1, N]`` into consecutive blocks.  A base
norm measures vectors; an outer norm measures *profiles*, i.e. vectors
``sum_i ||I_i z|| e_{min I_i}`` indexed by block numbers, where
``I_1 < I_2 < ...`` are intervals of block indices.

* lift-up norm: sup of the outer norm of profiles over disjoint families,
* bracket: inf over partitions of all block indices,
* press norm: inf of ``sum [z_i]`` over decompositions ``z = sum z_i``; only
  certified lower and upper bounds are available.

When the outer norm is 1-unconditional and 1-right dominant, only
support-aligned families and partitions need to be searched (see
:func:`press_bracket` and :func:`lift_up_norm`); both functions also offer
an exhaustive mode for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence, Union

from .norms import FinVec, NormParams, NormValue, exact_value, norm, pair, certify_norm_le
from .scalars import Surd, Verdict, as_fraction, compare, frac_from_json, frac_to_json

__all__ = [
    "LrNorm",
    "TNorm",
    "BlockStructure",
    "lift_up_norm",
    "press_bracket",
    "press_norm_bounds",
    "PressBounds",
    "duality_check",
    "block_norms",
]

BLOCK_CAP = 20
Exact = Union[Fraction, Surd]


def _emin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a if a <= b else b
    return a if compare(a, b) <= 0 else b


def _emax(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a if a >= b else b
    return a if compare(a, b) >= 0 else b


def _eadd(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return (Surd.rational(0) + a + b).simplify()


def _emul(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return (Surd.rational(1) * a * b).simplify()


# ---------------------------------------------------------------------------
# norm oracles


@dataclass(frozen=True)
class LrNorm:
    """Weighted ``l_r`` norm, r in {1, 2, inf}.

    ``r=1``: sum w_i |x_i|; ``r=2``: sqrt(sum w_i x_i^2); ``r=inf``: max w_i |x_i|.
    Missing weights default to 1.  The dual norm uses weights ``1/w_i``.
    """

    r: str = "2"
    weights: tuple = ()

    def __post_init__(self):
        r = str(self.r)
        if r not in ("1", "2", "inf"):
            raise ValueError("r must be 1, 2 or inf")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "weights", tuple(as_fraction(w) for w in self.weights))
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")

    def _w(self, i: int) -> Fraction:
        return self.weights[i - 1] if i - 1 < len(self.weights) else Fraction(1)

    def value(self, coords: dict) -> Exact:
        if not coords:
            return Fraction(0)
        if self.r == "1":
            acc = Fraction(0)
            for i, c in coords.items():
                acc = _eadd(acc, _emul(self._w(i), _absx(c)))
            return acc
        if self.r == "inf":
            m = None
            for i, c in coords.items():
                m = _emax(m, _emul(self._w(i), _absx(c)))
            return m
        s = Fraction(0)
        for i, c in coords.items():
            s = _eadd(s, _emul(self._w(i), _emul(c, c)))
        if isinstance(s, Fraction):
            return Surd.root_of(s, 2).simplify()
        r = s.nth_root(2)
        if r is None:
            raise ValueError("l2 value of irrational entries is not exactly representable")
        return r.simplify()

    def dual(self) -> "LrNorm":
        r = {"1": "inf", "2": "2", "inf": "1"}[self.r]
        return LrNorm(r, tuple(1 / w for w in self.weights))

    def to_json(self) -> dict:
        out = {"lr": self.r}
        if self.weights:
            out["weights"] = [frac_to_json(w) for w in self.weights]
        return out


@dataclass(frozen=True)
class TNorm:
    params: NormParams

    def value(self, coords: dict) -> Exact:
        nv = norm(self.params, FinVec(coords))
        if not nv.has_exact():
            raise ValueError("outer value not exactly representable")
        return nv.exact()

    def to_json(self) -> dict:
        d = self.params.to_json()
        return {k: d[k] for k in ("family", "theta", "q", "M", "convention") if d.get(k) != []}


def _absx(c):
    v = exact_value(c)
    if isinstance(v, Fraction):
        return abs(v)
    return v if v.sign() >= 0 else -v


def _oracle_from_json(obj):
    if "lr" in obj:
        return LrNorm(str(obj["lr"]), tuple(frac_from_json(w) for w in obj.get("weights", ())))
    return TNorm(NormParams.from_json(obj))


# ---------------------------------------------------------------------------
# structures


@dataclass(frozen=True)
class BlockStructure:
    blocks: tuple[int, ...]
    base: Union[LrNorm, TNorm] = field(default_factory=LrNorm)
    outer: Union[LrNorm, TNorm] = field(default_factory=lambda: TNorm(NormParams()))

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(int(b) for b in self.blocks))
        if not self.blocks or any(b < 1 for b in self.blocks):
            raise ValueError("block sizes must be positive")

    @property
    def count(self) -> int:
        return len(self.blocks)

    @property
    def dimension(self) -> int:
        return sum(self.blocks)

    def block_range(self, n: int) -> tuple[int, int]:
        """Coordinate range ``[lo, hi]`` of block ``n`` (1-based)."""
        lo = 1 + sum(self.blocks[: n - 1])
        return lo, lo + self.blocks[n - 1] - 1

    def block_of(self, i: int) -> int:
        acc = 0
        for n, b in enumerate(self.blocks, 1):
            acc += b
            if i <= acc:
                return n
        raise ValueError(f"coordinate {i} outside the structure")

    def project(self, z: FinVec, first: int, last: int) -> FinVec:
        """Restriction of ``z`` to blocks ``first..last``."""
        lo = self.block_range(first)[0]
        hi = self.block_range(last)[1]
        return z.restrict(lo, hi)

    def base_value(self, z: FinVec) -> Exact:
        return self.base.value(dict(z.coords))

    def outer_value(self, profile: dict) -> Exact:
        return self.outer.value(profile)

    def dual(self) -> "BlockStructure":
        if not isinstance(self.base, LrNorm) or not isinstance(self.outer, LrNorm):
            raise ValueError("exact duals only for l_r base and outer norms")
        return BlockStructure(self.blocks, self.base.dual(), self.outer.dual())

    def check(self, z: FinVec) -> None:
        if self.count > BLOCK_CAP:
            raise ValueError(f"block count {self.count} exceeds cap {BLOCK_CAP}")
        if z and z.support[-1] > self.dimension:
            raise ValueError("vector leaves the block structure")

    def to_json(self) -> dict:
        return {"blocks": list(self.blocks), "base": self.base.to_json(),
                "outer": self.outer.to_json()}

    @classmethod
    def from_json(cls, obj) -> "BlockStructure":
        return cls(tuple(obj["blocks"]), _oracle_from_json(obj.get("base", {"lr": "2"})),
                   _oracle_from_json(obj.get("outer", {"family": "T", "theta": ["1", "2"], "q": 1})))


def block_norms(s: BlockStructure, z: FinVec) -> dict[int, Exact]:
    """``||P_n z||`` for every block ``n`` meeting the support of ``z``."""
    out = {}
    for n in sorted({s.block_of(i) for i in z.support}):
        out[n] = s.base_value(s.project(z, n, n))
    return out


class _Profiles:
    """Cached interval norms over the nonzero blocks of one vector."""

    def __init__(self, s: BlockStructure, z: FinVec):
        self.s = s
        self.z = z
        self.nz = sorted({s.block_of(i) for i in z.support})
        self._iv: dict = {}
        self._outer: dict = {}

    def interval(self, i: int, j: int) -> Exact:
        """Base norm of ``z`` on blocks ``nz[i]..nz[j]``."""
        key = (i, j)
        v = self._iv.get(key)
        if v is None:
            v = self.s.base_value(self.s.project(self.z, self.nz[i], self.nz[j]))
            self._iv[key] = v
        return v

    def interval_blocks(self, a: int, b: int) -> Exact:
        key = ("b", a, b)
        v = self._iv.get(key)
        if v is None:
            v = self.s.base_value(self.s.project(self.z, a, b))
            self._iv[key] = v
        return v

    def outer(self, profile: tuple) -> Exact:
        v = self._outer.get(profile)
        if v is None:
            v = self.s.outer_value({pos: c for pos, c in profile if not _zero(c)})
            self._outer[profile] = v
        return v


def _zero(c) -> bool:
    return c == 0 if isinstance(c, Fraction) else c.is_zero()


def _nv(v) -> NormValue:
    return NormValue.of(v)


# ---------------------------------------------------------------------------
# bracket and lift-up


def press_bracket(s: BlockStructure, z: FinVec, exhaustive: bool = False) -> NormValue:
    """Minimum over partitions of the block indices of the profile's outer norm.

    Default mode searches partitions whose cuts sit right after a nonzero
    block: moving an interval's start leftward across zero blocks keeps the
    block norms and moves a profile coefficient to a smaller index, which
    cannot increase a 1-right-dominant outer norm.  ``exhaustive=True``
    enumerates all ``2^(B-1)`` partitions instead.
    """
    return _nv(_bracket_value(s, z, exhaustive))


def _bracket_value(s: BlockStructure, z: FinVec, exhaustive: bool = False) -> Exact:
    s.check(z)
    if not z:
        return Fraction(0)
    prof = _Profiles(s, z)
    if exhaustive:
        return _bracket_exhaustive(s, prof)
    nz = prof.nz
    k = len(nz)
    # incumbent: the single interval
    best = prof.outer(((1, prof.interval(0, k - 1)),))

    # Depth-first over the gaps between consecutive nonzero blocks.  The outer
    # norm of the profile built so far (closed intervals plus the open one)
    # bounds every completion from below, since completions only add
    # coordinates and enlarge the open coefficient.
    def dfs(j: int, closed: tuple, open_pos: int, open_idx: int):
        nonlocal best
        current = closed + ((open_pos, prof.interval(open_idx, j - 1)),)
        value = prof.outer(current)
        if compare(value, best) >= 0:
            return
        if j == k:
            best = value
            return
        dfs(j + 1, current, nz[j - 1] + 1, j)  # cut before nz[j]
        dfs(j + 1, closed, open_pos, open_idx)  # extend the open interval

    if k > 1:
        dfs(1, (), 1, 0)
    return best


def _bracket_exhaustive(s: BlockStructure, prof: _Profiles) -> Exact:
    B = s.count
    best = None
    for mask in range(1 << (B - 1)):
        profile = []
        start = 1
        for n in range(1, B + 1):
            if n == B or mask >> (n - 1) & 1:
                profile.append((start, prof.interval_blocks(start, n)))
                start = n + 1
        best = _emin(best, prof.outer(tuple(profile)))
    return best


def lift_up_norm(s: BlockStructure, z: FinVec, exhaustive: bool = False) -> NormValue:
    """Maximum over disjoint interval families of the profile's outer norm.

    Default mode lets intervals start at nonzero blocks and run to the next
    start: shifting a start rightward to a nonzero block keeps the block norm
    and cannot decrease a right-dominant outer norm, and widening intervals
    cannot decrease block norms.  ``exhaustive=True`` searches every family.
    """
    return _nv(_lift_value(s, z, exhaustive))


def _lift_value(s: BlockStructure, z: FinVec, exhaustive: bool = False) -> Exact:
    s.check(z)
    if not z:
        return Fraction(0)
    prof = _Profiles(s, z)
    if exhaustive:
        return _lift_exhaustive(s, prof)
    nz = prof.nz
    k = len(nz)
    best = None
    for mask in range(1, 1 << k):
        starts = [j for j in range(k) if mask >> j & 1]
        profile = []
        for a, b in zip(starts, starts[1:] + [k]):
            profile.append((nz[a], prof.interval(a, b - 1)))
        best = _emax(best, prof.outer(tuple(profile)))
    return best


def _lift_exhaustive(s: BlockStructure, prof: _Profiles) -> Exact:
    B = s.count
    best = Fraction(0)

    def rec(start: int, acc):
        nonlocal best
        if acc:
            best = _emax(best, prof.outer(tuple(acc)))
        for a in range(start, B + 1):
            for b in range(a, B + 1):
                v = prof.interval_blocks(a, b)
                if _zero(v):
                    continue
                acc.append((a, v))
                rec(b + 1, acc)
                acc.pop()

    rec(1, [])
    return best


# ---------------------------------------------------------------------------
# press norm bounds


@dataclass(frozen=True)
class PressBounds:
    lower: NormValue
    upper: NormValue
    decompositions_tried: int

    @property
    def gap(self) -> NormValue:
        return NormValue.of(_eadd(self.upper.exact(), -self.lower.exact())) \
            if self.lower.has_exact() and self.upper.has_exact() else None


def _decompositions(B: int, budget: int):
    """Blockwise multiplier decompositions, generated from the structure only.

    Each item is a list of pieces; a piece is a tuple of per-block factors
    in [0, 1], and the factors of all pieces sum to 1 block by block.
    """
    one = tuple(Fraction(1) for _ in range(B))
    out = [[one]]

    def cut(b):
        left = tuple(Fraction(1) if n < b else Fraction(0) for n in range(B))
        right = tuple(1 - c for c in left)
        return [left, right]

    for b in range(1, B):
        out.append(cut(b))
    for t in (Fraction(1, 2), Fraction(1, 4), Fraction(3, 4)):
        for b in range(B):
            left = tuple(Fraction(1) if n < b else (t if n == b else Fraction(0)) for n in range(B))
            right = tuple(1 - c for c in left)
            out.append([left, right])
    for b1, b2 in combinations(range(1, B), 2):
        out.append([tuple(Fraction(1) if n < b1 else Fraction(0) for n in range(B)),
                    tuple(Fraction(1) if b1 <= n < b2 else Fraction(0) for n in range(B)),
                    tuple(Fraction(1) if n >= b2 else Fraction(0) for n in range(B))])
    return out[:max(1, budget)]


def _apply(s: BlockStructure, z: FinVec, factors: tuple) -> FinVec:
    coords = {}
    for i, c in z.coords.items():
        t = factors[s.block_of(i) - 1]
        if t:
            coords[i] = c if t == 1 else _emul(exact_value(c), t)
    return FinVec(coords)


def press_norm_bounds(s: BlockStructure, z: FinVec, budget: int = 24) -> PressBounds:
    """Certified ``lower <= ||z||_press <= upper``.

    ``lower`` is the largest single-block norm (pairing with normalized
    single-block functionals); ``upper`` minimizes ``sum_i [z_i]`` over the
    first ``budget`` blockwise decompositions (see :func:`_decompositions`).
    """
    s.check(z)
    if not z:
        zero = _nv(Fraction(0))
        return PressBounds(zero, zero, 0)
    lower = None
    for v in block_norms(s, z).values():
        lower = _emax(lower, v)
    memo: dict = {}
    best = None
    decs = _decompositions(s.count, budget)
    for pieces in decs:
        total: Exact = Fraction(0)
        for f in pieces:
            y = _apply(s, z, f)
            key = tuple(sorted((i, str(c)) for i, c in y.coords.items()))
            v = memo.get(key)
            if v is None:
                v = _bracket_value(s, y)
                memo[key] = v
            total = _eadd(total, v)
            if best is not None and compare(total, best) >= 0:
                break
        best = _emin(best, total)
    assert compare(lower, best) <= 0, "press bounds crossed"
    return PressBounds(_nv(lower), _nv(best), len(decs))


def duality_check(s: BlockStructure, f: FinVec, z: FinVec, budget: int = 24) -> Verdict:
    """Certify ``|<f, z>| <= ||f||_lift(dual) * upper press bound of z``."""
    if not isinstance(s.outer, LrNorm) or not isinstance(s.base, LrNorm):
        raise ValueError("duality_check needs l_r base and outer norms")
    lhs = pair(f, z)
    lhs = lhs if isinstance(lhs, Fraction) else lhs
    lhs = abs(lhs) if isinstance(lhs, Fraction) else (lhs if lhs.sign() >= 0 else -lhs)
    lift = _lift_value(s.dual(), FinVec(f.coords))
    up = press_norm_bounds(s, z, budget).upper.exact()
    return certify_norm_le(lhs, _emul(lift, up))
