"""Exact evaluation of Tsirelson-type norms on finitely supported vectors.

Two families are supported.  For ``family="T"`` the norm is the
q-convexification of a Tsirelson norm: ``||x|| = N(|x|^q) ** (1/q)`` where

    N(y) = max(||y||_inf, t * sup sum_i N(I_i y))

over interval families ``I_1 < ... < I_n`` with ``m_n <= min I_1`` and
``t = theta**q`` (convention ``theta_to_q``) or ``t = theta`` (``theta_direct``).
For ``family="U"`` there is no convexification and the sum is weighted by
``theta * n ** (-1/p)`` with ``n >= 2``.

Values are computed by a dynamic programme over runs of consecutive support
points.  Extending an interval across coordinates outside the support never
changes a sub-norm and extending it over support points never decreases it,
so it suffices to partition runs of the support into consecutive pieces.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .scalars import (
    CertInterval,
    PrecisionExhausted,
    PthRootCoord,
    RootValue,
    Surd,
    Verdict,
    as_fraction,
    compare,
    enclose,
    frac_from_json,
    frac_to_json,
    precision_cap,
    to_surd,
)

__all__ = [
    "NormParams",
    "FinVec",
    "NormValue",
    "SupportCapExceeded",
    "norm",
    "norm_bruteforce",
    "norm_levels",
    "norm_at_level",
    "admissible_families",
    "is_admissible",
    "pair",
    "dual_lower_bound",
    "norming_sample",
    "ball_membership_test",
    "Violation",
    "NoViolationFound",
    "certify_norm_le",
    "exact_value",
    "evens",
]

DEFAULT_SUPPORT_CAP = 40
BRUTEFORCE_CAP = 8

Exact = Union[Fraction, Surd]


class SupportCapExceeded(ValueError):
    pass


# ---------------------------------------------------------------------------
# parameters


def evens(length: int = 200) -> tuple[int, ...]:
    """Prefix ``(2, 4, ..., 2*length)`` of the even admissibility sequence."""
    return tuple(range(2, 2 * length + 1, 2))


@dataclass(frozen=True)
class NormParams:
    family: str = "T"
    theta: Fraction = Fraction(1, 2)
    q: int = 1
    M: tuple[int, ...] = ()
    convention: str = "theta_to_q"

    def __post_init__(self):
        object.__setattr__(self, "theta", as_fraction(self.theta))
        object.__setattr__(self, "M", tuple(int(m) for m in self.M))
        if self.family not in ("T", "U"):
            raise ValueError("family must be 'T' or 'U'")
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if int(self.q) != self.q or self.q < 1:
            raise ValueError("q must be a positive integer")
        if self.convention not in ("theta_to_q", "theta_direct"):
            raise ValueError("convention must be theta_to_q or theta_direct")
        if any(m < 1 for m in self.M) or any(a >= b for a, b in zip(self.M, self.M[1:])):
            raise ValueError("M must be a strictly increasing sequence of positive integers")

    def m(self, n: int) -> int:
        """The n-th admissibility threshold; after the prefix it grows by one per step."""
        if n < 1:
            raise ValueError("n >= 1")
        if not self.M:
            return n
        k = len(self.M)
        if n <= k:
            return self.M[n - 1]
        return self.M[-1] + (n - k)

    def max_pieces(self, start: int) -> int:
        """Largest n with ``m(n) <= start`` (0 if none)."""
        if not self.M:
            return max(start, 0)
        if start < self.M[0]:
            return 0
        lo, hi = 1, max(start, 1)
        while lo < hi:  # m is increasing
            mid = (lo + hi + 1) // 2
            if self.m(mid) <= start:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def min_pieces(self) -> int:
        return 2 if self.family == "U" else 1

    @property
    def base_theta(self) -> Fraction:
        """Coefficient of the T recursion applied to ``|x|^q``."""
        if self.family == "T" and self.convention == "theta_to_q":
            return self.theta ** self.q
        return self.theta

    def weight(self, n: int) -> Exact:
        """Multiplier of a sum over ``n`` pieces."""
        if self.family == "T":
            return self.base_theta
        return _u_weight(self.theta, self.q, n)

    def plain(self) -> "NormParams":
        return NormParams(self.family, self.theta, self.q, (), self.convention)

    def with_(self, **kw) -> "NormParams":
        d = dict(family=self.family, theta=self.theta, q=self.q, M=self.M,
                 convention=self.convention)
        d.update(kw)
        return NormParams(**d)

    def to_json(self) -> dict:
        return {"family": self.family, "theta": frac_to_json(self.theta), "q": self.q,
                "M": list(self.M), "convention": self.convention}

    @classmethod
    def from_json(cls, obj) -> "NormParams":
        return cls(obj.get("family", "T"), frac_from_json(obj["theta"]), int(obj.get("q", 1)),
                   tuple(obj.get("M", ())), obj.get("convention", "theta_to_q"))


@lru_cache(maxsize=4096)
def _u_weight(theta: Fraction, q: int, n: int) -> Exact:
    if q == 1:
        return theta
    # theta * n^(-(q-1)/q) = theta/n * n^(1/q)
    return (Surd.root_of(n, q) * (theta / n)).simplify()


# ---------------------------------------------------------------------------
# vectors


def _is_zero(c) -> bool:
    if isinstance(c, PthRootCoord):
        return c.coeff == 0 or c.base == 0
    if isinstance(c, Surd):
        return c.is_zero()
    return c == 0


@lru_cache(maxsize=1 << 14)
def _exact_proot(c: PthRootCoord) -> Exact:
    return c.as_surd().simplify()


def exact_value(c) -> Exact:
    """Coordinate or norm value as a ``Fraction`` or ``Surd``."""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, PthRootCoord):
        return _exact_proot(c)
    if isinstance(c, Surd):
        return c.simplify()
    if isinstance(c, RootValue):
        if c.root == 1:
            return c.radicand
        return Surd.root_of(c.radicand, c.root).simplify()
    if isinstance(c, NormValue):
        return c.exact()
    raise TypeError(f"no exact value for {c!r}")


class FinVec:
    """Finitely supported vector (or functional when ``dual``) with exact coordinates."""

    __slots__ = ("coords", "dual")

    def __init__(self, coords: Mapping | Iterable = (), dual: bool = False):
        items = coords.items() if isinstance(coords, Mapping) else coords
        clean = {}
        for i, c in items:
            i = int(i)
            if i < 1:
                raise ValueError("indices are positive integers")
            if isinstance(c, (int, str)):
                c = as_fraction(c)
            if not _is_zero(c):
                clean[i] = c
        self.coords = dict(sorted(clean.items()))
        self.dual = dual

    @classmethod
    def basis(cls, i: int, coeff=1, dual: bool = False) -> "FinVec":
        return cls({i: as_fraction(coeff)}, dual)

    @classmethod
    def indicator(cls, indices: Iterable[int], dual: bool = False) -> "FinVec":
        return cls({i: Fraction(1) for i in indices}, dual)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords.items())

    def __getitem__(self, i):
        return self.coords.get(i, Fraction(0))

    def __bool__(self):
        return bool(self.coords)

    def __eq__(self, other):
        if not isinstance(other, FinVec):
            return NotImplemented
        if self.dual != other.dual or self.support != other.support:
            return False
        return all(exact_value(a) == exact_value(other.coords[i]) for i, a in self.coords.items())

    def __hash__(self):
        return hash((self.dual, self.support))

    @property
    def kind(self) -> str:
        kinds = {type(c) for c in self.coords.values()}
        if kinds <= {Fraction}:
            return "rational"
        if kinds <= {Fraction, PthRootCoord}:
            return "proot"
        return "surd"

    def exact_coords(self) -> dict:
        return {i: exact_value(c) for i, c in self.coords.items()}

    def restrict(self, lo: int | None = None, hi: int | None = None) -> "FinVec":
        """Projection onto the interval ``[lo, hi]``."""
        return FinVec({i: c for i, c in self.coords.items()
                       if (lo is None or i >= lo) and (hi is None or i <= hi)}, self.dual)

    def restrict_to(self, indices: Iterable[int]) -> "FinVec":
        s = set(indices)
        return FinVec({i: c for i, c in self.coords.items() if i in s}, self.dual)

    def reindex(self, mapping) -> "FinVec":
        """Move coordinate ``i`` to ``mapping(i)`` (must be strictly increasing)."""
        out = {mapping(i): c for i, c in self.coords.items()}
        keys = [mapping(i) for i in self.coords]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise ValueError("reindexing must be strictly increasing")
        return FinVec(out, self.dual)

    def spread(self, targets: Sequence[int]) -> "FinVec":
        """Same coefficient sequence placed on ``targets``."""
        if len(targets) != len(self.coords):
            raise ValueError("need one target per support point")
        return FinVec(dict(zip(targets, self.coords.values())), self.dual)

    def scale(self, c) -> "FinVec":
        c = as_fraction(c)
        return FinVec({i: _mul(v, c) for i, v in self.coords.items()}, self.dual)

    def signs_flipped(self, signs: Mapping[int, int]) -> "FinVec":
        return FinVec({i: _mul(v, Fraction(signs.get(i, 1))) for i, v in self.coords.items()},
                      self.dual)

    def __add__(self, other: "FinVec") -> "FinVec":
        if self.dual != other.dual:
            raise ValueError("cannot add a vector and a functional")
        out = dict(self.coords)
        for i, c in other.coords.items():
            out[i] = _add(out[i], c) if i in out else c
        return FinVec(out, self.dual)

    def to_json(self) -> dict:
        kind = self.kind
        coords = {}
        qs = set()
        for i, c in self.coords.items():
            if isinstance(c, Fraction):
                coords[str(i)] = frac_to_json(c)
            elif isinstance(c, PthRootCoord):
                qs.add(c.q)
                coords[str(i)] = {"coeff": frac_to_json(c.coeff), "base": frac_to_json(c.base)}
            else:
                coords[str(i)] = c.to_json()
        out = {"coords": coords, "kind": kind, "q": qs.pop() if len(qs) == 1 else 1}
        if self.dual:
            out["dual"] = True
        return out

    @classmethod
    def from_json(cls, obj) -> "FinVec":
        q = int(obj.get("q", 1))
        kind = obj.get("kind", "rational")
        coords = {}
        for i, c in obj["coords"].items():
            if isinstance(c, dict) and "coeff" in c:
                coords[int(i)] = PthRootCoord(frac_from_json(c["coeff"]), frac_from_json(c["base"]), q)
            elif isinstance(c, dict) and "terms" in c:
                coords[int(i)] = Surd.from_json(c)
            elif kind == "proot" and isinstance(c, (list, tuple)) and len(c) == 3:
                coords[int(i)] = PthRootCoord(frac_from_json(c[0]), frac_from_json(c[1]), q)
            else:
                coords[int(i)] = frac_from_json(c)
        return cls(coords, bool(obj.get("dual", False)))

    def __repr__(self):
        tag = "FinVec*" if self.dual else "FinVec"
        return f"{tag}({ {i: str(c) for i, c in self.coords.items()} })"


def _mul(a, b):
    if isinstance(a, PthRootCoord) and isinstance(b, Fraction):
        return PthRootCoord(a.coeff * b, a.base, a.q)
    if isinstance(a, PthRootCoord) and isinstance(b, PthRootCoord) and a.q == b.q:
        return PthRootCoord(a.coeff * b.coeff, a.base * b.base, a.q)
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    if isinstance(a, Fraction) and isinstance(b, PthRootCoord):
        return _mul(b, a)
    return (to_surd(exact_value(a)) * exact_value(b)).simplify()


def _add(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    if isinstance(a, PthRootCoord) and isinstance(b, PthRootCoord) and a.q == b.q and a.base == b.base:
        return PthRootCoord(a.coeff + b.coeff, a.base, a.q)
    return (to_surd(exact_value(a)) + exact_value(b)).simplify()


def _abs(v: Exact) -> Exact:
    if isinstance(v, Fraction):
        return abs(v)
    return v if v.sign() >= 0 else -v


def _emax(a, b):
    """Exact maximum; ``None`` acts as minus infinity."""
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
    return (to_surd(a) + b).simplify()


def _emul(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return (to_surd(a) * b).simplify()


# ---------------------------------------------------------------------------
# norm values


@dataclass(frozen=True)
class NormValue:
    """Exact root value, or a certified enclosure (optionally backed by an exact surd)."""

    root_value: Optional[RootValue] = None
    interval: Optional[CertInterval] = None
    algebraic: Optional[Surd] = field(default=None, compare=False)

    @property
    def kind(self) -> str:
        return "exact" if self.root_value is not None else "enclosure"

    @property
    def is_exact(self) -> bool:
        return self.root_value is not None

    @classmethod
    def of(cls, v, exact_allowed: bool = True) -> "NormValue":
        """Wrap a nonnegative ``Fraction`` or ``Surd``."""
        if isinstance(v, Fraction):
            if exact_allowed:
                return cls(RootValue(v, 1))
            return cls(None, enclose(v, precision_cap()), Surd.rational(v))
        if isinstance(v, Surd):
            v = v.simplify()
            if isinstance(v, Fraction):
                return cls.of(v, exact_allowed)
            if exact_allowed and v.is_monomial():
                (k, c), = v.terms.items()
                if c > 0:
                    return cls(RootValue(c ** v.root * k, v.root))
            return cls(None, v.enclose(precision_cap()), v)
        if isinstance(v, RootValue):
            return cls(v)
        raise TypeError(f"cannot wrap {v!r}")

    @classmethod
    def bounds(cls, iv: CertInterval) -> "NormValue":
        return cls(None, iv, None)

    def exact(self) -> Exact:
        if self.root_value is not None:
            return exact_value(self.root_value)
        if self.algebraic is not None:
            return self.algebraic.simplify()
        raise ValueError("value only known up to an enclosure")

    def has_exact(self) -> bool:
        return self.root_value is not None or self.algebraic is not None

    def enclosure(self, bits: int | None = None) -> CertInterval:
        bits = bits or precision_cap()
        if self.root_value is not None:
            return enclose(self.root_value, bits)
        if self.algebraic is not None:
            return self.algebraic.enclose(bits)
        return self.interval

    @property
    def lo(self) -> Fraction:
        return self.enclosure().lo

    @property
    def hi(self) -> Fraction:
        return self.enclosure().hi

    def to_json(self) -> dict:
        if self.root_value is not None:
            return {"exact": self.root_value.to_json()}
        out = {"enclosure": self.enclosure().to_json()}
        if self.algebraic is not None:
            out["algebraic"] = self.algebraic.to_json()
        return out

    def __str__(self):
        if self.root_value is not None:
            return str(self.root_value)
        iv = self.enclosure(64)
        return f"[{float(iv.lo):.12g}, {float(iv.hi):.12g}]"


def certify_norm_le(lhs, rhs, factor=1) -> Verdict:
    """Three-valued verdict for ``lhs <= factor * rhs`` (norm values or exact numbers)."""
    factor = as_fraction(factor)
    a = lhs.root_value if isinstance(lhs, NormValue) else None
    b = rhs.root_value if isinstance(rhs, NormValue) else None
    if a is not None and b is not None:
        # exact comparison of powers
        L = a.root * b.root // _gcd(a.root, b.root)
        return Verdict.HOLDS if a.power(L) <= factor ** L * b.power(L) else Verdict.FAILS
    try:
        x = _exact_or_none(lhs)
        y = _exact_or_none(rhs)
        if x is not None and y is not None:
            return Verdict.HOLDS if compare(x, _emul(factor, y) if factor != 1 else y) <= 0 \
                else Verdict.FAILS
    except PrecisionExhausted:
        return Verdict.UNDECIDED
    ia = lhs.enclosure() if isinstance(lhs, NormValue) else enclose(lhs, precision_cap())
    ib = rhs.enclosure() if isinstance(rhs, NormValue) else enclose(rhs, precision_cap())
    if ia.hi <= factor * ib.lo:
        return Verdict.HOLDS
    if ia.lo > factor * ib.hi:
        return Verdict.FAILS
    return Verdict.UNDECIDED


def _exact_or_none(v):
    if isinstance(v, NormValue):
        return v.exact() if v.has_exact() else None
    if isinstance(v, CertInterval):
        return None
    return exact_value(v)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# the dynamic programme


def _prepare(params: NormParams, x: FinVec) -> tuple[list[int], list[Exact]]:
    idx = list(x.support)
    vals = []
    for c in x.coords.values():
        if params.family == "T":
            if isinstance(c, PthRootCoord) and c.q == params.q:
                vals.append(c.qth_power_abs())
            elif isinstance(c, Fraction):
                vals.append(abs(c) ** params.q)
            else:
                v = _abs(exact_value(c))
                vals.append(v ** params.q if isinstance(v, Fraction) else (v ** params.q).simplify())
        else:
            vals.append(_abs(exact_value(c)))
    return idx, vals


def _run_max(vals: list) -> list[list]:
    L = len(vals)
    out = [[None] * L for _ in range(L)]
    for a in range(L):
        m = None
        for b in range(a, L):
            m = _emax(m, vals[b])
            out[a][b] = m
    return out


def _dp(params: NormParams, idx: list[int], vals: list, prev=None):
    """Table ``N[a][b]`` of base norms of runs ``a..b``.

    With ``prev=None`` the implicit recursion is solved directly (pieces are
    strictly shorter runs).  Otherwise one level of the iteration is applied
    to the previous level's table ``prev``.
    """
    L = len(vals)
    if params.family == "T" and all(isinstance(v, Fraction) for v in vals):
        if prev is None:
            return _dp_t_rational(params, idx, vals)
    runmax = _run_max(vals)
    N = [[None] * L for _ in range(L)]
    G = [[None] * L for _ in range(L)]
    P: dict = {}
    nmin = 2  # one-piece families never beat the sup term
    src = N if prev is None else prev

    def piece(a, b, n):
        if n == 1:
            return src[a][b]
        return P[(a, b, n)]

    for length in range(1, L + 1):
        for a in range(L - length + 1):
            b = a + length - 1
            for n in range(2, length + 1):
                best = None
                for c in range(a, b - n + 2):
                    best = _emax(best, _eadd(src[a][c], piece(c + 1, b, n - 1)))
                P[(a, b, n)] = best
            F = None
            top = min(length, params.max_pieces(idx[a]))
            for n in range(nmin, top + 1):
                F = _emax(F, _emul(params.weight(n), P[(a, b, n)]))
            G[a][b] = _emax(F, G[a + 1][b] if a < b else None)
            base = runmax[a][b] if prev is None else prev[a][b]
            N[a][b] = _emax(base, G[a][b])
    return N


def _dp_t_rational(params: NormParams, idx: list[int], vals: list[Fraction]):
    """Rational T-family table.

    With a constant weight, splitting a piece never lowers a sum (the norm is
    subadditive), so the best family from a given start uses the largest
    admissible number of pieces and only those piece sums are needed.
    """
    L = len(vals)
    t = params.base_theta
    N = [[None] * L for _ in range(L)]
    prefix = [Fraction(0)]
    for v in vals:
        prefix.append(prefix[-1] + v)
    P: dict = {}

    def piece_sum(a: int, b: int, n: int) -> Fraction:
        if n == 1:
            return N[a][b]
        if n == b - a + 1:
            return prefix[b + 1] - prefix[a]
        key = (a, b, n)
        hit = P.get(key)
        if hit is None:
            hit = None
            Na = N[a]
            for c in range(a, b - n + 2):
                v = Na[c] + piece_sum(c + 1, b, n - 1)
                if hit is None or v > hit:
                    hit = v
            P[key] = hit
        return hit

    for length in range(1, L + 1):
        for a in range(L - length + 1):
            b = a + length - 1
            m = vals[a]
            for i in range(a + 1, b + 1):
                if vals[i] > m:
                    m = vals[i]
            best = m
            for a2 in range(a, b):  # families need at least two points
                n = min(b - a2 + 1, params.max_pieces(idx[a2]))
                if n >= 2:
                    v = t * piece_sum(a2, b, n)
                    if v > best:
                        best = v
            N[a][b] = best
    return N


def _finish(params: NormParams, base_value) -> NormValue:
    if params.family == "T":
        if isinstance(base_value, Fraction):
            return NormValue(RootValue(base_value, params.q))
        r = base_value.nth_root(params.q) if params.q > 1 else base_value
        if r is not None:
            return NormValue.of(r, exact_allowed=False)
        iv = base_value.enclose(precision_cap()).qroot(params.q)
        return NormValue.bounds(iv)
    return NormValue.of(base_value, exact_allowed=(params.q == 1))


def norm(params: NormParams, x: FinVec, cap: int = DEFAULT_SUPPORT_CAP) -> NormValue:
    """Norm of ``x`` under ``params``."""
    if len(x) > cap:
        raise SupportCapExceeded(f"support size {len(x)} exceeds cap {cap}")
    if not x:
        return NormValue(RootValue(0, params.q if params.family == "T" else 1))
    idx, vals = _prepare(params, x)
    N = _dp(params, idx, vals)
    return _finish(params, N[0][-1])


def norm_base_value(params: NormParams, x: FinVec, cap: int = DEFAULT_SUPPORT_CAP) -> Exact:
    """Exact value before the final root: ``||x||^q`` for T, ``||x||`` for U."""
    if len(x) > cap:
        raise SupportCapExceeded(f"support size {len(x)} exceeds cap {cap}")
    if not x:
        return Fraction(0)
    idx, vals = _prepare(params, x)
    return _dp(params, idx, vals)[0][-1]


def norm_levels(params: NormParams, x: FinVec, cap: int = DEFAULT_SUPPORT_CAP) -> list:
    """Base values of the level iteration, from level 0 until it stabilises.

    Raises ``AssertionError`` if a level decreases or the fixpoint is not
    reached by level ``|supp x| + 1``.
    """
    if len(x) > cap:
        raise SupportCapExceeded(f"support size {len(x)} exceeds cap {cap}")
    if not x:
        return [Fraction(0)]
    idx, vals = _prepare(params, x)
    table = _run_max(vals)
    out = [table[0][-1]]
    L = len(vals)
    for level in range(1, L + 2):
        nxt = _dp(params, idx, vals, prev=table)
        for a in range(L):
            for b in range(a, L):
                assert compare(nxt[a][b], table[a][b]) >= 0, "level iteration decreased"
        stable = all(compare(nxt[a][b], table[a][b]) == 0 for a in range(L) for b in range(a, L))
        table = nxt
        if stable:
            return out
        out.append(table[0][-1])
    raise AssertionError(f"no fixpoint by level {L + 1}")


def norm_at_level(params: NormParams, x: FinVec, level: int) -> NormValue:
    """Value of the ``level``-th iterate of the recursion."""
    levels = norm_levels(params, x)
    return _finish(params, levels[min(level, len(levels) - 1)])


# ---------------------------------------------------------------------------
# interval families and the brute-force oracle


def is_admissible(params: NormParams, family: Sequence[tuple[int, int]]) -> bool:
    n = len(family)
    if n < params.min_pieces():
        return False
    for lo, hi in family:
        if lo > hi:
            return False
    if any(family[i][1] >= family[i + 1][0] for i in range(n - 1)):
        return False
    return params.m(n) <= family[0][0]


def admissible_families(params: NormParams, hull: tuple[int, int], n: int,
                        support: Sequence[int] | None = None) -> Iterator[tuple[tuple[int, int], ...]]:
    """Families of ``n`` disjoint increasing intervals in ``hull`` with ``m_n <= min I_1``.

    Endpoints are support points (all integers of the hull when ``support`` is None).
    """
    lo, hi = hull
    pts = sorted(p for p in (support if support is not None else range(lo, hi + 1))
                 if lo <= p <= hi)
    if n < params.min_pieces() or n < 1:
        return
    need = params.m(n)
    L = len(pts)

    def rec(start: int, left: int, acc):
        if left == 0:
            yield tuple(acc)
            return
        for a in range(start, L - left + 1):
            if not acc and pts[a] < need:
                continue
            for b in range(a, L - left + 1):
                acc.append((pts[a], pts[b]))
                yield from rec(b + 1, left - 1, acc)
                acc.pop()

    yield from rec(0, n, [])


def norm_bruteforce(params: NormParams, x: FinVec) -> NormValue:
    """Independent oracle: literal level iteration over every admissible family.

    Families may leave gaps and may use a single interval, so the search
    space is a strict superset of the one used by :func:`norm`.
    """
    if len(x) > BRUTEFORCE_CAP:
        raise SupportCapExceeded(f"brute force supports at most {BRUTEFORCE_CAP} points")
    if not x:
        return NormValue(RootValue(0, params.q if params.family == "T" else 1))
    idx, vals = _prepare(params, x)
    L = len(idx)
    pos = {p: i for i, p in enumerate(idx)}
    runs = [(a, b) for a in range(L) for b in range(a, L)]
    level = {}
    for a, b in runs:
        m = None
        for i in range(a, b + 1):
            m = _emax(m, vals[i])
        level[(a, b)] = m
    fams = {}
    for a, b in runs:
        lst = []
        for n in range(params.min_pieces(), b - a + 2):
            w = params.weight(n)
            for fam in admissible_families(params, (idx[a], idx[b]), n, idx):
                lst.append((w, [(pos[u], pos[v]) for u, v in fam]))
        fams[(a, b)] = lst
    for step in range(1, L + 2):
        nxt = {}
        for r in runs:
            best = level[r]
            for w, fam in fams[r]:
                s = Fraction(0)
                for piece in fam:
                    s = _eadd(s, level[piece])
                best = _emax(best, _emul(w, s))
            nxt[r] = best
        stable = all(compare(nxt[r], level[r]) == 0 for r in runs)
        level = nxt
        if stable:
            break
    else:
        raise AssertionError("brute-force iteration did not stabilise")
    return _finish(params, level[(0, L - 1)])


# ---------------------------------------------------------------------------
# duality


def pair(f: FinVec, x: FinVec) -> Exact:
    """Exact ``sum_i f_i x_i``."""
    total: Exact = Fraction(0)
    small, big = (f, x) if len(f) <= len(x) else (x, f)
    for i, c in small.coords.items():
        d = big.coords.get(i)
        if d is None:
            continue
        total = _eadd(total, exact_value(_mul(c, d)))
    return total


def _ratio(num: Exact, den: NormValue) -> Exact:
    """Exact ``num / den`` when possible, else a certified rational lower bound."""
    num = _abs(num)
    if den.root_value is not None:
        rv = den.root_value
        if rv.radicand == 0:
            return Fraction(0)
        if rv.root == 1:
            d = rv.radicand
            return num / d if isinstance(num, Fraction) else (num / d).simplify()
        return (to_surd(num) / Surd.root_of(rv.radicand, rv.root)).simplify()
    if den.algebraic is not None and den.algebraic.is_monomial():
        return (to_surd(num) / den.algebraic).simplify()
    lo = enclose(num, precision_cap()).lo
    hi = den.enclosure().hi
    return max(Fraction(0), lo / hi) if hi > 0 else Fraction(0)


def _holder_vector(params: NormParams, f: FinVec) -> FinVec:
    # sign(f_i) |f_i|^(1/(q-1)), rational when the coordinates are
    coords = {}
    for i, c in f.coords.items():
        v = exact_value(c)
        s = 1 if (v > 0 if isinstance(v, Fraction) else v.sign() > 0) else -1
        a = _abs(v)
        if params.q == 2:
            coords[i] = a * s if isinstance(a, Fraction) else (a * s).simplify()
        elif isinstance(a, Fraction):
            coords[i] = (Surd.root_of(a, params.q - 1) * s).simplify()
        else:
            coords[i] = Fraction(s)
    return FinVec(coords)


def _sign(c) -> int:
    v = exact_value(c)
    if isinstance(v, Fraction):
        return (v > 0) - (v < 0)
    return v.sign()


def weighted_pattern(f: FinVec, weights: Sequence[Fraction], q: int) -> FinVec:
    """``sum sign(f_i) w_i^(1/q) e_i`` over the support of ``f``."""
    coords = {}
    for (i, c), w in zip(f.coords.items(), weights):
        w = as_fraction(w)
        val = PthRootCoord(w, 1 / w, q) if q > 1 else w
        coords[i] = _mul(val, Fraction(_sign(c)))
    return FinVec(coords)


def dual_lower_bound(params: NormParams, f: FinVec,
                     patterns: Iterable[Sequence[Fraction]] = ()) -> NormValue:
    """Certified lower bound for the dual norm of ``f`` by pairing with test vectors.

    Test vectors: basis vectors on the support, the sign pattern of ``f``, the
    Hoelder-matched vector, uniform averages, and any supplied weight patterns
    (applied as ``w_i^(1/q)`` on the support).
    """
    if not f:
        return NormValue(RootValue(0, 1))
    cands = [FinVec.basis(i) for i in f.support]
    cands.append(FinVec({i: Fraction(_sign(c)) for i, c in f.coords.items()}))
    if params.q > 1:
        cands.append(_holder_vector(params, f))
        n = len(f)
        cands.append(weighted_pattern(f, [Fraction(1, n)] * n, params.q))
    for w in patterns:
        cands.append(weighted_pattern(f, w, params.q))
    best = None
    for x in cands:
        best = _emax(best, _ratio(pair(f, x), norm(params, x)))
    return NormValue.of(best)


# ---------------------------------------------------------------------------
# norming sets


def _lp_boundary_coeffs(n: int, q: int, rng: random.Random) -> list[Fraction]:
    """Rational (a_i) with sum |a_i|^p <= 1, where p is conjugate to q.

    For q = 1 (p infinite) these are sign vectors.  Otherwise
    ``a_i = +-s_i^(q-1)`` with ``sum s_i^q <= 1``, so ``|a_i|^p = s_i^q`` is rational.
    """
    signs = [rng.choice((-1, 1)) for _ in range(n)]
    if q == 1:
        return [Fraction(s) for s in signs]
    mode = rng.random()
    if mode < 0.3:
        s = [Fraction(0)] * n
        s[rng.randrange(n)] = Fraction(1)
    elif q == 2 and n >= 2 and mode < 0.6:
        # Pythagorean point on the unit circle in two coordinates
        u, v = rng.randint(1, 9), rng.randint(1, 9)
        r2 = u * u + v * v
        s = [Fraction(0)] * n
        i, j = rng.sample(range(n), 2)
        s[i] = Fraction(u * u - v * v, r2)
        s[j] = Fraction(2 * u * v, r2)
        s = [abs(t) for t in s]
    else:
        raw = [Fraction(rng.randint(0, 8), 8) for _ in range(n)]
        tot = sum(t ** q for t in raw)
        if tot == 0:
            raw[0] = Fraction(1)
            tot = Fraction(1)
        # scale down by a power of two until inside the ball
        scale = Fraction(1)
        while tot * scale ** q > 1:
            scale /= 2
        s = [t * scale for t in raw]
    assert sum(t ** q for t in s) <= 1
    return [sg * t ** (q - 1) for sg, t in zip(signs, s)]


def _norming_element(params: NormParams, level: int, lo: int, hi: int,
                     rng: random.Random, first: bool = True) -> Optional[FinVec]:
    if lo > hi:
        return None
    if level == 0 or rng.random() < 0.2:
        i = rng.randint(lo, hi)
        lam = Fraction(rng.choice((1, -1))) * rng.choice((Fraction(1), Fraction(1), Fraction(1, 2)))
        return FinVec({i: lam}, dual=True)
    # choose n and a start with m_n <= start
    nmin = params.min_pieces()
    for _ in range(8):
        n = rng.randint(nmin, max(nmin, min(5, hi - lo + 1)))
        start = max(lo, params.m(n))
        if start + n - 1 <= hi:
            break
    else:
        return _norming_element(params, 0, lo, hi, rng)
    # split [start, hi] into n consecutive windows
    cuts = sorted(rng.sample(range(start + 1, hi + 1), n - 1)) if n > 1 else []
    bounds = [start] + cuts + [hi + 1]
    parts = []
    for j in range(n):
        g = _norming_element(params, level - 1, bounds[j], bounds[j + 1] - 1, rng, False)
        if g is None:
            return _norming_element(params, 0, lo, hi, rng)
        parts.append(g)
    if params.family == "T":
        coeffs = _lp_boundary_coeffs(n, params.q, rng)
        out = FinVec({}, dual=True)
        for a, g in zip(coeffs, parts):
            out = out + g.scale(params.theta * a)
        return out if out else parts[0]
    # L family: theta * n^(-1/p) * sum(+-f_i)
    w = PthRootCoord(params.theta, Fraction(1, n), params.q) if params.q > 1 else params.theta
    out = FinVec({}, dual=True)
    for g in parts:
        sg = Fraction(rng.choice((-1, 1)))
        out = out + FinVec({i: _mul(_mul(c, sg), w) for i, c in g.coords.items()}, dual=True)
    return out if out else parts[0]


def norming_sample(params: NormParams, level: int, support_bound: int, budget: int,
                   seed=0) -> list[FinVec]:
    """Pseudorandom elements of the norming set at ``level``, supported in ``[1, support_bound]``."""
    if level > 4:
        raise ValueError("level <= 4")
    rng = random.Random(f"norming:{seed}")
    out = []
    for _ in range(budget):
        out.append(_norming_element(params, level, 1, support_bound, rng))
    return out


@dataclass(frozen=True)
class Violation:
    x: FinVec
    pairing: object
    norm: NormValue

    def __bool__(self):
        return True


@dataclass(frozen=True)
class NoViolationFound:
    trials: int
    undecided: int = 0

    def __bool__(self):
        return False


def _falsifier_candidates(params: NormParams, f: FinVec, trials: int, rng: random.Random):
    yield FinVec({i: Fraction(_sign(c)) for i, c in f.coords.items()})
    if params.q > 1:
        # rational surrogate of the Hoelder-matched vector
        coords = {}
        for i, c in f.coords.items():
            v = enclose(exact_value(c), 32)
            a = abs(v.lo + v.hi) / 2
            coords[i] = (a ** (params.q - 1)) * _sign(c)
        yield FinVec(coords)
    for i in f.support[:2]:
        yield FinVec.basis(i)
    supp = f.support
    for _ in range(max(0, trials - 3)):
        coords = {}
        for i in supp:
            if rng.random() < 0.8:
                coords[i] = Fraction(rng.randint(-4, 4), 4)
        yield FinVec(coords)


def ball_membership_test(params: NormParams, f: FinVec, trials: int = 4, seed=0):
    """Search for ``x`` with ``|f(x)| > ||x||``; a falsifier, not a membership decision."""
    rng = random.Random(f"ball:{seed}")
    undecided = 0
    count = 0
    for x in _falsifier_candidates(params, f, trials, rng):
        if not x:
            continue
        count += 1
        v = _abs(pair(f, x))
        nv = norm(params, x)
        verdict = certify_norm_le(v, nv)
        if verdict is Verdict.FAILS:
            return Violation(x, v, nv)
        if verdict is Verdict.UNDECIDED:
            undecided += 1
    return NoViolationFound(count, undecided)
