"""Exact scalars and certified dyadic intervals.

Three kinds of exact value appear in the toolkit:

* ``Fraction`` for rationals (coefficients, thresholds, base-norm values),
* ``RootValue`` for ``radicand ** (1/root)``, the natural shape of a
  q-convexified norm,
* ``Surd`` for finite Q-linear combinations of real radicals
  ``sum c_k * k ** (1/R)``.  Products of radicals with a common index stay
  inside this class, which is what the U-family recursion and the
  ``l_2``-based block norms need.

Equality of surds is decided structurally: after canonicalisation the
radicals ``k ** (1/R)`` with pairwise irrational ratios are linearly
independent over Q, so a surd is zero exactly when every coefficient is.
Signs of nonzero surds are found with ``CertInterval`` enclosures at
increasing precision.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Union

import gmpy2

__all__ = [
    "Fraction",
    "RootValue",
    "PthRootCoord",
    "CertInterval",
    "Surd",
    "Ordering",
    "Verdict",
    "PrecisionExhausted",
    "precision_cap",
    "exact_compare",
    "enclose",
    "interval_compare",
    "as_fraction",
    "to_surd",
    "compare",
    "certify_le",
    "certify_lt",
    "frac_to_json",
    "frac_from_json",
    "parse_fraction",
]

DEFAULT_PRECISION_CAP = 256
_START_BITS = 48


def precision_cap() -> int:
    """Bit cap for interval refinement; ``ASLAB_PRECISION_BITS`` overrides."""
    env = os.environ.get("ASLAB_PRECISION_BITS")
    if env:
        cap = int(env)
        if cap < 1:
            raise ValueError("ASLAB_PRECISION_BITS must be positive")
        return cap
    return DEFAULT_PRECISION_CAP


class PrecisionExhausted(ArithmeticError):
    """Raised when interval refinement hits the precision cap undecided."""


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    UNDECIDED = None


class Verdict(str, enum.Enum):
    HOLDS = "pass-certified"
    FAILS = "fail-certified"
    UNDECIDED = "undecided"


Scalar = Union[int, Fraction, "Surd", "RootValue", "PthRootCoord"]


# ---------------------------------------------------------------------------
# rational helpers


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def parse_fraction(text: str) -> Fraction:
    """Parse ``"3/4"``, ``"2"`` or ``"0.125"`` exactly."""
    return Fraction(text.strip())


def frac_to_json(x) -> list[str]:
    x = as_fraction(x)
    return [str(x.numerator), str(x.denominator)]


def frac_from_json(obj) -> Fraction:
    if isinstance(obj, (list, tuple)):
        num, den = obj
        return Fraction(int(num), int(den))
    if isinstance(obj, (int, str)):
        return as_fraction(obj)
    raise ValueError(f"malformed rational: {obj!r}")


def _floor_log2(x: Fraction) -> int:
    """floor(log2(x)) for x > 0."""
    n, d = x.numerator, x.denominator
    e = n.bit_length() - d.bit_length()
    if e >= 0:
        if n < (d << e):
            e -= 1
    else:
        if (n << -e) < d:
            e -= 1
    return e


def _iroot(n: int, k: int) -> tuple[int, bool]:
    if n < 0:
        raise ValueError("negative radicand")
    if k == 1:
        return n, True
    r, exact = gmpy2.iroot(n, k)
    return int(r), bool(exact)


def _quantum_exp(magnitude_log2: int, bits: int) -> int:
    # grid spacing 2**(E - bits) with E = floor(log2(max(1, |x|)))
    return max(0, magnitude_log2) - bits


def _floor_to_grid(x: Fraction, e: int) -> Fraction:
    # floor(x / 2**e) * 2**e
    n, d = x.numerator, x.denominator
    if e >= 0:
        return Fraction((n // (d << e)) << e)
    return Fraction((n << -e) // d, 1 << -e)


def _round_down(x: Fraction, bits: int) -> Fraction:
    if x == 0:
        return x
    e = _quantum_exp(_floor_log2(abs(x)), bits)
    return _floor_to_grid(x, e)


def _round_up(x: Fraction, bits: int) -> Fraction:
    return -_round_down(-x, bits)


# ---------------------------------------------------------------------------
# certified intervals


@dataclass(frozen=True)
class CertInterval:
    """Closed interval ``[lo, hi]`` with dyadic endpoints."""

    lo: Fraction
    hi: Fraction
    bits: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x, bits: int) -> "CertInterval":
        x = as_fraction(x)
        return cls(_round_down(x, bits), _round_up(x, bits), bits)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= as_fraction(x) <= self.hi

    def subset_of(self, other: "CertInterval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: "CertInterval") -> "CertInterval":
        return CertInterval(max(self.lo, other.lo), min(self.hi, other.hi),
                            max(self.bits, other.bits))

    def _b(self, other=None) -> int:
        if other is None:
            return self.bits
        return min(self.bits, other.bits)

    def __add__(self, other):
        if not isinstance(other, CertInterval):
            other = CertInterval.point(other, self.bits)
        b = self._b(other)
        return CertInterval(_round_down(self.lo + other.lo, b),
                            _round_up(self.hi + other.hi, b), b)

    __radd__ = __add__

    def __neg__(self):
        return CertInterval(-self.hi, -self.lo, self.bits)

    def __sub__(self, other):
        if not isinstance(other, CertInterval):
            other = CertInterval.point(other, self.bits)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, CertInterval):
            c = as_fraction(other)
            if c >= 0:
                return self.scale(c)
            return (-self).scale(-c)
        b = self._b(other)
        prods = [self.lo * other.lo, self.lo * other.hi,
                 self.hi * other.lo, self.hi * other.hi]
        return CertInterval(_round_down(min(prods), b), _round_up(max(prods), b), b)

    __rmul__ = __mul__

    def scale(self, c) -> "CertInterval":
        """Multiply by a nonnegative rational."""
        c = as_fraction(c)
        if c < 0:
            raise ValueError("scale expects a nonnegative factor")
        return CertInterval(_round_down(self.lo * c, self.bits),
                            _round_up(self.hi * c, self.bits), self.bits)

    def max(self, other: "CertInterval") -> "CertInterval":
        return CertInterval(max(self.lo, other.lo), max(self.hi, other.hi),
                            self._b(other))

    def min(self, other: "CertInterval") -> "CertInterval":
        return CertInterval(min(self.lo, other.lo), min(self.hi, other.hi),
                            self._b(other))

    def qpow(self, q: int) -> "CertInterval":
        if self.lo < 0:
            raise ValueError("qpow is defined for nonnegative intervals")
        return CertInterval(_round_down(self.lo ** q, self.bits),
                            _round_up(self.hi ** q, self.bits), self.bits)

    def qroot(self, q: int) -> "CertInterval":
        if self.lo < 0:
            raise ValueError("qroot is defined for nonnegative intervals")
        lo = _root_floor(self.lo, q, self.bits)
        hi = _root_ceil(self.hi, q, self.bits)
        return CertInterval(lo, hi, self.bits)

    def to_json(self) -> dict:
        return {"lo": _dyadic_str(self.lo), "hi": _dyadic_str(self.hi), "bits": self.bits}

    @classmethod
    def from_json(cls, obj) -> "CertInterval":
        return cls(_dyadic_parse(obj["lo"]), _dyadic_parse(obj["hi"]), int(obj["bits"]))


def _dyadic_str(x: Fraction) -> str:
    # "m*2^e" keeps dyadic endpoints exact in text
    if x == 0:
        return "0"
    d = x.denominator
    e = d.bit_length() - 1
    if d != 1 << e:
        return f"{x.numerator}/{d}"
    return f"{x.numerator}*2^-{e}" if e else str(x.numerator)


def _dyadic_parse(text: str) -> Fraction:
    if "*2^-" in text:
        m, e = text.split("*2^-")
        return Fraction(int(m), 1 << int(e))
    return Fraction(text)


def _root_floor(x: Fraction, q: int, bits: int) -> Fraction:
    """Largest grid point <= x**(1/q); grid spacing 2**(E-bits)."""
    if x == 0:
        return Fraction(0)
    lg = _floor_log2(x)
    mag = lg // q if lg >= 0 else -1
    e = _quantum_exp(mag, bits)
    # floor(x**(1/q) / 2**e) = iroot(floor(x / 2**(e*q)), q)
    n, d = x.numerator, x.denominator
    s = -e * q
    if s >= 0:
        y = (n << s) // d
    else:
        y = n // (d << -s)
    r, _ = _iroot(y, q)
    return Fraction(r) * Fraction(2) ** e


def _root_ceil(x: Fraction, q: int, bits: int) -> Fraction:
    if x == 0:
        return Fraction(0)
    lo = _root_floor(x, q, bits)
    if lo ** q == x:
        return lo
    lg = _floor_log2(x)
    mag = lg // q if lg >= 0 else -1
    e = _quantum_exp(mag, bits)
    return lo + Fraction(2) ** e


# ---------------------------------------------------------------------------
# root values


@dataclass(frozen=True)
class RootValue:
    """The value ``radicand ** (1/root)``."""

    radicand: Fraction
    root: int = 1

    def __post_init__(self):
        object.__setattr__(self, "radicand", as_fraction(self.radicand))
        if self.radicand < 0:
            raise ValueError("radicand must be nonnegative")
        if self.root < 1:
            raise ValueError("root must be a positive integer")

    def power(self, k: int) -> Fraction:
        """``value ** k`` for k a multiple of ``root``."""
        if k % self.root:
            raise ValueError("power must be a multiple of the root")
        return self.radicand ** (k // self.root)

    def as_surd(self) -> "Surd":
        return Surd.root_of(self.radicand, self.root)

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def to_json(self) -> dict:
        return {"radicand": frac_to_json(self.radicand), "root": self.root}

    @classmethod
    def from_json(cls, obj) -> "RootValue":
        return cls(frac_from_json(obj["radicand"]), int(obj["root"]))

    def __str__(self):
        if self.root == 1:
            return str(self.radicand)
        return f"({self.radicand})^(1/{self.root})"


@dataclass(frozen=True)
class PthRootCoord:
    """``coeff * base ** ((q-1)/q)``, i.e. ``coeff * base ** (1/p)``."""

    coeff: Fraction
    base: Fraction
    q: int

    def __post_init__(self):
        object.__setattr__(self, "coeff", as_fraction(self.coeff))
        object.__setattr__(self, "base", as_fraction(self.base))
        if self.base < 0:
            raise ValueError("base must be nonnegative")
        if self.q < 1:
            raise ValueError("q must be a positive integer")

    def qth_power_abs(self) -> Fraction:
        """``|value| ** q``, always rational."""
        return abs(self.coeff) ** self.q * self.base ** (self.q - 1)

    def as_surd(self) -> "Surd":
        if self.q == 1 or self.coeff == 0:
            return Surd.rational(self.coeff)
        return Surd.root_of(self.base ** (self.q - 1), self.q) * self.coeff

    def __str__(self):
        return f"{self.coeff}*({self.base})^({self.q - 1}/{self.q})"


def exact_compare(a: RootValue, b: RootValue) -> Ordering:
    """Compare two root values by raising both to ``lcm(root_a, root_b)``."""
    m = a.root * b.root // gcd(a.root, b.root)
    pa, pb = a.power(m), b.power(m)
    if pa < pb:
        return Ordering.LESS
    if pa > pb:
        return Ordering.GREATER
    return Ordering.EQUAL


def enclose(v, precision: int) -> CertInterval:
    """Certified enclosure of a root value, p-th-root coordinate, surd or rational."""
    if precision < 1:
        raise ValueError("precision must be >= 1")
    if isinstance(v, RootValue):
        return CertInterval(_root_floor(v.radicand, v.root, precision),
                            _root_ceil(v.radicand, v.root, precision), precision)
    if isinstance(v, PthRootCoord):
        r = RootValue(v.qth_power_abs(), v.q)
        iv = enclose(r, precision)
        return -iv if v.coeff < 0 else iv
    if isinstance(v, Surd):
        return v.enclose(precision)
    if isinstance(v, CertInterval):
        return v
    return CertInterval.point(as_fraction(v), precision)


def interval_compare(a: CertInterval, b: CertInterval) -> Ordering:
    if a.hi < b.lo:
        return Ordering.LESS
    if a.lo > b.hi:
        return Ordering.GREATER
    return Ordering.UNDECIDED


# ---------------------------------------------------------------------------
# surds

_SMALL_PRIMES = [p for p in range(2, 1024) if all(p % d for d in range(2, int(p ** 0.5) + 1))]


@lru_cache(maxsize=1 << 16)
def _reduce_key(n: int, r: int) -> tuple[int, int]:
    """Split ``n = s**r * k`` with k free of small-prime r-th powers."""
    if n == 0:
        return 0, 1
    if r == 1:
        return n, 1
    s, k = 1, 1
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            s *= p ** (e // r)
            k *= p ** (e % r)
    if n > 1:
        # cofactor without small primes: its prime factors exceed 1024, so
        # it is a perfect j-th power for at most j < bit_length / 10
        for j in range(n.bit_length() // 10 + 1, 1, -1):
            m, exact = _iroot(n, j)
            if exact:
                s *= m ** (j // r)
                n = m ** (j % r)
                break
        k *= n
    return s, k


def _has_large_cofactor(k: int) -> bool:
    for p in _SMALL_PRIMES:
        while k % p == 0:
            k //= p
    return k > 1 and k >= 1024 * 1024


@lru_cache(maxsize=1 << 14)
def _radical_enclosure(k: int, r: int, bits: int) -> CertInterval:
    return enclose(RootValue(Fraction(k), r), bits)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class Surd:
    """Exact real ``sum_k c_k * k**(1/root)`` with integer keys ``k >= 1``."""

    __slots__ = ("root", "terms", "_hash")

    def __init__(self, root: int, terms: dict):
        self.root = root
        self.terms = terms  # key -> nonzero Fraction; never mutated
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def rational(cls, x) -> "Surd":
        x = as_fraction(x)
        return cls(1, {1: x} if x else {})

    @classmethod
    def root_of(cls, a, r: int) -> "Surd":
        """``a ** (1/r)`` for rational ``a >= 0``."""
        a = as_fraction(a)
        if a < 0:
            raise ValueError("negative radicand")
        if a == 0:
            return cls(r, {})
        n, d = a.numerator, a.denominator
        # (n/d)**(1/r) = (n * d**(r-1))**(1/r) / d
        s, k = _reduce_key(n * d ** (r - 1), r)
        return cls._build(r, [(k, Fraction(s, d))])

    @classmethod
    def _build(cls, r: int, pairs: Iterable[tuple[int, Fraction]]) -> "Surd":
        terms: dict = {}
        for k, c in pairs:
            if c:
                terms[k] = terms.get(k, 0) + c
        terms = {k: c for k, c in terms.items() if c}
        if len(terms) > 1:
            terms = cls._merge_proportional(r, terms)
        if r > 1 and set(terms) <= {1}:
            r = 1
        return cls(r, terms)

    @staticmethod
    def _merge_proportional(r: int, terms: dict) -> dict:
        big = [k for k in terms if _has_large_cofactor(k)]
        if len(big) < 2:
            return terms
        terms = dict(terms)
        for i, k1 in enumerate(big):
            if k1 not in terms:
                continue
            for k2 in big[i + 1:]:
                if k2 not in terms:
                    continue
                t, exact = _iroot(k1 * k2 ** (r - 1), r)
                if exact:
                    # k1**(1/r) = t / k2 * k2**(1/r)
                    terms[k2] = terms[k2] + terms.pop(k1) * Fraction(t, k2)
                    if not terms[k2]:
                        del terms[k2]
                    break
        return terms

    def lift(self, r: int) -> "Surd":
        """Same value written with root index ``r`` (a multiple of ``self.root``)."""
        if r == self.root:
            return self
        if r % self.root:
            raise ValueError("can only lift to a multiple of the root")
        t = r // self.root
        pairs = []
        for k, c in self.terms.items():
            s, kk = _reduce_key(k ** t, r)
            pairs.append((kk, c * s))
        out = Surd._build(r, pairs)
        if out.root != r:
            out = Surd(r, dict(out.terms)) if out.terms else Surd(r, {})
        return out

    @staticmethod
    def _common(a: "Surd", b: "Surd") -> tuple["Surd", "Surd", int]:
        if a.root == b.root:
            return a, b, a.root
        r = _lcm(a.root, b.root)
        return a.lift(r), b.lift(r), r

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return set(self.terms) <= {1}

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("surd is irrational")
        return self.terms.get(1, Fraction(0))

    def simplify(self):
        """Return a ``Fraction`` when the value is rational, else ``self``."""
        return self.as_fraction() if self.is_rational() else self

    def is_monomial(self) -> bool:
        return len(self.terms) <= 1

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = to_surd(other)
        a, b, r = Surd._common(self, other)
        if not b.terms:
            return a
        if not a.terms:
            return b
        return Surd._build(r, list(a.terms.items()) + list(b.terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return Surd(self.root, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-to_surd(other))

    def __rsub__(self, other):
        return to_surd(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Surd(self.root, {})
            return Surd(self.root, {k: c * other for k, c in self.terms.items()})
        other = to_surd(other)
        a, b, r = Surd._common(self, other)
        pairs = []
        for k1, c1 in a.terms.items():
            for k2, c2 in b.terms.items():
                if k1 == 1 or k2 == 1:
                    pairs.append((k1 * k2, c1 * c2))
                else:
                    s, k = _reduce_key(k1 * k2, r)
                    pairs.append((k, c1 * c2 * s))
        return Surd._build(r, pairs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        other = to_surd(other)
        if not other.is_monomial() or other.is_zero():
            raise ArithmeticError("division only by a nonzero monomial surd")
        (k, c), = other.terms.items()
        r = other.root
        # 1 / (c k**(1/r)) = k**((r-1)/r) / (c k)
        inv = Surd.root_of(Fraction(k) ** (r - 1), r) * (1 / (c * k))
        return self * inv

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers unsupported")
        out = Surd.rational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def nth_root(self, q: int):
        """Exact ``q``-th root of a nonnegative monomial, else ``None``."""
        if not self.is_monomial():
            return None
        if not self.terms:
            return Surd(self.root * q, {})
        (k, c), = self.terms.items()
        if c < 0:
            raise ValueError("root of a negative value")
        # (c * k**(1/r)) ** (1/q) = (c**r * k) ** (1/(r q))
        return Surd.root_of(c ** self.root * k, self.root * q)

    # ordering ---------------------------------------------------------
    def enclose(self, bits: int) -> CertInterval:
        acc = CertInterval(Fraction(0), Fraction(0), bits)
        for k, c in self.terms.items():
            if k == 1:
                acc = acc + CertInterval.point(c, bits)
            else:
                acc = acc + _radical_enclosure(k, self.root, bits + 2) * c
        return acc

    def sign(self) -> int:
        if not self.terms:
            return 0
        signs = {c > 0 for c in self.terms.values()}
        if len(signs) == 1:
            return 1 if signs.pop() else -1
        bits = _START_BITS
        cap = precision_cap()
        while True:
            b = min(bits, cap)
            iv = self.enclose(b)
            if iv.lo > 0:
                return 1
            if iv.hi < 0:
                return -1
            if b >= cap:
                raise PrecisionExhausted(f"sign undecided at {cap} bits")
            bits *= 2

    def _cmp(self, other) -> int:
        return (self - to_surd(other)).sign()

    def __eq__(self, other):
        try:
            o = to_surd(other)
        except TypeError:
            return NotImplemented
        return (self - o).is_zero()

    def __hash__(self):
        # term count and rational part are invariant under lifting
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.as_fraction())
            else:
                self._hash = hash(("surd", len(self.terms), self.terms.get(1, 0)))
        return self._hash

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __repr__(self):
        if not self.terms:
            return "Surd(0)"
        parts = []
        for k, c in sorted(self.terms.items()):
            parts.append(str(c) if k == 1 else f"{c}*{k}^(1/{self.root})")
        return "Surd(" + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        return {"root": self.root,
                "terms": [[str(k), frac_to_json(c)] for k, c in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, obj) -> "Surd":
        r = int(obj["root"])
        return cls._build(r, [(int(k), frac_from_json(c)) for k, c in obj["terms"]])


def to_surd(x) -> Surd:
    if isinstance(x, Surd):
        return x
    if isinstance(x, (int, Fraction)):
        return Surd.rational(x)
    if isinstance(x, (RootValue, PthRootCoord)):
        return x.as_surd()
    if hasattr(x, "as_surd"):
        return x.as_surd()
    raise TypeError(f"cannot convert {type(x).__name__} to an exact value")


def compare(a, b) -> int:
    """Exact sign of ``a - b``; raises ``PrecisionExhausted`` at the cap."""
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return (a > b) - (a < b)
    if isinstance(a, RootValue) and isinstance(b, RootValue):
        return exact_compare(a, b).value
    if isinstance(a, RootValue) and isinstance(b, (int, Fraction)) and b >= 0:
        return exact_compare(a, RootValue(b, 1)).value
    if isinstance(b, RootValue) and isinstance(a, (int, Fraction)) and a >= 0:
        return exact_compare(RootValue(a, 1), b).value
    return (to_surd(a) - to_surd(b)).sign()


def certify_le(a, b) -> Verdict:
    """Three-valued verdict for ``a <= b``."""
    try:
        return Verdict.HOLDS if compare(a, b) <= 0 else Verdict.FAILS
    except PrecisionExhausted:
        return Verdict.UNDECIDED


def certify_lt(a, b) -> Verdict:
    try:
        return Verdict.HOLDS if compare(a, b) < 0 else Verdict.FAILS
    except PrecisionExhausted:
        return Verdict.UNDECIDED
