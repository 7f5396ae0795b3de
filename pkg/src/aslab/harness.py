"""Seeded verification suites with machine-readable reports.

Each suite is a generator of independent cases.  Case ``i`` draws from its own
RNG, seeded by ``(master seed, suite name, i)``, so a report is a function of
the configuration alone: running sequentially or on a process pool yields the
same bytes.  Case timings are kept on the records but left out of emitted
reports unless asked for.

    >>> rep = run_suite(SuiteConfig("nonuniversal-arith", trials=2))
    >>> rep.summary["pass-certified"]
    2
"""

from __future__ import annotations

import io
import json
import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import product
from typing import Callable, Optional

from . import __version__
from .fdd import (
    BlockStructure,
    LrNorm,
    TNorm,
    block_norms,
    duality_check,
    lift_up_norm,
    press_bracket,
    press_norm_bounds,
)
from .games import (
    GameSpec,
    GrowthData,
    PLAYER_II,
    TailConstraint,
    TAIL_MODEL_NOTE,
    compose_strategies,
    composition_certificate,
    n_from_phi,
    nonuniversality_arithmetic,
    phi_from_n,
    phiII_from_nII,
    phi_lower_certificate,
    play,
    strategy_growth_playerII,
    strategy_modelspace_playerI,
    strategy_random_playerII,
)
from .norms import (
    FinVec,
    NormParams,
    NormValue,
    Violation,
    ball_membership_test,
    certify_norm_le,
    evens,
    exact_value,
    norm,
    norm_base_value,
    norm_bruteforce,
    norming_sample,
    _eadd,
    _emul,
)
from .scalars import (
    PrecisionExhausted,
    RootValue,
    Verdict,
    as_fraction,
    compare,
    frac_to_json,
    parse_fraction,
)
from .schreier import enumerate_maximal_weighted, is_maximal, is_member, weights

__all__ = [
    "SUITES",
    "SUITE_ALIASES",
    "SuiteConfig",
    "CaseRecord",
    "Report",
    "run_suite",
    "emit_report",
    "exit_code",
    "build_4delta_net",
    "MetricError",
    "UnknownSuite",
]

PASS, FAIL, UNDECIDED = Verdict.HOLDS, Verdict.FAILS, Verdict.UNDECIDED


class UnknownSuite(ValueError):
    pass


class MetricError(ValueError):
    pass


M_CHOICES = {
    "plain": (),
    "evens": evens(200),
    "odd5": tuple(range(5, 405, 2)),
}


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    trials: Optional[int] = None
    seed: int = 0
    thetas: Optional[tuple] = None
    qs: Optional[tuple] = None
    families: Optional[tuple] = None
    Ms: Optional[tuple] = None
    precision_bits: int = 256
    support_cap: int = 8
    workers: int = 1
    long: bool = False
    canary: bool = False
    fuzz: Fraction = Fraction(1, 5)

    def __post_init__(self):
        object.__setattr__(self, "suite", SUITE_ALIASES.get(self.suite, self.suite))
        if self.suite not in SUITES:
            raise UnknownSuite(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        d = SUITES[self.suite].defaults
        fill = {}
        for key in ("trials", "thetas", "qs", "families", "Ms"):
            if getattr(self, key) is None:
                fill[key] = d[key]
        for key, v in fill.items():
            object.__setattr__(self, key, v)
        object.__setattr__(self, "thetas", tuple(as_fraction(t) for t in self.thetas))
        object.__setattr__(self, "qs", tuple(int(q) for q in self.qs))
        object.__setattr__(self, "families", tuple(self.families))
        object.__setattr__(self, "Ms", tuple(self.Ms))
        object.__setattr__(self, "fuzz", as_fraction(self.fuzz))
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        if self.precision_bits < 1 or self.support_cap < 1 or self.workers < 1:
            raise ValueError("caps must be positive")
        if not (self.thetas and self.qs and self.families and self.Ms):
            raise ValueError("parameter grid must be nonempty")
        if any(not 0 < t < 1 for t in self.thetas) or any(q < 1 for q in self.qs):
            raise ValueError("theta in (0,1) and q >= 1")
        if any(f not in ("T", "U") for f in self.families):
            raise ValueError("families are T and U")
        if any(m not in M_CHOICES for m in self.Ms):
            raise ValueError(f"M choices are {', '.join(M_CHOICES)}")
        if not 0 <= self.fuzz <= 1:
            raise ValueError("fuzz fraction in [0, 1]")

    def grid(self) -> list:
        return list(product(self.families, self.thetas, self.qs, self.Ms))

    def params(self, index: int, **override) -> NormParams:
        fam, th, q, M = self.grid()[index % len(self.grid())]
        d = dict(family=fam, theta=th, q=q, M=M_CHOICES[M])
        d.update(override)
        return NormParams(**d)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "seed": self.seed,
            "thetas": [frac_to_json(t) for t in self.thetas],
            "qs": list(self.qs),
            "families": list(self.families),
            "Ms": list(self.Ms),
            "precision_bits": self.precision_bits,
            "support_cap": self.support_cap,
            "long": self.long,
            "canary": self.canary,
            "fuzz": frac_to_json(self.fuzz),
        }


@dataclass
class CaseRecord:
    index: int
    inputs: dict
    verdict: Verdict
    statement: str
    counterexample: Optional[dict] = None
    detail: Optional[dict] = None
    canary: bool = False
    seconds: float = 0.0

    def to_json(self, timing: bool = False) -> dict:
        out = {"index": self.index, "inputs": self.inputs, "verdict": self.verdict.value,
               "statement": self.statement}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.detail is not None:
            out["detail"] = self.detail
        if self.canary:
            out["canary"] = True
        if timing:
            out["seconds"] = round(self.seconds, 6)
        return out


@dataclass
class Report:
    suite: str
    config: SuiteConfig
    records: list = field(default_factory=list)
    version: str = __version__
    notes: list = field(default_factory=list)

    @property
    def summary(self) -> dict:
        out = {v.value: 0 for v in Verdict}
        for r in self.records:
            out[r.verdict.value] += 1
        out["total"] = len(self.records)
        out["canaries"] = sum(1 for r in self.records if r.canary)
        return out

    @property
    def seconds(self) -> float:
        return sum(r.seconds for r in self.records)

    def to_json(self, timing: bool = False) -> dict:
        out = {"suite": self.suite, "version": self.version, "config": self.config.to_json(),
               "notes": list(self.notes), "summary": self.summary,
               "records": [r.to_json(timing) for r in self.records]}
        if timing:
            out["seconds"] = round(self.seconds, 6)
        return out


# ---------------------------------------------------------------------------
# helpers


def _j(v):
    """JSON form of an exact value, norm value or vector."""
    if v is None:
        return None
    if isinstance(v, (int, Fraction)):
        return frac_to_json(v)
    if isinstance(v, (NormValue, FinVec, RootValue)) or hasattr(v, "to_json"):
        return v.to_json()
    return str(v)


def _safe(fn: Callable) -> Verdict:
    try:
        return fn()
    except PrecisionExhausted:
        return UNDECIDED


def _combine(verdicts) -> Verdict:
    verdicts = list(verdicts)
    if FAIL in verdicts:
        return FAIL
    if UNDECIDED in verdicts:
        return UNDECIDED
    return PASS


def _eq(a: NormValue, b: NormValue) -> Verdict:
    """Certified equality of two norm values."""
    if a.root_value is not None and b.root_value is not None:
        ra, rb = a.root_value, b.root_value
        L = ra.root * rb.root // math.gcd(ra.root, rb.root)
        return PASS if ra.power(L) == rb.power(L) else FAIL
    if a.has_exact() and b.has_exact():
        try:
            return PASS if compare(a.exact(), b.exact()) == 0 else FAIL
        except PrecisionExhausted:
            return UNDECIDED
    ia, ib = a.enclosure(), b.enclosure()
    if ia.hi < ib.lo or ib.hi < ia.lo:
        return FAIL
    return UNDECIDED


def _le(a, b, factor=1) -> Verdict:
    return certify_norm_le(a, b, factor)


def _coeff(rng: random.Random) -> Fraction:
    num = rng.choice((1, 1, 1, 2, 3, 5, -1, -2, -3))
    den = rng.choice((1, 1, 2, 3, 4))
    return Fraction(num, den)


def _random_vector(rng: random.Random, cap: int, hi: int = 20, lo: int = 1,
                   fuzz: Fraction = Fraction(1, 5)) -> FinVec:
    """Structured-first random vector with at most ``cap`` support points in ``[lo, hi]``."""
    size = rng.randint(1, cap)
    if rng.random() < fuzz or hi - lo + 1 < size:
        pts = sorted(rng.sample(range(lo, max(hi, lo + size - 1) + 1), size))
        return FinVec({i: _coeff(rng) for i in pts})
    shape = rng.randrange(4)
    if shape == 0:
        # a flat interval block
        start = rng.randint(lo, max(lo, hi - size + 1))
        return FinVec.indicator(range(start, start + size))
    if shape == 1:
        # Schreier-like average: n points starting at n
        n = max(1, min(size, (hi - lo + 2) // 2))
        start = max(lo, n)
        return FinVec({start + i: Fraction(1, n) for i in range(n)})
    if shape == 2:
        # successive small blocks with gaps
        pts, i = [], rng.randint(lo, lo + 2)
        while len(pts) < size and i <= hi:
            pts.append(i)
            i += rng.randint(1, 3)
        return FinVec({p: _coeff(rng) for p in pts})
    pts = sorted(rng.sample(range(lo, hi + 1), size))
    return FinVec({i: Fraction(rng.choice((1, -1))) for i in pts})


# ---------------------------------------------------------------------------
# case functions: (config, index, rng) -> CaseRecord


def _case_unconditionality(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    p = cfg.params(i)
    x = _random_vector(rng, cfg.support_cap, fuzz=cfg.fuzz)
    signs = {j: rng.choice((1, -1)) for j in x.support}
    y = x.signs_flipped(signs)
    nx, ny = norm(p, x), norm(p, y)
    lo = rng.randint(1, 20)
    hi = rng.randint(lo, 20)
    npx = norm(p, x.restrict(lo, hi))
    v_flip = _eq(nx, ny)
    v_proj = _le(npx, nx)
    inputs = {"params": p.to_json(), "x": x.to_json(),
              "signs": {str(k): s for k, s in signs.items()}, "interval": [lo, hi]}
    v = _combine([v_flip, v_proj])
    cex = None if v is not FAIL else {"flip": v_flip.value, "projection": v_proj.value,
                                      "norm": _j(nx), "flipped": _j(ny), "projected": _j(npx)}
    return CaseRecord(i, inputs, v, "sign flips preserve the norm; interval projections are contractive",
                      cex, {"norm": _j(nx)})


def _spread_of(rng, support, hi_extra=6):
    out, prev = [], 0
    for s in support:
        nxt = max(s, prev + 1) + rng.randint(0, 2)
        out.append(nxt)
        prev = nxt
    return out


def _case_right_dominance(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    p = cfg.params(i)
    x = _random_vector(rng, cfg.support_cap, fuzz=cfg.fuzz)
    targets = _spread_of(rng, x.support)
    y = x.spread(targets)
    nx, ny = norm(p, x), norm(p, y)
    v = _le(nx, ny)
    inputs = {"params": p.to_json(), "x": x.to_json(), "targets": targets}
    cex = {"norm": _j(nx), "spread_norm": _j(ny)} if v is FAIL else None
    return CaseRecord(i, inputs, v, "spreading coordinates to the right does not decrease the norm",
                      cex)


def _interlaced(rng, n: int, start: int = 1) -> tuple[list, list]:
    ks, ls, cur = [], [], start
    for _ in range(n):
        cur += rng.randint(0, 2)
        ks.append(cur)
        cur += 1 + rng.randint(0, 2)
        ls.append(cur)
        cur += 1
    return ks, ls


def _case_shuffle(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    p = cfg.params(i)
    shift = 1 if rng.random() < Fraction(1, 4) else 0
    n = rng.randint(1, max(1, min(cfg.support_cap, 8) - shift))
    ks, ls = _interlaced(rng, n + shift)
    a = [_coeff(rng) for _ in range(n)]
    y = FinVec(dict(zip(ks[:n], a)))
    x = FinVec(dict(zip(ls[shift:shift + n], a)))
    if p.family == "T":
        factor = 3 ** (2 * shift + 1)
        nx, ny = norm(p, x), norm(p, y)
        v = _le(nx, ny, factor)
        stmt = f"interlaced shuffle: ||sum a_i e_(l_(i+{shift}))|| <= {factor} ||sum a_i e_(k_i)||"
    else:
        factor = 1
        small = p.with_(theta=p.theta / 2 ** (2 * shift + 1))
        nx, ny = norm(small, x), norm(p, y)
        v = _le(nx, ny)
        stmt = (f"interlaced shuffle (U): the norm with theta/{2 ** (2 * shift + 1)} on the "
                f"l-sequence is dominated by the theta norm on the k-sequence")
    inputs = {"params": p.to_json(), "k": ks, "l": ls, "a": [_j(c) for c in a], "shift": shift}
    cex = {"lhs": _j(nx), "rhs": _j(ny), "factor": factor} if v is FAIL else None
    return CaseRecord(i, inputs, v, stmt, cex)


def _case_disjoint_qpower(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    p = cfg.params(i, family="T")
    x = _random_vector(rng, cfg.support_cap, fuzz=cfg.fuzz)
    pieces = rng.randint(2, 4)
    parts = [dict() for _ in range(pieces)]
    interleave = rng.random() < Fraction(1, 2)
    for j, (idx, c) in enumerate(x):
        slot = rng.randrange(pieces) if interleave else min(pieces - 1, j * pieces // max(1, len(x)))
        parts[slot][idx] = c
    vecs = [FinVec(d) for d in parts]
    lhs = norm_base_value(p, x)
    rhs = sum((norm_base_value(p, v) for v in vecs), Fraction(0))
    v = PASS if compare(lhs, rhs) <= 0 else FAIL
    inputs = {"params": p.to_json(), "pieces": [v.to_json() for v in vecs]}
    cex = {"sum_q_power": _j(lhs), "q_powers": _j(rhs)} if v is FAIL else None
    return CaseRecord(i, inputs, v, "disjoint supports: ||sum x_i||^q <= sum ||x_i||^q", cex)


def _case_dp_oracle(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    p = cfg.params(i)
    x = _random_vector(rng, min(cfg.support_cap, 8), hi=14, fuzz=cfg.fuzz)
    a, b = norm(p, x), norm_bruteforce(p, x)
    v = _eq(a, b)
    inputs = {"params": p.to_json(), "x": x.to_json()}
    cex = {"dp": _j(a), "oracle": _j(b)} if v is FAIL else None
    return CaseRecord(i, inputs, v, "dynamic programme equals brute-force level iteration", cex,
                      {"norm": _j(a)})


def _case_schreier(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    """Cases 0..89: normalization for (k, min F); further cases: maximality soundness."""
    universe = 30
    if i < 3 * universe:
        k, first = divmod(i, universe)
        first += 1
        count = bad = 0
        example = None
        for F, W in enumerate_maximal_weighted(k, first, universe):
            count += 1
            if not W.sums_to_one():
                bad += 1
                example = example or {"F": list(F), "total": _j(W.total())}
        inputs = {"k": k, "min": first, "universe": universe}
        v = PASS if bad == 0 else FAIL
        return CaseRecord(i, inputs, v, "weights of every maximal set sum to one", example,
                          {"sets": count})
    j = i - 3 * universe
    k = j % 3
    top = 1 + (j // 3) % 15  # max F
    checked = 0
    cex = None
    for F in _members_with_max(k, top):
        checked += 1
        bound = top + len(F) + 5
        brute = not any(is_member(sorted(F + (g,)), k)
                        for g in range(1, bound + 1) if g not in F)
        if brute != is_maximal(F, k):
            cex = {"F": list(F), "k": k, "brute_force": brute}
            break
    inputs = {"k": k, "max": top}
    return CaseRecord(i, inputs, FAIL if cex else PASS,
                      "single-extension maximality test agrees with superset search", cex,
                      {"sets": checked})


def _members_with_max(k: int, top: int):
    # nonempty members of S_k with maximum exactly ``top``; heredity prunes the walk
    def rec(acc: tuple, nxt: int):
        for e in range(nxt, top):
            F = acc + (e,)
            if is_member(F + (top,), k):
                yield F + (top,)
                yield from rec(F, e + 1)
    yield (top,)
    yield from rec((), 1)


def _case_reindex(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    fam, th, q, Mname = cfg.grid()[i % len(cfg.grid())]
    Mseq = M_CHOICES[Mname] or evens(200)
    pM = NormParams(fam, th, q, Mseq)
    x = _random_vector(rng, cfg.support_cap, hi=15, fuzz=cfg.fuzz)
    y = x.reindex(pM.m)
    a, b = norm(pM.plain(), x), norm(pM, y)
    v = _eq(a, b)
    inputs = {"params": pM.to_json() | {"M": list(Mseq[:20]) + ["..."]}, "x": x.to_json()}
    cex = {"plain": _j(a), "transported": _j(b)} if v is FAIL else None
    return CaseRecord(i, inputs, v, "index transport n -> m_n is an isometry onto the M-space", cex)


def _successive_vectors(rng, m: int, a: Fraction, p: NormParams, start: int = 1) -> list:
    out, cur = [], start
    for _ in range(m):
        size = rng.randint(1, 3)
        coords = {cur + j: _coeff(rng) for j in range(size)}
        cur += size + rng.randint(0, 1)
        x = FinVec(coords)
        nx = exact_value(norm(p, x))
        out.append(x.scale(a / nx) if rng.random() < Fraction(3, 4) else x.scale(a / (2 * nx)))
    return out


def _case_lower_estimates_blocks(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    th = cfg.thetas[i % len(cfg.thetas)]
    p = NormParams("T", th, 1)
    eps = rng.choice((Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)))
    n = rng.randint(1, 3)
    m = math.floor(2 * n / eps) + 1 + rng.randint(0, 2)  # 2n/m < eps
    a = rng.choice((Fraction(1), Fraction(1, 2), Fraction(3, 2)))
    xs = _successive_vectors(rng, m, a, p)
    total = FinVec({})
    for x in xs:
        total = total + x
    top = total.support[-1]
    cuts = sorted(rng.sample(range(1, top + 2), min(2 * n, top + 1)))
    while len(cuts) < 2 * n:
        cuts.append(cuts[-1] + 1)
    intervals = [(cuts[2 * j], cuts[2 * j + 1]) for j in range(n)]
    acc = Fraction(0)
    for lo, hi in intervals:
        acc += exact_value(norm(p, total.restrict(lo, hi)))
    lhs = th / m * acc
    rhs = (th + eps) * a
    v = PASS if lhs <= rhs else FAIL
    inputs = {"theta": _j(th), "epsilon": _j(eps), "a": _j(a), "n": n, "m": m,
              "intervals": intervals, "vectors": [x.to_json() for x in xs]}
    cex = {"lhs": _j(lhs), "rhs": _j(rhs)} if v is FAIL else None
    return CaseRecord(i, inputs, v, "(theta/m) sum ||I_i sum x_j|| <= (theta+eps) a when 2n/m < eps",
                      cex, {"lhs": _j(lhs), "rhs": _j(rhs)})


def _growth_instance(rng, theta: Fraction, eps: Fraction, l: int):
    order = 2 * l - 1
    base = max(math.floor(1 / theta ** 2), math.floor(2 / eps * (1 - theta - eps / 2))) + 1
    ms = [base + rng.randint(0, 2)]
    rs = [rng.randint(1, 4)]
    while not is_maximal(ms, order):
        m = max(ms[-1], math.floor(4 * rs[-1] / eps)) + 1 + rng.randint(0, 3)
        while not is_member(ms + [m], order):
            m += 1
        ms.append(m)
        rs.append(rs[-1] + 1 + rng.randint(0, 3))
    return ms, rs


def _case_lower_estimates_schreier(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    th = cfg.thetas[i % len(cfg.thetas)]
    l = 2 if cfg.long and i % 2 else 1
    choices = [e for e in (Fraction(1, 4), Fraction(1, 8), Fraction(1, 6)) if e < 1 - th]
    eps = rng.choice(choices or [(1 - th) / 2])
    ms, rs = _growth_instance(rng, th, eps, l)
    W = weights(ms, 2 * l - 1)
    x = FinVec({r: W[m] for m, r in zip(ms, rs)})
    P = norm_base_value(NormParams("T", th, 1), x, cap=max(40, len(x) + 1))
    bound = (th + eps) ** l
    v = PASS if P <= bound else FAIL
    inputs = {"theta": _j(th), "epsilon": _j(eps), "l": l, "M": ms, "R": rs}
    cex = {"P": _j(P), "bound": _j(bound)} if v is FAIL else None
    return CaseRecord(i, inputs, v, "||sum S_F(m_i) e_(r_i)|| <= (theta+eps)^l under the growth conditions",
                      cex, {"P": _j(P), "bound": _j(bound)})


def _random_tail_playerI(view):
    # tails that jump ahead by a random amount; a pure function of the view
    base = view.tails[-1] if view.tails else 1
    if view.xs and view.xs[-1]:
        base = max(base, view.xs[-1].support[-1] + 1)
    r = random.Random(f"tail:{len(view.tails)}:{base}:{view.ms[-1] if view.ms else 0}")
    return TailConstraint(base + r.randint(0, 4))


def _case_phi_game(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    th = cfg.thetas[i % len(cfg.thetas)]
    q = cfg.qs[(i // len(cfg.thetas)) % len(cfg.qs)]
    l = 1
    eps = rng.choice([e for e in (Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)) if e < 1 - th])
    conv = rng.choice(("theta_direct", "theta_to_q"))
    params = NormParams("T", th, q, (), conv)
    rec = GrowthData()
    sII = strategy_growth_playerII(th, eps, l, "dual", rec)
    guaranteed = RootValue(1 / (th + eps) ** l, q)
    # C just below the guaranteed bound: Player II must be certified the winner
    C = Fraction(math.floor(guaranteed.radicand ** Fraction(1, q) * 64 - 1), 64) \
        if q == 1 else Fraction(1)
    spec = GameSpec("Phi", C, q, 2 * l - 1, params, "dual")
    tr = play(spec, _random_tail_playerI, sII, seed=cfg.seed, game_index=i)
    checks = []
    detail = {"F": list(tr.F) if tr.F else None, "R": rec.R, "convention": conv}
    if tr.forfeit:
        checks.append(FAIL)
        detail["forfeit"] = tr.forfeit
    else:
        # legality re-validated post hoc
        checks.append(PASS if is_maximal(tr.F, spec.rounds) else FAIL)
        tails = tr.tails
        checks.append(PASS if all(x.support[0] >= k for x, k in zip(tr.xs, tails)) else FAIL)
        checks.append(_le(NormValue(guaranteed), tr.payoff_lower))
        checks.append(PASS if tr.winner == PLAYER_II else FAIL)
        detail["payoff_lower"] = _j(tr.payoff_lower)
        detail["winner"] = tr.winner
    v = _combine(checks)
    inputs = {"theta": _j(th), "q": q, "epsilon": _j(eps), "l": l, "C": _j(C),
              "convention": conv, "seed": cfg.seed}
    cex = {"transcript": tr.to_json()} if v is FAIL else None
    return CaseRecord(i, inputs, v,
                      "the Schreier-growth strategy certifies payoff >= (theta+eps)^(-l/q) on the dual",
                      cex, detail)


def _case_ball_membership(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    if cfg.canary and i == 0:
        p = NormParams("T", cfg.thetas[0], cfg.qs[0])
        f = FinVec({1: Fraction(2)}, dual=True)
        res = ball_membership_test(p, f, trials=4, seed=cfg.seed)
        v = FAIL if isinstance(res, Violation) else PASS
        cex = {"f": f.to_json(), "x": res.x.to_json(), "pairing": _j(res.pairing),
               "norm": _j(res.norm)} if isinstance(res, Violation) else None
        return CaseRecord(i, {"params": p.to_json(), "f": f.to_json()}, v,
                          "canary: 2 e*_1 lies outside the dual ball", cex, canary=True)
    fam, th, q, Mname = cfg.grid()[i % len(cfg.grid())]
    p = NormParams(fam, th, q, M_CHOICES[Mname])
    level = 1 + i % 3
    f = norming_sample(p, level, 18, 1, seed=f"{cfg.seed}:{i}")[0]
    res = ball_membership_test(p, f, trials=3, seed=f"{cfg.seed}:{i}")
    if isinstance(res, Violation):
        v = FAIL
        cex = {"x": res.x.to_json(), "pairing": _j(res.pairing), "norm": _j(res.norm)}
    else:
        v = UNDECIDED if res.undecided else PASS
        cex = None
    inputs = {"params": p.to_json(), "level": level, "f": f.to_json()}
    return CaseRecord(i, inputs, v, "norming-set functionals satisfy |f(x)| <= ||x||", cex,
                      None if v is FAIL else {"tested": res.trials})


def _random_structure(rng, blocks: int, rational: bool = True) -> BlockStructure:
    sizes = tuple(rng.randint(1, 2) for _ in range(blocks))
    bases = [LrNorm("1"), LrNorm("inf"), TNorm(NormParams())]
    if not rational:
        bases.append(LrNorm("2"))
    outers = [LrNorm("1"), LrNorm("inf"), TNorm(NormParams()), TNorm(NormParams("T", Fraction(1, 3)))]
    return BlockStructure(sizes, rng.choice(bases), rng.choice(outers))


def _block_vector(rng, s: BlockStructure, blist) -> FinVec:
    coords = {}
    for b in blist:
        lo, hi = s.block_range(b)
        for j in range(lo, hi + 1):
            if rng.random() < Fraction(2, 3):
                coords[j] = _coeff(rng)
        if not any(lo <= j <= hi for j in coords):
            coords[lo] = _coeff(rng)
    return FinVec(coords)


def _case_press_lift(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    kind = ("collapse", "subadditivity", "shrink")[i % 3]
    if kind == "collapse":
        s = _random_structure(rng, rng.randint(1, 20), rational=False)
        b = rng.randint(1, s.count)
        z = _block_vector(rng, s, [b])
        exact = block_norms(s, z)[b]
        lift = lift_up_norm(s, z)
        br = press_bracket(s, z)
        pb = press_norm_bounds(s, z)
        ex = NormValue.of(exact)
        v = _combine([_eq(lift, ex), _eq(br, ex), _eq(pb.lower, ex), _eq(pb.upper, ex)])
        inputs = {"kind": kind, "structure": s.to_json(), "z": z.to_json()}
        return CaseRecord(i, inputs, v, "single-block collapse: lift, bracket and press bounds equal ||z||",
                          None if v is not FAIL else {"lift": _j(lift), "bracket": _j(br),
                                                      "lower": _j(pb.lower), "upper": _j(pb.upper),
                                                      "norm": _j(ex)})
    s = _random_structure(rng, 20)
    nz = rng.randint(2, 8)
    chosen = sorted(rng.sample(range(1, 21), nz))
    if kind == "subadditivity":
        cut = rng.randint(1, nz - 1)
        z1 = _block_vector(rng, s, chosen[:cut])
        z2 = _block_vector(rng, s, chosen[cut:])
        a, b, c = press_bracket(s, z1 + z2), press_bracket(s, z1), press_bracket(s, z2)
        rhs = NormValue.of(_eadd(b.exact(), c.exact()))
        v = _le(a, rhs)
        inputs = {"kind": kind, "structure": s.to_json(), "z1": z1.to_json(), "z2": z2.to_json()}
        return CaseRecord(i, inputs, v, "bracket subadditivity across disjoint block intervals",
                          None if v is not FAIL else {"sum": _j(a), "parts": [_j(b), _j(c)]})
    z = _block_vector(rng, s, chosen)
    j1 = rng.randint(0, nz - 1)
    j2 = rng.randint(j1, nz - 1)
    first, last = chosen[j1], chosen[j2]
    t = rng.choice((Fraction(0), Fraction(1, 2), Fraction(1, 3), Fraction(3, 4)))
    lo, hi = s.block_range(first)[0], s.block_range(last)[1]
    shrunk = FinVec({k: (c * t if lo <= k <= hi else c) for k, c in z})
    u0 = press_norm_bounds(s, z).upper
    u1 = press_norm_bounds(s, shrunk).upper
    v = _le(u1, u0)
    inputs = {"kind": kind, "structure": s.to_json(), "z": z.to_json(),
              "blocks": [first, last], "factor": _j(t)}
    return CaseRecord(i, inputs, v, "shrinking a block-interval component never raises the press upper bound",
                      None if v is not FAIL else {"before": _j(u0), "after": _j(u1)})


def _case_duality(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    rs = ("1", "2", "inf")
    B = rng.randint(2, 10)
    sizes = tuple(rng.randint(1, 2) for _ in range(B))
    wb = tuple(Fraction(rng.randint(1, 3), rng.randint(1, 2)) for _ in range(sum(sizes))) \
        if rng.random() < Fraction(1, 3) else ()
    s = BlockStructure(sizes, LrNorm(rng.choice(rs), wb), LrNorm(rng.choice(rs)))
    nz = sorted(rng.sample(range(1, B + 1), rng.randint(1, min(B, 6))))
    z = _block_vector(rng, s, nz)
    f = _block_vector(rng, s, sorted(rng.sample(range(1, B + 1), rng.randint(1, min(B, 6)))))
    try:
        v = duality_check(s, FinVec(f.coords, dual=True), z)
    except ValueError as e:  # l2 of irrational data: no exact value
        return CaseRecord(i, {"structure": s.to_json()}, UNDECIDED, "lift/press duality pairing",
                          None, {"error": str(e)})
    inputs = {"structure": s.to_json(), "f": f.to_json(), "z": z.to_json()}
    return CaseRecord(i, inputs, v, "|<f,z>| <= lift norm of f in the dual structure times press bound of z")


def _random_metric(rng, npts: int) -> list:
    # shortest-path metric of a random weighted graph: always a valid metric
    INF = None
    d = [[Fraction(0) if a == b else INF for b in range(npts)] for a in range(npts)]
    for a in range(npts):
        for b in range(a + 1, npts):
            if b == a + 1 or rng.random() < Fraction(1, 4):
                w = Fraction(rng.randint(1, 9), rng.randint(1, 2))
                d[a][b] = d[b][a] = w
    for k in range(npts):
        for a in range(npts):
            if d[a][k] is None:
                continue
            for b in range(npts):
                if d[k][b] is None:
                    continue
                c = d[a][k] + d[k][b]
                if d[a][b] is None or c < d[a][b]:
                    d[a][b] = c
    return d


def build_4delta_net(points, metric, f, K, delta):
    """A finite subset of ``H = {x : d(x, f(x)) <= delta}`` covering ``H`` within ``4 delta``.

    ``points`` are labels, ``metric[a][b]`` a rational distance table indexed
    like ``points``, ``f`` maps labels to labels in ``K``.  A greedy
    ``delta``-net of ``K`` is chosen; each ``x`` in ``H`` is sent to a net point
    within ``delta`` of ``f(x)``, and one representative of every fibre is kept.
    """
    delta = as_fraction(delta)
    idx = {p: n for n, p in enumerate(points)}
    if len(idx) != len(points):
        raise MetricError("duplicate labels")
    _validate_metric(metric, len(points))
    if any(f[p] not in set(K) for p in points):
        raise MetricError("f must map into K")
    d = lambda a, b: metric[idx[a]][idx[b]]
    H = [x for x in points if d(x, f[x]) <= delta]
    if not H:
        return []
    net_K = []
    for y in K:
        if all(d(y, c) > delta for c in net_K):
            net_K.append(y)
    reps = {}
    for x in H:
        eta = next(c for c in net_K if d(f[x], c) <= delta)
        reps.setdefault(eta, x)
    return [reps[c] for c in net_K if c in reps]


def _validate_metric(metric, n: int) -> None:
    if len(metric) != n or any(len(row) != n for row in metric):
        raise MetricError("metric table must be square")
    for a in range(n):
        if metric[a][a] != 0:
            raise MetricError("nonzero diagonal")
        for b in range(n):
            if metric[a][b] != metric[b][a] or metric[a][b] < 0:
                raise MetricError("metric must be symmetric and nonnegative")
            if a != b and metric[a][b] == 0:
                raise MetricError("distinct points at distance zero")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if metric[a][c] > metric[a][b] + metric[b][c]:
                    raise MetricError("triangle inequality fails")


def _case_net(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    kind = "random" if i >= 2 else ("identity", "large-delta")[i]
    npts = 30 if kind == "random" else rng.randint(5, 12)
    points = [f"p{j}" for j in range(npts)]
    metric = _random_metric(rng, npts)
    diam = max(max(r) for r in metric)
    if kind == "identity":
        K = list(points)
        f = {p: p for p in points}
        delta = Fraction(rng.randint(1, 6), 2)
    else:
        K = rng.sample(points, 5)
        f = {p: rng.choice(K) for p in points}
        delta = diam + 1 if kind == "large-delta" else Fraction(rng.randint(1, 12), 2)
    net = build_4delta_net(points, metric, f, K, delta)
    idx = {p: n for n, p in enumerate(points)}
    H = [x for x in points if metric[idx[x]][idx[f[x]]] <= delta]
    checks = [PASS if set(net) <= set(H) else FAIL,
              PASS if bool(net) == bool(H) else FAIL]
    for x in H:
        ok = any(metric[idx[x]][idx[y]] <= 4 * delta for y in net)
        checks.append(PASS if ok else FAIL)
    if kind == "identity":
        checks.append(PASS if H == points else FAIL)
    if kind == "large-delta":
        checks.append(PASS if len(net) == 1 else FAIL)
    v = _combine(checks)
    inputs = {"kind": kind, "points": npts, "delta": _j(delta), "K": K,
              "table_seed": f"{cfg.seed}:{i}"}
    return CaseRecord(i, inputs, v, "the fibre representatives form a finite 4 delta net of H",
                      None if v is not FAIL else {"net": net, "H": H}, {"H": len(H), "net": len(net)})


def _case_nonuniversal(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    grid = list(product((Fraction(1), Fraction(3, 2), Fraction(2)), (1, 2)))
    a, q = grid[i % len(grid)]
    C = Fraction(10)
    theta, l = nonuniversality_arithmetic(a, q, C)
    # theta^(-1/q) > a^2  <=>  theta^(-1) > a^(2q)
    c1 = PASS if 1 / theta > a ** (2 * q) else FAIL
    # (theta^(-1/q))^l > C a^(2l)  <=>  theta^(-l) > C^q a^(2lq)
    c2 = PASS if (1 / theta) ** l > C ** q * a ** (2 * l * q) else FAIL
    c3 = PASS if l == 1 or not (1 / theta) ** (l - 1) > C ** q * a ** (2 * (l - 1) * q) else FAIL
    v = _combine([c1, c2, c3])
    inputs = {"a": _j(a), "q": q, "C": _j(C)}
    return CaseRecord(i, inputs, v, "theta^(-1/q) > a^2 and l is the least witness of (theta^(-1/q))^l > C a^(2l)",
                      None if v is not FAIL else {"theta": _j(theta), "l": l},
                      {"theta": _j(theta), "l_witness": l})


def _case_game1(cfg: SuiteConfig, i: int, rng) -> CaseRecord:
    fam, th, q, Mname = cfg.grid()[i % len(cfg.grid())]
    p = NormParams("T", th, q, M_CHOICES[Mname])
    if i % 2 == 0:
        # reduction between N(c,p,n) and the order-1 game
        n = rng.randint(1, 4)
        c = Fraction(rng.randint(1, 6), 2)
        sI = strategy_modelspace_playerI(p, n)
        sII = strategy_random_playerII(p)
        n_spec = GameSpec("N", c, q, n, p)
        tN = play(n_spec, sI, sII, seed=cfg.seed, game_index=i)
        phi_spec = GameSpec("Phi", c, q, 1, p)
        tP = play(phi_spec, phi_from_n(lambda m: strategy_modelspace_playerI(p, m)),
                  phiII_from_nII(sII, n), seed=cfg.seed, game_index=i)
        # back-translation: the order-1 strategy used as an N strategy
        tN2 = play(n_spec, n_from_phi(phi_from_n(lambda m: strategy_modelspace_playerI(p, m)), n),
                   sII, seed=cfg.seed, game_index=i)
        checks = [PASS if not (tN.forfeit or tP.forfeit or tN2.forfeit) else FAIL,
                  PASS if tN.xs == tP.xs == tN2.xs else FAIL,
                  PASS if tN.winner == tP.winner == tN2.winner else FAIL]
        # Phi payoff = n^(-1/p) * N payoff, compared exactly through q-th powers
        a = tN.payoff_lower.root_value
        b = tP.payoff_lower.root_value
        if a is not None and b is not None:
            L = a.root * b.root // math.gcd(a.root, b.root)
            checks.append(PASS if a.power(L) == Fraction(n) ** (L - L // q) * b.power(L) else FAIL)
        else:
            checks.append(UNDECIDED)
        v = _combine(checks)
        inputs = {"params": p.to_json(), "n": n, "c": _j(c), "seed": cfg.seed}
        return CaseRecord(i, inputs, v, "N game and order-1 game transcripts match move for move",
                          None if v is not FAIL else {"N": tN.to_json(), "Phi": tP.to_json()},
                          {"winner": tN.winner})
    # composition of two order-1 strategies into an order-2 strategy
    chi = phi_from_n(lambda m: strategy_modelspace_playerI(p, m))
    sI = compose_strategies(chi, chi, 1, 1)
    spec = GameSpec("Phi", Fraction(1), q, 2, p)
    m1 = rng.randint(1, 3)
    tr = play(spec, sI, strategy_random_playerII(p, width=1, m_step=1, m_first=m1), seed=cfg.seed, game_index=i)
    if tr.forfeit:
        return CaseRecord(i, {"params": p.to_json()}, FAIL, "composed strategy", {"forfeit": tr.forfeit})
    cert = composition_certificate(tr, 1, 1)
    prod = _prod_bound(cert["C"], cert["outer"])
    checks = [PASS if cert["identity"] else FAIL, _le(cert["total"], prod)]
    tails_ok = all(x.support[0] >= k for x, k in zip(tr.xs, tr.tails))
    checks.append(PASS if tails_ok else FAIL)
    v = _combine(checks)
    inputs = {"params": p.to_json(), "m1": m1, "seed": cfg.seed}
    return CaseRecord(i, inputs, v, "composed payoff <= (inner bound) x (outer bound)",
                      None if v is not FAIL else {"transcript": tr.to_json()},
                      {"F": list(tr.F), "total": _j(cert["total"]), "inner": _j(cert["C"]),
                       "outer": _j(cert["outer"])})


def _prod_bound(C: NormValue, outer: NormValue) -> NormValue:
    a, b = C.root_value, outer.root_value
    if a is not None and b is not None:
        L = a.root * b.root // math.gcd(a.root, b.root)
        return NormValue(RootValue(a.power(L) * b.power(L), L))
    return NormValue.of(_emul(C.exact(), outer.exact()))


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Suite:
    fn: Callable
    defaults: dict


def _d(trials, thetas=(Fraction(1, 2),), qs=(1,), families=("T",), Ms=("plain",)):
    return {"trials": trials, "thetas": tuple(thetas), "qs": tuple(qs),
            "families": tuple(families), "Ms": tuple(Ms)}


_TH3 = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))
SUITES = {
    "unconditionality": Suite(_case_unconditionality, _d(1000, _TH3, (1, 2), ("T", "U"), ("plain", "evens"))),
    "right-dominance": Suite(_case_right_dominance, _d(1000, _TH3, (1, 2), ("T",), ("plain", "evens"))),
    "shuffle": Suite(_case_shuffle, _d(500, (Fraction(1, 2), Fraction(1, 4)), (1, 2), ("T", "U"))),
    "disjoint-qpower": Suite(_case_disjoint_qpower, _d(300, _TH3, (1, 2, 3))),
    "dp-oracle": Suite(_case_dp_oracle, _d(200, _TH3, (1, 2), ("T", "U"), ("plain", "evens"))),
    "schreier-normalization": Suite(_case_schreier, _d(135)),
    "reindex-isometry": Suite(_case_reindex, _d(300, _TH3, (1, 2), ("T", "U"), ("evens", "odd5"))),
    "lower-estimates-i": Suite(_case_lower_estimates_blocks, _d(200, _TH3)),
    "lower-estimates-ii": Suite(_case_lower_estimates_schreier, _d(60, _TH3)),
    "phi-game": Suite(_case_phi_game, _d(30, _TH3, (1, 2))),
    "ball-membership": Suite(_case_ball_membership, _d(10_000, (Fraction(1, 2),), (1, 2), ("T", "U"))),
    "press-lift": Suite(_case_press_lift, _d(600)),
    "duality-lr": Suite(_case_duality, _d(200)),
    "net-lemma": Suite(_case_net, _d(102)),
    "nonuniversal-arith": Suite(_case_nonuniversal, _d(6)),
    "game1-reduction": Suite(_case_game1, _d(60, (Fraction(1, 2), Fraction(1, 3)), (1, 2), ("T",),
                                             ("plain", "evens"))),
}

# older names accepted on the command line and in configs
SUITE_ALIASES = {"prop73i": "lower-estimates-i", "prop73ii": "lower-estimates-ii"}


# ---------------------------------------------------------------------------
# running


def _run_case(args) -> CaseRecord:
    cfg, i = args
    os.environ["ASLAB_PRECISION_BITS"] = str(cfg.precision_bits)
    rng = random.Random(f"{cfg.seed}:{cfg.suite}:{i}")
    t0 = time.perf_counter()
    try:
        rec = SUITES[cfg.suite].fn(cfg, i, rng)
    except PrecisionExhausted as e:
        rec = CaseRecord(i, {"index": i}, UNDECIDED, cfg.suite, None, {"error": str(e)})
    rec.seconds = time.perf_counter() - t0
    return rec


def run_suite(config: SuiteConfig) -> Report:
    """Run every case of a suite and assemble the report (records sorted by index)."""
    jobs = [(config, i) for i in range(config.trials)]
    if config.canary and config.suite == "ball-membership" and not jobs:
        jobs = [(config, 0)]
    saved = os.environ.get("ASLAB_PRECISION_BITS")
    try:
        if config.workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as pool:
                records = list(pool.map(_run_case, jobs, chunksize=max(1, len(jobs) // (4 * config.workers))))
        else:
            records = [_run_case(j) for j in jobs]
    finally:
        if saved is None:
            os.environ.pop("ASLAB_PRECISION_BITS", None)
        else:
            os.environ["ASLAB_PRECISION_BITS"] = saved
    records.sort(key=lambda r: r.index)
    notes = []
    if config.suite in ("phi-game", "game1-reduction"):
        notes.append(TAIL_MODEL_NOTE)
    if config.suite == "phi-game":
        notes.append("dual payoffs are certified from below by pairing; Player I wins are never declared")
    return Report(config.suite, config, records, notes=notes)


def emit_report(report: Report, fmt: str = "json", timing: bool = False) -> bytes:
    """Serialize a report; identical reports give identical bytes."""
    if fmt == "json":
        return (json.dumps(report.to_json(timing), sort_keys=True, indent=1,
                           ensure_ascii=True) + "\n").encode()
    if fmt == "tsv":
        buf = io.StringIO()
        summ = report.summary
        buf.write(f"# suite\t{report.suite}\n# version\t{report.version}\n")
        buf.write("# config\t" + json.dumps(report.config.to_json(), sort_keys=True) + "\n")
        for note in report.notes:
            buf.write(f"# note\t{note}\n")
        buf.write("# summary\t" + json.dumps(summ, sort_keys=True) + "\n")
        cols = ["index", "verdict", "statement", "inputs", "counterexample"]
        if timing:
            cols.append("seconds")
        buf.write("\t".join(cols) + "\n")
        for r in report.records:
            row = [str(r.index), r.verdict.value, r.statement,
                   json.dumps(r.inputs, sort_keys=True),
                   json.dumps(r.counterexample, sort_keys=True) if r.counterexample else ""]
            if timing:
                row.append(f"{r.seconds:.6f}")
            buf.write("\t".join(row) + "\n")
        return buf.getvalue().encode()
    raise ValueError("format must be json or tsv")


def exit_code(report: Report) -> int:
    s = report.summary
    if s[FAIL.value]:
        return 1
    if s[UNDECIDED.value]:
        return 2
    return 0
