"""Finite asymptotic games on the model spaces.

Three games are implemented:

* ``N(c, p, n)``: n rounds; Player I wins iff ``||x_1 + ... + x_n|| <= c n^(1/p)``.
* ``A(c, p, n)``: n rounds; Player I wins iff ``||sum a_i x_i|| <= c`` for all
  ``a`` in the unit ball of ``l_p^n``.
* ``Phi(l, p, C)``: Player II announces integers ``m_1 < m_2 < ...`` that stay in
  the Schreier family of order ``l``; the game stops once they form a maximal
  set ``F``.  Player I wins iff ``||sum S_F(m_i)^(1/p) x_i|| <= C``.

Player I's moves are tail constraints ``supp(x) >= k``; this is the only kind
of neighbourhood the engine models.  Player II vectors must lie in the unit
ball; on the dual side this is certified by ``sum |coefficients| <= 1``.

A strategy is a callable ``strategy(view) -> move`` where ``view`` is a
:class:`GameView`.  Illegal moves forfeit the game.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .norms import (
    FinVec,
    NormParams,
    NormValue,
    certify_norm_le,
    dual_lower_bound,
    exact_value,
    norm,
    norm_base_value,
    _abs,
    _eadd,
    _mul,
)
from .scalars import (
    PthRootCoord,
    RootValue,
    Surd,
    Verdict,
    as_fraction,
    certify_le,
    compare,
    frac_to_json,
)
from .schreier import greedy_decompose, is_maximal, is_member, weights

__all__ = [
    "GameSpec",
    "TailConstraint",
    "ChooseInteger",
    "ChooseVector",
    "GameView",
    "GameTranscript",
    "play",
    "strategy_modelspace_playerI",
    "strategy_constant_tail",
    "strategy_growth_playerII",
    "strategy_basis_playerII",
    "compose_strategies",
    "composition_certificate",
    "strategy_random_playerII",
    "phi_lower_certificate",
    "phi_from_n",
    "n_from_phi",
    "phiII_from_nII",
    "nonuniversality_arithmetic",
    "PLAYER_I",
    "PLAYER_II",
    "UNCERTIFIED",
]

PLAYER_I = "PlayerI"
PLAYER_II = "PlayerII"
UNCERTIFIED = "Uncertified"
TAIL_MODEL_NOTE = "Player I moves restricted to tail constraints"


@dataclass(frozen=True)
class GameSpec:
    kind: str  # "N", "A" or "Phi"
    threshold: Fraction
    q: int
    rounds: int  # n for N/A, the Schreier order l for Phi
    space: NormParams = field(default_factory=NormParams)
    side: str = "primal"
    max_rounds: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "threshold", as_fraction(self.threshold))
        if self.kind not in ("N", "A", "Phi"):
            raise ValueError("kind must be N, A or Phi")
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if self.rounds < 1:
            raise ValueError("round count / order must be >= 1")
        if self.side not in ("primal", "dual"):
            raise ValueError("side must be primal or dual")
        if self.q != self.space.q:
            raise ValueError("game exponent must match the space's q")

    def to_json(self) -> dict:
        return {"kind": self.kind, "threshold": frac_to_json(self.threshold), "q": self.q,
                ("l" if self.kind == "Phi" else "n"): self.rounds,
                "space": self.space.to_json(), "side": self.side}


@dataclass(frozen=True)
class TailConstraint:
    k: int

    def to_json(self):
        return {"tail": self.k}


@dataclass(frozen=True)
class ChooseInteger:
    m: int

    def to_json(self):
        return {"m": self.m}


@dataclass(frozen=True)
class ChooseVector:
    x: FinVec

    def to_json(self):
        return {"x": self.x.to_json()}


@dataclass
class GameView:
    """What a strategy sees: the history so far and the pending decision."""

    spec: GameSpec
    phase: str  # "m" (Player II integer), "tail" (Player I), "x" (Player II vector)
    round: int  # 1-based index of the current round
    ms: list
    tails: list
    xs: list
    rng: random.Random

    @property
    def tail(self) -> Optional[int]:
        return self.tails[-1] if len(self.tails) == self.round else None


@dataclass
class GameTranscript:
    spec: GameSpec
    moves: list = field(default_factory=list)  # (player, move)
    F: Optional[tuple] = None
    payoff_lower: Optional[NormValue] = None
    payoff_upper: Optional[NormValue] = None
    winner: str = UNCERTIFIED
    forfeit: Optional[str] = None
    seed: object = None
    notes: list = field(default_factory=lambda: [TAIL_MODEL_NOTE])
    payoff_vector: Optional[FinVec] = None

    @property
    def xs(self) -> list:
        return [mv.x for p, mv in self.moves if isinstance(mv, ChooseVector)]

    @property
    def ms(self) -> list:
        return [mv.m for p, mv in self.moves if isinstance(mv, ChooseInteger)]

    @property
    def tails(self) -> list:
        return [mv.k for p, mv in self.moves if isinstance(mv, TailConstraint)]

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "moves": [{"player": p, **mv.to_json()} for p, mv in self.moves],
            "F": list(self.F) if self.F is not None else None,
            "payoff": {
                "lower": self.payoff_lower.to_json() if self.payoff_lower else None,
                "upper": self.payoff_upper.to_json() if self.payoff_upper else "Unknown",
            },
            "winner": self.winner,
            "forfeit": self.forfeit,
            "seed": self.seed,
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# the engine


def _unit_ball_verdict(spec: GameSpec, x: FinVec) -> Verdict:
    if spec.side == "primal":
        return certify_norm_le(norm(spec.space, x), Fraction(1))
    # dual side: the biorthogonal functionals are normalized, so l1 mass bounds the norm
    total = Fraction(0)
    for _, c in x:
        total = _eadd(total, _abs(exact_value(c)))
    return certify_le(total, 1)


def _forfeit(tr: GameTranscript, player: str, reason: str) -> GameTranscript:
    tr.forfeit = f"{player}: {reason}"
    tr.winner = PLAYER_II if player == PLAYER_I else PLAYER_I
    return tr


def play(spec: GameSpec, strategyI: Callable, strategyII: Callable, seed=0,
         game_index: int = 0) -> GameTranscript:
    """Play one game to the end and certify the payoff."""
    tr = GameTranscript(spec, seed=seed)
    rngI = random.Random(f"{seed}:{game_index}:I")
    rngII = random.Random(f"{seed}:{game_index}:II")
    ms, tails, xs = [], [], []
    r = 0
    while True:
        r += 1
        if r > spec.max_rounds:
            return _forfeit(tr, PLAYER_II, "game did not terminate")
        if spec.kind == "Phi":
            mv = strategyII(GameView(spec, "m", r, ms, tails, xs, rngII))
            if not isinstance(mv, ChooseInteger) or mv.m < 1 or (ms and mv.m <= ms[-1]):
                return _forfeit(tr, PLAYER_II, f"illegal integer move {mv!r}")
            if not is_member(ms + [mv.m], spec.rounds):
                return _forfeit(tr, PLAYER_II, f"{ms + [mv.m]} leaves S_{spec.rounds}")
            ms.append(mv.m)
            tr.moves.append((PLAYER_II, mv))
        mv = strategyI(GameView(spec, "tail", r, ms, tails, xs, rngI))
        if not isinstance(mv, TailConstraint) or mv.k < 1:
            return _forfeit(tr, PLAYER_I, f"illegal tail move {mv!r}")
        tails.append(mv.k)
        tr.moves.append((PLAYER_I, mv))
        mv = strategyII(GameView(spec, "x", r, ms, tails, xs, rngII))
        if not isinstance(mv, ChooseVector):
            return _forfeit(tr, PLAYER_II, f"illegal vector move {mv!r}")
        x = mv.x
        if x.dual != (spec.side == "dual"):
            return _forfeit(tr, PLAYER_II, "vector lives in the wrong space")
        if x and x.support[0] < tails[-1]:
            return _forfeit(tr, PLAYER_II, f"support {x.support} violates tail {tails[-1]}")
        verdict = _unit_ball_verdict(spec, x)
        if verdict is not Verdict.HOLDS:
            return _forfeit(tr, PLAYER_II, f"vector not certified in the unit ball ({verdict.value})")
        xs.append(x)
        tr.moves.append((PLAYER_II, mv))
        if spec.kind == "Phi":
            if is_maximal(ms, spec.rounds):
                tr.F = tuple(ms)
                break
        elif r == spec.rounds:
            break
    _score(tr, xs)
    return tr


def _sum(vectors, coeffs=None) -> FinVec:
    dual = vectors[0].dual if vectors else False
    out = FinVec({}, dual=dual)
    for i, x in enumerate(vectors):
        if coeffs is not None:
            c = coeffs[i]
            x = FinVec({j: _mul(v, c) for j, v in x}, dual=x.dual)
        out = out + x
    return out


def _p_coeff(w: Fraction, q: int):
    """``w ** (1/p)`` with p conjugate to q."""
    if q == 1:
        return Fraction(1)
    return PthRootCoord(Fraction(1), w, q)


def _q_weight(w: Fraction, q: int):
    """``w ** (1/q)``, the pairing partner of ``_p_coeff``."""
    if q == 1:
        return w
    return PthRootCoord(w, 1 / w, q)


def _score(tr: GameTranscript, xs: list) -> None:
    spec = tr.spec
    C = spec.threshold
    q = spec.q
    if spec.kind == "Phi":
        W = weights(tr.F, spec.rounds)
        coeffs = [_p_coeff(W[m], q) for m in tr.F]
        y = _sum(xs, coeffs)
        tr.payoff_vector = y
        if spec.side == "primal":
            v = norm(spec.space, y, cap=max(40, len(y)))
            tr.payoff_lower = tr.payoff_upper = v
            tr.winner = _winner(certify_norm_le(v, C))
        else:
            pattern = _pattern_for(y, xs, [W[m] for m in tr.F])
            lb = dual_lower_bound(spec.space, y, patterns=[pattern])
            tr.payoff_lower = lb
            tr.payoff_upper = None
            if certify_norm_le(lb, C) is Verdict.FAILS:
                tr.winner = PLAYER_II
            else:
                tr.winner = UNCERTIFIED
        return
    n = len(xs)
    if spec.kind == "N":
        y = _sum(xs)
        tr.payoff_vector = y
        # compare ||y|| with c * n^(1/p)
        target = C if q == 1 else (Surd.root_of(Fraction(n) ** (q - 1), q) * C).simplify()
        if spec.side == "primal":
            v = norm(spec.space, y, cap=max(40, len(y)))
            tr.payoff_lower = tr.payoff_upper = v
            tr.winner = _winner(certify_norm_le(v, target))
        else:
            lb = dual_lower_bound(spec.space, y)
            tr.payoff_lower = lb
            tr.winner = PLAYER_II if certify_norm_le(lb, target) is Verdict.FAILS else UNCERTIFIED
        return
    # A game
    lower, upper = _a_game_bounds(spec, xs)
    tr.payoff_lower, tr.payoff_upper = lower, upper
    if upper is not None and certify_norm_le(upper, C) is Verdict.HOLDS:
        tr.winner = PLAYER_I
    elif certify_norm_le(lower, C) is Verdict.FAILS:
        tr.winner = PLAYER_II
    else:
        tr.winner = UNCERTIFIED


def _winner(v: Verdict) -> str:
    if v is Verdict.HOLDS:
        return PLAYER_I
    if v is Verdict.FAILS:
        return PLAYER_II
    return UNCERTIFIED


def _pattern_for(y: FinVec, xs: list, ws: list) -> list:
    # weight of coordinate j is the Schreier weight of the round whose vector holds j
    owner = {}
    for x, w in zip(xs, ws):
        for j in x.support:
            owner.setdefault(j, w)
    return [owner.get(j, Fraction(1)) for j in y.support]


def _a_game_bounds(spec: GameSpec, xs: list):
    """Bounds for ``max ||sum a_i x_i||`` over the unit ball of l_p^n.

    For p infinite the maximum of a convex function over the cube is attained
    at a sign vector, so the value is exact (primal side).  Otherwise the lower
    bound comes from sign vectors scaled by ``n^(-1/p)`` and the upper bound,
    for successive vectors in the T family, from the disjoint q-power
    inequality: ``||sum a_i x_i||^q <= sum |a_i|^q ||x_i||^q <= n^(1-q/p) max ||x_i||^q``.
    """
    n = len(xs)
    q = spec.q
    params = spec.space
    signs_list = _sign_vectors(n, limit=256)
    if spec.side == "dual":
        best = None
        for signs in signs_list:
            y = _sum(xs, [_scaled_sign(s, n, q) for s in signs])
            v = dual_lower_bound(params, y)
            best = v if best is None or certify_norm_le(best, v) is Verdict.HOLDS else best
        return best, None
    best = None
    for signs in signs_list:
        y = _sum(xs, [_scaled_sign(s, n, q) for s in signs])
        v = norm(params, y)
        if best is None or certify_norm_le(best, v) is Verdict.HOLDS:
            best = v
    if q == 1 and len(signs_list) == 1 << n:
        return best, best
    if params.family == "T" and _successive(xs):
        mx = None
        for x in xs:
            v = norm_base_value(params, x)  # ||x||^q, rational
            mx = v if mx is None or compare(v, mx) > 0 else mx
        # (n^(1 - q/p) * mx)^(1/q) with 1 - q/p = 2 - q, clipped at 0 when q > 2
        expo_num = max(0, 2 - q)
        rad = Fraction(n) ** expo_num * mx
        return best, NormValue(RootValue(rad, q)) if isinstance(rad, Fraction) else None
    return best, None


def _scaled_sign(s: int, n: int, q: int):
    if q == 1:
        return Fraction(s)
    # s * n^(-1/p) = s * (1/n)^((q-1)/q)
    return PthRootCoord(Fraction(s), Fraction(1, n), q)


def _sign_vectors(n: int, limit: int):
    total = 1 << n
    if total <= limit:
        return [[1 if (mask >> i) & 1 == 0 else -1 for i in range(n)] for mask in range(total)]
    rng = random.Random(f"signs:{n}")
    out = [[1] * n]
    while len(out) < limit:
        out.append([rng.choice((1, -1)) for _ in range(n)])
    return out


def _successive(xs: list) -> bool:
    live = [x for x in xs if x]
    return all(a.support[-1] < b.support[0] for a, b in zip(live, live[1:]))


# ---------------------------------------------------------------------------
# strategies


def strategy_constant_tail(k: int = 1) -> Callable:
    """Player I always plays the same tail."""

    def strat(view: GameView):
        return TailConstraint(k)

    return strat


def strategy_modelspace_playerI(params: NormParams, n: int, gap: int = 0) -> Callable:
    """Player I: start at ``m_n``, then move past the support of the last vector."""

    def strat(view: GameView):
        k = params.m(n)
        if view.xs:
            k = max(view.tails[-1], k)
            last = [x for x in view.xs if x]
            if last:
                k = max(k, last[-1].support[-1] + 1 + gap)
        return TailConstraint(k)

    return strat


def strategy_basis_playerII(m_first: int = 1, dual: bool = False, coeff=1) -> Callable:
    """Player II: integers ``m_first, m_first+1, ...`` and ``coeff * e_k`` at the live tail."""

    def strat(view: GameView):
        if view.phase == "m":
            return ChooseInteger(view.ms[-1] + 1 if view.ms else m_first)
        k = view.tails[-1]
        if view.xs and view.xs[-1]:
            k = max(k, view.xs[-1].support[-1] + 1)
        return ChooseVector(FinVec({k: as_fraction(coeff)}, dual=dual))

    return strat


@dataclass
class GrowthData:
    """The integers and indices produced by :func:`strategy_growth_playerII`."""

    M: list = field(default_factory=list)
    R: list = field(default_factory=list)


def _first_m(theta: Fraction, epsilon: Fraction) -> int:
    # least integer with theta*m > 1/theta and m > (2/eps)(1 - theta - eps/2)
    b1 = 1 / (theta * theta)
    b2 = 2 / epsilon * (1 - theta - epsilon / 2)
    return max(math.floor(b1), math.floor(b2)) + 1


def strategy_growth_playerII(theta, epsilon, l: int, side: str = "dual",
                         record: Optional[GrowthData] = None) -> Callable:
    """Player II strategy forcing large Schreier-weighted sums of basis functionals.

    ``m_1`` is the least integer with ``theta m_1 > 1/theta`` and
    ``m_1 > (2/eps)(1 - theta - eps/2)``; each ``r_j`` is the least index at the
    tail exceeding all earlier ones; ``m_{j+1}`` is the least integer above
    ``max(m_j, 4 r_j / eps)`` that keeps the integers in the order ``2l-1``
    family.  The played vector is ``e*_{r_j}`` (or ``e_{r_j}`` on the primal side).
    """
    theta = as_fraction(theta)
    epsilon = as_fraction(epsilon)
    if not 0 < epsilon < 1 - theta:
        raise ValueError("need 0 < epsilon < 1 - theta")
    order = 2 * l - 1
    rec = record if record is not None else GrowthData()

    def strat(view: GameView):
        if view.phase == "m":
            if not view.ms:
                m = _first_m(theta, epsilon)
            else:
                r_prev = view.xs[-1].support[0]
                m = max(view.ms[-1], math.floor(4 * r_prev / epsilon)) + 1
                while not is_member(view.ms + [m], order):
                    m += 1
            rec.M.append(m)
            return ChooseInteger(m)
        r = view.tails[-1]
        if view.xs:
            r = max(r, view.xs[-1].support[0] + 1)
        rec.R.append(r)
        return ChooseVector(FinVec({r: Fraction(1)}, dual=(side == "dual")))

    strat.record = rec
    return strat


def compose_strategies(chi_k: Callable, chi_l: Callable, k: int, l: int,
                       C: Fraction = Fraction(1)) -> Callable:
    """Player I strategy for the order ``k+l`` game built from order ``k`` and ``l`` strategies.

    The announced integers split greedily into maximal order-``k`` blocks.  Inside a
    block ``chi_k`` plays a fresh inner game; ``chi_l`` plays the outer game whose
    integers are the block minima and whose vectors are the rescaled inner payoff
    vectors ``(1/C) sum S^k(m_j)^(1/p) x_j``.  The emitted tail is the larger of
    the two tails (intersections of tails are tails).
    """
    C = as_fraction(C)

    def split(ms: list) -> list:
        blocks, cur = [], []
        for m in ms:
            if cur and is_maximal(cur, k):
                blocks.append(cur)
                cur = []
            cur.append(m)
        blocks.append(cur)
        return blocks

    def strat(view: GameView):
        spec = view.spec
        blocks = split(view.ms)
        nb = len(blocks)
        start = sum(len(b) for b in blocks[:-1])
        inner_ms = blocks[-1]
        j = len(inner_ms)  # round within the current block
        inner_spec = GameSpec("Phi", spec.threshold, spec.q, k, spec.space, spec.side)
        outer_spec = GameSpec("Phi", spec.threshold, spec.q, l, spec.space, spec.side)
        inner_view = GameView(inner_spec, "tail", j, list(inner_ms),
                              list(view.tails[start:start + j - 1]),
                              list(view.xs[start:start + j - 1]), view.rng)
        k_inner = chi_k(inner_view).k
        # outer game: leaders and the rescaled payoffs of finished blocks
        leaders = [b[0] for b in blocks]
        ys = []
        pos = 0
        for b in blocks[:-1]:
            W = weights(b, k)
            ys.append(_sum(view.xs[pos:pos + len(b)],
                           [_mul(_p_coeff(W[m], spec.q), 1 / C) for m in b]))
            pos += len(b)
        outer_tails = []
        for i in range(nb):
            # chi_l is pure, so its earlier tails are recovered by replaying it
            ov = GameView(outer_spec, "tail", i + 1, leaders[:i + 1], list(outer_tails),
                          ys[:i], view.rng)
            outer_tails.append(chi_l(ov).k)
        k_outer = outer_tails[-1]
        return TailConstraint(max(k_inner, k_outer))

    return strat


def strategy_random_playerII(params: NormParams, side: str = "primal", width: int = 3,
                             m_step: int = 3, m_first: Optional[int] = None) -> Callable:
    """Player II drawing random rational vectors just past the tail, rescaled into the ball.

    Primal vectors are divided by their norm when it is rational, otherwise by
    their l1 mass.  Integers (Phi) start at ``m_first`` (random when unset) and
    grow by random steps up to ``m_step``.
    """
    dual = side == "dual"

    def strat(view: GameView):
        rng = view.rng
        if view.phase == "m":
            if not view.ms:
                return ChooseInteger(m_first or rng.randint(1, 4))
            m = view.ms[-1] + rng.randint(1, m_step)
            while not is_member(view.ms + [m], view.spec.rounds):
                m += 1
            return ChooseInteger(m)
        k = view.tails[-1] + rng.randint(0, 2)
        size = rng.randint(1, width)
        coords = {k + i: Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for i in range(size)}
        x = FinVec(coords, dual=dual)
        if not x:
            x = FinVec({k: Fraction(1)}, dual=dual)
        scale = sum(abs(c) for _, c in x)
        if not dual:
            v = norm(params, x)
            if v.is_exact and v.root_value.root == 1:
                scale = v.root_value.radicand
        return ChooseVector(x.scale(1 / scale))

    return strat


def composition_certificate(tr: GameTranscript, k: int, l: int) -> dict:
    """Split a finished order ``k+l`` primal transcript into inner and outer games.

    Returns the exact inner block payoffs, a rational bound ``C`` dominating
    them (their maximum when it is rational), the outer payoff ``C'`` of the
    rescaled vectors ``y_i = inner_i / C`` and the total payoff.  The vector
    identity ``total = C * outer`` holds exactly because the order ``k+l``
    weights factor through the block decomposition.
    """
    spec = tr.spec
    F = tr.F
    xs = tr.xs
    q = spec.q
    blocks = greedy_decompose(F, k, k + l)
    inner_vecs, inner_vals = [], []
    pos = 0
    for B in blocks:
        W = weights(B)
        n_b = len(B)
        v = _sum(xs[pos:pos + n_b], [_p_coeff(W[m], q) for m in B])
        pos += n_b
        inner_vecs.append(v)
        inner_vals.append(norm(spec.space, v, cap=max(40, len(v))))
    C = inner_vals[0]
    for v in inner_vals[1:]:
        if certify_norm_le(C, v) is Verdict.HOLDS:
            C = v
    Cx = exact_value(C)
    if not isinstance(Cx, Fraction):
        # a rational bound keeps the rescaling exact; it still dominates every block
        Cx = C.enclosure(64).hi
    assert all(certify_norm_le(v, Cx) is Verdict.HOLDS for v in inner_vals)
    leaders = tuple(B.elements[0] for B in blocks)
    G = weights(leaders, l)
    ys = [v.scale(1 / Cx) if Cx else v for v in inner_vecs]
    outer_vec = _sum(ys, [_p_coeff(G[m], q) for m in leaders])
    outer = norm(spec.space, outer_vec, cap=max(40, len(outer_vec)))
    total = norm(spec.space, tr.payoff_vector, cap=max(40, len(tr.payoff_vector)))
    return {"inner": inner_vals, "C": NormValue.of(Cx), "outer": outer, "total": total,
            "outer_vector": outer_vec, "leaders": leaders,
            "identity": tr.payoff_vector == outer_vec.scale(Cx) if Cx else True}


# ---------------------------------------------------------------------------
# game-value reductions


def n_from_phi(phi_strategy: Callable, n: int) -> Callable:
    """Player I in N(c,p,n) from a Player I strategy for the order-1 game.

    The simulated integers are ``m_1 = n`` and ``m_j = n + j - 1``; they do not
    influence an order-1 game beyond its length.
    """

    def strat(view: GameView):
        spec = GameSpec("Phi", view.spec.threshold, view.spec.q, 1, view.spec.space, view.spec.side)
        ms = [n + j for j in range(view.round)]
        return phi_strategy(GameView(spec, "tail", view.round, ms, list(view.tails),
                                     list(view.xs), view.rng))

    return strat


def phi_from_n(n_strategy_factory: Callable) -> Callable:
    """Player I in the order-1 game: once ``m_1`` is known, play the N(c,p,m_1) strategy."""
    cache = {}

    def strat(view: GameView):
        m1 = view.ms[0]
        if m1 not in cache:
            cache[m1] = n_strategy_factory(m1)
        spec = GameSpec("N", view.spec.threshold, view.spec.q, m1, view.spec.space, view.spec.side)
        return cache[m1](GameView(spec, "tail", view.round, [], list(view.tails),
                                  list(view.xs), view.rng))

    return strat


def phiII_from_nII(n_strategyII: Callable, n: int) -> Callable:
    """Player II in the order-1 game: announce ``n, n+1, ...`` and copy the N-game vectors."""

    def strat(view: GameView):
        if view.phase == "m":
            return ChooseInteger(view.ms[-1] + 1 if view.ms else n)
        spec = GameSpec("N", view.spec.threshold, view.spec.q, n, view.spec.space, view.spec.side)
        return n_strategyII(GameView(spec, "x", view.round, [], list(view.tails),
                                     list(view.xs), view.rng))

    return strat


# ---------------------------------------------------------------------------
# certificates


def phi_lower_certificate(theta, q: int, l: int, epsilon, tail: int = 1,
                          convention: str = "theta_direct", seed=0) -> dict:
    """Play the dual order-``2l-1`` game with :func:`strategy_growth_playerII` and certify its payoff.

    Returns the exact base norm ``P = ||sum S_F(m_i) e_{r_i}||`` under both
    exponent conventions, the certified payoff lower bound ``P^(-1/q)`` for the
    requested convention and the guaranteed bound ``(theta+eps)^(-l/q)``.
    """
    theta = as_fraction(theta)
    epsilon = as_fraction(epsilon)
    params = NormParams("T", theta, q, (), convention)
    rec = GrowthData()
    sII = strategy_growth_playerII(theta, epsilon, l, "dual", rec)
    spec = GameSpec("Phi", Fraction(1), q, 2 * l - 1, params, "dual")
    tr = play(spec, strategy_constant_tail(tail), sII, seed=seed)
    if tr.forfeit:
        raise RuntimeError(f"certificate game forfeited: {tr.forfeit}")
    F = tr.F
    W = weights(F, 2 * l - 1)
    x = FinVec({r: W[m] for m, r in zip(F, rec.R)})
    P = {}
    for conv in ("theta_direct", "theta_to_q"):
        # the base value of the q=1 norm is the Tsirelson norm with the matching coefficient
        base_theta = theta if conv == "theta_direct" else theta ** q
        P[conv] = norm_base_value(NormParams("T", base_theta, 1), x)
    bound = (theta + epsilon) ** l
    for conv, val in P.items():
        assert val <= bound, f"P = {val} exceeds (theta+eps)^l = {bound} ({conv})"
    chosen = P[convention]
    return {
        "M": list(F),
        "R": list(rec.R),
        "weights": [W[m] for m in F],
        "P": P,
        "convention": convention,
        "payoff_lower": RootValue(1 / chosen, q),
        "guaranteed": RootValue(1 / bound, q),
        "transcript": tr,
    }


def nonuniversality_arithmetic(a, q: int, C=None):
    """Rational ``theta`` with ``theta^(-1/q) > a^2`` and, given ``C``, the least witness ``l``.

    ``theta = 1/(floor(a^(2q)) + 1)``.  The witness is the least ``l`` with
    ``(theta^(-1/q))^l > C a^(2l)``, tested as ``theta^(-l) > C^q a^(2lq)``.
    """
    a = as_fraction(a)
    if a < 1:
        raise ValueError("a >= 1")
    if q < 1:
        raise ValueError("q >= 1")
    A = a ** (2 * q)
    theta = Fraction(1, math.floor(A) + 1)
    assert 1 / theta > A
    if C is None:
        return theta, None
    C = as_fraction(C)
    l = 1
    while not (1 / theta) ** l > C ** q * A ** l:
        l += 1
    return theta, l
