import json
from fractions import Fraction

import pytest

from aslab.games import (
    PLAYER_I,
    PLAYER_II,
    UNCERTIFIED,
    ChooseInteger,
    ChooseVector,
    GameSpec,
    GameView,
    GrowthData,
    TailConstraint,
    compose_strategies,
    composition_certificate,
    n_from_phi,
    nonuniversality_arithmetic,
    phi_from_n,
    phi_lower_certificate,
    phiII_from_nII,
    play,
    strategy_basis_playerII,
    strategy_constant_tail,
    strategy_growth_playerII,
    strategy_modelspace_playerI,
    strategy_random_playerII,
)
from aslab.norms import FinVec, NormParams, certify_norm_le, norm
from aslab.scalars import RootValue, Verdict, compare
from aslab.schreier import is_maximal, is_member

H = Fraction(1, 2)
T1 = NormParams("T", H, 1)


def view(spec, phase="tail", rnd=1, ms=(), tails=(), xs=()):
    import random
    return GameView(spec, phase, rnd, list(ms), list(tails), list(xs), random.Random(0))


def test_spec_validation():
    with pytest.raises(ValueError):
        GameSpec("X", 1, 1, 1)
    with pytest.raises(ValueError):
        GameSpec("N", 0, 1, 1)
    with pytest.raises(ValueError):
        GameSpec("Phi", 1, 2, 1, T1)


def test_modelspace_playerI_examples():
    spec = GameSpec("N", 1, 1, 3, T1)
    assert strategy_modelspace_playerI(T1, 3)(view(spec)) == TailConstraint(3)
    pm = T1.with_(M=(5, 7, 9))
    assert strategy_modelspace_playerI(pm, 2)(view(spec)) == TailConstraint(7)
    x = FinVec({9: 1, 12: H})
    k = strategy_modelspace_playerI(T1, 3)(view(spec, rnd=2, tails=[3], xs=[x])).k
    assert k >= 13


def test_growth_strategy_first_integer():
    spec = GameSpec("Phi", 1, 1, 1, T1, "dual")
    s = strategy_growth_playerII(H, Fraction(1, 4), 1)
    assert s(view(spec, "m")) == ChooseInteger(5)
    with pytest.raises(ValueError):
        strategy_growth_playerII(H, H, 1)


def test_growth_strategy_transcript():
    rec = GrowthData()
    spec = GameSpec("Phi", 1, 1, 1, T1, "dual")
    tr = play(spec, strategy_constant_tail(2), strategy_growth_playerII(H, Fraction(1, 4), 1, record=rec))
    assert tr.forfeit is None and is_maximal(tr.F, 1)
    eps = Fraction(1, 4)
    assert rec.M == list(tr.F)
    # r_j beyond the tail and all earlier r's; r_j / m_(j+1) < eps/4
    assert rec.R[0] == 2 and all(a < b for a, b in zip(rec.R, rec.R[1:]))
    assert all(Fraction(r, m) < eps / 4 for r, m in zip(rec.R, rec.M[1:]))
    for j in range(1, len(rec.M)):
        assert rec.M[j] > max(rec.M[j - 1], 4 * rec.R[j - 1] / eps)


def test_n_game_single_round():
    for c, winner in ((Fraction(1), PLAYER_I), (Fraction(1, 2), PLAYER_II)):
        spec = GameSpec("N", c, 1, 1, T1)
        tr = play(spec, strategy_constant_tail(4), strategy_basis_playerII())
        assert tr.payoff_lower.exact() == 1 and tr.winner == winner


def test_n_game_model_space():
    # for p infinite the target c n^(1/p) is just c
    spec = GameSpec("N", Fraction(3, 2), 1, 3, T1)
    tr = play(spec, strategy_modelspace_playerI(T1, 3), strategy_basis_playerII())
    assert [x.support for x in tr.xs] == [(3,), (4,), (5,)]
    assert tr.payoff_lower.exact() == Fraction(3, 2) and tr.winner == PLAYER_I


def test_phi_order_one_length_is_first_integer():
    for m1 in (1, 3, 6):
        spec = GameSpec("Phi", 10, 1, 1, T1)
        tr = play(spec, strategy_constant_tail(1), strategy_basis_playerII(m_first=m1))
        assert len(tr.F) == m1 == len(tr.xs)
        assert tr.F == tuple(range(m1, 2 * m1))


def test_phi_certificate_and_winner():
    cert = phi_lower_certificate(H, 1, 1, Fraction(1, 4))
    assert cert["M"][0] == 5 and len(cert["M"]) == 5
    assert cert["P"]["theta_direct"] <= Fraction(3, 4)
    assert cert["guaranteed"] == RootValue(Fraction(4, 3), 1)
    assert compare(cert["payoff_lower"].radicand, Fraction(4, 3)) >= 0
    spec = GameSpec("Phi", Fraction(5, 4), 1, 1, T1, "dual")
    tr = play(spec, strategy_constant_tail(1), strategy_growth_playerII(H, Fraction(1, 4), 1))
    assert tr.winner == PLAYER_II
    assert compare(tr.payoff_lower.exact(), Fraction(4, 3)) >= 0
    # with tail 1 the vector is e*_1 + ... + e*_5, paired with e_1 + ... + e_5 of norm 3/2
    assert tr.payoff_lower.exact() == Fraction(10, 3)
    # a threshold above the certified bound is never awarded to Player I on the dual side
    spec = GameSpec("Phi", Fraction(4), 1, 1, T1, "dual")
    tr = play(spec, strategy_constant_tail(1), strategy_growth_playerII(H, Fraction(1, 4), 1))
    assert tr.winner == UNCERTIFIED and tr.payoff_upper is None


def test_phi_certificate_epsilon_sweep():
    prev = Fraction(0)
    for eps in (Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)):
        cert = phi_lower_certificate(H, 1, 1, eps)
        g = cert["guaranteed"].radicand
        assert g == 1 / (H + eps) and g > prev and g < 2
        assert cert["payoff_lower"].radicand >= g
        prev = g


def test_phi_certificate_q2_both_conventions():
    cert = phi_lower_certificate(H, 2, 1, Fraction(1, 4))
    assert set(cert["P"]) == {"theta_direct", "theta_to_q"}
    assert cert["P"]["theta_to_q"] <= cert["P"]["theta_direct"] <= Fraction(3, 4)
    assert cert["payoff_lower"].root == 2


def test_nonuniversality_examples():
    theta, l = nonuniversality_arithmetic(1, 1, 10)
    assert theta == H and l == 4
    theta, _ = nonuniversality_arithmetic(2, 1)
    assert theta == Fraction(1, 5) and 1 / theta > 4
    theta, _ = nonuniversality_arithmetic(2, 2)
    assert theta == Fraction(1, 17) and 1 / theta > 16
    with pytest.raises(ValueError):
        nonuniversality_arithmetic(Fraction(1, 2), 1)


def test_forfeits():
    spec = GameSpec("N", 1, 1, 2, T1)
    tr = play(spec, strategy_constant_tail(0), strategy_basis_playerII())
    assert tr.winner == PLAYER_II and tr.forfeit.startswith(PLAYER_I)

    def too_big(v):
        return ChooseVector(FinVec({v.tails[-1]: 2}))

    tr = play(spec, strategy_constant_tail(3), too_big)
    assert tr.winner == PLAYER_I and "unit ball" in tr.forfeit

    def below_tail(v):
        return ChooseVector(FinVec({1: H}))

    tr = play(spec, strategy_constant_tail(3), below_tail)
    assert tr.winner == PLAYER_I and "tail" in tr.forfeit

    def wrong_side(v):
        return ChooseVector(FinVec({v.tails[-1]: H}, dual=True))

    assert play(spec, strategy_constant_tail(1), wrong_side).winner == PLAYER_I
    phi = GameSpec("Phi", 1, 1, 1, T1)

    def bad_int(v):
        return ChooseInteger(0) if v.phase == "m" else ChooseVector(FinVec({v.tails[-1]: 1}))

    assert play(phi, strategy_constant_tail(1), bad_int).forfeit.startswith(PLAYER_II)


def test_transcript_json_and_determinism():
    p = NormParams("T", H, 2)
    spec = GameSpec("Phi", 2, 2, 1, p)
    a = play(spec, strategy_constant_tail(2), strategy_random_playerII(p), seed=7)
    b = play(spec, strategy_constant_tail(2), strategy_random_playerII(p), seed=7)
    ja, jb = json.dumps(a.to_json(), sort_keys=True), json.dumps(b.to_json(), sort_keys=True)
    assert ja == jb
    assert a.to_json()["notes"] and is_maximal(a.F, 1)


def test_a_game_sign_vectors_exact_for_q1():
    spec = GameSpec("A", Fraction(3, 2), 1, 3, T1)
    tr = play(spec, strategy_modelspace_playerI(T1, 3), strategy_basis_playerII())
    assert tr.payoff_lower.exact() == tr.payoff_upper.exact() == Fraction(3, 2)
    assert tr.winner == PLAYER_I


def test_a_game_q2_bounds():
    p = NormParams("T", H, 2)
    spec = GameSpec("A", 2, 2, 3, p)
    tr = play(spec, strategy_modelspace_playerI(p, 3), strategy_basis_playerII())
    assert certify_norm_le(tr.payoff_lower, tr.payoff_upper) is Verdict.HOLDS
    assert tr.winner == PLAYER_I


def test_composition_order_two():
    chi = strategy_modelspace_playerI(T1, 1)
    comp = compose_strategies(chi, chi, 1, 1)
    spec = GameSpec("Phi", 2, 1, 2, T1)
    for seed in range(6):
        tr = play(spec, comp, strategy_random_playerII(T1, width=1, m_step=1, m_first=2), seed=seed)
        assert tr.forfeit is None and is_maximal(tr.F, 2)
        ts = tr.tails
        assert all(k >= 1 for k in ts)
        cert = composition_certificate(tr, 1, 1)
        assert cert["identity"]
        bound = cert["C"].exact() * cert["outer"].exact()
        assert compare(cert["total"].exact(), bound) <= 0
        assert all(certify_norm_le(v, cert["C"]) is Verdict.HOLDS for v in cert["inner"])


def test_composition_single_block():
    chi = strategy_modelspace_playerI(T1, 1)
    spec = GameSpec("Phi", 2, 1, 2, T1)
    tr = play(spec, compose_strategies(chi, chi, 1, 1), strategy_basis_playerII(m_first=1))
    assert tr.F == (1,)
    cert = composition_certificate(tr, 1, 1)
    assert len(cert["inner"]) == 1
    assert cert["total"].exact() == cert["inner"][0].exact()


def test_n_and_phi_reductions():
    spec_n = GameSpec("N", Fraction(3, 2), 1, 3, T1)
    spec_phi = GameSpec("Phi", Fraction(3, 2), 1, 1, T1)
    n_tr = play(spec_n, strategy_modelspace_playerI(T1, 3), strategy_basis_playerII())
    phi_tr = play(spec_phi, phi_from_n(lambda n: strategy_modelspace_playerI(T1, n)),
                  phiII_from_nII(strategy_basis_playerII(), 3))
    assert n_tr.xs == phi_tr.xs
    assert n_tr.payoff_lower.exact() == phi_tr.payoff_lower.exact()
    back = play(spec_n, n_from_phi(phi_from_n(lambda n: strategy_modelspace_playerI(T1, n)), 3),
                strategy_basis_playerII())
    assert back.xs == n_tr.xs and back.winner == n_tr.winner == phi_tr.winner


def test_phi_integer_moves_stay_in_family():
    p = NormParams("T", H, 1)
    for l in (1, 2):
        spec = GameSpec("Phi", 3, 1, l, p)
        tr = play(spec, strategy_constant_tail(1), strategy_random_playerII(p, m_first=2), seed=l)
        assert is_member(tr.F, l) and is_maximal(tr.F, l)
        assert norm(p, tr.payoff_vector, cap=200).exact() == tr.payoff_lower.exact()
