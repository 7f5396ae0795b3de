"""
A certified Schreier game on the dual space
===========================================

Player II announces integers growing fast enough and plays basis
functionals.  The payoff is certified from below by pairing.
"""

from fractions import Fraction

from aslab.games import GameSpec, phi_lower_certificate, play, strategy_constant_tail, strategy_growth_playerII
from aslab.norms import NormParams

theta, eps = Fraction(1, 2), Fraction(1, 4)
space = NormParams("T", theta, 1)
spec = GameSpec("Phi", Fraction(5, 4), 1, 1, space, "dual")
tr = play(spec, strategy_constant_tail(10), strategy_growth_playerII(theta, eps, 1), seed=42)
print("integers:", tr.F)
print("payoff >=", tr.payoff_lower, " winner:", tr.winner)

# the guaranteed bound (theta + eps)^(-1) climbs towards 1/theta = 2
for e in (Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)):
    cert = phi_lower_certificate(theta, 1, 1, e)
    print(f"eps={e}: P={cert['P']['theta_direct']}, certified >= {cert['payoff_lower']}, "
          f"guaranteed {cert['guaranteed']}")
