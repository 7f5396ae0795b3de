"""
Press-down and lift-up norms on a block structure
=================================================

Profiles of block norms measured by an outer Tsirelson norm.
"""

from fractions import Fraction

from aslab.fdd import BlockStructure, LrNorm, TNorm, lift_up_norm, press_bracket, press_norm_bounds
from aslab.norms import FinVec, NormParams

outer = TNorm(NormParams("T", Fraction(1, 2), 1))
s = BlockStructure((1, 1, 1, 1, 1, 1), LrNorm("inf"), outer)
z = FinVec({3: 1, 4: 1, 5: 1})
print("lift-up:", lift_up_norm(s, z), " bracket:", press_bracket(s, z))

b = press_norm_bounds(s, z)
print("press norm in", f"[{b.lower}, {b.upper}]", "after", b.decompositions_tried, "decompositions")

# with an l_1 base the single interval [3, 5] carries the whole mass
s1 = BlockStructure((1,) * 6, LrNorm("1"), outer)
print("lift-up with l_1 base:", lift_up_norm(s1, z))
