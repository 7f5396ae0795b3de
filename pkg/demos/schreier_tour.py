"""
Schreier families and their weights
===================================

Membership, maximality and the canonical weights of maximal sets.
"""

from aslab.schreier import enumerate_maximal, greedy_decompose, is_maximal, is_member, weights

F = (2, 3, 4, 5, 6, 7)
print(F, "in S_1:", is_member(F, 1), " in S_2:", is_member(F, 2), " maximal in S_2:", is_maximal(F, 2))

# weights of a maximal set sum to exactly one
W = weights(F, 2)
print(dict(W), "total", W.total())

# the greedy split into maximal S_1 pieces
print([b.elements for b in greedy_decompose(F, 1, 2)])

# all maximal S_1 sets with minimum 3 inside [1, 8]
print(list(enumerate_maximal(1, 3, 8)))
