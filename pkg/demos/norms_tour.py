"""
Exact norms on the Tsirelson-type model spaces
==============================================

Norms of finitely supported vectors are computed exactly: rational for the
plain family, as a q-th root of a rational after q-convexification.
"""

from fractions import Fraction

from aslab.norms import FinVec, NormParams, evens, norm, norm_bruteforce

half = Fraction(1, 2)
T = NormParams("T", half, 1)

# a flat block of length n starting at n splits into n singletons
for n in range(2, 6):
    x = FinVec({i: 1 for i in range(n, 2 * n)})
    print(f"||sum of e_i for {n} <= i <= {2 * n - 1}|| = {norm(T, x)}")

# the brute-force oracle walks every admissible family and agrees exactly
x = FinVec({3: 1, 4: Fraction(-1, 2), 7: 2, 8: 1})
print("dp:", norm(T, x), " brute force:", norm_bruteforce(T, x))

# q = 2: the value is carried as an exact square root
for conv in ("theta_to_q", "theta_direct"):
    p = NormParams("T", half, 2, (), conv)
    print(conv, norm(p, FinVec({3: 1, 4: 1, 5: 1})))

# admissibility along the even integers needs m_n = 2n <= min I_1
pe = NormParams("T", half, 1, evens(50))
print("evens:", norm(pe, FinVec({3: 1, 4: 1, 5: 1})), " plain:", norm(T, FinVec({3: 1, 4: 1, 5: 1})))
