"""
Koszul homology of a small torsion module
=========================================

M = Z/4 with x acting as multiplication by 2. The Koszul complex is
M --2--> M, so H_1 = ann(2) = 2M and H_0 = M/2M, both of length one.
"""

from koszul_euler import ActionSystem, CoeffRing, build_koszul, euler_profile
from koszul_euler.koszul import boundary_identities

ring = CoeffRing(2, 2)
sys = ActionSystem.from_matrices(ring, [2], [[[2]]])

rep = build_koszul(sys)
for i in range(sys.n + 1):
    print(f"H_{i} = {rep.homology_iso_type(i)}")

profile = euler_profile(sys)
print("lengths", profile.homology_lengths, "chi", profile.chis)

# H_0 is M/(x)M and H_n is the common annihilator of the x_i
print(boundary_identities(sys, rep).details["checks"])

###############################################################################
# A richer module: Z/4[X]/(X^2, 2X) with x = X. Its Koszul lengths are (2, 2).
from koszul_euler.lab import p_monomial_system

# generators are (a, beta) for p^a X^beta
sys = p_monomial_system(ring, 1, [(0, (2,)), (1, (1,))])
print(sys.module, euler_profile(sys).homology_lengths)
