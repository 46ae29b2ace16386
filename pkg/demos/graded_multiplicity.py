"""
Multiplicity in the graded backend
==================================

Over B = Z/p^k[X_1..X_n] the powers X_i^t form a regular sequence, so only
H_0 survives and its length is k t^n. The Lech table of B with respect to the
variables recovers k as its leading coefficient.
"""

from koszul_euler import CoeffRing
from koszul_euler.graded import GradedPresentation, koszul_strand_profile, lech_multiplicity_table, variable

for k in (1, 2):
    for n in (1, 2):
        B = GradedPresentation.free(CoeffRing(2, k), n)
        for t in (1, 2, 3):
            rep = koszul_strand_profile(B, [variable(n, i, t) for i in range(n)])
            print(f"k={k} n={n} t={t}: totals {rep.totals}, stabilized {rep.stabilized}")

###############################################################################
# A module of smaller dimension: B/(X) over Z/4[X, Y] with y = (X, Y).
# Its Lech table grows linearly, so the top coefficient in t^2 is zero.
ring = CoeffRing(2, 2)
M = GradedPresentation.quotient(ring, 2, [variable(2, 0)])
table = lech_multiplicity_table(M, [variable(2, 0), variable(2, 1)], t_max=4)
print(table.rows, table.leading_coefficient)
