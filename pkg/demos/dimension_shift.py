"""
Shifting homology along 0 -> J -> B -> B/J -> 0
===============================================

Since the variables are regular on B, the long exact sequence gives
H_i(y, B/J) = H_{i-1}(y, J) for i >= 2, degree by degree.
"""

from koszul_euler import CoeffRing
from koszul_euler.graded import GradedIdeal, shift_check, variable

X, Y = variable(2, 0), variable(2, 1)
ring = CoeffRing(3, 2)
cases = {
    "(X^2)": [{(2, 0): 1}],
    "(3X, 3Y)": [{(1, 0): 3}, {(0, 1): 3}],
    "(X^2 + 3Y^2)": [{(2, 0): 1, (0, 2): 3}],
    "(XY, 3X^2)": [{(1, 1): 1}, {(2, 0): 3}],
}
for name, gens in cases.items():
    v = shift_check(GradedIdeal(ring, 2, gens), [X, Y])
    print(f"{name:14s} {v.status:12s} degree bound {v.details['degree_bound']}, chi pairs {v.details['chi_shift']}")

# too small a degree bound cannot certify stabilization
v = shift_check(GradedIdeal(ring, 2, cases["(X^2)"]), [X, Y], degree_bound=1)
print("bound 1:", v.status)
