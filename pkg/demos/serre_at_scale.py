"""
Non-negativity over random finite-length instances
==================================================

Draw reproducible instances, compute every partial Euler characteristic and
compare the Smith normal form pipeline with brute-force enumeration.
"""

import collections

from koszul_euler import GeneratorSpec, euler_profile
from koszul_euler.lab import generate, oracle_homology

spec = GeneratorSpec(seed=11, p_values=(2, 3, 5), k_values=(1, 2, 3), n_values=(1, 2, 3), max_length=24)
print(spec.provenance())

smallest = collections.Counter()
for sys in generate(spec, 300):
    prof = euler_profile(sys)
    assert min(prof.chis) >= 0
    assert prof.chis[0] == 0
    smallest[min(prof.chis[1:])] += 1
print("min over j >= 1 of chi_j:", dict(sorted(smallest.items())))

###############################################################################
# The oracle lists subgroups element by element, so keep |M| small.
small = GeneratorSpec(seed=12, p_values=(2, 3), k_values=(1, 2), n_values=(2, 3), max_length=12, max_order=512)
agree = sum(
    euler_profile(sys).homology_lengths == oracle_homology(sys, 512).homology_lengths
    for sys in generate(small, 50)
)
print(f"oracle agreement: {agree}/50")
