"""
Lifting to a polynomial ring over Z/p^k
=======================================

A finite-length module with commuting nilpotent actions is a module over
B = Z/p^k[X_1..X_n] with X_i acting as x_i. The certificate records the three
checks and the Koszul profile is recomputed through the graded strands.
"""

import json

from koszul_euler import GeneratorSpec, euler_profile
from koszul_euler.lab import instance_at
from koszul_euler.lift import construct_lift, graded_profile, verify_base_change

spec = GeneratorSpec(seed=5, p_values=(3,), k_values=(3,), n_values=(3,), max_length=20)
sys = instance_at(spec, 0)
print(sys.module)

cert = construct_lift(sys)
print(json.dumps(cert.to_dict(), indent=2))

print("over A:", euler_profile(sys).homology_lengths)
print("over B:", graded_profile(sys).homology_lengths)
print(verify_base_change(sys, cert).status)
