"""Koszul homology lengths and partial Euler characteristics over Z/p^k."""

__version__ = "0.1.0"

from .coeff import CoeffRing, NotAUnit, image_length, smith_normal_form, snf_exponents
from .finlength import FinModule, FinMorphism, IsoType, NotAComplex, homology_length_at, iso_type
from .koszul import (
    ActionNotInRadical,
    ActionsDoNotCommute,
    ActionSystem,
    EulerProfile,
    boundary_identities,
    build_koszul,
    chi0_dichotomy_check,
    euler_profile,
    invariance_suite,
    verify_serre,
)
from .graded import (
    GradedIdeal,
    GradedPresentation,
    koszul_strand_profile,
    lech_multiplicity_table,
    shift_check,
    validate_multiplicity_system,
)
from .lift import construct_lift, verify_base_change
from .lab import GeneratorSpec, combinatorial_length, generate, oracle_homology
