"""Skew morphisms of finite cyclic groups.

A skew morphism of Z_n is a permutation phi fixing 0 with
phi(x + y) = phi(x) + phi^{pi(x)}(y) for a power function pi. The package
validates individual morphisms, enumerates complete censuses (brute-force
oracle and a backtracking enumerator), and implements the cyclic 2-group
toolkit: order-4 classification, lift constructions, companions, the
recursive census with Skew(2^e) = 4*Skew(2^{e-1}) - 4, and the closed form
(7*4^{e-2} + 8)/6.
"""

from .arith import divisors, is_phi_coprime, sqrt_units_mod_2e, totient
from .core import (
    DoesNotFixZero,
    InternalInvariantBroken,
    NoPowerExponent,
    NotAPermutation,
    NotWellDefined,
    OrbitOrderMismatch,
    PowerFunction,
    SkewMorphism,
    SkewMorphismError,
    SubgroupNotPreserved,
    ValidationError,
    try_from_images,
)
from .enumerate import (
    BudgetError,
    Census,
    CountReport,
    Method,
    MultiplicativityReport,
    brute_force_census,
    check_multiplicativity,
    enumerate_census,
    skew_count,
)
from .censusio import read_census, write_census
from .twopower import (
    CompanionTriple,
    LiftRequest,
    census_2e,
    closed_form,
    companions,
    count_2e,
    lift_exi,
    lifts_small,
    order4_skew_morphisms,
)

__version__ = "0.1.0"

__all__ = [
    "totient", "divisors", "is_phi_coprime", "sqrt_units_mod_2e",
    "SkewMorphism", "PowerFunction", "try_from_images",
    "SkewMorphismError", "ValidationError", "NotAPermutation",
    "DoesNotFixZero", "NoPowerExponent", "OrbitOrderMismatch",
    "NotWellDefined", "SubgroupNotPreserved", "InternalInvariantBroken",
    "Census", "CountReport", "Method", "MultiplicativityReport", "BudgetError",
    "brute_force_census", "enumerate_census", "skew_count",
    "check_multiplicativity",
    "read_census", "write_census",
    "census_2e", "closed_form", "count_2e", "order4_skew_morphisms",
    "lifts_small", "companions", "lift_exi", "LiftRequest", "CompanionTriple",
    "__version__",
]
