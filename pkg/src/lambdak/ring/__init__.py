"""Exact arithmetic foundation: Laurent polynomials in g, rational functions,
circle points and rational reconstruction."""
from .laurent import HalfLaurent, laurent_arith
from .points import (
    GENERIC,
    CirclePoint,
    CyclotomicNumber,
    Generic,
    LocalizedFraction,
    RootOfUnity,
    exact_value,
    exclusion_for_weights,
    numeric_value,
    roots_of_unity,
    vanishes_at,
)
from .rational import ONE_FN, ZERO_FN, RationalFn, g_minus_one_power, g_power, rational_normalize, to_rational_fn
from .reconstruct import ReconstructionError, rational_reconstruct

__all__ = [
    "HalfLaurent",
    "laurent_arith",
    "RationalFn",
    "rational_normalize",
    "to_rational_fn",
    "g_power",
    "g_minus_one_power",
    "ONE_FN",
    "ZERO_FN",
    "CirclePoint",
    "RootOfUnity",
    "Generic",
    "GENERIC",
    "CyclotomicNumber",
    "LocalizedFraction",
    "exact_value",
    "numeric_value",
    "vanishes_at",
    "roots_of_unity",
    "exclusion_for_weights",
    "rational_reconstruct",
    "ReconstructionError",
]
