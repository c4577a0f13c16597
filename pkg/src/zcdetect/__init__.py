"""Entanglement detection for bipartite states with PPT and generalized concurrences.

The 2 x 4 rank-two case gets special treatment: states whose concurrence
vanishes for every conjugation in the family are split into separable and
entangled ones by their canonical form.
"""
from .detect import (
    DEFAULT_SEED,
    DetectionVerdict,
    classify_zero_concurrence,
    detect,
    max_concurrence_search,
    mixed_concurrence_full,
    mixed_concurrence_reduced,
    ppt_test,
    pure_concurrence,
    wootters_concurrence,
)
from .errors import ZCError
from .states import (
    CanonicalForm,
    DensityMatrix,
    RankTwoState,
    canonicalize,
    make_ppt_form,
    make_separable,
    make_zce,
)
from .symmetries import CartanParams, Conjugation, conjugation_from_params, conjugation_from_su4

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SEED",
    "CanonicalForm",
    "CartanParams",
    "Conjugation",
    "DensityMatrix",
    "DetectionVerdict",
    "RankTwoState",
    "ZCError",
    "canonicalize",
    "classify_zero_concurrence",
    "conjugation_from_params",
    "conjugation_from_su4",
    "detect",
    "make_ppt_form",
    "make_separable",
    "make_zce",
    "max_concurrence_search",
    "mixed_concurrence_full",
    "mixed_concurrence_reduced",
    "ppt_test",
    "pure_concurrence",
    "wootters_concurrence",
]
