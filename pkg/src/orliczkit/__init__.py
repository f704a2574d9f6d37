"""Computable Young-function calculus, Orlicz-Sobolev embedding targets,
Boyd indices, Luxemburg norms, and a raster-domain measure-density bench."""

from .young import (
    CurveError,
    GrowthComparison,
    MonotoneCurve,
    YoungFunction,
    build_young,
    compare_growth,
    conjugate,
    generalized_inverse,
    generalized_inverse_ex,
    integral_mean,
    load_yf1,
    save_yf1,
    scaled_power,
)

__all__ = [
    "CurveError",
    "GrowthComparison",
    "MonotoneCurve",
    "YoungFunction",
    "build_young",
    "compare_growth",
    "conjugate",
    "generalized_inverse",
    "generalized_inverse_ex",
    "integral_mean",
    "load_yf1",
    "save_yf1",
    "scaled_power",
]
