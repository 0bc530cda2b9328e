"""Divergence-based regression for compositional data."""

from ._core import (
    CompregError,
    FitResult,
    alr,
    alr_inverse,
    chi_square,
    closure,
    clr,
    esov,
    fit,
    generate_logistic_normal,
    hellinger,
    helmert_submatrix,
    inject_zeros,
    jeffreys,
    kl,
    loocv_kl,
    predict,
    replace_zeros,
    run_comparison,
    ternary_point,
    weighted_js,
)

__all__ = [
    "CompregError",
    "FitResult",
    "alr",
    "alr_inverse",
    "chi_square",
    "closure",
    "clr",
    "esov",
    "fit",
    "generate_logistic_normal",
    "hellinger",
    "helmert_submatrix",
    "inject_zeros",
    "jeffreys",
    "kl",
    "loocv_kl",
    "predict",
    "replace_zeros",
    "run_comparison",
    "ternary_point",
    "weighted_js",
]
