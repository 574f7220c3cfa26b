"""Random walks on free products Z^d1 * Z^d2: Green functions, spectral
degeneracy and critical mixing weights."""

from ._freewalk import (
    FactorMeasure,
    FreewalkError,
    bfs_oracle,
    classify,
    factor_from_json,
    find_alpha_star,
    green_eval,
    green_series,
    lazy_srw,
    monte_carlo,
    return_series,
    srw,
    tauberian_exponents,
    theta_of_factor,
    __version__,
)

__all__ = [
    "FactorMeasure",
    "FreewalkError",
    "bfs_oracle",
    "classify",
    "factor_from_json",
    "find_alpha_star",
    "green_eval",
    "green_series",
    "lazy_srw",
    "monte_carlo",
    "return_series",
    "srw",
    "tauberian_exponents",
    "theta_of_factor",
    "__version__",
]
