"""Exact Stein-method certification for Narayana, Poisson-binomial and
hypergeometric laws against the translated symmetric binomial."""

from .errors import DomainError
from .distributions import (
    BinHatParams,
    ExactDist,
    FloatDist,
    MomentSet,
    binhat_dist,
    binhat_params,
    catalan,
    hypergeometric_dist,
    narayana_dist,
    narayana_mean_var,
    narayana_number,
    poisson_binomial_dist,
    raw_moments,
    translated_poisson_dist,
)
from .metrics import (
    kolmogorov_vs_normal,
    local_limit_stat,
    normal_cdf,
    normal_pdf,
    tv_distance,
    tv_distance_float,
)
from .surd import SurdValue

__version__ = "0.1.0"

__all__ = [
    "BinHatParams",
    "DomainError",
    "ExactDist",
    "FloatDist",
    "MomentSet",
    "SurdValue",
    "binhat_dist",
    "binhat_params",
    "catalan",
    "hypergeometric_dist",
    "kolmogorov_vs_normal",
    "local_limit_stat",
    "narayana_dist",
    "narayana_mean_var",
    "narayana_number",
    "normal_cdf",
    "normal_pdf",
    "poisson_binomial_dist",
    "raw_moments",
    "translated_poisson_dist",
    "tv_distance",
    "tv_distance_float",
]
