"""Distances between integer-supported laws and to the normal."""

from __future__ import annotations

import math
from fractions import Fraction

from .distributions import ExactDist, FloatDist, as_fraction
from .errors import DomainError

__all__ = [
    "NORMAL_ACCURACY",
    "kolmogorov_vs_normal",
    "local_limit_stat",
    "normal_cdf",
    "normal_pdf",
    "tv_distance",
    "tv_distance_float",
]

# Absolute error bound for normal_cdf / normal_pdf on |x| <= 12. libm's erfc
# is accurate to a few ulp, far inside this.
NORMAL_ACCURACY = 1e-12
_TAIL_CUTOFF = 12.0  # Phi(-12) ~ 1.8e-33


def normal_cdf(x: float) -> float:
    if x <= -_TAIL_CUTOFF:
        return 0.0
    if x >= _TAIL_CUTOFF:
        return 1.0
    return 0.5 * math.erfc(-x / math.sqrt(2))


def normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


def tv_distance(P: ExactDist, Q: ExactDist) -> Fraction:
    """Exact total variation distance, as half the L1 distance of the pmfs."""
    lo = min(P.lo, Q.lo)
    hi = max(P.hi, Q.hi)
    total = Fraction(0)
    for k in range(lo, hi + 1):
        total += abs(P.pmf(k) - Q.pmf(k))
    return total / 2


def tv_distance_float(P: FloatDist, Q: FloatDist) -> float:
    """Half-L1 distance of float pmfs.

    The result is within ``P.omitted + Q.omitted`` of the untruncated value.
    """
    lo = min(P.offset, Q.offset)
    hi = max(P.hi, Q.hi)
    return 0.5 * math.fsum(abs(P.pmf(k) - Q.pmf(k)) for k in range(lo, hi + 1))


def kolmogorov_vs_normal(d: ExactDist, mu, sigma: float) -> float:
    """``sup_x |P[(X - mu)/sigma <= x] - Phi(x)|``.

    The CDF of X is a step function and Phi is continuous, so the supremum
    is attained at a jump, from the left or the right.
    """
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    mu = as_fraction(mu)
    best = 0.0
    below = Fraction(0)
    for k, p in d.items():
        phi = normal_cdf(float(k - mu) / sigma)
        above = below + p
        best = max(best, abs(float(below) - phi), abs(float(above) - phi))
        below = above
    return best


def local_limit_stat(d: ExactDist, mu, sigma: float, width: float = 40.0) -> float:
    """``sigma**0.5 * sup_k |P[X=k] - phi((k - mu)/sigma)/sigma|``.

    Integers off the support contribute the density term alone; the scan
    covers the support and ``mu +- width*sigma``, beyond which the density
    term is below 1e-340.
    """
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    mu = as_fraction(mu)
    lo = min(d.lo, math.floor(mu - Fraction(width * sigma)))
    hi = max(d.hi, math.ceil(mu + Fraction(width * sigma)))
    best = 0.0
    for k in range(lo, hi + 1):
        dens = normal_pdf(float(k - mu) / sigma) / sigma
        best = max(best, abs(float(d.pmf(k)) - dens))
    return math.sqrt(sigma) * best
