"""Integer-supported distributions with exact rational probabilities.

All masses are :class:`fractions.Fraction`; the only float-backed law is the
translated Poisson, which is used solely for a numerical comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Sequence

from scipy import stats

from .errors import DomainError

__all__ = [
    "BinHatParams",
    "ExactDist",
    "FloatDist",
    "MomentSet",
    "binhat_dist",
    "binhat_params",
    "catalan",
    "frac_part",
    "hypergeometric_dist",
    "narayana_dist",
    "narayana_mean_var",
    "narayana_number",
    "poisson_binomial_dist",
    "raw_moments",
    "translated_poisson_dist",
]


def as_fraction(x) -> Fraction:
    """Coerce an exact rational (int, Fraction, "a/b" string) to Fraction.

    Floats are refused: silently converting them would defeat exactness.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (Rational, str)):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def frac_part(x: Fraction) -> Fraction:
    """``x - floor(x)``, in ``[0, 1)`` also for negative ``x``."""
    return x - math.floor(x)


@dataclass(frozen=True)
class ExactDist:
    """Law on the integers ``offset, offset+1, ..., offset+len(probs)-1``.

    Masses are exact, nonnegative and sum to one; both end masses are
    nonzero, so ``offset`` is the minimum of the support.
    """

    offset: int
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        if not probs:
            raise DomainError("empty distribution")
        if any(p < 0 for p in probs):
            raise DomainError("negative mass")
        if probs[0] == 0 or probs[-1] == 0:
            raise DomainError("support is not trimmed")
        if sum(probs) != 1:
            raise DomainError("masses do not sum to 1")

    @classmethod
    def from_weights(cls, offset: int, weights: Sequence) -> ExactDist:
        """Normalise nonnegative exact weights, trimming zero end masses."""
        weights = [Fraction(w) for w in weights]
        lo, hi = 0, len(weights)
        while lo < hi and weights[lo] == 0:
            lo += 1
        while hi > lo and weights[hi - 1] == 0:
            hi -= 1
        total = sum(weights[lo:hi])
        if total <= 0:
            raise DomainError("weights have no positive mass")
        return cls(offset + lo, tuple(w / total for w in weights[lo:hi]))

    @classmethod
    def point_mass(cls, k: int) -> ExactDist:
        return cls(k, (Fraction(1),))

    def __len__(self) -> int:
        return len(self.probs)

    @property
    def lo(self) -> int:
        return self.offset

    @property
    def hi(self) -> int:
        return self.offset + len(self.probs) - 1

    def support(self) -> range:
        return range(self.lo, self.hi + 1)

    def items(self) -> Iterable[tuple[int, Fraction]]:
        return zip(self.support(), self.probs)

    def pmf(self, k: int) -> Fraction:
        i = k - self.offset
        if 0 <= i < len(self.probs):
            return self.probs[i]
        return Fraction(0)

    def expect(self, f: Callable[[int], object]) -> Fraction:
        return sum((p * f(k) for k, p in self.items()), Fraction(0))

    def mean(self) -> Fraction:
        return self.expect(lambda k: k)

    def variance(self) -> Fraction:
        m = self.mean()
        return self.expect(lambda k: (k - m) ** 2)

    def cdf_values(self) -> list[Fraction]:
        """Cumulative masses ``P[X <= k]`` over the support."""
        out, acc = [], Fraction(0)
        for p in self.probs:
            acc += p
            out.append(acc)
        return out

    def to_float(self) -> FloatDist:
        return FloatDist(self.offset, tuple(float(p) for p in self.probs), 0.0)

    def to_json(self) -> dict:
        from .serialize import decimal_string

        return {
            "offset": self.offset,
            "probs": [decimal_string(p) for p in self.probs],
            "exact": [f"{p.numerator}/{p.denominator}" for p in self.probs],
        }


@dataclass(frozen=True)
class FloatDist:
    """Float-valued, possibly truncated law on consecutive integers.

    ``omitted`` is an upper bound on the mass dropped by truncation.
    """

    offset: int
    probs: tuple[float, ...]
    omitted: float = 0.0

    def pmf(self, k: int) -> float:
        i = k - self.offset
        if 0 <= i < len(self.probs):
            return self.probs[i]
        return 0.0

    @property
    def hi(self) -> int:
        return self.offset + len(self.probs) - 1


@dataclass(frozen=True)
class BinHatParams:
    """Rounding data for the translated almost-symmetric binomial.

    The law is ``Bin(n_hat, 1/2 - t)`` shifted by the integer ``shift``.
    """

    mu: Fraction
    sigma2: Fraction
    n_hat: int
    delta: Fraction
    t: Fraction
    shift: int

    @property
    def p(self) -> Fraction:
        return Fraction(1, 2) - self.t

    def variance(self) -> Fraction:
        return self.n_hat * (Fraction(1, 4) - self.t * self.t)

    def a(self, k) -> Fraction:
        """Correction coefficient ``n_hat t^2 - (k - mu) t - delta/4``."""
        return self.n_hat * self.t ** 2 - (k - self.mu) * self.t - self.delta / 4


@dataclass(frozen=True)
class MomentSet:
    m1: Fraction
    m2: Fraction
    m3: Fraction
    m4: Fraction

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.m1, self.m2, self.m3, self.m4)


def catalan(n: int) -> int:
    if n < 0:
        raise DomainError("catalan needs n >= 0")
    return math.comb(2 * n, n) // (n + 1)


def narayana_number(n: int, k: int) -> int:
    if not 1 <= k <= n:
        raise DomainError(f"narayana_number needs 1 <= k <= n, got n={n}, k={k}")
    return math.comb(n, k - 1) * math.comb(n, k) // n


def narayana_dist(n: int) -> ExactDist:
    """Law of K with ``P[K=k] = N(n,k) / C_n`` on ``{1, ..., n}``."""
    if n < 1:
        raise DomainError("narayana_dist needs n >= 1")
    c = catalan(n)
    return ExactDist(1, tuple(Fraction(narayana_number(n, k), c)
                              for k in range(1, n + 1)))


def narayana_mean_var(n: int) -> tuple[Fraction, Fraction]:
    if n < 2:
        raise DomainError("narayana_mean_var needs n >= 2")
    return Fraction(n + 1, 2), Fraction((n - 1) * (n + 1), 4 * (2 * n - 1))


def poisson_binomial_dist(p: Sequence) -> ExactDist:
    """Exact law of a sum of independent Bernoulli(p_i), by convolution."""
    ps = [as_fraction(x) for x in p]
    for x in ps:
        if not 0 <= x <= 1:
            raise DomainError(f"success probability {x} outside [0, 1]")
    # integer weights over the product of the denominators; Fraction
    # arithmetic would pay a gcd at every step
    weights = [1]
    for x in ps:
        a, b = x.numerator, x.denominator
        nxt = [(b - a) * w for w in weights] + [0]
        for j, w in enumerate(weights):
            nxt[j + 1] += a * w
        weights = nxt
    return ExactDist.from_weights(0, weights)


def hypergeometric_dist(N: int, n: int, m: int) -> ExactDist:
    """Number of good items among ``n`` drawn without replacement from ``N``
    items of which ``m`` are good."""
    if N < 1 or not 0 <= m <= N or not 0 <= n <= N:
        raise DomainError(f"invalid hypergeometric parameters N={N}, n={n}, m={m}")
    lo, hi = max(0, n + m - N), min(n, m)
    total = math.comb(N, n)
    return ExactDist(lo, tuple(Fraction(math.comb(m, k) * math.comb(N - m, n - k), total)
                               for k in range(lo, hi + 1)))


def binhat_params(mu, sigma2) -> BinHatParams:
    mu, sigma2 = as_fraction(mu), as_fraction(sigma2)
    if sigma2 <= 0:
        raise DomainError("binhat_params needs sigma2 > 0")
    n_hat = math.ceil(4 * sigma2)
    delta = n_hat - 4 * sigma2
    y = -mu + 2 * sigma2 + delta / 2
    t = frac_part(y) / n_hat
    shift = -math.floor(y)
    if t > Fraction(1, 2):
        # Only possible when n_hat == 1, i.e. sigma2 <= 1/4.
        raise DomainError(
            f"Bi-hat({mu}, {sigma2}) is undefined: success probability 1/2 - t < 0")
    return BinHatParams(mu, sigma2, n_hat, delta, t, shift)


def binhat_dist(params: BinHatParams) -> ExactDist:
    n = params.n_hat
    p = params.p
    # Shared denominator keeps the binomial row in integer arithmetic.
    den = p.denominator
    a = p.numerator
    b = den - a
    scale = den ** n
    weights = [Fraction(math.comb(n, j) * a ** j * b ** (n - j), scale)
               for j in range(n + 1)]
    # t = 1/2 leaves a point mass
    return ExactDist.from_weights(params.shift, weights)


def translated_poisson_dist(mu, sigma2, truncation_mass: float = 1e-12) -> FloatDist:
    """Poisson(sigma2 + <mu - sigma2>) shifted by floor(mu - sigma2).

    The upper tail is cut where the remaining mass drops below
    ``truncation_mass``; the dropped mass is recorded in ``omitted``.
    """
    mu, sigma2 = as_fraction(mu), as_fraction(sigma2)
    if sigma2 <= 0:
        raise DomainError("translated_poisson_dist needs sigma2 > 0")
    if not 0 < truncation_mass <= 1e-9:
        raise DomainError("truncation_mass must lie in (0, 1e-9]")
    gap = mu - sigma2
    rate = float(sigma2 + frac_part(gap))
    shift = math.floor(gap)
    top = int(stats.poisson.isf(truncation_mass, rate))
    while stats.poisson.sf(top, rate) >= truncation_mass:
        top += 1
    ks = range(top + 1)
    probs = tuple(float(v) for v in stats.poisson.pmf(ks, rate))
    return FloatDist(shift, probs, float(stats.poisson.sf(top, rate)))


def raw_moments(d: ExactDist, up_to: int = 4) -> MomentSet:
    """Exact raw moments ``E X^r`` for ``r <= up_to``; higher slots are 0."""
    if not 1 <= up_to <= 4:
        raise DomainError("up_to must be in 1..4")
    ms = [d.expect(lambda k, r=r: k ** r) if r <= up_to else Fraction(0)
          for r in range(1, 5)]
    return MomentSet(*ms)
