"""Exact values of the form ``coef * sqrt(radicand) + const``.

Every bound in this package has a single square-root term with rational
coefficient and radicand, so comparisons against rationals can be decided
exactly by squaring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class SurdValue:
    coef: Fraction
    radicand: Fraction
    const: Fraction

    def __post_init__(self):
        if self.coef < 0 or self.radicand < 0:
            raise ValueError("coef and radicand must be nonnegative")

    @property
    def root_term_squared(self) -> Fraction:
        return self.coef * self.coef * self.radicand

    @property
    def root_term(self) -> float:
        return math.sqrt(self.root_term_squared)

    def __float__(self) -> float:
        return self.root_term + float(self.const)

    def le(self, q) -> bool:
        """Exactly decide ``self <= q`` for rational ``q``."""
        gap = Fraction(q) - self.const
        return gap >= 0 and gap * gap >= self.root_term_squared

    def ge(self, q) -> bool:
        """Exactly decide ``self >= q`` for rational ``q``."""
        gap = Fraction(q) - self.const
        return gap <= 0 or gap * gap <= self.root_term_squared

    def same_value(self, other: SurdValue) -> bool:
        # Sufficient (canonical form) equality; both sides here always share
        # the rational part.
        return (self.const == other.const
                and self.root_term_squared == other.root_term_squared)

    def le_surd(self, other: SurdValue) -> bool:
        """Exactly decide ``self <= other``.

        Reduces ``a*sqrt(r) + c <= b*sqrt(s) + d`` by repeated squaring.
        """
        x = self.root_term_squared  # lhs root term is sqrt(x)
        y = other.root_term_squared
        d = other.const - self.const
        # sqrt(x) <= sqrt(y) + d
        if d >= 0:
            # both sides nonnegative: x <= y + 2d sqrt(y) + d^2
            rest = x - y - d * d
            return rest <= 0 or rest * rest <= 4 * d * d * y
        # sqrt(x) + |d| <= sqrt(y)
        e = -d
        if x + e * e > y:
            return False
        rest = y - x - e * e  # need 2 e sqrt(x) <= rest
        return 4 * e * e * x <= rest * rest

    def to_dict(self) -> dict:
        return {
            "coef": self.coef,
            "radicand": self.radicand,
            "const": self.const,
            "value": float(self),
        }
