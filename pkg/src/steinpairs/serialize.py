"""Rendering of exact values for JSON/CSV reports."""

from __future__ import annotations

import dataclasses
from decimal import Decimal, localcontext
from fractions import Fraction

SIGNIFICANT_DIGITS = 40


def _terminates(den: int) -> bool:
    for f in (2, 5):
        while den % f == 0:
            den //= f
    return den == 1


def decimal_string(x, digits: int = SIGNIFICANT_DIGITS) -> str:
    """Decimal rendering of a rational.

    Terminating expansions are printed exactly; others are rounded to
    ``digits`` significant digits.
    """
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    if _terminates(x.denominator):
        with localcontext() as ctx:
            ctx.prec = len(str(x.numerator)) + 4 * len(str(x.denominator)) + 10
            d = Decimal(x.numerator) / Decimal(x.denominator)
        return format(d.normalize(), "f")
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(x.numerator) / Decimal(x.denominator)
    return format(d, "f") if abs(d) >= Decimal("1e-6") else format(d, "E")


def exact_string(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def render(x, precision: str = "exact"):
    """Render one report cell: rationals become strings, others pass through."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, Fraction):
        if precision == "float64":
            return repr(float(x))
        return decimal_string(x)
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return repr(x)
    if dataclasses.is_dataclass(x):
        return {k: render(v, precision) for k, v in dataclasses.asdict(x).items()}
    if isinstance(x, dict):
        return {k: render(v, precision) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [render(v, precision) for v in x]
    return x
