"""Certification for sums of independent indicators and the hypergeometric law."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .distributions import (
    as_fraction,
    hypergeometric_dist,
    poisson_binomial_dist,
    translated_poisson_dist,
)
from .errors import DomainError
from .metrics import tv_distance_float
from .stein_core import (
    TAIL_CONSTANT,
    BirthDeathKernel,
    BoundReport,
    binhat_tv,
    certify,
    report_from_bound,
    theorem2_bound,
)
from .surd import SurdValue

__all__ = [
    "Theorem3Report",
    "Theorem4Report",
    "bound6",
    "bound7",
    "bound8",
    "eq7_tp_comparison",
    "hyp_kernel",
    "hyp_lambda",
    "hyp_s_and_varpoly",
    "pb_kernel",
    "pb_var_s",
    "theorem3_certify",
    "theorem4_certify",
]


def _probs(p: Sequence) -> list[Fraction]:
    ps = [as_fraction(x) for x in p]
    if not ps:
        raise DomainError("need at least one indicator")
    for x in ps:
        if not 0 <= x <= 1:
            raise DomainError(f"success probability {x} outside [0, 1]")
    return ps


def pb_var_s(p: Sequence) -> Fraction:
    """Variance of the probability that the resampling pair moves.

    The move probability is affine in the indicators, so independence gives
    ``Var S = n^-2 sum (1 - 2 p_i)^2 p_i (1 - p_i)``.
    """
    ps = _probs(p)
    n = len(ps)
    return sum(((1 - 2 * x) ** 2 * x * (1 - x) for x in ps), Fraction(0)) / n ** 2


def _pb_sigma2(ps) -> Fraction:
    return sum((x * (1 - x) for x in ps), Fraction(0))


def bound6(p: Sequence) -> SurdValue:
    """``(1.4 + 0.5 sqrt(sum (1-2p)^2 p (1-p))) / sum p (1-p)``."""
    ps = _probs(p)
    s2 = _pb_sigma2(ps)
    if s2 == 0:
        raise DomainError("degenerate: all indicators are deterministic")
    rad = sum(((1 - 2 * x) ** 2 * x * (1 - x) for x in ps), Fraction(0))
    return SurdValue(1 / (2 * s2), rad, TAIL_CONSTANT / s2)


def bound7(p: Sequence) -> SurdValue:
    """Translated Poisson bound ``(2 + sqrt(sum p^3 (1-p))) / sum p (1-p)``."""
    ps = _probs(p)
    s2 = _pb_sigma2(ps)
    if s2 == 0:
        raise DomainError("degenerate: all indicators are deterministic")
    rad = sum((x ** 3 * (1 - x) for x in ps), Fraction(0))
    return SurdValue(1 / s2, rad, 2 / s2)


def _loo_pmfs(ps: list[Fraction]) -> list[list[Fraction]]:
    """pmf of the sum with indicator ``i`` removed, on ``0..n-1``, for each i."""
    n = len(ps)
    # prefix[i] = pmf of the first i indicators, suffix[i] = of indicators i..n-1
    def extend(pmf, x):
        out = [(1 - x) * w for w in pmf] + [Fraction(0)]
        for j, w in enumerate(pmf):
            out[j + 1] += x * w
        return out

    prefix = [[Fraction(1)]]
    for x in ps:
        prefix.append(extend(prefix[-1], x))
    suffix = [[Fraction(1)]]
    for x in reversed(ps):
        suffix.append(extend(suffix[-1], x))
    suffix.reverse()
    out = []
    for i in range(n):
        a, b = prefix[i], suffix[i + 1]
        conv = [Fraction(0)] * (len(a) + len(b) - 1)
        for j, u in enumerate(a):
            if u:
                for k, v in enumerate(b):
                    conv[j + k] += u * v
        out.append(conv)
    return out


def pb_kernel(p: Sequence) -> BirthDeathKernel:
    """Kernel induced on the sum by resampling one uniformly chosen indicator.

    ``up(k) = n^-1 sum_i p_i P[xi_i = 0 | X = k]`` and symmetrically for
    ``down``; the induced pair on ``X`` is exchangeable with lambda = 1/n.
    """
    ps = _probs(p)
    n = len(ps)
    dist = poisson_binomial_dist(ps)
    loo = _loo_pmfs(ps)

    def loo_at(i, j):
        return loo[i][j] if 0 <= j < len(loo[i]) else Fraction(0)

    ups, downs = [], []
    for k in dist.support():
        pk = dist.pmf(k)
        ups.append(sum((x * (1 - x) * loo_at(i, k) for i, x in enumerate(ps)), Fraction(0))
                   / (n * pk))
        downs.append(sum((x * (1 - x) * loo_at(i, k - 1) for i, x in enumerate(ps)), Fraction(0))
                     / (n * pk))
    return BirthDeathKernel(dist.lo, dist.hi, tuple(ups), tuple(downs))


@dataclass(frozen=True)
class Theorem3Report:
    p: tuple[Fraction, ...]
    mu: Fraction
    sigma2: Fraction
    degenerate: bool
    report: BoundReport | None = None
    matches_abstract_bound: bool | None = None

    @property
    def holds(self) -> bool:
        if self.degenerate:
            return True
        return self.report.holds and bool(self.matches_abstract_bound)


def theorem3_certify(p: Sequence) -> Theorem3Report:
    ps = _probs(p)
    n = len(ps)
    mu = sum(ps, Fraction(0))
    s2 = _pb_sigma2(ps)
    if s2 == 0:
        return Theorem3Report(tuple(ps), mu, s2, degenerate=True)
    dist = poisson_binomial_dist(ps)
    tv = binhat_tv(dist, mu, s2)
    b6 = bound6(ps)
    abstract = theorem2_bound(Fraction(1, n), s2, pb_var_s(ps))
    notes = () if tv is not None else ("Bi-hat undefined for these moments",)
    rep = report_from_bound(tv, b6, valid=True, notes=notes,
                            params={"n": n, "mu": mu, "sigma2": s2, "lambda": Fraction(1, n)})
    return Theorem3Report(tuple(ps), mu, s2, False, rep, b6.same_value(abstract))


def eq7_tp_comparison(p: Sequence, truncation_mass: float = 1e-12) -> dict:
    """Resampling bound for Bi-hat against the translated-Poisson bound, with
    the float TV distance to the translated Poisson for reference."""
    ps = _probs(p)
    mu = sum(ps, Fraction(0))
    s2 = _pb_sigma2(ps)
    b6, b7 = bound6(ps), bound7(ps)
    tp = translated_poisson_dist(mu, s2, truncation_mass)
    dist = poisson_binomial_dist(ps)
    tv_tp = tv_distance_float(dist.to_float(), tp)
    return {
        "bound6": float(b6),
        "bound7": float(b7),
        "better": "6" if b6.le_surd(b7) else "7",
        "tv_tp": tv_tp,
        "tv_tp_error": tp.omitted,
        "tv_tp_within_bound7": tv_tp - tp.omitted <= float(b7),
    }


def _hyp_check(N: int, n: int, m: int):
    if not (1 <= m < N and 1 <= n < N):
        raise DomainError(f"need 1 <= m < N and 1 <= n < N, got N={N}, n={n}, m={m}")


def hyp_lambda(N: int, n: int, m: int) -> Fraction:
    _hyp_check(N, n, m)
    return Fraction(N, m * (N - m + 1))


def hyp_kernel(N: int, n: int, m: int) -> BirthDeathKernel:
    """Swap one drawn item with one undrawn item (see the move probabilities
    below); reversible for Hyp(N, n, m)."""
    _hyp_check(N, n, m)
    lo, hi = max(0, n + m - N), min(n, m)
    return BirthDeathKernel.from_functions(
        lo, hi,
        up=lambda x: Fraction(m - x, m) * Fraction(n - x, N - m + 1),
        down=lambda x: Fraction(x, m) * Fraction(N - m - n + x, N - m + 1),
    )


def _hyp_sigma2(N, n, m) -> Fraction:
    return Fraction(m * n * (N - m) * (N - n), (N - 1) * N ** 2)


def hyp_s_and_varpoly(N: int, n: int, m: int) -> dict:
    """Exact checks of the closed form of S and of the variance polynomial
    ``Var((N - 2m - 2n) X + 2 X^2)`` together with both inequality steps."""
    _hyp_check(N, n, m)
    if N < 4:
        raise DomainError("the variance identity needs N >= 4")
    dist = hypergeometric_dist(N, n, m)
    kern = hyp_kernel(N, n, m)
    lam = hyp_lambda(N, n, m)
    c = N - 2 * m - 2 * n
    s_ok = all(kern.p_up(x) + kern.p_down(x) == lam * (m * n + c * x + 2 * x * x) / N
               for x in dist.support())

    f = lambda x: c * x + 2 * x * x
    ef = dist.expect(f)
    var_poly = dist.expect(lambda x: (f(x) - ef) ** 2)

    s2 = _hyp_sigma2(N, n, m)
    a, b = N - 2 * m, N - 2 * n
    terms = [
        a * a * b * b * (N - 2),
        2 * a * b * (4 * m - 3) * (n - 1),
        4 * a * (m - 1) * (n - 1) * (2 * m + 2 * n - 1),
        8 * (m - 1) * m * (n - 1) * (2 * m - n - 1),
        -a * a * b,
    ]
    den = (N - 3) * (N - 2) * (N - 1)
    closed = s2 * Fraction(sum(terms), den)
    step1 = s2 * (Fraction(a * a * b * b, (N - 3) * (N - 1)) + 130 * N)
    step2 = s2 * (Fraction(6 * a * a * b * b, N * N) + 130 * N)
    ratios = [Fraction(t, den * N) for t in terms[1:]]
    return {
        "s_closed_form_ok": s_ok,
        "var_poly": var_poly,
        "var_poly_closed": closed,
        "identity_ok": var_poly == closed,
        "step1_ok": closed <= step1,
        "step2_ok": step1 <= step2,
        # per-term ratios against the "constant times N" allowances of the estimate
        "term_ratios": ratios,
        "first_term_ok": ratios[0] <= 13,
    }


def bound8(N: int, n: int, m: int) -> SurdValue:
    """``sqrt(6 (N-2m)^2 (N-2n)^2 / N^3 + 130) / (2 sqrt(N) sigma) + 1.4/sigma^2``."""
    _hyp_check(N, n, m)
    s2 = _hyp_sigma2(N, n, m)
    inner = Fraction(6 * (N - 2 * m) ** 2 * (N - 2 * n) ** 2, N ** 3) + 130
    return SurdValue(Fraction(1), inner / (4 * N * s2), TAIL_CONSTANT / s2)


@dataclass(frozen=True)
class Theorem4Report:
    N: int
    n: int
    m: int
    report: BoundReport
    abstract: BoundReport

    @property
    def tv(self) -> Fraction:
        return self.report.tv_exact

    @property
    def abstract_le_bound8(self) -> bool:
        return self.abstract.bound.le_surd(self.report.bound)

    @property
    def holds(self) -> bool:
        return (self.abstract.valid and self.report.holds and self.abstract.holds
                and self.abstract_le_bound8)


def theorem4_certify(N: int, n: int, m: int) -> Theorem4Report:
    _hyp_check(N, n, m)
    if N < 4:
        raise DomainError("the hypergeometric bound needs N >= 4")
    dist = hypergeometric_dist(N, n, m)
    params = {"N": N, "n": n, "m": m}
    abstract = certify(hyp_kernel(N, n, m), dist, params=params)
    b8 = bound8(N, n, m)
    rep = report_from_bound(abstract.tv_exact, b8, valid=abstract.valid,
                            params=dict(abstract.params), notes=abstract.notes)
    return Theorem4Report(N, n, m, rep, abstract)
