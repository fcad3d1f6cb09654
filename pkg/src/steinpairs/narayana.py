"""Narayana law: its birth-death pair, moment ladder and TV certification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .distributions import (
    ExactDist,
    MomentSet,
    narayana_dist,
    narayana_mean_var,
)
from .errors import DomainError
from .metrics import kolmogorov_vs_normal, local_limit_stat
from .stein_core import BirthDeathKernel, BoundReport, certify, extract_lambda
from .surd import SurdValue

__all__ = [
    "KOLMOGOROV_CONSTANT",
    "NarayanaInstance",
    "Theorem1Report",
    "closed_moments",
    "intermediate_bound",
    "pair_checks",
    "corollary_checks",
    "lemma5_identities",
    "moment_ladder",
    "narayana_instance",
    "narayana_kernel",
    "theorem1_certify",
    "var_s_closed",
]

KOLMOGOROV_CONSTANT = 1.59


def _require(n: int):
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")


def narayana_kernel(n: int) -> BirthDeathKernel:
    """Birth-death chain on ``{1..n}`` reversible for the Narayana law."""
    _require(n)
    den = n * (n - 1)
    return BirthDeathKernel.from_functions(
        1, n,
        up=lambda k: Fraction((n - k) * (n - k + 1), den),
        down=lambda k: Fraction(k * (k - 1), den),
    )


@dataclass(frozen=True)
class NarayanaInstance:
    n: int
    dist: ExactDist
    kernel: BirthDeathKernel
    mu: Fraction
    sigma2: Fraction
    lambda_: Fraction


def narayana_instance(n: int) -> NarayanaInstance:
    _require(n)
    mu, sigma2 = narayana_mean_var(n)
    return NarayanaInstance(n, narayana_dist(n), narayana_kernel(n), mu, sigma2,
                            Fraction(2, n - 1))


def closed_moments(n: int) -> MomentSet:
    _require(n)
    m1 = Fraction(n + 1, 2)
    m2 = Fraction(n ** 3 + 2 * n ** 2 - 1, 4 * n - 2)
    m3 = Fraction((n ** 2 + 2 * n - 2) * (n + 1) ** 2, 8 * n - 4)
    m4 = Fraction((n ** 5 + 4 * n ** 4 - 3 * n ** 3 - 12 * n ** 2 + 2 * n + 6) * (n + 1),
                  4 * (2 * n - 1) * (2 * n - 3))
    return MomentSet(m1, m2, m3, m4)


# Polynomials in K: coefficient lists, lowest degree first.

def _mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _add(a, b):
    size = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(size)]


def _step_increment(c: int, r: int):
    """Coefficients of ``(K + c)^r - K^r``."""
    out = [Fraction(math.comb(r, j) * c ** (r - j)) for j in range(r + 1)]
    out[r] -= 1
    return out


def _stationarity_poly(n: int, r: int):
    """``n(n-1) E[(K')^r - K^r | K]`` as a polynomial in K; its mean is 0."""
    up = [Fraction(n * (n + 1)), Fraction(-(2 * n + 1)), Fraction(1)]  # (n-K)(n-K+1)
    down = [Fraction(0), Fraction(-1), Fraction(1)]                   # K(K-1)
    poly = _add(_mul(up, _step_increment(1, r)), _mul(down, _step_increment(-1, r)))
    # The two K^{r+1} contributions must cancel, leaving degree r.
    if any(c != 0 for c in poly[r + 1:]):
        raise AssertionError(f"degree {r + 1} terms did not cancel")
    return poly[:r + 1]


def _solve_top(poly, known) -> Fraction:
    """Solve ``sum_j poly[j] m_j = 0`` for the top moment, given the rest."""
    r = len(poly) - 1
    if poly[r] == 0:
        raise AssertionError(f"identity of order {r} does not determine m_{r}")
    rest = sum(poly[j] * known[j] for j in range(r))
    return -rest / poly[r]


def moment_ladder(n: int) -> MomentSet:
    """First four moments of K from the pair alone.

    ``m1``, ``m2`` and ``m4`` come from ``E[(K')^r - K^r] = 0``; ``m3`` from
    the symmetry ``E (K - mu)^3 = 0``.
    """
    _require(n)
    m = [Fraction(1)]
    m.append(_solve_top(_stationarity_poly(n, 1), m))
    m.append(_solve_top(_stationarity_poly(n, 2), m))
    mu = m[1]
    m.append(3 * mu * m[2] - 3 * mu ** 2 * m[1] + mu ** 3)
    m.append(_solve_top(_stationarity_poly(n, 4), m))
    return MomentSet(*m[1:])


def var_s_closed(n: int) -> Fraction:
    _require(n)
    return Fraction((n + 1) * (n - 2), (2 * n - 1) ** 2 * (2 * n - 3) * (n - 1))


def lemma5_identities(n: int) -> dict:
    """Each intermediate step of the Var S computation, evaluated by direct
    summation and compared exactly with its closed form."""
    _require(n)
    d = narayana_dist(n)
    q = lambda k: (k - 1) * (n - k)
    e_q = d.expect(q)
    e_q2 = d.expect(lambda k: q(k) ** 2)
    var_q = e_q2 - e_q ** 2
    var_s_direct = d.expect(lambda k: (1 - Fraction(2 * q(k), n * (n - 1))) ** 2) \
        - d.expect(lambda k: 1 - Fraction(2 * q(k), n * (n - 1))) ** 2
    closed = {
        "e_q": Fraction(n * (n - 1) * (n - 2), 4 * n - 2),
        "e_q2": Fraction(n ** 2 * (n ** 4 - 7 * n ** 3 + 19 * n ** 2 - 23 * n + 10),
                         4 * (4 * n ** 2 - 8 * n + 3)),
        "var_q": Fraction((n + 1) * n ** 2 * (n - 1) * (n - 2),
                          4 * (2 * n - 1) ** 2 * (2 * n - 3)),
    }
    return {
        "e_q": e_q == closed["e_q"],
        "e_q2": e_q2 == closed["e_q2"],
        "var_q": var_q == closed["var_q"],
        "var_s_scaling": var_s_direct == Fraction(4, n ** 2 * (n - 1) ** 2) * var_q,
        "var_s": var_s_direct == var_s_closed(n),
    }


@dataclass(frozen=True)
class Theorem1Report:
    n: int
    report: BoundReport
    intermediate: SurdValue
    bound_12_over_n: Fraction
    lambda_ok: bool
    matches_abstract_bound: bool
    radicand_below_half: bool
    tail_term_ok: bool

    @property
    def tv(self) -> Fraction:
        return self.report.tv_exact

    @property
    def tv_le_intermediate(self) -> bool:
        return self.intermediate.ge(self.tv)

    @property
    def intermediate_le_12_over_n(self) -> bool:
        return self.intermediate.le(self.bound_12_over_n)

    @property
    def holds(self) -> bool:
        return (self.report.valid and self.lambda_ok and self.matches_abstract_bound
                and self.tv_le_intermediate and self.intermediate_le_12_over_n
                and self.radicand_below_half and self.tail_term_ok)


def intermediate_bound(n: int) -> SurdValue:
    """``(1/n) sqrt(n^2 (n-2) / ((2n-3)(n-1)(n+1))) + 5.6 (2n-1)/((n-1)(n+1))``."""
    _require(n)
    radicand = Fraction(n ** 2 * (n - 2), (2 * n - 3) * (n - 1) * (n + 1))
    return SurdValue(Fraction(1, n), radicand,
                     Fraction(28, 5) * Fraction(2 * n - 1, (n - 1) * (n + 1)))


def theorem1_certify(n: int) -> Theorem1Report:
    inst = narayana_instance(n)
    rep = certify(inst.kernel, inst.dist, inst.mu, inst.sigma2, params={"n": n})
    inter = intermediate_bound(n)
    return Theorem1Report(
        n=n,
        report=rep,
        intermediate=inter,
        bound_12_over_n=Fraction(12, n),
        lambda_ok=rep.params["lambda"] == inst.lambda_,
        matches_abstract_bound=inter.same_value(rep.bound),
        radicand_below_half=inter.radicand < Fraction(1, 2),
        tail_term_ok=n * inter.const <= Fraction(56, 5),
    )


def corollary_checks(n: int) -> dict:
    """Kolmogorov distance to the normal, the lower bound on sigma_n^2 and
    the local-limit statistic for the standardised Narayana law."""
    inst = narayana_instance(n)
    sigma = math.sqrt(inst.sigma2)
    kol = kolmogorov_vs_normal(inst.dist, inst.mu, sigma)
    kol_bound = KOLMOGOROV_CONSTANT / math.sqrt(n)
    ll = local_limit_stat(inst.dist, inst.mu, sigma)
    return {
        "n": n,
        "kolmogorov": kol,
        "kolmogorov_bound": kol_bound,
        "kolmogorov_ok": kol <= kol_bound,
        "sigma2": inst.sigma2,
        "sigma2_ge_n_over_8": inst.sigma2 >= Fraction(n, 8),
        "local_limit_stat": ll,
        "local_limit_scaled": ll * math.sqrt(n),
    }


def pair_checks(n: int) -> dict:
    """Reversibility, exact linearity with lambda = 2/(n-1), and E S = 2 lambda sigma^2."""
    inst = narayana_instance(n)
    diag = extract_lambda(inst.kernel, inst.dist)
    return {
        "reversibility_ok": diag.reversibility_residual == 0,
        "lambda_ok": diag.linear and diag.lambda_ == inst.lambda_,
        "mean_s_ok": diag.mean_s_identity,
        "var_s_ok": diag.var_s == var_s_closed(n),
        "diagnostics": diag,
    }
