"""Exchangeable pairs from reversible birth-death kernels, the abstract
total-variation bound, and exact checks of the Stein identities behind it.

A pair ``(X, X')`` is represented by the law ``pi`` of ``X`` and the kernel
moving ``X`` to ``X'`` by at most one step. Detailed balance of the kernel
with respect to ``pi`` is what makes the pair exchangeable, and it is
certified exactly rather than assumed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .distributions import BinHatParams, ExactDist, as_fraction, binhat_dist, binhat_params
from .errors import DomainError
from .metrics import tv_distance
from .surd import SurdValue

__all__ = [
    "BirthDeathKernel",
    "BoundReport",
    "PairDiagnostics",
    "TableFunction",
    "TailEstimates",
    "certify",
    "characterization_check",
    "check_reversibility",
    "extract_lambda",
    "monomials",
    "pair_identity_check",
    "perturb",
    "random_functions",
    "s_function",
    "stein_operator",
    "tail_and_a_estimates",
    "theorem2_bound",
    "var_s",
]

TAIL_CONSTANT = Fraction(7, 5)
CHEBYSHEV_CONSTANT = Fraction(61, 100)

TestFunction = Callable[[int], Fraction]


@dataclass(frozen=True)
class BirthDeathKernel:
    """One-step kernel on ``{lo, ..., hi}``; ``up[i]`` and ``down[i]`` are
    the probabilities of moving from state ``lo + i`` to its neighbours."""

    lo: int
    hi: int
    up: tuple[Fraction, ...]
    down: tuple[Fraction, ...]

    def __post_init__(self):
        size = self.hi - self.lo + 1
        if size < 1 or len(self.up) != size or len(self.down) != size:
            raise DomainError("kernel tables do not match the state interval")
        for u, d in zip(self.up, self.down):
            if u < 0 or d < 0 or u + d > 1:
                raise DomainError("kernel probabilities out of range")
        if self.up[-1] != 0 or self.down[0] != 0:
            raise DomainError("kernel leaves the state interval")

    @classmethod
    def from_functions(cls, lo: int, hi: int, up, down) -> BirthDeathKernel:
        states = range(lo, hi + 1)
        return cls(lo, hi, tuple(Fraction(up(k)) for k in states),
                   tuple(Fraction(down(k)) for k in states))

    def states(self) -> range:
        return range(self.lo, self.hi + 1)

    def p_up(self, k: int) -> Fraction:
        self._check(k)
        return self.up[k - self.lo]

    def p_down(self, k: int) -> Fraction:
        self._check(k)
        return self.down[k - self.lo]

    def p_stay(self, k: int) -> Fraction:
        return 1 - self.p_up(k) - self.p_down(k)

    def _check(self, k: int):
        if not self.lo <= k <= self.hi:
            raise DomainError(f"state {k} outside [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class PairDiagnostics:
    lambda_: Fraction | None
    mu: Fraction
    sigma2: Fraction
    linearity_residual: Fraction | None
    reversibility_residual: Fraction
    s_values: tuple[Fraction, ...]
    var_s: Fraction
    mean_s: Fraction

    @property
    def exchangeable(self) -> bool:
        return self.reversibility_residual == 0

    @property
    def linear(self) -> bool:
        return self.lambda_ is not None and self.linearity_residual == 0

    @property
    def mean_s_identity(self) -> bool:
        """``E S = 2 lambda sigma^2``, meaningful only for a linear pair."""
        return self.linear and self.mean_s == 2 * self.lambda_ * self.sigma2


@dataclass(frozen=True)
class BoundReport:
    """TV distance against a bound. ``tv_exact`` is ``None`` when Bi-hat is
    undefined (``sigma2 <= 1/4`` with ``t > 1/2``); the bound then only has
    to exceed 1."""

    tv_exact: Fraction | None
    bound: SurdValue
    term_var_s: float
    term_var_s_squared: Fraction
    term_tail: Fraction
    valid: bool
    params: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        if self.tv_exact is None:
            return self.bound.ge(1)
        return self.bound.ge(self.tv_exact)

    @property
    def slack_ratio(self) -> float | None:
        if self.tv_exact is None:
            return None
        return float(self.tv_exact) / float(self.bound)

    def to_dict(self) -> dict:
        return {
            "tv_exact": self.tv_exact,
            "bound": float(self.bound),
            "bound_parts": self.bound.to_dict(),
            "slack_ratio": self.slack_ratio,
            "term_var_s": self.term_var_s,
            "term_var_s_squared": self.term_var_s_squared,
            "term_tail": self.term_tail,
            "valid": self.valid,
            "holds": self.holds,
            "params": self.params,
            "notes": list(self.notes),
        }


def _match_support(kernel: BirthDeathKernel, pi: ExactDist):
    if kernel.lo != pi.lo or kernel.hi != pi.hi:
        raise DomainError(
            f"kernel states [{kernel.lo}, {kernel.hi}] do not match "
            f"support [{pi.lo}, {pi.hi}]")


def check_reversibility(kernel: BirthDeathKernel, pi: ExactDist) -> Fraction:
    """Largest detailed-balance defect ``|pi(i) p(i,i+1) - pi(i+1) p(i+1,i)|``."""
    _match_support(kernel, pi)
    worst = Fraction(0)
    for i in range(len(pi) - 1):
        gap = abs(pi.probs[i] * kernel.up[i] - pi.probs[i + 1] * kernel.down[i + 1])
        worst = max(worst, gap)
    return worst


def s_function(kernel: BirthDeathKernel, k: int) -> Fraction:
    """Probability that the pair moves from state ``k``."""
    return kernel.p_up(k) + kernel.p_down(k)


def var_s(kernel: BirthDeathKernel, pi: ExactDist) -> Fraction:
    _match_support(kernel, pi)
    s = [u + d for u, d in zip(kernel.up, kernel.down)]
    mean = sum(p * v for p, v in zip(pi.probs, s))
    return sum(p * (v - mean) ** 2 for p, v in zip(pi.probs, s))


def extract_lambda(kernel: BirthDeathKernel, pi: ExactDist) -> PairDiagnostics:
    """Read off the linearity constant and certify it at every state.

    The drift ``up(k) - down(k)`` must equal ``-lambda (k - mu)``; lambda
    is taken from the first state away from the mean. If every state sits
    at the mean (a point mass), lambda is undefined and left as ``None``.
    """
    rev = check_reversibility(kernel, pi)
    mu = pi.mean()
    sigma2 = pi.variance()
    lam = None
    for k in kernel.states():
        if k != mu:
            lam = (kernel.p_down(k) - kernel.p_up(k)) / (k - mu)
            break
    residual = None
    if lam is not None:
        residual = max(abs(kernel.p_up(k) - kernel.p_down(k) + lam * (k - mu))
                       for k in kernel.states())
    s = tuple(u + d for u, d in zip(kernel.up, kernel.down))
    mean_s = sum(p * v for p, v in zip(pi.probs, s))
    vs = sum(p * (v - mean_s) ** 2 for p, v in zip(pi.probs, s))
    return PairDiagnostics(lam, mu, sigma2, residual, rev, s, vs, mean_s)


def theorem2_bound(lam, sigma2, var_s) -> SurdValue:
    """``sqrt(Var S) / (2 lambda sigma^2) + 1.4 / sigma^2`` as an exact surd."""
    lam, sigma2, var_s = as_fraction(lam), as_fraction(sigma2), as_fraction(var_s)
    if lam <= 0 or sigma2 <= 0 or var_s < 0:
        raise DomainError("need lambda > 0, sigma2 > 0 and Var S >= 0")
    return SurdValue(1 / (2 * lam * sigma2), var_s, TAIL_CONSTANT / sigma2)


def binhat_tv(pi: ExactDist, mu, sigma2) -> Fraction | None:
    """Exact TV from ``pi`` to Bi-hat(mu, sigma2), ``None`` if the latter is undefined."""
    try:
        params = binhat_params(mu, sigma2)
    except DomainError:
        if as_fraction(sigma2) <= 0:
            raise
        return None
    return tv_distance(pi, binhat_dist(params))


def report_from_bound(tv: Fraction, bound: SurdValue, valid: bool,
                      params: dict | None = None, notes: Iterable[str] = ()) -> BoundReport:
    return BoundReport(
        tv_exact=tv,
        bound=bound,
        term_var_s=bound.root_term,
        term_var_s_squared=bound.root_term_squared,
        term_tail=bound.const,
        valid=valid,
        params=dict(params or {}),
        notes=tuple(notes),
    )


def certify(kernel: BirthDeathKernel, pi: ExactDist, mu=None, sigma2=None,
            params: dict | None = None) -> BoundReport:
    """Exact TV to Bi-hat(mu, sigma2) against the abstract bound.

    The report is marked invalid, not raised, when the pair fails one of
    the bound's hypotheses (exchangeability, exact linearity, matching
    first two moments).
    """
    diag = extract_lambda(kernel, pi)
    mu = diag.mu if mu is None else as_fraction(mu)
    sigma2 = diag.sigma2 if sigma2 is None else as_fraction(sigma2)
    notes = []
    if not diag.exchangeable:
        notes.append("kernel is not reversible for pi")
    if not diag.linear:
        notes.append("linearity condition fails")
    if mu != diag.mu or sigma2 != diag.sigma2:
        notes.append("mu/sigma2 differ from the moments of pi")
    valid = not notes
    tv = binhat_tv(pi, mu, sigma2)
    if tv is None:
        notes.append("Bi-hat undefined for these moments")
    if diag.lambda_ is not None and diag.lambda_ > 0:
        bound = theorem2_bound(diag.lambda_, sigma2, diag.var_s)
    else:
        notes.append("lambda undefined; bound reported as 1")
        valid = False
        bound = SurdValue(Fraction(0), Fraction(0), Fraction(1))
    info = {"mu": mu, "sigma2": sigma2, "lambda": diag.lambda_, "var_s": diag.var_s}
    info.update(params or {})
    return report_from_bound(tv, bound, valid, info, notes)


def stein_operator(g: TestFunction, k: int, params: BinHatParams) -> Fraction:
    """``(k - mu) Theta g(k) - sigma^2 Delta g(k) + a(k) Delta g(k)``."""
    gk, gk1 = g(k), g(k + 1)
    theta = (gk1 + gk) / 2
    diff = gk1 - gk
    return (k - params.mu) * theta - params.sigma2 * diff + params.a(k) * diff


class TableFunction:
    """Integer function given by a table of exact values on ``[lo, lo+len)``."""

    def __init__(self, lo: int, values: Sequence):
        self.lo = lo
        self.values = tuple(Fraction(v) for v in values)

    def __call__(self, k: int) -> Fraction:
        i = k - self.lo
        if not 0 <= i < len(self.values):
            raise DomainError(f"test function undefined at {k}")
        return self.values[i]

    def __repr__(self):
        return f"TableFunction(lo={self.lo}, n={len(self.values)})"


def monomials(max_degree: int = 6) -> list[TestFunction]:
    return [lambda k, r=r: Fraction(k) ** r for r in range(max_degree + 1)]


def random_functions(lo: int, hi: int, count: int, seed: int,
                     max_den: int = 50) -> list[TableFunction]:
    """Seeded random rational-valued functions on ``{lo, ..., hi}``."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        vals = [Fraction(rng.randint(-10 * max_den, 10 * max_den), rng.randint(1, max_den))
                for _ in range(lo, hi + 1)]
        out.append(TableFunction(lo, vals))
    return out


def characterization_check(params: BinHatParams, test_functions: Iterable[TestFunction],
                           dist: ExactDist | None = None) -> Fraction:
    """``max_g |E (Bg)(Z)|`` with ``Z ~ dist`` (default: Bi-hat(params)).

    Zero for every ``g`` exactly when ``dist`` is the Bi-hat law; the
    ``dist`` override exists for negative controls.
    """
    if dist is None:
        dist = binhat_dist(params)
    worst = Fraction(0)
    for g in test_functions:
        val = sum((p * stein_operator(g, k, params) for k, p in dist.items()), Fraction(0))
        worst = max(worst, abs(val))
    return worst


def perturb(d: ExactDist, rng: random.Random) -> ExactDist:
    """Move a random fraction of one atom's mass to a neighbouring atom.

    Support and normalisation are kept; the law always changes.
    """
    if len(d) == 1:
        return ExactDist(d.offset, (Fraction(1, 2), Fraction(1, 2)))
    i = rng.randrange(len(d))
    j = i + 1 if i + 1 < len(d) else i - 1
    frac = Fraction(rng.randint(1, 9), 10)
    probs = list(d.probs)
    moved = probs[i] * frac
    probs[i] -= moved
    probs[j] += moved
    if probs[0] == 0 or probs[-1] == 0:
        raise AssertionError("perturbation emptied an end atom")
    return ExactDist(d.offset, tuple(probs))


def pair_identity_check(kernel: BirthDeathKernel, pi: ExactDist, mu, lam,
                        test_functions: Iterable[TestFunction]) -> Fraction:
    """Largest residual of the two exchangeable-pair identities

    ``E (X - mu) g(X) = E[up(X) Delta g(X)] / lambda`` and
    ``E (X - mu) Theta g(X) = E[S(X) Delta g(X)] / (2 lambda)``

    over ``test_functions`` (each must be defined on ``lo..hi+1``).
    """
    _match_support(kernel, pi)
    mu, lam = as_fraction(mu), as_fraction(lam)
    worst = Fraction(0)
    for g in test_functions:
        lhs1 = lhs2 = rhs1 = rhs2 = Fraction(0)
        for i, (k, p) in enumerate(pi.items()):
            gk, gk1 = g(k), g(k + 1)
            diff = gk1 - gk
            lhs1 += p * (k - mu) * gk
            lhs2 += p * (k - mu) * (gk + gk1) / 2
            rhs1 += p * kernel.up[i] * diff
            rhs2 += p * (kernel.up[i] + kernel.down[i]) * diff
        worst = max(worst, abs(lhs1 - rhs1 / lam), abs(lhs2 - rhs2 / (2 * lam)))
    return worst


@dataclass(frozen=True)
class TailEstimates:
    """Exact terms of the tail and correction estimates, plus each step of
    both inequality chains (``None`` where a step's proviso fails)."""

    in_regime: bool
    p_outside: Fraction
    p_deviation: Fraction
    chebyshev: Fraction | None
    tail_bound: Fraction
    e_abs_a: Fraction
    a_bound: SurdValue
    outside_le_deviation: bool
    deviation_le_chebyshev: bool | None
    chebyshev_le_tail_bound: bool | None
    e_abs_a_le_a_bound: bool
    a_bound_le_three_quarters: bool | None

    @property
    def holds(self) -> bool:
        steps = (self.outside_le_deviation, self.deviation_le_chebyshev,
                 self.chebyshev_le_tail_bound, self.e_abs_a_le_a_bound,
                 self.a_bound_le_three_quarters)
        return all(s is not False for s in steps)


def tail_and_a_estimates(pi: ExactDist, params: BinHatParams) -> TailEstimates:
    """Check ``P[X not in T] <= P[|X-mu| >= 2 sigma^2 - 1] <= sigma^2/(2 sigma^2-1)^2
    <= 0.61/sigma^2`` and ``E|a(X)| <= n t^2 + sigma t + delta/4 <= 3/4``.

    ``T`` is the support of Bi-hat(params). The 0.61 and 3/4 steps are only
    claimed for ``sigma^2 >= 1.4`` and are reported as ``None`` below that.
    """
    mu, s2 = params.mu, params.sigma2
    t_lo, t_hi = params.shift, params.shift + params.n_hat
    p_out = sum((p for k, p in pi.items() if not t_lo <= k <= t_hi), Fraction(0))
    radius = 2 * s2 - 1
    p_dev = sum((p for k, p in pi.items() if abs(k - mu) >= radius), Fraction(0))
    in_regime = s2 >= TAIL_CONSTANT
    cheb = s2 / radius ** 2 if radius > 0 else None
    tail_bound = CHEBYSHEV_CONSTANT / s2
    e_abs_a = pi.expect(lambda k: abs(params.a(k)))
    a_bound = SurdValue(params.t, s2, params.n_hat * params.t ** 2 + params.delta / 4)
    return TailEstimates(
        in_regime=in_regime,
        p_outside=p_out,
        p_deviation=p_dev,
        chebyshev=cheb,
        tail_bound=tail_bound,
        e_abs_a=e_abs_a,
        a_bound=a_bound,
        outside_le_deviation=p_out <= p_dev,
        deviation_le_chebyshev=None if cheb is None else p_dev <= cheb,
        chebyshev_le_tail_bound=(cheb <= tail_bound) if (in_regime and cheb is not None) else None,
        e_abs_a_le_a_bound=a_bound.ge(e_abs_a),
        a_bound_le_three_quarters=a_bound.le(Fraction(3, 4)) if in_regime else None,
    )
