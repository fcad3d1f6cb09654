import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steinpairs import (
    ExactDist,
    FloatDist,
    binhat_dist,
    binhat_params,
    kolmogorov_vs_normal,
    local_limit_stat,
    narayana_dist,
    normal_cdf,
    normal_pdf,
    translated_poisson_dist,
    tv_distance,
    tv_distance_float,
)
from steinpairs.metrics import NORMAL_ACCURACY

from oracles import as_dict, normal_cdf_mp, tv_sup_over_sets


@st.composite
def exact_dists(draw, max_size=6):
    offset = draw(st.integers(-4, 4))
    size = draw(st.integers(1, max_size))
    weights = draw(st.lists(st.integers(0, 20), min_size=size, max_size=size))
    weights[0] = weights[0] or 1
    weights[-1] = weights[-1] or 1
    return ExactDist.from_weights(offset, weights)


def test_tv_examples():
    d = narayana_dist(3)
    assert tv_distance(d, d) == 0
    assert tv_distance(d, binhat_dist(binhat_params(2, F(2, 5)))) == F(1, 10)
    assert tv_distance(ExactDist.point_mass(0), ExactDist(5, (F(1, 3), F(2, 3)))) == 1


@settings(max_examples=150, deadline=None)
@given(exact_dists(), exact_dists())
def test_tv_equals_sup_over_sets(P, Q):
    assert tv_distance(P, Q) == tv_sup_over_sets(as_dict(P), as_dict(Q))


@settings(max_examples=100, deadline=None)
@given(exact_dists(), exact_dists(), exact_dists())
def test_tv_is_a_metric(P, Q, R):
    assert tv_distance(P, Q) == tv_distance(Q, P)
    assert 0 <= tv_distance(P, Q) <= 1
    assert tv_distance(P, R) <= tv_distance(P, Q) + tv_distance(Q, R)
    assert (tv_distance(P, Q) == 0) == (P == Q)


def test_tv_float_identical_is_zero():
    tp = translated_poisson_dist(3, 2)
    assert tv_distance_float(tp, tp) == 0.0


def test_tv_float_shifted_poisson():
    a = translated_poisson_dist(1, 1)
    b = FloatDist(a.offset + 1, a.probs, a.omitted)
    # half-L1 between Poisson(1) and Poisson(1)+1, summed directly
    direct = 0.5 * math.fsum(abs(math.exp(-1) / math.factorial(k)
                                 - (math.exp(-1) / math.factorial(k - 1) if k else 0.0))
                             for k in range(60))
    assert tv_distance_float(a, b) == pytest.approx(direct, abs=a.omitted + b.omitted + 1e-15)


def test_tv_float_against_exact_small_case():
    # Poisson(1) vs uniform on {0, 1}, against a rational series
    a = translated_poisson_dist(1, 1)
    b = ExactDist(0, (F(1, 2), F(1, 2))).to_float()
    e = F(367879441171442321595523770161460867, 10 ** 36)  # exp(-1) to 36 digits
    exact = F(0)
    fact = 1
    for k in range(40):
        if k:
            fact *= k
        pk = e / fact
        qk = F(1, 2) if k < 2 else F(0)
        exact += abs(pk - qk)
    assert tv_distance_float(a, b) == pytest.approx(float(exact / 2), abs=1e-12)


@pytest.mark.parametrize("x", [-11.5, -8, -3.3, -1, -0.2, 0, 0.7, 2, 5.5, 9, 11.9])
def test_normal_cdf_accuracy(x):
    assert abs(normal_cdf(x) - normal_cdf_mp(x)) <= NORMAL_ACCURACY


def test_normal_cdf_symmetry():
    assert abs(normal_cdf(0) - 0.5) <= 1e-15
    for i in range(-800, 801):
        x = i / 100
        assert abs(normal_cdf(-x) + normal_cdf(x) - 1) <= 1e-14


def test_normal_pdf():
    assert normal_pdf(0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)
    assert normal_pdf(1.3) == normal_pdf(-1.3)


def test_kolmogorov_point_mass():
    assert kolmogorov_vs_normal(ExactDist.point_mass(4), 4, 1.0) == 0.5


def test_kolmogorov_narayana_three():
    d = narayana_dist(3)
    sigma = math.sqrt(0.4)
    cum = [0, 0.2, 0.8, 1.0]
    gaps = []
    for i, k in enumerate((1, 2, 3)):
        phi = normal_cdf_mp((k - 2) / sigma)
        gaps += [abs(cum[i] - phi), abs(cum[i + 1] - phi)]
    assert kolmogorov_vs_normal(d, 2, sigma) == pytest.approx(max(gaps), abs=1e-14)


def test_kolmogorov_against_grid_search():
    d = narayana_dist(9)
    mu, sigma = F(5), math.sqrt(F(20, 17))
    cdf = lambda x: float(sum(p for k, p in d.items() if (k - 5) / sigma <= x))
    grid = max(abs(cdf(x) - normal_cdf(x)) for x in (i / 997 for i in range(-5000, 5000)))
    stat = kolmogorov_vs_normal(d, mu, sigma)
    assert grid <= stat + 1e-12
    assert stat - grid < 0.01


def test_kolmogorov_triangle_sanity():
    for n in (10, 40, 120):
        d = narayana_dist(n)
        mu, s2 = F(n + 1, 2), F((n - 1) * (n + 1), 4 * (2 * n - 1))
        z = binhat_dist(binhat_params(mu, s2))
        sigma = math.sqrt(s2)
        lhs = kolmogorov_vs_normal(d, mu, sigma)
        rhs = 2 * float(tv_distance(d, z)) + kolmogorov_vs_normal(z, mu, sigma)
        assert lhs <= rhs


def test_local_limit_point_mass():
    sigma = 2.0
    expected = math.sqrt(sigma) * abs(1 - normal_pdf(0) / sigma)
    assert local_limit_stat(ExactDist.point_mass(0), 0, sigma) == pytest.approx(expected, rel=1e-15)


def test_local_limit_binhat_regression():
    # values recorded from a verified run
    a = local_limit_stat(binhat_dist(binhat_params(0, 25)), 0, 5.0)
    b = local_limit_stat(binhat_dist(binhat_params(0, 100)), 0, 10.0)
    assert a == pytest.approx(4.4546654017763504e-04, rel=1e-9)
    assert b == pytest.approx(7.882317439832295e-05, rel=1e-9)
    assert b < a


def test_local_limit_sees_off_support_density():
    # mass far from mu: the density peak at mu is off the support
    d = ExactDist.point_mass(100)
    stat = local_limit_stat(d, 0, 1.0)
    assert stat == pytest.approx(1.0, rel=1e-12)
