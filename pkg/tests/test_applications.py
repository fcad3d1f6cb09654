import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steinpairs import DomainError
from steinpairs.applications import (
    bound6,
    bound7,
    eq7_tp_comparison,
    hyp_kernel,
    hyp_lambda,
    hyp_s_and_varpoly,
    pb_kernel,
    pb_var_s,
    theorem3_certify,
    theorem4_certify,
)
from steinpairs.distributions import poisson_binomial_dist
from steinpairs.stein_core import extract_lambda

from oracles import pb_var_s_enumerated

probabilities = st.fractions(min_value=0, max_value=1, max_denominator=20)


@settings(max_examples=60, deadline=None)
@given(st.lists(probabilities, min_size=1, max_size=12))
def test_pb_var_s_matches_enumeration(p):
    assert pb_var_s(p) == pb_var_s_enumerated(p)


@settings(max_examples=30, deadline=None)
@given(st.lists(probabilities, min_size=1, max_size=10))
def test_pb_kernel_var_s_matches(p):
    # the induced kernel on the sum has a smaller Var S (conditioning)
    d = poisson_binomial_dist(p)
    diag = extract_lambda(pb_kernel(p), d)
    assert diag.exchangeable
    assert diag.var_s <= pb_var_s(p)
    if len(d) > 1:
        assert diag.linear and diag.lambda_ == F(1, len(p))


def test_pb_kernel_example():
    p = [F(1, 3), F(2, 7), F(1, 2), F(9, 10), F(0), F(1)]
    diag = extract_lambda(pb_kernel(p), poisson_binomial_dist(p))
    assert diag.lambda_ == F(1, 6) and diag.linearity_residual == 0


def test_pb_certify_examples():
    r = theorem3_certify([F(1, 2), F(1, 2)])
    assert r.report.tv_exact == 0 and float(r.report.bound) == pytest.approx(2.8)
    assert r.holds and r.matches_abstract_bound
    r = theorem3_certify([F(1, 4), F(1, 4)])
    assert r.report.tv_exact == 0
    assert float(r.report.bound) == pytest.approx(4.1415816, rel=1e-7)
    r = theorem3_certify([0, 1, 1])
    assert r.degenerate and r.holds


def test_pb_certify_random_lists():
    rng = random.Random(2024)
    worst = 0.0
    for _ in range(200):
        size = rng.randint(2, 50)
        p = [F(rng.randint(0, 30), 30) for _ in range(size)]
        r = theorem3_certify(p)
        assert r.holds
        if not r.degenerate and r.report.tv_exact is not None:
            worst = max(worst, r.report.slack_ratio)
    assert worst < 1


def test_bound_degenerate_raises():
    with pytest.raises(DomainError):
        bound6([0, 1])
    with pytest.raises(DomainError):
        bound7([1])


def test_tp_comparison_all_half():
    out = eq7_tp_comparison([F(1, 2)] * 100)
    assert out["bound6"] == pytest.approx(0.056, rel=1e-12)
    assert out["bound7"] == pytest.approx(0.18, rel=1e-12)
    assert out["better"] == "6"
    assert out["tv_tp_within_bound7"]


def test_tp_comparison_small_p():
    out = eq7_tp_comparison([F(1, 100)] * 1000)
    assert out["better"] == "7"
    assert out["bound7"] == pytest.approx(0.205, abs=1e-3)
    assert out["bound6"] == pytest.approx(0.297, abs=1e-3)
    assert out["tv_tp_within_bound7"]


def test_tp_comparison_single_half():
    out = eq7_tp_comparison([F(1, 2)])
    assert out["bound6"] == pytest.approx(5.6)
    assert out["bound7"] == pytest.approx(9.0)


def test_resampling_bound_near_half_scales_like_one_over_n():
    scaled = []
    for n in (16, 64, 256):
        h = F(1, int(n ** 0.5))
        p = [F(1, 2) + h if i % 2 else F(1, 2) - h for i in range(n)]
        scaled.append(float(bound6(p)) * n)
    assert scaled == pytest.approx([9.7761, 8.0389, 7.7047], abs=1e-4)
    assert scaled[0] > scaled[1] > scaled[2]


def test_hyp_kernel_values():
    k = hyp_kernel(4, 2, 2)
    assert (k.lo, k.hi) == (0, 2)
    assert k.up == (F(2, 3), F(1, 6), 0)
    assert k.down == (0, F(1, 6), F(2, 3))
    assert hyp_lambda(4, 2, 2) == F(2, 3)
    with pytest.raises(DomainError):
        hyp_kernel(4, 0, 2)
    with pytest.raises(DomainError):
        hyp_kernel(4, 2, 4)


@pytest.mark.parametrize("args", [(4, 2, 2), (6, 3, 3), (10, 4, 7), (13, 1, 12), (20, 17, 5)])
def test_hyp_varpoly_cases(args):
    out = hyp_s_and_varpoly(*args)
    assert out["s_closed_form_ok"] and out["identity_ok"]
    assert out["step1_ok"] and out["step2_ok"]


def test_hyp_varpoly_sweep():
    for N in range(4, 19):
        for n in range(1, N):
            for m in range(1, N):
                out = hyp_s_and_varpoly(N, n, m)
                assert out["identity_ok"] and out["step1_ok"] and out["step2_ok"]


def test_hyp_term_ratios_recorded_maxima():
    worst = [None] * 4
    for N in range(4, 26):
        for n in range(1, N):
            for m in range(1, N):
                out = hyp_s_and_varpoly(N, n, m)
                assert out["first_term_ok"]
                worst = [r if w is None else max(w, r) for w, r in zip(worst, out["term_ratios"])]
    # every remaining term is at most 13 N on this grid
    assert all(w <= 13 for w in worst)
    assert worst[2] == 8


def test_hyp_varpoly_needs_n_ge_4():
    with pytest.raises(DomainError):
        hyp_s_and_varpoly(3, 1, 1)


def test_hyp_certify_example():
    r = theorem4_certify(4, 2, 2)
    assert r.tv == F(1, 6)
    assert float(r.report.bound) == pytest.approx(9.137104414532875, rel=1e-14)
    assert float(r.abstract.bound) == pytest.approx(4.55355, abs=1e-5)
    assert r.holds


def test_hyp_certify_sweep():
    undefined = 0
    for N in range(4, 23):
        for n in range(1, N):
            for m in range(1, N):
                r = theorem4_certify(N, n, m)
                assert r.holds, (N, n, m)
                undefined += r.tv is None
    assert undefined > 0


def test_hyp_certify_symmetric_regression():
    vals = {N: float(theorem4_certify(N, N // 2, N // 2).tv) * N for N in (8, 16, 32, 64)}
    assert vals[8] == pytest.approx(0.72381, abs=1e-5)
    assert vals[64] == pytest.approx(0.93061, abs=1e-5)
    assert max(vals.values()) <= 1.0
