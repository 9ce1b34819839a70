import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import frozen
from conftest import params
from reppricing import comparative
from reppricing.closed_form import expected_prices
from reppricing.market_model import Model


def test_benchmark_threshold_at_figure_params():
    r = comparative.find_threshold_benchmark(params())
    assert r.existence_condition_value == pytest.approx(math.log(4))
    assert r.exists
    assert r.k_star == pytest.approx(frozen.K1_STAR, abs=1e-11)
    assert r.residual <= 1e-10


def test_benchmark_threshold_absent():
    r = comparative.find_threshold_benchmark(params(r_L=0.55))
    assert r.existence_condition_value == pytest.approx(math.log(0.8 / 0.7))
    assert not r.exists and r.k_star is None
    m = comparative.premium_map(params(r_L=0.55), Model.BENCHMARK, comparative.default_k_grid(params()))
    assert np.all(m.premium > 0)


def test_competition_threshold():
    r = comparative.find_threshold_competition(params())
    assert r.k_star == pytest.approx(frozen.K2_STAR, abs=1e-11)
    assert r.residual <= 1e-10
    assert r.existence_condition_value == pytest.approx(1.0 - 1.6)
    assert frozen.K1_STAR < r.k_star


def test_premium_map_signs():
    ks = np.round(np.arange(0.1, 1.95, 0.1), 10)
    m = comparative.premium_map(params(), Model.BENCHMARK, ks)
    assert np.all(m.sign[ks < frozen.K1_STAR] == -1)
    assert np.all(m.sign[ks > frozen.K1_STAR] == 1)
    assert m.sign_changes() == 1
    row = dict((k, (lo, hi)) for k, lo, hi, _ in m.rows())[1.4]
    assert row == pytest.approx((frozen.FIG1A_E_LOW, frozen.FIG1A_E_HIGH), abs=1e-12)


def test_premium_map_validation():
    with pytest.raises(ValueError):
        comparative.premium_map(params(), Model.BENCHMARK, [0.5, 0.4])
    with pytest.raises(ValueError):
        comparative.premium_map(params(), Model.BENCHMARK, [0.0, 1.0])


def test_premium_vanishes_for_identical_sellers():
    p = params(r_L=0.8, r_H=0.8 + 1e-7)
    m = comparative.premium_map(p, Model.BENCHMARK, comparative.default_k_grid(p, 200)[1:-1])
    assert np.max(np.abs(m.premium)) < 1e-5


@pytest.mark.parametrize("model", list(Model))
def test_single_sign_change_dense_scan(model):
    p = params()
    m = comparative.premium_map(p, model, comparative.default_k_grid(p, 10_000))
    assert m.sign_changes() == 1


@pytest.mark.parametrize("model", list(Model))
def test_monotonicity(model):
    p = params()
    report = comparative.monotonicity_check(p, model, np.linspace(0.01, 1.99, 100))
    assert report.passed, report


@pytest.mark.parametrize("k", [1.4, 0.6])
def test_competition_effect(k):
    r = comparative.competition_effect_report(params(k=k))
    assert r.high_price_falls and r.low_price_rises and r.cdf_ordered
    assert r.e_low_competition == 1.6
    assert r.e_low_benchmark < 1.6


def test_sweep_ordering():
    result = comparative.sweep(points=100, seed=0)
    assert len(result.rows) == 100
    assert result.all_ordered
    for row in result.rows:
        assert row.k1.residual <= 1e-10 and row.k2.residual <= 1e-10
        assert comparative.benchmark_existence_condition(row.params) >= 1.0


def test_sweep_deterministic():
    a = comparative.sweep(points=5, seed=3)
    b = comparative.sweep(points=5, seed=3)
    assert [r.to_dict() for r in a.rows] == [r.to_dict() for r in b.rows]


random_params = st.builds(
    lambda u, fl, fh, fc: params(u=u, r_L=fl, r_H=fl + fh * (1 - fl), c=fc * fl * u, k=0.5 * u),
    st.floats(1.0, 10.0), st.floats(0.1, 0.9), st.floats(0.01, 0.99), st.floats(0.0, 0.5),
)


@settings(max_examples=60, deadline=None)
@given(random_params)
def test_thresholds_are_roots_and_ordered(p):
    k1 = comparative.find_threshold_benchmark(p)
    k2 = comparative.find_threshold_competition(p)
    assert k2.exists and k2.residual <= 1e-10
    assert 0 < k2.k_star < p.u
    if k1.exists:
        assert k1.residual <= 1e-10
        assert k1.k_star < k2.k_star
        lo, hi = expected_prices(p.with_k(k1.k_star), Model.BENCHMARK)
        assert abs(hi - lo) <= 1e-10
    else:
        assert k1.existence_condition_value < 1.0


@settings(max_examples=40, deadline=None)
@given(random_params, st.sampled_from(list(Model)))
def test_premium_increasing_in_k(p, model):
    report = comparative.monotonicity_check(p, model, np.linspace(0.01, 0.99, 100) * p.u)
    assert report.passed
