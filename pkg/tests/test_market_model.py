import pytest
from hypothesis import given, strategies as st

from reppricing.market_model import (
    DegenerateRegime,
    MarketParams,
    Model,
    NonPositive,
    ReputationOrder,
    Role,
    SearchCostRange,
    UnprofitableMarket,
    check_regime,
    figure_params,
    informed_fraction,
    uninformed_fraction,
    validate_params,
)

from conftest import params


def test_figure_params_are_valid():
    p = validate_params(dict(u=2, c=1, r_H=0.9, r_L=0.8, k=1.4, n=100))
    assert p == figure_params("fig1a")[1]


@pytest.mark.parametrize(
    "overrides, error",
    [
        (dict(r_H=0.8), ReputationOrder),
        (dict(r_H=1.0), ReputationOrder),
        (dict(r_L=0.0), ReputationOrder),
        (dict(c=1.7), UnprofitableMarket),
        (dict(c=1.6), UnprofitableMarket),
        (dict(k=0.0), SearchCostRange),
        (dict(k=2.0), SearchCostRange),
        (dict(u=-1.0), NonPositive),
        (dict(c=-0.1), NonPositive),
        (dict(n=0), NonPositive),
        (dict(n=2.5), NonPositive),
    ],
)
def test_violations_name_the_constraint(overrides, error):
    with pytest.raises(error):
        params(**overrides)


def test_sequence_input_and_zero_cost():
    p = validate_params((2, 0, 0.8, 0.9, 1.4, 100))
    assert p.c == 0.0 and p.n == 100


def test_missing_key():
    with pytest.raises(ValueError, match="missing"):
        validate_params(dict(u=2, c=1))


@pytest.mark.parametrize("k, expected", [(1.4, 0.7), (0.6, 0.3), (1.999, 0.9995)])
def test_uninformed_fraction(k, expected):
    assert uninformed_fraction(params(k=k)) == pytest.approx(expected, abs=1e-15)


def test_roles_and_models():
    p = params()
    assert p.top_price(Role.LOW) == pytest.approx(1.6)
    assert p.top_price(Role.HIGH) == pytest.approx(1.8)
    assert p.parity_gap == pytest.approx(0.2)
    assert Model.BENCHMARK.seller_count == 2
    assert Model.COMPETITION.seller_count == 4


def test_degenerate_regime():
    with pytest.raises(DegenerateRegime):
        check_regime(params(r_L=0.9 - 1e-14))


valid = st.builds(
    lambda u, fc, fl, fh, fk, n: dict(
        u=u, c=fc * fl * u, r_L=fl, r_H=fl + fh * (1 - fl), k=fk * u, n=n
    ),
    st.floats(0.1, 100),
    st.floats(0, 0.99),
    st.floats(0.01, 0.98),
    st.floats(0.01, 0.99),
    st.floats(0.01, 0.99),
    st.integers(1, 10**6),
)


@given(valid)
def test_validate_is_idempotent(raw):
    p = validate_params(raw)
    assert isinstance(p, MarketParams)
    assert validate_params(p) == p


@given(valid)
def test_fractions_sum_to_one(raw):
    p = validate_params(raw)
    assert uninformed_fraction(p) + informed_fraction(p) == 1.0
