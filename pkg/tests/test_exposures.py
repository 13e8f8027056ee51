"""Close-out exposure arithmetic: goldens, identities, and overflow edges."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nettingdesk.errors import CurrencyMismatch, Overflow, SchemaInvalid
from nettingdesk.exposures import (
    INT64_MAX,
    INT64_MIN,
    Trade,
    compute_exposures,
    portfolio_from_document,
)

from conftest import load_sample


def gbp(id, mtm):
    return Trade(id=id, mtm_minor_units=mtm, currency="GBP")


def test_worked_three_trade_portfolio():
    portfolio = portfolio_from_document(load_sample("portfolio_bilateral.json"))
    report = compute_exposures(portfolio)
    assert report.net_value_to_a == -10_000_000_000  # -100m in pence
    assert report.gross_exposure_a == 40_000_000_000
    assert report.gross_exposure_b == 50_000_000_000
    assert report.net_exposure_a == 0
    assert report.net_exposure_b == 10_000_000_000
    assert report.trade_count == 3
    assert report.currency == "GBP"


def test_empty_portfolio_is_all_zeros():
    report = compute_exposures([])
    assert report.currency is None
    assert report.trade_count == 0
    assert report.net_value_to_a == 0
    assert report.gross_exposure_a == report.gross_exposure_b == 0
    assert report.net_exposure_a == report.net_exposure_b == 0


def test_zero_mtm_trade_counts_but_adds_nothing():
    report = compute_exposures([gbp("t1", 0), gbp("t2", -5)])
    assert report.trade_count == 2
    assert report.gross_exposure_a == 0
    assert report.gross_exposure_b == 5


def test_one_sided_portfolio():
    report = compute_exposures([gbp("t1", 700), gbp("t2", 300)])
    assert report.net_value_to_a == 1000
    assert report.net_exposure_a == 1000
    assert report.net_exposure_b == 0
    assert report.gross_exposure_b == 0


def test_mixed_currencies_rejected():
    with pytest.raises(CurrencyMismatch):
        compute_exposures([gbp("t1", 1), Trade("t2", 2, "EUR")])


def test_single_trade_beyond_the_64_bit_range():
    with pytest.raises(Overflow):
        compute_exposures([gbp("t1", INT64_MAX + 1)])


def test_gross_sum_overflow():
    with pytest.raises(Overflow):
        compute_exposures([gbp("t1", INT64_MAX), gbp("t2", INT64_MAX)])


def test_most_negative_value_has_no_positive_counterpart():
    # |INT64_MIN| itself exceeds INT64_MAX, so the gross claim overflows
    with pytest.raises(Overflow):
        compute_exposures([gbp("t1", INT64_MIN)])
    report = compute_exposures([gbp("t1", INT64_MIN + 1)])
    assert report.gross_exposure_b == INT64_MAX


mtms = st.lists(st.integers(-(10**12), 10**12), max_size=40)


@given(mtms)
def test_accounting_identities(values):
    report = compute_exposures([gbp(f"t{i}", v) for i, v in enumerate(values)])
    assert report.gross_exposure_a - report.gross_exposure_b == report.net_value_to_a
    assert report.net_exposure_a - report.net_exposure_b == report.net_value_to_a
    assert report.net_exposure_a >= 0 and report.net_exposure_b >= 0
    assert report.net_exposure_a == 0 or report.net_exposure_b == 0
    assert report.net_exposure_a <= report.gross_exposure_a
    assert report.net_exposure_b <= report.gross_exposure_b


@given(mtms)
def test_trade_order_does_not_matter(values):
    forward = [gbp(f"t{i}", v) for i, v in enumerate(values)]
    assert compute_exposures(forward) == compute_exposures(list(reversed(forward)))


@given(mtms)
def test_netting_never_exceeds_gross(values):
    report = compute_exposures([gbp(f"t{i}", v) for i, v in enumerate(values)])
    assert max(report.net_exposure_a, report.net_exposure_b) <= max(
        report.gross_exposure_a, report.gross_exposure_b
    )


def test_report_document_shape():
    doc = compute_exposures([gbp("t1", -25)]).to_document()
    assert doc == {
        "currency": "GBP",
        "tradeCount": 1,
        "netValueToA": -25,
        "netExposureA": 0,
        "netExposureB": 25,
        "grossExposureA": 0,
        "grossExposureB": 25,
    }


def test_portfolio_document_must_be_a_list():
    with pytest.raises(SchemaInvalid):
        portfolio_from_document({"trades": []})


def test_trade_fields_are_checked():
    with pytest.raises(SchemaInvalid):
        Trade.from_document({"id": "t1", "currency": "GBP"})
    with pytest.raises(SchemaInvalid):
        Trade.from_document({"id": "t1", "mtmMinorUnits": 1.5, "currency": "GBP"})
    with pytest.raises(SchemaInvalid):
        Trade.from_document({"id": "t1", "mtmMinorUnits": True, "currency": "GBP"})


def test_trade_document_round_trip():
    trade = gbp("irs-001", 15_000_000_000)
    assert Trade.from_document(trade.to_document()) == trade
