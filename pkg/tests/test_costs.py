"""Review-cost model: US-data golden figures, exactness, and table output."""

from __future__ import annotations

from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nettingdesk.errors import InvalidFraction, SchemaInvalid
from nettingdesk.costs import (
    LevelParams,
    as_decimal,
    format_table,
    params_from_document,
    total_cost,
)

from conftest import load_data


@pytest.fixture
def us_params():
    return params_from_document(load_data("cost_params_us.json"))


@pytest.fixture
def us_report(us_params):
    return total_cost(us_params)


def test_reviews_per_level(us_report):
    assert [e.reviews for e in us_report.levels] == [
        Decimal(4800),
        Decimal(6720),
        Decimal(4860),
        Decimal(9735),
    ]
    assert us_report.reviews_total == Decimal(26115)


def test_days_per_level_are_exact(us_report):
    # every level reviews at 50% complex, 2 vs 0.25 days: 1.125 days/review
    assert [e.days for e in us_report.levels] == [
        Decimal("5400"),
        Decimal("7560"),
        Decimal("5467.5"),
        Decimal("10951.875"),
    ]
    assert us_report.total_days == Decimal("29379.375")


def test_display_rounding_is_half_up_two_places(us_report):
    doc = us_report.to_document()
    assert doc["totalDays"] == "29379.38"
    assert doc["totalDaysExact"] == "29379.375"
    assert doc["reviewsTotal"] == 26115


def test_level_four_dominates(us_report):
    assert us_report.share_of_days(4) == Decimal("37.28")
    assert us_report.to_document()["levels"][3]["shareOfDaysPct"] == "37.28"


def test_sector_bill_at_a_thousand_a_day(us_params):
    report = total_cost(us_params, day_rate=1000)
    assert report.total_cost == Decimal("29379375")
    assert report.total_cost > 29_000_000
    doc = report.to_document()
    assert doc["dayRate"] == 1000
    assert doc["totalCost"] == "29379375.00"


def test_table_total_line(us_params):
    table = format_table(total_cost(us_params))
    assert table.splitlines()[-1] == "TOTAL 26115 reviews, 29379.38 days"
    priced = format_table(total_cost(us_params, day_rate=1000))
    assert priced.splitlines()[-1] == "At 1000/day: 29379375.00"
    assert priced.splitlines()[-2] == "TOTAL 26115 reviews, 29379.38 days"


def test_table_has_one_row_per_level(us_report):
    lines = format_table(us_report).splitlines()
    assert len(lines) == 1 + 4 + 1  # header, levels, total
    assert lines[1].split() == ["1", "20", "300", "80", "50", "4800", "5400.00", "18.38"]


def _no_floats(node):
    if isinstance(node, float):
        return False
    if isinstance(node, dict):
        return all(_no_floats(v) for v in node.values())
    if isinstance(node, list):
        return all(_no_floats(v) for v in node)
    return True


def test_report_document_contains_no_floats(us_params):
    assert _no_floats(total_cost(us_params, day_rate=1000).to_document())


def test_level_params_value_round_trip(us_params):
    for params in us_params:
        assert LevelParams.from_document(params.to_document()) == params


def test_fractional_percentages_stay_exact():
    params = LevelParams.from_document(
        {"level": 9, "banks": 3, "opinions": 7, "reviewedPct": "12.5",
         "complexPct": "33.33", "costComplexDays": "1.5", "costSimpleDays": "0.1"}
    )
    assert params.reviewed == Decimal("0.125")
    assert params.reviews() == Decimal("2.625")
    assert params.days_per_review() == Decimal("0.3333") * Decimal("1.5") + Decimal("0.6667") * Decimal("0.1")


# --- validation ---------------------------------------------------------------

def _level_doc(**overrides):
    doc = {"level": 1, "banks": 10, "opinions": 5, "reviewedPct": 50,
           "complexPct": 50, "costComplexDays": 2, "costSimpleDays": 1}
    doc.update(overrides)
    return doc


@pytest.mark.parametrize("overrides", [{"banks": -1}, {"opinions": -5}])
def test_negative_counts_rejected(overrides):
    with pytest.raises(SchemaInvalid):
        LevelParams.from_document(_level_doc(**overrides))


@pytest.mark.parametrize(
    "overrides",
    [{"reviewedPct": 101}, {"reviewedPct": -1}, {"complexPct": "100.01"}],
)
def test_shares_must_be_percentages(overrides):
    with pytest.raises(InvalidFraction):
        LevelParams.from_document(_level_doc(**overrides))


def test_cost_ordering_enforced():
    with pytest.raises(SchemaInvalid):
        LevelParams.from_document(_level_doc(costComplexDays=1, costSimpleDays=2))
    with pytest.raises(SchemaInvalid):
        LevelParams.from_document(_level_doc(costComplexDays=-1, costSimpleDays=-2))


def test_model_needs_levels():
    with pytest.raises(SchemaInvalid):
        total_cost([])


def test_duplicate_levels_rejected():
    params = LevelParams.from_document(_level_doc())
    with pytest.raises(SchemaInvalid):
        total_cost([params, params])


def test_zero_banks_is_fine_and_contributes_nothing():
    silent = LevelParams.from_document(_level_doc(banks=0))
    report = total_cost([silent])
    assert report.total_days == 0
    assert report.share_of_days(1) == 0


def test_unknown_level_share_lookup():
    report = total_cost([LevelParams.from_document(_level_doc())])
    with pytest.raises(SchemaInvalid):
        report.share_of_days(99)


def test_as_decimal_accepts_numbers_and_numeric_strings():
    assert as_decimal(3, "x") == Decimal(3)
    assert as_decimal("0.25", "x") == Decimal("0.25")
    assert as_decimal(Decimal("2"), "x") == Decimal(2)
    for bad in (True, "abc", [1]):
        with pytest.raises(SchemaInvalid):
            as_decimal(bad, "x")


level_params = st.builds(
    lambda banks, opinions, reviewed, cx, simple, spread: LevelParams(
        level=1,
        banks=banks,
        opinions=opinions,
        reviewed=reviewed.scaleb(-2),
        complex_share=cx.scaleb(-2),
        cost_simple_days=simple,
        cost_complex_days=simple + spread,
    ),
    banks=st.integers(0, 10_000),
    opinions=st.integers(0, 1_000),
    reviewed=st.decimals(0, 100, places=2, allow_nan=False, allow_infinity=False),
    cx=st.decimals(0, 100, places=2, allow_nan=False, allow_infinity=False),
    simple=st.decimals(0, 10, places=2, allow_nan=False, allow_infinity=False),
    spread=st.decimals(0, 10, places=2, allow_nan=False, allow_infinity=False),
)


@given(level_params)
def test_days_decompose_exactly(params):
    assert params.days() == params.reviews() * params.days_per_review()
    assert params.reviews() == Decimal(params.banks) * Decimal(params.opinions) * params.reviewed


@given(st.lists(level_params, min_size=1, max_size=5))
def test_totals_are_sums_of_levels(levels):
    distinct = [
        LevelParams(
            level=i,
            banks=p.banks,
            opinions=p.opinions,
            reviewed=p.reviewed,
            complex_share=p.complex_share,
            cost_complex_days=p.cost_complex_days,
            cost_simple_days=p.cost_simple_days,
        )
        for i, p in enumerate(levels)
    ]
    report = total_cost(distinct)
    assert report.total_days == sum((p.days() for p in distinct), Decimal(0))
    assert report.reviews_total == sum((p.reviews() for p in distinct), Decimal(0))
