"""Gross and net close-out exposures for a bilateral portfolio.

Amounts are signed 64-bit integers in minor currency units, seen from party
A's side: positive mark-to-market means the trade is in-the-money to A.
Everything here is exact integer arithmetic with explicit overflow checks;
collateral and other credit support are out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

from .documents import as_int, as_list, as_str, require
from .errors import CurrencyMismatch, Overflow

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class Trade:
    id: str
    mtm_minor_units: int
    currency: str

    def to_document(self) -> dict:
        return {"id": self.id, "mtmMinorUnits": self.mtm_minor_units, "currency": self.currency}

    @classmethod
    def from_document(cls, doc: dict) -> "Trade":
        return cls(
            id=as_str(require(doc, "id"), "trade.id"),
            mtm_minor_units=as_int(require(doc, "mtmMinorUnits"), "trade.mtmMinorUnits"),
            currency=as_str(require(doc, "currency"), "trade.currency"),
        )


@dataclass(frozen=True)
class ExposureReport:
    currency: str | None
    trade_count: int
    net_value_to_a: int
    net_exposure_a: int
    net_exposure_b: int
    gross_exposure_a: int
    gross_exposure_b: int

    def to_document(self) -> dict:
        return {
            "currency": self.currency,
            "tradeCount": self.trade_count,
            "netValueToA": self.net_value_to_a,
            "netExposureA": self.net_exposure_a,
            "netExposureB": self.net_exposure_b,
            "grossExposureA": self.gross_exposure_a,
            "grossExposureB": self.gross_exposure_b,
        }


def _check64(value: int, what: str) -> int:
    if not INT64_MIN <= value <= INT64_MAX:
        raise Overflow(f"{what} exceeds the signed 64-bit range")
    return value


def compute_exposures(portfolio) -> ExposureReport:
    """Net and gross exposures under a single close-out amount.

    Gross treats each side's in-the-money trades as separate claims; net
    first sums every mark-to-market into one figure and only its positive
    part is an exposure. The accounting identity grossA − grossB =
    netValueToA = netA − netB holds by construction.
    """
    trades = list(portfolio)
    currency = None
    gross_a = 0
    gross_b = 0
    for trade in trades:
        if currency is None:
            currency = trade.currency
        elif trade.currency != currency:
            raise CurrencyMismatch(f"portfolio mixes {currency} and {trade.currency}")
        _check64(trade.mtm_minor_units, f"trade {trade.id} mtm")
        if trade.mtm_minor_units >= 0:
            gross_a = _check64(gross_a + trade.mtm_minor_units, "grossExposureA")
        else:
            gross_b = _check64(gross_b - trade.mtm_minor_units, "grossExposureB")
    net = _check64(gross_a - gross_b, "netValueToA")
    return ExposureReport(
        currency=currency,
        trade_count=len(trades),
        net_value_to_a=net,
        net_exposure_a=max(0, net),
        net_exposure_b=max(0, -net),
        gross_exposure_a=gross_a,
        gross_exposure_b=gross_b,
    )


def portfolio_from_document(doc) -> list:
    """Read a portfolio file: a JSON array of {id, mtmMinorUnits, currency}."""
    return [Trade.from_document(entry) for entry in as_list(doc, "portfolio")]
