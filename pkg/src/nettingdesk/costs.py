"""Sector-wide opinion review cost model.

Banks are bucketed into size levels; each level contributes

    banks x opinions x reviewedShare x (complexShare*costComplex + (1-complexShare)*costSimple)

review-days per year. All arithmetic is ``Decimal`` and exact (shares enter
as percentages and are rescaled, never divided); rounding happens once, at
display time, half-up to two decimals.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation, ROUND_HALF_UP

from .documents import as_int, as_list, require
from .errors import InvalidFraction, SchemaInvalid

SCHEMA_VERSION = 1

_CENT = Decimal("0.01")
_ONE = Decimal(1)


def as_decimal(value, field: str) -> Decimal:
    if isinstance(value, bool):
        raise SchemaInvalid(f"{field} must be a number")
    if isinstance(value, int):
        return Decimal(value)
    if isinstance(value, Decimal):
        return value
    if isinstance(value, str):
        try:
            return Decimal(value)
        except InvalidOperation:
            raise SchemaInvalid(f"{field} is not a decimal number: {value!r}") from None
    raise SchemaInvalid(f"{field} must be a number, got {type(value).__name__}")


def _pct_to_share(value, field: str) -> Decimal:
    share = as_decimal(value, field).scaleb(-2)
    if not 0 <= share <= 1:
        raise InvalidFraction(f"{field} must lie in [0, 100], got {value}")
    return share


def _display(value: Decimal) -> str:
    return str(value.quantize(_CENT, rounding=ROUND_HALF_UP))


def _exact(value: Decimal):
    """Exact JSON form: int when integral, decimal string otherwise."""
    if value == value.to_integral_value():
        return int(value)
    return str(value.normalize())


@dataclass(frozen=True)
class LevelParams:
    level: int
    banks: int
    opinions: int
    reviewed: Decimal  # share of opinions actually reviewed, in [0,1]
    complex_share: Decimal  # share of reviews that are complex, in [0,1]
    cost_complex_days: Decimal
    cost_simple_days: Decimal

    def __post_init__(self) -> None:
        if self.banks < 0 or self.opinions < 0:
            raise SchemaInvalid(f"level {self.level}: counts must be >= 0")
        for name, share in (("reviewed", self.reviewed), ("complex", self.complex_share)):
            if not 0 <= share <= _ONE:
                raise InvalidFraction(f"level {self.level}: {name} share {share} outside [0, 1]")
        if self.cost_simple_days < 0 or self.cost_complex_days < self.cost_simple_days:
            raise SchemaInvalid(f"level {self.level}: need costComplexDays >= costSimpleDays >= 0")

    def reviews(self) -> Decimal:
        return Decimal(self.banks) * Decimal(self.opinions) * self.reviewed

    def days_per_review(self) -> Decimal:
        return self.complex_share * self.cost_complex_days + (_ONE - self.complex_share) * self.cost_simple_days

    def days(self) -> Decimal:
        return self.reviews() * self.days_per_review()

    @classmethod
    def from_document(cls, doc: dict) -> "LevelParams":
        return cls(
            level=as_int(require(doc, "level"), "level"),
            banks=as_int(require(doc, "banks"), "banks"),
            opinions=as_int(require(doc, "opinions"), "opinions"),
            reviewed=_pct_to_share(require(doc, "reviewedPct"), "reviewedPct"),
            complex_share=_pct_to_share(require(doc, "complexPct"), "complexPct"),
            cost_complex_days=as_decimal(require(doc, "costComplexDays"), "costComplexDays"),
            cost_simple_days=as_decimal(require(doc, "costSimpleDays"), "costSimpleDays"),
        )

    def to_document(self) -> dict:
        return {
            "level": self.level,
            "banks": self.banks,
            "opinions": self.opinions,
            "reviewedPct": _exact(self.reviewed.scaleb(2)),
            "complexPct": _exact(self.complex_share.scaleb(2)),
            "costComplexDays": _exact(self.cost_complex_days),
            "costSimpleDays": _exact(self.cost_simple_days),
        }


@dataclass(frozen=True)
class LevelCost:
    params: LevelParams
    reviews: Decimal
    days: Decimal


@dataclass(frozen=True)
class CostReport:
    levels: tuple
    reviews_total: Decimal
    total_days: Decimal
    day_rate: Decimal | None = None
    total_cost: Decimal | None = None

    def share_of_days(self, level: int) -> Decimal:
        """Percentage of total days arising from one level (display precision)."""
        if self.total_days == 0:
            return Decimal(0)
        for entry in self.levels:
            if entry.params.level == level:
                return (entry.days * 100 / self.total_days).quantize(_CENT, rounding=ROUND_HALF_UP)
        raise SchemaInvalid(f"no level {level} in report")

    def to_document(self) -> dict:
        level_docs = []
        for entry in self.levels:
            doc = entry.params.to_document()
            doc["reviews"] = _exact(entry.reviews)
            doc["days"] = _display(entry.days)
            doc["daysExact"] = _exact(entry.days)
            doc["shareOfDaysPct"] = _display(self.share_of_days(entry.params.level))
            level_docs.append(doc)
        return {
            "schemaVersion": SCHEMA_VERSION,
            "levels": level_docs,
            "reviewsTotal": _exact(self.reviews_total),
            "totalDays": _display(self.total_days),
            "totalDaysExact": _exact(self.total_days),
            "dayRate": None if self.day_rate is None else _exact(self.day_rate),
            "totalCost": None if self.total_cost is None else _display(self.total_cost),
        }


def total_cost(params, day_rate=None) -> CostReport:
    """Evaluate the review-cost model over all levels; optionally monetize."""
    params = list(params)
    if not params:
        raise SchemaInvalid("cost model needs at least one level")
    if len({p.level for p in params}) != len(params):
        raise SchemaInvalid("level ids must be unique")
    levels = tuple(LevelCost(params=p, reviews=p.reviews(), days=p.days()) for p in params)
    reviews_total = sum((entry.reviews for entry in levels), Decimal(0))
    days_total = sum((entry.days for entry in levels), Decimal(0))
    rate = None if day_rate is None else as_decimal(day_rate, "dayRate")
    return CostReport(
        levels=levels,
        reviews_total=reviews_total,
        total_days=days_total,
        day_rate=rate,
        total_cost=None if rate is None else days_total * rate,
    )


def params_from_document(doc) -> list:
    """Read a parameter file: {"levels": [{level, banks, opinions, ...}]}."""
    return [LevelParams.from_document(entry) for entry in as_list(require(doc, "levels"), "levels")]


def format_table(report: CostReport) -> str:
    """Fixed-width per-level table; the last line is the sector total."""
    header = f"{'Level':>5}  {'Banks':>6}  {'Opinions':>8}  {'Reviewed%':>9}  {'Complex%':>8}  {'Reviews':>8}  {'Days':>10}  {'Share%':>6}"
    lines = [header]
    for entry in report.levels:
        p = entry.params
        lines.append(
            f"{p.level:>5}  {p.banks:>6}  {p.opinions:>8}  "
            f"{str(_exact(p.reviewed.scaleb(2))):>9}  {str(_exact(p.complex_share.scaleb(2))):>8}  "
            f"{str(_exact(entry.reviews)):>8}  {_display(entry.days):>10}  "
            f"{_display(report.share_of_days(p.level)):>6}"
        )
    lines.append(f"TOTAL {_exact(report.reviews_total)} reviews, {_display(report.total_days)} days")
    if report.day_rate is not None:
        lines.append(f"At {_exact(report.day_rate)}/day: {_display(report.total_cost)}")
    return "\n".join(lines)
