"""Exact interval algebra over percentage probabilities.

Bounds are integer basis points (1 bp = 0.01%), so every operation is exact
integer arithmetic, interval equality is decidable, and the worked likelihood
arithmetic reproduces bit-exactly. No floats enter or leave this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

from .cnl import Likelihood
from .errors import SchemaInvalid

SCALE_BP = 10000


def _check_bp(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaInvalid(f"{field} must be an integer basis-point value, got {value!r}")
    if not 0 <= value <= SCALE_BP:
        raise SchemaInvalid(f"{field} out of range [0, {SCALE_BP}]: {value}")
    return value


def _format_percent(bp: int) -> str:
    whole, frac = divmod(bp, 100)
    if frac == 0:
        return str(whole)
    text = f"{whole}.{frac:02d}"
    return text[:-1] if text.endswith("0") else text


@dataclass(frozen=True)
class ProbRange:
    """Closed interval [lo, hi] of probability, in basis points."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        _check_bp(self.lo, "lo")
        _check_bp(self.hi, "hi")
        if self.lo > self.hi:
            raise SchemaInvalid(f"lo must not exceed hi: [{self.lo}, {self.hi}]")

    def width(self) -> int:
        return self.hi - self.lo

    def complement(self) -> "ProbRange":
        return ProbRange(SCALE_BP - self.hi, SCALE_BP - self.lo)

    def format_percent(self) -> str:
        return f"{_format_percent(self.lo)}%-{_format_percent(self.hi)}%"

    def to_document(self) -> dict:
        return {"hiBp": self.hi, "loBp": self.lo}

    @classmethod
    def from_document(cls, doc: dict) -> "ProbRange":
        if not isinstance(doc, dict) or "loBp" not in doc or "hiBp" not in doc:
            raise SchemaInvalid("range document needs loBp and hiBp")
        lo, hi = doc["loBp"], doc["hiBp"]
        if isinstance(lo, bool) or isinstance(hi, bool) or not isinstance(lo, int) or not isinstance(hi, int):
            raise SchemaInvalid("loBp and hiBp must be integers")
        return cls(lo=lo, hi=hi)


class EmptyRange:
    """Marker for an empty intersection; interpretation is the caller's call."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EMPTY"

    def to_document(self) -> dict:
        return {"empty": True}


EMPTY = EmptyRange()
FULL = ProbRange(0, SCALE_BP)


def complement(r: ProbRange) -> ProbRange:
    return r.complement()


def intersect(a: ProbRange, b: ProbRange):
    """[max lo, min hi], or EMPTY when the intervals are disjoint."""
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    if lo > hi:
        return EMPTY
    return ProbRange(lo, hi)


def percent_to_bp(value, field: str) -> int:
    """Convert a percentage given to at most 2 decimal places exactly to bp."""
    if isinstance(value, bool):
        raise SchemaInvalid(f"{field} must be a number")
    if isinstance(value, int):
        dec = Decimal(value)
    elif isinstance(value, Decimal):
        dec = value
    elif isinstance(value, str):
        try:
            dec = Decimal(value)
        except InvalidOperation:
            raise SchemaInvalid(f"{field} is not a decimal number: {value!r}") from None
    else:
        raise SchemaInvalid(f"{field} must be a number given to at most 2 decimal places")
    scaled = dec * 100
    if scaled != scaled.to_integral_value():
        raise SchemaInvalid(f"{field} must have at most 2 decimal places: {value}")
    bp = int(scaled)
    return _check_bp(bp, field)


def bp_to_percent_value(bp: int):
    """Inverse of percent_to_bp for emission: int when whole, string otherwise."""
    if bp % 100 == 0:
        return bp // 100
    return _format_percent(bp)


@dataclass(frozen=True)
class LikelihoodMapping:
    """Institution-owned total map from likelihood to probability range."""

    entries: tuple

    def __post_init__(self) -> None:
        seen = {}
        for likelihood, rng in self.entries:
            if not isinstance(likelihood, Likelihood) or not isinstance(rng, ProbRange):
                raise SchemaInvalid("mapping entries must pair a likelihood with a range")
            if likelihood in seen:
                raise SchemaInvalid(f"duplicate mapping entry for {likelihood.id}")
            seen[likelihood] = rng
        missing = [m.id for m in Likelihood if m not in seen]
        if missing:
            raise SchemaInvalid(f"mapping must cover all likelihoods; missing {missing}")

    def range_for(self, likelihood: Likelihood) -> ProbRange:
        for candidate, rng in self.entries:
            if candidate is likelihood:
                return rng
        raise SchemaInvalid(f"mapping has no entry for {likelihood.id}")

    def to_document(self) -> dict:
        return {
            likelihood.id: {
                "hiPercent": bp_to_percent_value(rng.hi),
                "loPercent": bp_to_percent_value(rng.lo),
            }
            for likelihood, rng in self.entries
        }

    @classmethod
    def from_document(cls, doc: dict) -> "LikelihoodMapping":
        if not isinstance(doc, dict):
            raise SchemaInvalid("mapping must be an object keyed by likelihood id")
        entries = []
        for likelihood in Likelihood:
            entry = doc.get(likelihood.id)
            if entry is None:
                raise SchemaInvalid(f"mapping missing likelihood {likelihood.id!r}")
            lo = percent_to_bp(entry.get("loPercent"), f"{likelihood.id}.loPercent")
            hi = percent_to_bp(entry.get("hiPercent"), f"{likelihood.id}.hiPercent")
            entries.append((likelihood, ProbRange(lo, hi)))
        unknown = set(doc) - {m.id for m in Likelihood}
        if unknown:
            raise SchemaInvalid(f"mapping has unknown likelihood ids: {sorted(unknown)}")
        return cls(entries=tuple(entries))

    @classmethod
    def default(cls) -> "LikelihoodMapping":
        return DEFAULT_MAPPING


#: The standard mapping: unknown spans everything, "possible" is deliberately
#: asymmetric (1%-64%), "more likely than not" starts just above even odds.
DEFAULT_MAPPING = LikelihoodMapping(
    entries=(
        (Likelihood.UNKNOWN_WHETHER, ProbRange(0, 10000)),
        (Likelihood.DEFINITELY_NOT_THE_CASE_THAT, ProbRange(0, 0)),
        (Likelihood.POSSIBLE_THAT, ProbRange(100, 6400)),
        (Likelihood.MORE_LIKELY_THAN_NOT_THAT, ProbRange(5100, 10000)),
        (Likelihood.DEFINITELY_THE_CASE_THAT, ProbRange(10000, 10000)),
    )
)


def map_likelihood(likelihood: Likelihood, mapping: LikelihoodMapping) -> ProbRange:
    return mapping.range_for(likelihood)
