"""Domain errors with stable, machine-readable reason ids.

Every failure the workbench can signal across its surfaces (library calls,
command line, wire protocol) subclasses :class:`NettingError` and carries a
``reason_id`` that clients match on. The ids are part of the external
contract and never change meaning.
"""

from __future__ import annotations


class NettingError(Exception):
    """Base domain error. ``reason_id`` is stable across releases."""

    reason_id = "DomainError"

    def __init__(self, detail: str = "") -> None:
        super().__init__(detail or self.reason_id)
        self.detail = detail

    def to_document(self) -> dict:
        return {"error": {"detail": self.detail, "reasonId": self.reason_id}}


# --- sentence grammar -------------------------------------------------------

class ParseError(NettingError):
    """A conclusion sentence failed to parse; ``detail`` names the span."""

    reason_id = "ParseError"


class NoLeadingItIs(ParseError):
    reason_id = "NoLeadingItIs"


class UnknownLikelihood(ParseError):
    reason_id = "UnknownLikelihood"


class UnknownObject(ParseError):
    reason_id = "UnknownObject"


class UnknownVerb(ParseError):
    reason_id = "UnknownVerb"


class UnknownPredicate(ParseError):
    reason_id = "UnknownPredicate"


class TrailingGarbage(ParseError):
    reason_id = "TrailingGarbage"


class SurfaceCollision(NettingError):
    reason_id = "SurfaceCollision"


class ReservedPhrase(NettingError):
    reason_id = "ReservedPhrase"


class DanglingReference(NettingError):
    reason_id = "DanglingReference"


# --- documents and stored entities ------------------------------------------

class SchemaInvalid(NettingError):
    reason_id = "SchemaInvalid"


class UnknownItem(NettingError):
    reason_id = "UnknownItem"


class NotFound(NettingError):
    reason_id = "NotFound"


class VersionConflict(NettingError):
    reason_id = "VersionConflict"


class UnknownSubject(NettingError):
    reason_id = "UnknownSubject"


# --- determination engine ----------------------------------------------------

class PolicyInvalid(NettingError):
    reason_id = "PolicyInvalid"


class UnresolvedFactor(NettingError):
    reason_id = "UnresolvedFactor"


class OpinionNotFound(NettingError):
    reason_id = "OpinionNotFound"


# --- arithmetic modules -------------------------------------------------------

class CurrencyMismatch(NettingError):
    reason_id = "CurrencyMismatch"


class Overflow(NettingError):
    reason_id = "Overflow"


class InvalidFraction(NettingError):
    reason_id = "InvalidFraction"


#: Every reason id a client can receive, in one stable list.
REASON_IDS = (
    "NoLeadingItIs",
    "UnknownLikelihood",
    "UnknownObject",
    "UnknownVerb",
    "UnknownPredicate",
    "TrailingGarbage",
    "SurfaceCollision",
    "ReservedPhrase",
    "DanglingReference",
    "SchemaInvalid",
    "UnknownItem",
    "NotFound",
    "VersionConflict",
    "UnknownSubject",
    "PolicyInvalid",
    "UnresolvedFactor",
    "OpinionNotFound",
    "CurrencyMismatch",
    "Overflow",
    "InvalidFraction",
)
