"""Canonical JSON serialization shared by the library, CLI, service and store.

Documents are emitted with sorted keys and a fixed layout so identical inputs
always produce identical bytes; the content store, the audit hash chain and
the what-if/persisted trace equivalence all rely on this.
"""

from __future__ import annotations

import hashlib
import json
from datetime import date, datetime, timezone
from decimal import Decimal

from .errors import SchemaInvalid


def dumps_document(doc) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def dumps_line(doc) -> str:
    """Compact single-line form, for line-oriented logs."""
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"), sort_keys=True)


def document_bytes(doc) -> bytes:
    return dumps_document(doc).encode("utf-8")


def hash_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def document_hash(doc) -> str:
    return hash_bytes(document_bytes(doc))


def loads_document(text):
    """Parse JSON, keeping fractional numbers as exact decimals."""
    try:
        return json.loads(text, parse_float=Decimal)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaInvalid(f"invalid JSON: {exc}") from None


# --- small field validators used by from_document constructors ---------------

def require(doc: dict, field: str):
    if not isinstance(doc, dict):
        raise SchemaInvalid(f"expected an object while reading {field!r}")
    if field not in doc:
        raise SchemaInvalid(f"missing required field {field!r}")
    return doc[field]


def as_str(value, field: str) -> str:
    if not isinstance(value, str) or not value:
        raise SchemaInvalid(f"{field!r} must be a non-empty string")
    return value


def as_opt_str(value, field: str):
    if value is None:
        return None
    if not isinstance(value, str):
        raise SchemaInvalid(f"{field!r} must be a string or null")
    return value


def as_int(value, field: str) -> int:
    if isinstance(value, bool):
        raise SchemaInvalid(f"{field!r} must be an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, Decimal) and value == value.to_integral_value():
        return int(value)
    raise SchemaInvalid(f"{field!r} must be an integer, got {value!r}")


def as_bool(value, field: str) -> bool:
    if not isinstance(value, bool):
        raise SchemaInvalid(f"{field!r} must be a boolean")
    return value


def as_list(value, field: str) -> list:
    if not isinstance(value, list):
        raise SchemaInvalid(f"{field!r} must be an array")
    return value


def as_str_list(value, field: str) -> list:
    return [as_str(v, f"{field}[{i}]") for i, v in enumerate(as_list(value, field))]


def as_date(value, field: str) -> date:
    try:
        return date.fromisoformat(as_str(value, field))
    except ValueError:
        raise SchemaInvalid(f"{field!r} must be an ISO-8601 date") from None


def iso_utc(moment: datetime) -> str:
    """ISO-8601 UTC timestamp with second resolution, as stored everywhere."""
    return moment.astimezone(timezone.utc).replace(microsecond=0).isoformat().replace("+00:00", "Z")
