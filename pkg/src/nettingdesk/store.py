"""File-backed versioned document store with an append-only audit chain.

Layout under one root directory::

    <root>/<kind>/<entity-id>/v0001.json     one file per version, never rewritten
    <root>/<kind>/index.json                 latest version + sha256 per version
    <root>/audit.log                         JSON lines, hash-chained

Writes use optimistic concurrency: the caller names the version it built on,
and a stale base (or a lost O_EXCL race on the version file) surfaces as
``VersionConflict``. Loads verify bytes against the hash recorded at save
time. Nothing is ever mutated or deleted.

The store also owns the lifecycle rules: trigger events mark dependent
determinations stale (the Yes/No flag is kept — staleness demands human
re-review), and the expiry sweep is the one automatic flip, rewriting aged
Yes determinations to No.
"""

from __future__ import annotations

import os
import threading
import urllib.parse
from dataclasses import dataclass
from datetime import date, datetime, timezone
from enum import Enum

from .cnl import builtin_registry
from .documents import (
    as_opt_str,
    as_str,
    document_bytes,
    dumps_document,
    dumps_line,
    hash_bytes,
    iso_utc,
    loads_document,
    require,
)
from .errors import NotFound, SchemaInvalid, UnknownSubject, VersionConflict

KINDS = ("registries", "opinions", "policies", "facts", "assessments", "determinations")

DEFAULT_REGISTRY_ID = "default"
DEFAULT_VALIDITY_DAYS = 365


class EventKind(Enum):
    AGREEMENT_CHANGED = "AgreementChanged"
    LAW_CHANGED = "LawChanged"
    TRADES_CHANGED = "TradesChanged"
    EXTREME_EVENT = "ExtremeEvent"
    OPINION_UPDATED = "OpinionUpdated"
    TIME_ELAPSED = "TimeElapsed"


#: Event kinds whose subject is a relationship rather than an opinion.
_RELATIONSHIP_EVENTS = frozenset(
    {EventKind.AGREEMENT_CHANGED, EventKind.TRADES_CHANGED, EventKind.EXTREME_EVENT}
)


@dataclass(frozen=True)
class TriggerEvent:
    kind: EventKind
    subject: str
    occurred_at: str
    payload: str = ""

    def to_document(self) -> dict:
        return {
            "kind": self.kind.value,
            "subject": self.subject,
            "occurredAt": self.occurred_at,
            "payload": self.payload,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "TriggerEvent":
        kind_value = as_str(require(doc, "kind"), "kind")
        for member in EventKind:
            if member.value == kind_value:
                kind = member
                break
        else:
            raise SchemaInvalid(f"unknown event kind {kind_value!r}")
        return cls(
            kind=kind,
            subject=as_str(require(doc, "subject"), "subject"),
            occurred_at=as_str(require(doc, "occurredAt"), "occurredAt"),
            payload=as_opt_str(doc.get("payload"), "payload") or "",
        )


def _entity_dirname(entity_id: str) -> str:
    name = urllib.parse.quote(entity_id, safe="")
    if name in (".", ".."):
        # percent-quoting leaves dots alone; keep ids from naming path components
        name = name.replace(".", "%2E")
    return name


def _utc_now() -> datetime:
    return datetime.now(timezone.utc)


class DocumentStore:
    """One instance per store root; safe for concurrent use in one process."""

    def __init__(self, root, clock=_utc_now):
        self.root = os.path.abspath(os.fspath(root))
        self._clock = clock
        self._lock = threading.RLock()
        os.makedirs(self.root, exist_ok=True)
        for kind in KINDS:
            os.makedirs(os.path.join(self.root, kind), exist_ok=True)

    def now(self) -> datetime:
        return self._clock()

    # -- paths and index ---------------------------------------------------

    def _kind_dir(self, kind: str) -> str:
        if kind not in KINDS:
            raise SchemaInvalid(f"unknown store kind {kind!r}")
        return os.path.join(self.root, kind)

    def _entity_dir(self, kind: str, entity_id: str) -> str:
        return os.path.join(self._kind_dir(kind), _entity_dirname(entity_id))

    def _version_path(self, kind: str, entity_id: str, version: int) -> str:
        return os.path.join(self._entity_dir(kind, entity_id), f"v{version:04d}.json")

    def _index_path(self, kind: str) -> str:
        return os.path.join(self._kind_dir(kind), "index.json")

    def _read_index(self, kind: str) -> dict:
        path = self._index_path(kind)
        if not os.path.exists(path):
            return {}
        with open(path, "r", encoding="utf-8") as handle:
            return loads_document(handle.read())

    def _write_index(self, kind: str, index: dict) -> None:
        path = self._index_path(kind)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as handle:
            handle.write(dumps_document(index))
        os.replace(tmp, path)

    # -- core save/load ------------------------------------------------------

    def list_ids(self, kind: str) -> list:
        return sorted(self._read_index(kind))

    def versions(self, kind: str, entity_id: str) -> list:
        entry = self._read_index(kind).get(entity_id)
        if entry is None:
            raise NotFound(f"{kind}/{entity_id}")
        return list(range(1, int(entry["latest"]) + 1))

    def latest_version(self, kind: str, entity_id: str) -> int:
        entry = self._read_index(kind).get(entity_id)
        if entry is None:
            raise NotFound(f"{kind}/{entity_id}")
        return int(entry["latest"])

    def exists(self, kind: str, entity_id: str) -> bool:
        return entity_id in self._read_index(kind)

    def save(self, kind: str, entity_id: str, doc: dict, base_version=None, actor: str = "system", action: str = "save") -> int:
        """Write a new version of the entity and return its version number.

        ``base_version`` is the version the caller believes is current:
        None for a brand-new entity, N for an update built on version N.
        Anything else means a concurrent writer won, and raises.
        """
        if not entity_id:
            raise SchemaInvalid("entity id must be non-empty")
        with self._lock:
            index = self._read_index(kind)
            entry = index.get(entity_id)
            current = 0 if entry is None else int(entry["latest"])
            expected = 0 if base_version is None else int(base_version)
            if expected != current:
                raise VersionConflict(f"{kind}/{entity_id}: base version {expected}, current {current}")
            version = current + 1
            payload = document_bytes(doc)
            os.makedirs(self._entity_dir(kind, entity_id), exist_ok=True)
            path = self._version_path(kind, entity_id, version)
            try:
                fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_EXCL, 0o644)
            except FileExistsError:
                raise VersionConflict(f"{kind}/{entity_id}: version {version} already written") from None
            with os.fdopen(fd, "wb") as handle:
                handle.write(payload)
            before_hash = None if entry is None else entry["versions"][str(current)]
            after_hash = hash_bytes(payload)
            if entry is None:
                entry = {"latest": version, "versions": {}}
                index[entity_id] = entry
            entry["latest"] = version
            entry["versions"][str(version)] = after_hash
            self._write_index(kind, index)
            self._append_audit(
                actor=actor,
                action=action,
                kind=kind,
                entity_id=entity_id,
                version=version,
                before_hash=before_hash,
                after_hash=after_hash,
            )
            return version

    def load_bytes(self, kind: str, entity_id: str, version=None) -> bytes:
        """Exact bytes as saved, verified against the recorded hash."""
        entry = self._read_index(kind).get(entity_id)
        if entry is None:
            raise NotFound(f"{kind}/{entity_id}")
        version = int(entry["latest"]) if version is None else int(version)
        recorded = entry["versions"].get(str(version))
        if recorded is None:
            raise NotFound(f"{kind}/{entity_id} version {version}")
        path = self._version_path(kind, entity_id, version)
        try:
            with open(path, "rb") as handle:
                payload = handle.read()
        except FileNotFoundError:
            raise NotFound(f"{kind}/{entity_id} version {version}") from None
        if hash_bytes(payload) != recorded:
            raise SchemaInvalid(f"{kind}/{entity_id} v{version}: stored bytes do not match the recorded hash")
        return payload

    def load(self, kind: str, entity_id: str, version=None) -> dict:
        return loads_document(self.load_bytes(kind, entity_id, version).decode("utf-8"))

    # -- audit chain ---------------------------------------------------------

    @property
    def _audit_path(self) -> str:
        return os.path.join(self.root, "audit.log")

    def _append_audit(self, actor, action, kind, entity_id, version, before_hash, after_hash) -> None:
        entries = self.audit_entries()
        prev_hash = entries[-1]["entryHash"] if entries else None
        entry = {
            "seq": len(entries) + 1,
            "actor": actor,
            "action": action,
            "kind": kind,
            "entityId": entity_id,
            "version": version,
            "timestamp": iso_utc(self._clock()),
            "beforeHash": before_hash,
            "afterHash": after_hash,
            "prevEntryHash": prev_hash,
        }
        entry["entryHash"] = hash_bytes(document_bytes(entry))
        with open(self._audit_path, "a", encoding="utf-8") as handle:
            handle.write(dumps_line(entry) + "\n")

    def audit_entries(self) -> list:
        if not os.path.exists(self._audit_path):
            return []
        entries = []
        with open(self._audit_path, "r", encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    entries.append(loads_document(line))
        return entries

    def verify_audit(self) -> dict:
        """Recompute the hash chain; reports the first broken sequence number."""
        entries = self.audit_entries()
        prev_hash = None
        for entry in entries:
            claimed = entry.get("entryHash")
            body = {key: value for key, value in entry.items() if key != "entryHash"}
            recomputed = hash_bytes(document_bytes(body))
            if claimed != recomputed or entry.get("prevEntryHash") != prev_hash:
                return {"valid": False, "entries": len(entries), "brokenAt": entry.get("seq")}
            prev_hash = claimed
        return {"valid": True, "entries": len(entries), "brokenAt": None}

    # -- registry seeding ------------------------------------------------------

    def ensure_registry(self, actor: str = "system") -> dict:
        """Return the default vocabulary registry, seeding version 1 if absent."""
        with self._lock:
            if not self.exists("registries", DEFAULT_REGISTRY_ID):
                self.save("registries", DEFAULT_REGISTRY_ID, builtin_registry().to_document(), actor=actor, action="seed")
            return self.load("registries", DEFAULT_REGISTRY_ID)

    # -- trigger events ---------------------------------------------------------

    def _known_jurisdictions(self) -> set:
        known = set()
        for opinion_id in self.list_ids("opinions"):
            doc = self.load("opinions", opinion_id)
            known.update(doc.get("scope", {}).get("jurisdictions", []))
        for det_id in self.list_ids("determinations"):
            doc = self.load("determinations", det_id)
            known.update(doc.get("trace", {}).get("requiredJurisdictions", []))
        return known

    def _determinations_touching(self, predicate) -> list:
        touched = []
        for det_id in self.list_ids("determinations"):
            doc = self.load("determinations", det_id)
            if predicate(doc):
                touched.append(det_id)
        return touched

    def record_event(self, event: TriggerEvent, actor: str = "system") -> list:
        """Mark every determination that depends on the subject as stale.

        The Yes/No flag is left alone — only the expiry sweep flips flags.
        Returns the affected determination ids.
        """
        kind = event.kind
        if kind is EventKind.OPINION_UPDATED:
            if not self.exists("opinions", event.subject):
                raise UnknownSubject(f"opinion {event.subject!r}")
            affected = self._determinations_touching(lambda doc: event.subject in doc.get("opinionIds", []))
        elif kind in _RELATIONSHIP_EVENTS:
            if not self.exists("determinations", event.subject) and not self.exists("facts", event.subject):
                raise UnknownSubject(f"relationship {event.subject!r}")
            affected = self._determinations_touching(lambda doc: doc.get("relationshipId") == event.subject)
        elif kind is EventKind.LAW_CHANGED:
            if event.subject not in self._known_jurisdictions():
                raise UnknownSubject(f"jurisdiction {event.subject!r}")
            affected = self._determinations_touching(
                lambda doc: event.subject in doc.get("trace", {}).get("requiredJurisdictions", [])
            )
        elif kind is EventKind.TIME_ELAPSED:
            if self.exists("opinions", event.subject):
                affected = self._determinations_touching(lambda doc: event.subject in doc.get("opinionIds", []))
            elif self.exists("determinations", event.subject) or self.exists("facts", event.subject):
                affected = self._determinations_touching(lambda doc: doc.get("relationshipId") == event.subject)
            else:
                raise UnknownSubject(event.subject)
        else:  # pragma: no cover - enum is closed
            raise SchemaInvalid(f"unhandled event kind {kind!r}")

        with self._lock:
            for det_id in affected:
                version = self.latest_version("determinations", det_id)
                doc = self.load("determinations", det_id, version)
                stale = doc.get("stale") or {"isStale": False, "events": []}
                stale = {"isStale": True, "events": list(stale.get("events", [])) + [event.to_document()]}
                doc["stale"] = stale
                self.save("determinations", det_id, doc, base_version=version, actor=actor, action="mark-stale")
        return affected

    # -- expiry sweep --------------------------------------------------------------

    def _opinion_issued_at(self, opinion_id: str, det_doc: dict):
        if self.exists("opinions", opinion_id):
            return date.fromisoformat(self.load("opinions", opinion_id)["issuedAt"])
        stamped = det_doc.get("trace", {}).get("opinionIssuedAt", {}).get(opinion_id)
        return None if stamped is None else date.fromisoformat(stamped)

    def sweep_expiry(self, as_of: date, default_validity_days: int = DEFAULT_VALIDITY_DAYS, actor: str = "system") -> dict:
        """Flip aged Yes determinations to No; honor manual overrides.

        A determination expires when its newest supporting opinion is older
        than the validity period its policy snapshot states (or the given
        default). Running the sweep twice for one date is a no-op the second
        time.
        """
        flipped = []
        skipped_overrides = []
        with self._lock:
            for det_id in self.list_ids("determinations"):
                version = self.latest_version("determinations", det_id)
                doc = self.load("determinations", det_id, version)
                if doc.get("flag") != "Yes":
                    continue
                validity = doc.get("policy", {}).get("validityPeriodDays", default_validity_days)
                issued_dates = [
                    issued
                    for opinion_id in doc.get("opinionIds", [])
                    if (issued := self._opinion_issued_at(opinion_id, doc)) is not None
                ]
                if not issued_dates:
                    continue
                newest = max(issued_dates)
                if (as_of - newest).days <= int(validity):
                    continue
                if doc.get("manualOverride"):
                    skipped_overrides.append(det_id)
                    self._append_audit(
                        actor=actor,
                        action="sweep-skip: manual override",
                        kind="determinations",
                        entity_id=det_id,
                        version=version,
                        before_hash=None,
                        after_hash=None,
                    )
                    continue
                doc["flag"] = "No"
                doc["blockingReasons"] = list(doc.get("blockingReasons", [])) + [
                    {
                        "reasonId": "OpinionExpired",
                        "detail": f"newest supporting opinion issued {newest.isoformat()}, validity {int(validity)} days, swept {as_of.isoformat()}",
                    }
                ]
                doc["determinedAt"] = as_of.isoformat()
                doc["sweptAt"] = as_of.isoformat()
                self.save("determinations", det_id, doc, base_version=version, actor=actor, action="sweep-expire")
                flipped.append(det_id)
        return {"asOfDate": as_of.isoformat(), "flipped": flipped, "skippedOverrides": skipped_overrides}

    def overage_report(self, as_of: date, default_validity_days: int = DEFAULT_VALIDITY_DAYS) -> list:
        """Non-overridden Yes determinations relying on out-of-date opinions.

        Empty after a sweep for the same date; anything listed here is a
        process violation that needs either a sweep or a human decision.
        """
        violations = []
        for det_id in self.list_ids("determinations"):
            doc = self.load("determinations", det_id)
            if doc.get("flag") != "Yes" or doc.get("manualOverride"):
                continue
            validity = int(doc.get("policy", {}).get("validityPeriodDays", default_validity_days))
            for opinion_id in doc.get("opinionIds", []):
                issued = self._opinion_issued_at(opinion_id, doc)
                if issued is not None and (as_of - issued).days > validity:
                    violations.append(
                        {"determinationId": det_id, "opinionId": opinion_id, "ageDays": (as_of - issued).days}
                    )
        return violations
