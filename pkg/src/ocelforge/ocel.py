"""Final log assembly, OCEL 1.0 JSON serialization, and flattening.

Serialization is canonical: sorted keys, compact separators, ISO-8601 UTC
timestamps at second precision. Two serializations of the same log are
byte-identical, which the determinism contract depends on.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import DanglingObjectRef, DuplicateEventId, UnknownCaseType
from .extract import RawEvent, RawObject

TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%SZ"
FLAT_CSV_HEADER = ("case:concept:name", "concept:name", "time:timestamp", "event:id")


@dataclass(frozen=True)
class OcelEvent:
    activity: str
    timestamp: datetime
    omap: tuple[str, ...]
    vmap: Mapping[str, str]


@dataclass(frozen=True)
class OcelObject:
    type: str
    ovmap: Mapping[str, str]


@dataclass(frozen=True)
class OcelLog:
    """events is insertion-ordered by (timestamp, event id)."""

    events: dict[str, OcelEvent]
    objects: dict[str, OcelObject]
    object_types: frozenset[str]
    attribute_names: frozenset[str]


@dataclass(frozen=True)
class FlatEntry:
    activity: str
    timestamp: datetime
    event_id: str
    vmap: Mapping[str, str]


@dataclass(frozen=True)
class FlatLog:
    """cases map a case object id to its (timestamp, event id)-ordered trace."""

    case_type: str
    cases: dict[str, tuple[FlatEntry, ...]]
    dropped_events: int


@dataclass(frozen=True)
class ConvergenceStats:
    duplicated_events: int
    duplication_factor: float

    def to_doc(self) -> dict:
        return {
            "duplicated_events": self.duplicated_events,
            "duplication_factor": self.duplication_factor,
        }


@dataclass(frozen=True)
class DivergenceStats:
    diverging_pairs: int
    affected_cases: int

    def to_doc(self) -> dict:
        return {
            "diverging_pairs": self.diverging_pairs,
            "affected_cases": self.affected_cases,
        }


def assemble(events: Iterable[RawEvent], objects: Iterable[RawObject]) -> OcelLog:
    """Build a valid log or fail loudly.

    Raises DuplicateEventId on an id collision and DanglingObjectRef when an
    omap mentions an object that was never emitted.
    """
    object_map: dict[str, OcelObject] = {}
    for obj in objects:
        if obj.object_id not in object_map:
            object_map[obj.object_id] = OcelObject(
                type=obj.type.rendered, ovmap=dict(obj.ovmap)
            )
    collected: dict[str, RawEvent] = {}
    for event in events:
        if event.event_id in collected:
            raise DuplicateEventId(event.event_id)
        for object_id in event.omap:
            if object_id not in object_map:
                raise DanglingObjectRef(event.event_id, object_id)
        collected[event.event_id] = event
    ordered = sorted(collected.values(), key=lambda e: (e.timestamp, e.event_id))
    event_map = {
        e.event_id: OcelEvent(
            activity=e.activity,
            timestamp=e.timestamp,
            omap=tuple(sorted(e.omap)),
            vmap=dict(e.vmap),
        )
        for e in ordered
    }
    attribute_names = set()
    for event in event_map.values():
        attribute_names.update(event.vmap)
    for obj in object_map.values():
        attribute_names.update(obj.ovmap)
    return OcelLog(
        events=event_map,
        objects=object_map,
        object_types=frozenset(o.type for o in object_map.values()),
        attribute_names=frozenset(attribute_names),
    )


def format_timestamp(instant: datetime) -> str:
    return instant.astimezone(timezone.utc).strftime(TIMESTAMP_FORMAT)


def parse_timestamp(text: str) -> datetime:
    return datetime.strptime(text, TIMESTAMP_FORMAT).replace(tzinfo=timezone.utc)


def log_to_doc(log: OcelLog) -> dict:
    return {
        "ocel:global-event": {"ocel:activity": "__INVALID__"},
        "ocel:global-object": {"ocel:type": "__INVALID__"},
        "ocel:global-log": {
            "ocel:version": "1.0",
            "ocel:ordering": "timestamp",
            "ocel:attribute-names": sorted(log.attribute_names),
            "ocel:object-types": sorted(log.object_types),
        },
        "ocel:events": {
            event_id: {
                "ocel:activity": event.activity,
                "ocel:timestamp": format_timestamp(event.timestamp),
                "ocel:omap": list(event.omap),
                "ocel:vmap": dict(sorted(event.vmap.items())),
            }
            for event_id, event in log.events.items()
        },
        "ocel:objects": {
            object_id: {
                "ocel:type": obj.type,
                "ocel:ovmap": dict(sorted(obj.ovmap.items())),
            }
            for object_id, obj in log.objects.items()
        },
    }


def serialize_json(log: OcelLog) -> bytes:
    doc = log_to_doc(log)
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def deserialize_json(data: bytes | str) -> OcelLog:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    doc = json.loads(data)
    raw_events = doc.get("ocel:events", {})
    parsed = {
        event_id: OcelEvent(
            activity=entry["ocel:activity"],
            timestamp=parse_timestamp(entry["ocel:timestamp"]),
            omap=tuple(entry.get("ocel:omap", ())),
            vmap=dict(entry.get("ocel:vmap", {})),
        )
        for event_id, entry in raw_events.items()
    }
    ordered = sorted(parsed.items(), key=lambda kv: (kv[1].timestamp, kv[0]))
    objects = {
        object_id: OcelObject(
            type=entry["ocel:type"], ovmap=dict(entry.get("ocel:ovmap", {}))
        )
        for object_id, entry in doc.get("ocel:objects", {}).items()
    }
    meta = doc.get("ocel:global-log", {})
    return OcelLog(
        events=dict(ordered),
        objects=objects,
        object_types=frozenset(meta.get("ocel:object-types", ())),
        attribute_names=frozenset(meta.get("ocel:attribute-names", ())),
    )


def validate_ocel_doc(doc: Mapping) -> list[str]:
    """Structural check independent of OcelLog internals.

    Returns human-readable problems; empty means valid.
    """
    problems = []
    for key in (
        "ocel:global-event",
        "ocel:global-object",
        "ocel:global-log",
        "ocel:events",
        "ocel:objects",
    ):
        if key not in doc:
            problems.append(f"missing top-level key {key}")
    if problems:
        return problems
    objects = doc["ocel:objects"]
    declared_types = set(doc["ocel:global-log"].get("ocel:object-types", ()))
    for object_id, entry in objects.items():
        if entry.get("ocel:type") not in declared_types:
            problems.append(f"object {object_id} has undeclared type")
    for event_id, entry in doc["ocel:events"].items():
        for object_id in entry.get("ocel:omap", ()):
            if object_id not in objects:
                problems.append(
                    f"event {event_id} references missing object {object_id}"
                )
        try:
            parse_timestamp(entry["ocel:timestamp"])
        except (KeyError, ValueError):
            problems.append(f"event {event_id} has an invalid timestamp")
    return problems


def flatten(log: OcelLog, case_type: str) -> FlatLog:
    """Project the log onto a case notion.

    An event with k case-type objects lands in k cases; events touching
    none are dropped and counted.
    """
    if case_type not in log.object_types:
        raise UnknownCaseType(case_type)
    cases: dict[str, list[FlatEntry]] = {}
    dropped = 0
    for event_id, event in log.events.items():
        case_ids = [
            object_id
            for object_id in event.omap
            if log.objects[object_id].type == case_type
        ]
        if not case_ids:
            dropped += 1
            continue
        entry = FlatEntry(
            activity=event.activity,
            timestamp=event.timestamp,
            event_id=event_id,
            vmap=event.vmap,
        )
        for case_id in case_ids:
            cases.setdefault(case_id, []).append(entry)
    return FlatLog(
        case_type=case_type,
        cases={case_id: tuple(entries) for case_id, entries in cases.items()},
        dropped_events=dropped,
    )


def convergence_stats(log: OcelLog, case_type: str) -> ConvergenceStats:
    if case_type not in log.object_types:
        raise UnknownCaseType(case_type)
    touched = 0
    duplicated = 0
    multiplicity_sum = 0
    for event in log.events.values():
        k = sum(
            1 for object_id in event.omap if log.objects[object_id].type == case_type
        )
        if k >= 1:
            touched += 1
            multiplicity_sum += k
        if k >= 2:
            duplicated += 1
    factor = multiplicity_sum / touched if touched else 1.0
    return ConvergenceStats(duplicated_events=duplicated, duplication_factor=factor)


def divergence_stats(flat: FlatLog) -> DivergenceStats:
    diverging_pairs = 0
    affected_cases = 0
    for entries in flat.cases.values():
        counts = Counter(entry.activity for entry in entries)
        repeated = sum(1 for n in counts.values() if n >= 2)
        if repeated:
            diverging_pairs += repeated
            affected_cases += 1
    return DivergenceStats(
        diverging_pairs=diverging_pairs, affected_cases=affected_cases
    )


def flat_to_csv_bytes(flat: FlatLog) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(FLAT_CSV_HEADER)
    for case_id in sorted(flat.cases):
        for entry in flat.cases[case_id]:
            writer.writerow(
                (
                    case_id,
                    entry.activity,
                    format_timestamp(entry.timestamp),
                    entry.event_id,
                )
            )
    return buffer.getvalue().encode("utf-8")
