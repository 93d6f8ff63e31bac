import json
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ocelforge.errors import DanglingObjectRef, DuplicateEventId, UnknownCaseType
from ocelforge.extract import RawEvent, RawObject, make_object
from ocelforge.ocel import (
    FlatLog,
    assemble,
    convergence_stats,
    deserialize_json,
    divergence_stats,
    flat_to_csv_bytes,
    flatten,
    format_timestamp,
    parse_timestamp,
    serialize_json,
    validate_ocel_doc,
)

WHEN = datetime(2021, 3, 4, 12, 0, 0, tzinfo=timezone.utc)


def obj(type_name, value):
    field, _, domain = type_name.partition("-")
    return make_object(field, domain, value)


def ev(event_id, activity, omap, when=WHEN, vmap=None):
    return RawEvent(
        event_id=event_id,
        activity=activity,
        timestamp=when,
        omap=frozenset(omap),
        vmap=vmap or {},
        source_table="T",
        source_row_key=event_id,
    )


def small_log():
    objects = [obj("A-A", "1"), obj("A-A", "2"), obj("B-B", "9")]
    events = [
        ev("e2", "Later", {"A-A:1"}, when=datetime(2021, 3, 5, tzinfo=timezone.utc)),
        ev("e1", "First", {"A-A:1", "A-A:2", "B-B:9"}, vmap={"MENGE": "4"}),
    ]
    return assemble(events, objects)


def test_empty_log_serializes_to_the_fixed_skeleton():
    data = serialize_json(assemble([], []))
    assert data == (
        b'{"ocel:events":{},'
        b'"ocel:global-event":{"ocel:activity":"__INVALID__"},'
        b'"ocel:global-log":{"ocel:attribute-names":[],"ocel:object-types":[],'
        b'"ocel:ordering":"timestamp","ocel:version":"1.0"},'
        b'"ocel:global-object":{"ocel:type":"__INVALID__"},'
        b'"ocel:objects":{}}'
    )


def test_events_are_sorted_by_timestamp_then_id():
    log = small_log()
    assert list(log.events) == ["e1", "e2"]
    two = assemble(
        [ev("b", "B", set()), ev("a", "A", set())],
        [],
    )
    assert list(two.events) == ["a", "b"]


def test_event_entry_has_exactly_the_four_keys():
    doc = json.loads(serialize_json(small_log()))
    entry = doc["ocel:events"]["e1"]
    assert sorted(entry) == [
        "ocel:activity",
        "ocel:omap",
        "ocel:timestamp",
        "ocel:vmap",
    ]
    assert entry["ocel:activity"] == "First"
    assert entry["ocel:timestamp"] == "2021-03-04T12:00:00Z"
    assert entry["ocel:omap"] == ["A-A:1", "A-A:2", "B-B:9"]
    assert entry["ocel:vmap"] == {"MENGE": "4"}


def test_object_entry_shape_and_type_registry():
    doc = json.loads(serialize_json(small_log()))
    assert doc["ocel:objects"]["A-A:1"] == {"ocel:type": "A-A", "ocel:ovmap": {}}
    assert doc["ocel:global-log"]["ocel:object-types"] == ["A-A", "B-B"]
    assert doc["ocel:global-log"]["ocel:attribute-names"] == ["MENGE"]


def test_duplicate_event_id_rejected():
    with pytest.raises(DuplicateEventId):
        assemble([ev("e", "A", set()), ev("e", "B", set())], [])


def test_dangling_omap_reference_rejected():
    with pytest.raises(DanglingObjectRef):
        assemble([ev("e", "A", {"A-A:1"})], [])


def test_first_object_occurrence_wins():
    import dataclasses

    first = obj("A-A", "1")
    second = dataclasses.replace(obj("A-A", "1"), ovmap=(("NAME", "x"),))
    log = assemble([], [first, second])
    assert log.objects["A-A:1"].ovmap == {}


def test_serialization_is_byte_stable_through_a_round_trip():
    log = small_log()
    data = serialize_json(log)
    again = serialize_json(deserialize_json(data))
    assert again == data


def test_deserialize_reproduces_the_log_structurally():
    log = small_log()
    back = deserialize_json(serialize_json(log))
    assert back == log


def test_validate_accepts_own_output_and_spots_damage():
    doc = json.loads(serialize_json(small_log()))
    assert validate_ocel_doc(doc) == []

    broken = json.loads(serialize_json(small_log()))
    del broken["ocel:objects"]["B-B:9"]
    assert any("B-B:9" in problem for problem in validate_ocel_doc(broken))

    broken = json.loads(serialize_json(small_log()))
    broken["ocel:events"]["e1"]["ocel:timestamp"] = "yesterday"
    assert validate_ocel_doc(broken)

    broken = json.loads(serialize_json(small_log()))
    del broken["ocel:global-log"]
    assert validate_ocel_doc(broken)

    broken = json.loads(serialize_json(small_log()))
    broken["ocel:global-log"]["ocel:object-types"] = ["A-A"]
    assert validate_ocel_doc(broken)


def test_timestamp_format_round_trip():
    text = format_timestamp(WHEN)
    assert text == "2021-03-04T12:00:00Z"
    assert parse_timestamp(text) == WHEN


def test_flatten_copies_multi_object_events_into_every_case():
    flat = flatten(small_log(), "A-A")
    assert set(flat.cases) == {"A-A:1", "A-A:2"}
    assert [e.event_id for e in flat.cases["A-A:1"]] == ["e1", "e2"]
    assert [e.event_id for e in flat.cases["A-A:2"]] == ["e1"]
    assert flat.dropped_events == 0


def test_flatten_drops_and_counts_unrelated_events():
    log = assemble(
        [ev("e1", "A", {"A-A:1"}), ev("e2", "B", {"B-B:9"})],
        [obj("A-A", "1"), obj("B-B", "9")],
    )
    flat = flatten(log, "A-A")
    assert set(flat.cases) == {"A-A:1"}
    assert flat.dropped_events == 1


def test_flatten_unknown_case_type_raises():
    with pytest.raises(UnknownCaseType):
        flatten(small_log(), "Z-Z")
    with pytest.raises(UnknownCaseType):
        convergence_stats(small_log(), "Z-Z")


def test_convergence_example_one_duplicated_event_factor_two():
    log = assemble(
        [ev("e1", "A", {"A-A:1", "A-A:2"}), ev("e2", "B", {"B-B:9"})],
        [obj("A-A", "1"), obj("A-A", "2"), obj("B-B", "9")],
    )
    stats = convergence_stats(log, "A-A")
    assert stats.duplicated_events == 1
    assert stats.duplication_factor == 2.0


def test_convergence_without_touching_events_is_neutral():
    log = assemble([ev("e1", "A", {"B-B:9"})], [obj("A-A", "1"), obj("B-B", "9")])
    stats = convergence_stats(log, "A-A")
    assert stats.duplicated_events == 0
    assert stats.duplication_factor == 1.0


def test_divergence_counts_repeated_activities_per_case():
    log = assemble(
        [
            ev("e1", "Pay", {"A-A:1"}, when=datetime(2021, 1, 1, tzinfo=timezone.utc)),
            ev("e2", "Pay", {"A-A:1"}, when=datetime(2021, 1, 2, tzinfo=timezone.utc)),
            ev("e3", "Ship", {"A-A:2"}, when=datetime(2021, 1, 3, tzinfo=timezone.utc)),
        ],
        [obj("A-A", "1"), obj("A-A", "2")],
    )
    flat = flatten(log, "A-A")
    stats = divergence_stats(flat)
    assert stats.diverging_pairs == 1
    assert stats.affected_cases == 1

    calm = divergence_stats(FlatLog(case_type="A-A", cases={}, dropped_events=0))
    assert (calm.diverging_pairs, calm.affected_cases) == (0, 0)


def test_flat_csv_golden():
    log = assemble(
        [
            ev("e1", "Pay", {"A-A:1"}),
            ev("e2", "Ship", {"A-A:1", "A-A:2"}, when=datetime(2021, 3, 5, 6, 7, 8, tzinfo=timezone.utc)),
        ],
        [obj("A-A", "1"), obj("A-A", "2")],
    )
    data = flat_to_csv_bytes(flatten(log, "A-A"))
    assert data == (
        b"case:concept:name,concept:name,time:timestamp,event:id\n"
        b"A-A:1,Pay,2021-03-04T12:00:00Z,e1\n"
        b"A-A:1,Ship,2021-03-05T06:07:08Z,e2\n"
        b"A-A:2,Ship,2021-03-05T06:07:08Z,e2\n"
    )


# hypothesis machinery: small random logs

ids = st.text(alphabet="abcdefgh123", min_size=1, max_size=4)
type_names = st.sampled_from(["A-A", "B-B", "C-C"])
instants = st.datetimes(
    min_value=datetime(2020, 1, 1),
    max_value=datetime(2022, 1, 1),
).map(lambda d: d.replace(microsecond=0, tzinfo=timezone.utc))


@st.composite
def logs(draw):
    object_pool = draw(
        st.lists(
            st.tuples(type_names, ids).map(lambda t: obj(t[0], t[1])),
            min_size=1,
            max_size=8,
            unique_by=lambda o: o.object_id,
        )
    )
    pool_ids = [o.object_id for o in object_pool]
    n = draw(st.integers(min_value=0, max_value=8))
    events = []
    for i in range(n):
        omap = draw(st.sets(st.sampled_from(pool_ids), max_size=len(pool_ids)))
        events.append(
            ev(f"e{i}", draw(st.sampled_from(["A", "B", "C"])), omap, when=draw(instants))
        )
    return assemble(events, object_pool)


@given(logs())
@settings(max_examples=60, deadline=None)
def test_round_trip_property(log):
    data = serialize_json(log)
    back = deserialize_json(data)
    assert back == log
    assert serialize_json(back) == data
    assert validate_ocel_doc(json.loads(data)) == []


@given(logs(), type_names)
@settings(max_examples=60, deadline=None)
def test_flatten_conserves_event_copies(log, case_type):
    if case_type not in log.object_types:
        return
    flat = flatten(log, case_type)
    copies = sum(len(entries) for entries in flat.cases.values())
    multiplicities = sum(
        sum(1 for oid in e.omap if log.objects[oid].type == case_type)
        for e in log.events.values()
    )
    assert copies == multiplicities
    assert flat.dropped_events + sum(
        1
        for e in log.events.values()
        if any(log.objects[oid].type == case_type for oid in e.omap)
    ) == len(log.events)
    stats = convergence_stats(log, case_type)
    assert stats.duplication_factor >= 1.0
    assert stats.duplicated_events <= len(log.events)
