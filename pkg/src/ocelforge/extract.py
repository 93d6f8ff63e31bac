"""Per-class event extraction from master-table rows.

Record and transaction rows become one event each with objects derived
from their code and text columns. Flow rows reference exactly the current
and previous document objects. Change headers/items become events whose
only object is the changed document, typed by its object class.

Rows without a usable timestamp are skipped and counted, never given a
fabricated instant.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from datetime import date, datetime, timezone

from .catalog import (
    NUMERIC,
    TEMPORAL_DATE,
    TEMPORAL_TIME,
    Catalog,
    Row,
    TableSchema,
    scan_table,
)
from .classify import DEFAULT_RULES, ClassificationRules, flow_fields
from .errors import NoTimestamp, PlanError
from .plan import ExtractionPlan, filters_for_table


@dataclass(frozen=True)
class ObjectTypeName:
    field: str
    domain: str

    @property
    def rendered(self) -> str:
        return f"{self.field}-{self.domain}"


@dataclass(frozen=True)
class RawObject:
    """``ovmap`` is kept as sorted pairs so objects stay hashable."""

    object_id: str
    type: ObjectTypeName
    ovmap: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class RawEvent:
    event_id: str
    activity: str
    timestamp: datetime
    omap: frozenset[str]
    vmap: Mapping[str, str]
    source_table: str
    source_row_key: str


@dataclass
class Diagnostics:
    """Mutable per-run counters surfaced in the run report."""

    rows_scanned: int = 0
    events_emitted: int = 0
    skipped_no_timestamp: int = 0
    orphan_items: int = 0
    links_harvested: int = 0
    events_enriched: int = 0

    def to_doc(self) -> dict:
        return {
            "rows_scanned": self.rows_scanned,
            "events_emitted": self.events_emitted,
            "skipped_no_timestamp": self.skipped_no_timestamp,
            "orphan_items": self.orphan_items,
            "links_harvested": self.links_harvested,
            "events_enriched": self.events_enriched,
        }


def make_object(field: str, domain: str, value: str) -> RawObject:
    type_name = ObjectTypeName(field=field, domain=domain)
    return RawObject(object_id=f"{type_name.rendered}:{value}", type=type_name)


def split_object_id(object_id: str) -> tuple[str, str]:
    """(type rendered, value); the value may itself contain colons."""
    rendered, _, value = object_id.partition(":")
    return rendered, value


def object_from_id(object_id: str) -> RawObject:
    """Reconstruct a bare object from its id (no attributes)."""
    rendered, _ = split_object_id(object_id)
    field, _, domain = rendered.partition("-")
    return RawObject(object_id=object_id, type=ObjectTypeName(field=field, domain=domain))


def parse_sap_date(value: str) -> date | None:
    """YYYYMMDD; the all-zero string is the absent-date sentinel."""
    if len(value) != 8 or not value.isdigit() or value == "00000000":
        return None
    try:
        return date(int(value[0:4]), int(value[4:6]), int(value[6:8]))
    except ValueError:
        return None


def parse_sap_time(value: str) -> tuple[int, int, int] | None:
    if len(value) != 6 or not value.isdigit():
        return None
    hour, minute, second = int(value[0:2]), int(value[2:4]), int(value[4:6])
    if hour > 23 or minute > 59 or second > 59:
        return None
    return hour, minute, second


def _instant(day: date, clock: tuple[int, int, int] = (0, 0, 0)) -> datetime:
    hour, minute, second = clock
    return datetime(
        day.year, day.month, day.day, hour, minute, second, tzinfo=timezone.utc
    )


def row_key(schema: TableSchema, row: Row) -> str:
    fields = schema.primary_key or schema.field_names()
    return "|".join(row[f] for f in fields)


def resolve_timestamp(
    catalog: Catalog,
    table: str,
    row: Row,
    priority: Iterable[tuple[str, ...]],
) -> datetime:
    """First matching priority entry wins; else first parseable date column.

    An entry matches only when every one of its fields exists in the table,
    is non-empty in the row, and parses. A (date, time) pair combines into
    one instant; a date alone is midnight UTC.
    """
    schema = catalog.table(table)
    fields = set(schema.field_names())
    for entry in priority:
        if not entry or not all(f in fields for f in entry):
            continue
        if any(not row.get(f) for f in entry):
            continue
        day = parse_sap_date(row[entry[0]])
        if day is None:
            continue
        if len(entry) > 1:
            clock = parse_sap_time(row[entry[1]])
            if clock is None:
                continue
            return _instant(day, clock)
        return _instant(day)
    for col in schema.columns:
        if catalog.column_kind(col) != TEMPORAL_DATE:
            continue
        day = parse_sap_date(row.get(col.field, ""))
        if day is not None:
            return _instant(day)
    raise NoTimestamp(table, row_key(schema, row))


def derive_objects(
    catalog: Catalog,
    table: str,
    row: Row,
    blacklist: Iterable[str] = frozenset({"MANDT"}),
) -> set[RawObject]:
    """Objects from every non-temporal, non-numeric, non-empty column."""
    schema = catalog.table(table)
    blocked = frozenset(blacklist)
    objects = set()
    for col in schema.columns:
        if col.field in blocked:
            continue
        if catalog.column_kind(col) in (TEMPORAL_DATE, TEMPORAL_TIME, NUMERIC):
            continue
        value = row[col.field]
        if value:
            objects.add(make_object(col.field, col.domain, value))
    return objects


def _event_vmap(catalog: Catalog, schema: TableSchema, row: Row) -> dict[str, str]:
    """Temporal and numeric columns (non-empty) plus the raw key values."""
    vmap = {f: row[f] for f in schema.primary_key}
    for col in schema.columns:
        if col.field in vmap:
            continue
        if catalog.column_kind(col) in (TEMPORAL_DATE, TEMPORAL_TIME, NUMERIC):
            value = row[col.field]
            if value:
                vmap[col.field] = value
    return vmap


class _EventIds:
    """Allocates run-unique event ids; repeats of a key get a #n suffix."""

    def __init__(self) -> None:
        self._seen: dict[str, int] = {}

    def allocate(self, table: str, key: str) -> str:
        base = f"{table}:{key}"
        count = self._seen.get(base, 0) + 1
        self._seen[base] = count
        if count == 1:
            return base
        return f"{base}#{count}"


Emitted = tuple[RawEvent, frozenset[RawObject]]


def extract_record_events(
    catalog: Catalog,
    table: str,
    plan: ExtractionPlan,
    diag: Diagnostics | None = None,
) -> Iterator[Emitted]:
    """One "Create document (<table>)" event per filtered row."""
    diag = diag if diag is not None else Diagnostics()
    schema = catalog.table(table)
    filters = filters_for_table(catalog, plan.filters, table)
    ids = _EventIds()
    activity = f"Create document ({table})"
    for row in scan_table(catalog, table, filters):
        diag.rows_scanned += 1
        key = row_key(schema, row)
        try:
            instant = resolve_timestamp(catalog, table, row, plan.timestamp_priority)
        except NoTimestamp:
            diag.skipped_no_timestamp += 1
            continue
        objects = derive_objects(catalog, table, row, plan.object_blacklist)
        event = RawEvent(
            event_id=ids.allocate(table, key),
            activity=activity,
            timestamp=instant,
            omap=frozenset(o.object_id for o in objects),
            vmap=_event_vmap(catalog, schema, row),
            source_table=table,
            source_row_key=key,
        )
        diag.events_emitted += 1
        yield event, frozenset(objects)


def _tcode_field(
    schema: TableSchema, rules: ClassificationRules
) -> str | None:
    for col in schema.columns:
        if col.domain in rules.tcode_domains:
            return col.field
    return None


def extract_transaction_events(
    catalog: Catalog,
    table: str,
    plan: ExtractionPlan,
    tcode_lookup: Mapping[str, str],
    rules: ClassificationRules = DEFAULT_RULES,
    diag: Diagnostics | None = None,
) -> Iterator[Emitted]:
    """One event per filtered row, named by its transaction code."""
    diag = diag if diag is not None else Diagnostics()
    schema = catalog.table(table)
    tcode_field = _tcode_field(schema, rules)
    if tcode_field is None:
        raise PlanError(f"{table} has no transaction-code column")
    filters = filters_for_table(catalog, plan.filters, table)
    ids = _EventIds()
    for row in scan_table(catalog, table, filters):
        diag.rows_scanned += 1
        key = row_key(schema, row)
        try:
            instant = resolve_timestamp(catalog, table, row, plan.timestamp_priority)
        except NoTimestamp:
            diag.skipped_no_timestamp += 1
            continue
        code = row[tcode_field]
        objects = derive_objects(catalog, table, row, plan.object_blacklist)
        event = RawEvent(
            event_id=ids.allocate(table, key),
            activity=tcode_lookup.get(code, code),
            timestamp=instant,
            omap=frozenset(o.object_id for o in objects),
            vmap=_event_vmap(catalog, schema, row),
            source_table=table,
            source_row_key=key,
        )
        diag.events_emitted += 1
        yield event, frozenset(objects)


def extract_flow_events(
    catalog: Catalog,
    table: str,
    plan: ExtractionPlan,
    doctype_lookup: Mapping[str, str],
    rules: ClassificationRules = DEFAULT_RULES,
    diag: Diagnostics | None = None,
) -> Iterator[Emitted]:
    """Document-flow rows: activity from the current type, omap holds the
    current and previous document objects only."""
    diag = diag if diag is not None else Diagnostics()
    schema = catalog.table(table)
    flow = flow_fields(catalog, schema, rules)
    if flow is None:
        raise PlanError(f"{table} does not have flow shape")
    filters = filters_for_table(catalog, plan.filters, table)
    ids = _EventIds()
    for row in scan_table(catalog, table, filters):
        diag.rows_scanned += 1
        key = row_key(schema, row)
        try:
            instant = resolve_timestamp(catalog, table, row, plan.timestamp_priority)
        except NoTimestamp:
            diag.skipped_no_timestamp += 1
            continue
        objects = set()
        for doc_field in (flow.current_doc, flow.previous_doc):
            value = row[doc_field]
            if value:
                objects.add(make_object(doc_field, flow.doc_domain, value))
        type_value = row[flow.current_type]
        event = RawEvent(
            event_id=ids.allocate(table, key),
            activity=doctype_lookup.get(type_value, type_value),
            timestamp=instant,
            omap=frozenset(o.object_id for o in objects),
            vmap=_event_vmap(catalog, schema, row),
            source_table=table,
            source_row_key=key,
        )
        diag.events_emitted += 1
        yield event, frozenset(objects)


def _changed_object(row: Row, rules: ClassificationRules) -> RawObject | None:
    """The document a change row is about, typed by its object class."""
    _, class_field, id_field = rules.change_header_fields
    object_class = row.get(class_field, "")
    object_id = row.get(id_field, "")
    if not object_class or not object_id:
        return None
    return make_object(id_field, object_class, object_id)


def _compare(kind: str, old: str, new: str) -> int | None:
    """Sign of new - old under the column's domain; None if not comparable."""
    if kind == NUMERIC:
        try:
            delta = float(new) - float(old)
        except ValueError:
            return None
        return (delta > 0) - (delta < 0)
    if kind == TEMPORAL_DATE:
        old_day, new_day = parse_sap_date(old), parse_sap_date(new)
        if old_day is None or new_day is None:
            return None
        return (new_day > old_day) - (new_day < old_day)
    return (new > old) - (new < old)


def _semantic_activity(
    catalog: Catalog,
    plan: ExtractionPlan,
    changed_table: str,
    changed_field: str,
    old: str,
    new: str,
) -> str | None:
    for rule in plan.semantic_rules:
        if rule.table != changed_table or rule.field != changed_field:
            continue
        if rule.predicate == "changed":
            hit = old != new
        elif rule.predicate == "set":
            hit = not old and bool(new)
        elif rule.predicate == "cleared":
            hit = bool(old) and not new
        else:
            try:
                column = catalog.table(rule.table).column(rule.field)
            except Exception:
                continue
            sign = _compare(catalog.column_kind(column), old, new)
            if sign is None:
                continue
            hit = sign > 0 if rule.predicate == "increased" else sign < 0
        if hit:
            return rule.activity_name
    return None


def pair_change_tables(
    catalog: Catalog,
    change_tables: Iterable[str],
    rules: ClassificationRules = DEFAULT_RULES,
) -> list[tuple[str, str | None]]:
    """(header, item-table-or-None) pairs among change-classified tables.

    Item tables carry the table/field/old/new quadruple; a header claims
    the item table whose key extends its own.
    """
    quadruple = set(rules.change_item_fields[1:])
    item_shaped = []
    headers = []
    for table in sorted(change_tables):
        fields = set(catalog.table(table).field_names())
        if quadruple <= fields:
            item_shaped.append(table)
        else:
            headers.append(table)
    pairs: list[tuple[str, str | None]] = []
    claimed = set()
    for header in headers:
        header_key = set(catalog.table(header).primary_key)
        match = next(
            (
                t
                for t in item_shaped
                if t not in claimed and header_key < set(catalog.table(t).primary_key)
            ),
            None,
        )
        if match is not None:
            claimed.add(match)
        pairs.append((header, match))
    for orphan in item_shaped:
        if orphan not in claimed:
            pairs.append((orphan, None))
    return pairs


def extract_change_events(
    catalog: Catalog,
    header: str,
    items: str | None,
    plan: ExtractionPlan,
    tcode_lookup: Mapping[str, str],
    rules: ClassificationRules = DEFAULT_RULES,
    diag: Diagnostics | None = None,
) -> Iterator[Emitted]:
    """Change documents under the plan's strategy.

    tcode: one event per header row. field/semantic: one event per item
    row, timestamped from its header (item tables carry no temporal
    columns); items without a header are skipped and counted. Without an
    item table every strategy degrades to tcode granularity.
    """
    diag = diag if diag is not None else Diagnostics()
    header_schema = catalog.table(header)
    header_filters = filters_for_table(catalog, plan.filters, header)
    ids = _EventIds()
    strategy = plan.change_strategy
    if items is None or strategy == "tcode":
        tcode_field = _tcode_field(header_schema, rules)
        for row in scan_table(catalog, header, header_filters):
            diag.rows_scanned += 1
            key = row_key(header_schema, row)
            try:
                instant = resolve_timestamp(
                    catalog, header, row, plan.timestamp_priority
                )
            except NoTimestamp:
                diag.skipped_no_timestamp += 1
                continue
            code = row[tcode_field] if tcode_field else ""
            changed = _changed_object(row, rules)
            objects = {changed} if changed else set()
            event = RawEvent(
                event_id=ids.allocate(header, key),
                activity=tcode_lookup.get(code, code),
                timestamp=instant,
                omap=frozenset(o.object_id for o in objects),
                vmap=_event_vmap(catalog, header_schema, row),
                source_table=header,
                source_row_key=key,
            )
            diag.events_emitted += 1
            yield event, frozenset(objects)
        return

    headers_by_key: dict[tuple[str, ...], Row] = {}
    for row in scan_table(catalog, header, header_filters):
        diag.rows_scanned += 1
        headers_by_key[tuple(row[f] for f in header_schema.primary_key)] = row

    item_schema = catalog.table(items)
    item_filters = filters_for_table(catalog, plan.filters, items)
    table_field, name_field, old_field, new_field = rules.change_item_fields[1:]
    for row in scan_table(catalog, items, item_filters):
        diag.rows_scanned += 1
        head = headers_by_key.get(tuple(row[f] for f in header_schema.primary_key))
        if head is None:
            diag.orphan_items += 1
            continue
        key = row_key(item_schema, row)
        try:
            instant = resolve_timestamp(
                catalog, header, head, plan.timestamp_priority
            )
        except NoTimestamp:
            diag.skipped_no_timestamp += 1
            continue
        old, new = row[old_field], row[new_field]
        activity = None
        if strategy == "semantic":
            activity = _semantic_activity(
                catalog, plan, row[table_field], row[name_field], old, new
            )
        if activity is None:
            activity = f"Changed {row[name_field]}"
        changed = _changed_object(row, rules)
        objects = {changed} if changed else set()
        vmap = {f: row[f] for f in item_schema.primary_key}
        vmap[old_field] = old
        vmap[new_field] = new
        event = RawEvent(
            event_id=ids.allocate(items, key),
            activity=activity,
            timestamp=instant,
            omap=frozenset(o.object_id for o in objects),
            vmap=vmap,
            source_table=items,
            source_row_key=key,
        )
        diag.events_emitted += 1
        yield event, frozenset(objects)
