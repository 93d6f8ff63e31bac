"""Behavioral classification of snapshot tables.

Five classes, checked in precedence order flow > change > transaction >
detail > record:

* flow -- documents-to-documents links: two columns share one code domain
  (current/previous document) and two more share a document-type domain.
* change -- change documents: a change-number key column plus either an
  object-class column (header shape) or the table/field/old/new quadruple
  (item shape).
* transaction -- carries a transaction-code column and at least one
  temporal column.
* detail -- its primary key properly contains the primary key of another
  included table (same field names, same domains).
* record -- everything else; one row, one document.

Classification reads schema metadata only, never row values.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field as dataclass_field, replace
from pathlib import Path

from .catalog import CODE, TEMPORAL_DATE, TEMPORAL_TIME, Catalog, TableSchema
from .errors import PlanError
from .relations import GraphOfRelations, extend_gor

FLOW = "flow"
CHANGE = "change"
TRANSACTION = "transaction"
DETAIL = "detail"
RECORD = "record"
CATEGORIES = (FLOW, CHANGE, TRANSACTION, DETAIL, RECORD)


@dataclass(frozen=True)
class TableCategory:
    value: str
    evidence: tuple[str, ...] = ()


@dataclass(frozen=True)
class DetailLink:
    """``detail_table``'s key properly contains ``master_table``'s key."""

    detail_table: str
    master_table: str
    shared_key_fields: tuple[str, ...]


@dataclass(frozen=True)
class ClassificationRules:
    """Field and domain names that drive the signature checks.

    ``change_header_fields`` is ``(change_number, object_class, object_id)``;
    the change number must be a key column. ``change_item_fields`` is
    ``(change_number, table_name, field_name, old_value, new_value)``.
    ``overrides`` maps table names to categories and wins over every rule.
    """

    tcode_domains: frozenset[str] = frozenset({"TCODE"})
    change_header_fields: tuple[str, str, str] = ("CHANGENR", "OBJECTCLAS", "OBJECTID")
    change_item_fields: tuple[str, str, str, str, str] = (
        "CHANGENR",
        "TABNAME",
        "FNAME",
        "VALUE_OLD",
        "VALUE_NEW",
    )
    doc_type_domain_suffixes: tuple[str, ...] = ("VBTYP",)
    previous_field_suffix: str = "V"
    overrides: dict[str, str] = dataclass_field(default_factory=dict)

    def with_overrides(self, overrides: Mapping[str, str]) -> "ClassificationRules":
        merged = dict(self.overrides)
        merged.update(overrides)
        return replace(self, overrides=merged)

    def to_doc(self) -> dict:
        return {
            "tcode_domains": sorted(self.tcode_domains),
            "change_header_fields": list(self.change_header_fields),
            "change_item_fields": list(self.change_item_fields),
            "doc_type_domain_suffixes": list(self.doc_type_domain_suffixes),
            "previous_field_suffix": self.previous_field_suffix,
            "overrides": dict(sorted(self.overrides.items())),
        }

    @classmethod
    def from_doc(cls, doc: Mapping) -> "ClassificationRules":
        base = cls()
        overrides = dict(doc.get("overrides", {}))
        for table, value in overrides.items():
            if value not in CATEGORIES:
                raise PlanError(f"override for {table}: unknown category {value!r}")
        return cls(
            tcode_domains=frozenset(doc.get("tcode_domains", base.tcode_domains)),
            change_header_fields=tuple(
                doc.get("change_header_fields", base.change_header_fields)
            ),
            change_item_fields=tuple(doc.get("change_item_fields", base.change_item_fields)),
            doc_type_domain_suffixes=tuple(
                doc.get("doc_type_domain_suffixes", base.doc_type_domain_suffixes)
            ),
            previous_field_suffix=doc.get("previous_field_suffix", base.previous_field_suffix),
            overrides=overrides,
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ClassificationRules":
        return cls.from_doc(json.loads(Path(path).read_text(encoding="utf-8")))


DEFAULT_RULES = ClassificationRules()


@dataclass(frozen=True)
class FlowFields:
    current_doc: str
    previous_doc: str
    current_type: str
    previous_type: str
    doc_domain: str
    type_domain: str


def _split_pair(fields: tuple[str, str], rules: ClassificationRules) -> tuple[str, str]:
    """(current, previous) out of two same-domain fields."""
    first, second = fields
    suffix = rules.previous_field_suffix
    first_prev = first.endswith(suffix)
    second_prev = second.endswith(suffix)
    if first_prev and not second_prev:
        return second, first
    return first, second


def flow_fields(
    catalog: Catalog, schema: TableSchema, rules: ClassificationRules = DEFAULT_RULES
) -> FlowFields | None:
    by_domain: dict[str, list[str]] = {}
    for col in schema.columns:
        if catalog.column_kind(col) == CODE:
            by_domain.setdefault(col.domain, []).append(col.field)
    type_domains = [
        d
        for d in sorted(by_domain)
        if len(by_domain[d]) >= 2
        and any(d.endswith(suffix) for suffix in rules.doc_type_domain_suffixes)
    ]
    doc_domains = [
        d for d in sorted(by_domain) if len(by_domain[d]) >= 2 and d not in type_domains
    ]
    if not type_domains or not doc_domains:
        return None
    doc_domain, type_domain = doc_domains[0], type_domains[0]
    current_doc, previous_doc = _split_pair(tuple(by_domain[doc_domain][:2]), rules)
    current_type, previous_type = _split_pair(tuple(by_domain[type_domain][:2]), rules)
    return FlowFields(
        current_doc=current_doc,
        previous_doc=previous_doc,
        current_type=current_type,
        previous_type=previous_type,
        doc_domain=doc_domain,
        type_domain=type_domain,
    )


def _change_evidence(schema: TableSchema, rules: ClassificationRules) -> tuple[str, ...]:
    change_number = rules.change_header_fields[0]
    key_fields = set(schema.primary_key)
    if change_number not in key_fields:
        return ()
    fields = set(schema.field_names())
    header_extras = rules.change_header_fields[1:2]  # object-class column
    if all(f in fields for f in header_extras):
        return (f"change-number key {change_number}", f"object-class column {header_extras[0]}")
    quadruple = rules.change_item_fields[1:]
    if all(f in fields for f in quadruple):
        return (
            f"change-number key {change_number}",
            "item quadruple " + "/".join(quadruple),
        )
    return ()


def _transaction_evidence(
    catalog: Catalog, schema: TableSchema, rules: ClassificationRules
) -> tuple[str, ...]:
    tcode_col = next(
        (c for c in schema.columns if c.domain in rules.tcode_domains), None
    )
    if tcode_col is None:
        return ()
    temporal = next(
        (
            c
            for c in schema.columns
            if catalog.column_kind(c) in (TEMPORAL_DATE, TEMPORAL_TIME)
        ),
        None,
    )
    if temporal is None:
        return ()
    return (
        f"transaction-code column {tcode_col.field}",
        f"temporal column {temporal.field}",
    )


def detail_links_for(
    catalog: Catalog, table: str, candidate_masters: Iterable[str]
) -> tuple[DetailLink, ...]:
    """Every containment link from ``table`` into a candidate master."""
    detail = catalog.table(table)
    detail_keys = set(detail.primary_key)
    links = []
    for master in sorted(set(candidate_masters) - {table}):
        schema = catalog.table(master)
        master_keys = set(schema.primary_key)
        if not master_keys or not master_keys < detail_keys:
            continue
        if any(
            detail.column(f).domain != schema.column(f).domain
            for f in schema.primary_key
        ):
            continue
        links.append(
            DetailLink(
                detail_table=table,
                master_table=master,
                shared_key_fields=schema.primary_key,
            )
        )
    return tuple(links)


def key_containment_parents(catalog: Catalog, table: str) -> tuple[str, ...]:
    """Catalog-wide key-containment parents of ``table``."""
    return tuple(
        link.master_table for link in detail_links_for(catalog, table, catalog.tables)
    )


def classify_table(
    catalog: Catalog,
    table: str,
    candidate_masters: Iterable[str] = (),
    rules: ClassificationRules = DEFAULT_RULES,
) -> TableCategory:
    """Classify one table; ``candidate_masters`` feeds the detail check."""
    schema = catalog.table(table)
    override = rules.overrides.get(table)
    if override is not None:
        if override not in CATEGORIES:
            raise PlanError(f"override for {table}: unknown category {override!r}")
        return TableCategory(value=override, evidence=("user override",))

    flow = flow_fields(catalog, schema, rules)
    if flow is not None:
        return TableCategory(
            value=FLOW,
            evidence=(
                f"document pair {flow.previous_doc}/{flow.current_doc} on {flow.doc_domain}",
                f"type pair {flow.previous_type}/{flow.current_type} on {flow.type_domain}",
            ),
        )
    change = _change_evidence(schema, rules)
    if change:
        return TableCategory(value=CHANGE, evidence=change)
    transaction = _transaction_evidence(catalog, schema, rules)
    if transaction:
        return TableCategory(value=TRANSACTION, evidence=transaction)
    links = detail_links_for(catalog, table, candidate_masters)
    if links:
        return TableCategory(
            value=DETAIL,
            evidence=tuple(
                f"key contains {link.master_table} key ({','.join(link.shared_key_fields)})"
                for link in links
            ),
        )
    return TableCategory(value=RECORD, evidence=())


def classify_all(
    catalog: Catalog,
    gor: GraphOfRelations,
    rules: ClassificationRules = DEFAULT_RULES,
) -> tuple[dict[str, TableCategory], frozenset[DetailLink]]:
    """Classify every graph node; candidate masters are the nodes themselves.

    Returns the category map plus every DetailLink of the tables that ended
    up classified detail (a detail table may link to several masters).
    """
    candidates = sorted(gor.nodes)
    categories = {
        table: classify_table(catalog, table, candidates, rules) for table in candidates
    }
    links: set[DetailLink] = set()
    for table, category in categories.items():
        if category.value == DETAIL:
            links.update(detail_links_for(catalog, table, candidates))
    return categories, frozenset(links)


def include_masters_of_details(
    gor: GraphOfRelations,
    catalog: Catalog,
    categories: Mapping[str, TableCategory],
    blacklist: Iterable[str] | None = None,
) -> GraphOfRelations:
    """Add absent key-containment parents of detail-shaped nodes.

    Nodes classified flow/change/transaction are never details and are
    skipped; for the rest the parent search runs over the whole catalog, so
    a master outside the graph (say the header of an included item table) is
    pulled in via extend_gor. Idempotent.
    """
    missing: set[str] = set()
    for table in sorted(gor.nodes):
        category = categories.get(table)
        if category is not None and category.value in (FLOW, CHANGE, TRANSACTION):
            continue
        for parent in key_containment_parents(catalog, table):
            if parent not in gor.nodes:
                missing.add(parent)
    if not missing:
        return gor
    return extend_gor(gor, catalog, missing, blacklist)
