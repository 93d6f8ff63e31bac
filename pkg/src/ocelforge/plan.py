"""Extraction plans: the validated bundle of user decisions for one run.

A plan fixes the included tables (as a graph of relations), their
categories, the key filters, the change-event strategy, and the timestamp
source order. Plans serialize to a single JSON document consumed by the
CLI (``--plan``) and produced by the service.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

from .catalog import Catalog, KeyFilter
from .classify import CATEGORIES, DetailLink, TableCategory
from .errors import (
    EmptyFilterValues,
    FilterFieldNotKey,
    MissingSemanticRules,
    PlanError,
    UncoveredTable,
)
from .relations import GraphOfRelations, gor_from_doc, gor_to_doc

CHANGE_STRATEGIES = ("tcode", "field", "semantic")
PREDICATES = ("increased", "decreased", "changed", "set", "cleared")

# Standard creation/posting fields, tried in order. Pairs combine a date
# column with a time column; singletons are date-only.
DEFAULT_TIMESTAMP_PRIORITY: tuple[tuple[str, ...], ...] = (
    ("UDATE", "UTIME"),
    ("CPUDT", "CPUTM"),
    ("BUDAT",),
    ("BLDAT",),
    ("AEDAT",),
    ("ERDAT",),
)

DEFAULT_OBJECT_BLACKLIST = frozenset({"MANDT"})


@dataclass(frozen=True)
class SemanticChangeRule:
    """Names a change-item pattern: predicate over (old, new) on one field."""

    table: str
    field: str
    predicate: str
    activity_name: str

    def __post_init__(self) -> None:
        if self.predicate not in PREDICATES:
            raise PlanError(
                f"semantic rule on {self.table}.{self.field}: "
                f"unknown predicate {self.predicate!r}"
            )
        if not self.activity_name:
            raise PlanError(
                f"semantic rule on {self.table}.{self.field}: empty activity name"
            )


@dataclass(frozen=True)
class ExtractionPlan:
    gor: GraphOfRelations
    categories: Mapping[str, TableCategory]
    detail_links: frozenset[DetailLink]
    filters: tuple[KeyFilter, ...] = ()
    change_strategy: str = "tcode"
    semantic_rules: tuple[SemanticChangeRule, ...] = ()
    timestamp_priority: tuple[tuple[str, ...], ...] = DEFAULT_TIMESTAMP_PRIORITY
    object_blacklist: frozenset[str] = DEFAULT_OBJECT_BLACKLIST
    transitive_links: bool = False


def key_field_union(
    catalog: Catalog, gor: GraphOfRelations
) -> list[tuple[str, list[str]]]:
    """Union of primary-key fields over the graph's tables.

    Returns (field, tables keyed on it) sorted by field name; the table
    lists are sorted too.
    """
    holders: dict[str, set[str]] = {}
    for table in gor.nodes:
        for field in catalog.table(table).primary_key:
            holders.setdefault(field, set()).add(table)
    return [(field, sorted(holders[field])) for field in sorted(holders)]


def validate_plan(plan: ExtractionPlan, catalog: Catalog) -> ExtractionPlan:
    """Check every plan invariant; returns the plan unchanged when valid.

    Filter values are checked for emptiness only; a filter may legitimately
    match no rows.
    """
    for table in sorted(plan.gor.nodes):
        if table not in plan.categories:
            raise UncoveredTable(table)
    if plan.change_strategy not in CHANGE_STRATEGIES:
        raise PlanError(f"unknown change strategy {plan.change_strategy!r}")
    if plan.change_strategy == "semantic" and not plan.semantic_rules:
        raise MissingSemanticRules()
    key_fields = {field for field, _ in key_field_union(catalog, plan.gor)}
    for filt in plan.filters:
        if not filt.allowed_values:
            raise EmptyFilterValues(filt.field)
        if filt.field not in key_fields:
            raise FilterFieldNotKey(filt.field)
    return plan


def filters_for_table(
    catalog: Catalog, filters: Iterable[KeyFilter], table: str
) -> tuple[KeyFilter, ...]:
    """The plan filters that apply to ``table``: field in its primary key.

    Tables carrying a filtered field outside their key, or not at all, are
    scanned unfiltered.
    """
    key = set(catalog.table(table).primary_key)
    return tuple(f for f in filters if f.field in key)


def default_plan(
    catalog: Catalog,
    gor: GraphOfRelations,
    categories: Mapping[str, TableCategory],
    detail_links: Iterable[DetailLink] = (),
    **overrides,
) -> ExtractionPlan:
    plan = ExtractionPlan(
        gor=gor,
        categories=dict(categories),
        detail_links=frozenset(detail_links),
        **overrides,
    )
    return validate_plan(plan, catalog)


def plan_to_doc(plan: ExtractionPlan) -> dict:
    return {
        "gor": gor_to_doc(plan.gor),
        "categories": {
            table: {"value": cat.value, "evidence": list(cat.evidence)}
            for table, cat in sorted(plan.categories.items())
        },
        "detail_links": [
            {
                "detail_table": link.detail_table,
                "master_table": link.master_table,
                "shared_key_fields": list(link.shared_key_fields),
            }
            for link in sorted(
                plan.detail_links, key=lambda l: (l.detail_table, l.master_table)
            )
        ],
        "filters": [
            {"field": f.field, "values": sorted(f.allowed_values)}
            for f in plan.filters
        ],
        "change_strategy": plan.change_strategy,
        "semantic_rules": [
            {
                "table": r.table,
                "field": r.field,
                "predicate": r.predicate,
                "activity_name": r.activity_name,
            }
            for r in plan.semantic_rules
        ],
        "timestamp_priority": [list(entry) for entry in plan.timestamp_priority],
        "object_blacklist": sorted(plan.object_blacklist),
        "transitive_links": plan.transitive_links,
    }


def plan_from_doc(doc: Mapping) -> ExtractionPlan:
    try:
        gor = gor_from_doc(doc["gor"])
        categories = {
            table: TableCategory(
                value=cat["value"], evidence=tuple(cat.get("evidence", ()))
            )
            for table, cat in doc.get("categories", {}).items()
        }
    except (KeyError, TypeError) as exc:
        raise PlanError(f"malformed plan document: {exc}") from exc
    for table, cat in categories.items():
        if cat.value not in CATEGORIES:
            raise PlanError(f"category for {table}: unknown value {cat.value!r}")
    detail_links = frozenset(
        DetailLink(
            detail_table=link["detail_table"],
            master_table=link["master_table"],
            shared_key_fields=tuple(link["shared_key_fields"]),
        )
        for link in doc.get("detail_links", ())
    )
    filters = tuple(
        KeyFilter(field=f["field"], allowed_values=f.get("values", ()))
        for f in doc.get("filters", ())
    )
    rules = tuple(
        SemanticChangeRule(
            table=r["table"],
            field=r["field"],
            predicate=r["predicate"],
            activity_name=r["activity_name"],
        )
        for r in doc.get("semantic_rules", ())
    )
    priority = tuple(
        tuple(entry) for entry in doc.get("timestamp_priority", DEFAULT_TIMESTAMP_PRIORITY)
    )
    return ExtractionPlan(
        gor=gor,
        categories=categories,
        detail_links=detail_links,
        filters=filters,
        change_strategy=doc.get("change_strategy", "tcode"),
        semantic_rules=rules,
        timestamp_priority=priority,
        object_blacklist=frozenset(doc.get("object_blacklist", DEFAULT_OBJECT_BLACKLIST)),
        transitive_links=bool(doc.get("transitive_links", False)),
    )


def save_plan(plan: ExtractionPlan, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(plan_to_doc(plan), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def load_plan(path: str | Path, catalog: Catalog | None = None) -> ExtractionPlan:
    plan = plan_from_doc(json.loads(Path(path).read_text(encoding="utf-8")))
    if catalog is not None:
        validate_plan(plan, catalog)
    return plan
