"""Connecting entries: detail rows become undirected object links.

Detail tables never become events. Each of their rows contributes one link
per unordered pair of code-domain objects, provided at least one side is a
key field of a non-detail table in the graph. Events are then enriched one
hop: every object linked to an original omap member joins the omap.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, replace

from .catalog import CODE, Catalog, scan_table
from .classify import DETAIL
from .errors import PlanError
from .extract import Diagnostics, RawEvent, make_object
from .plan import ExtractionPlan, filters_for_table


@dataclass(frozen=True)
class LinkRecord:
    """Undirected; stored with left_object < right_object."""

    detail_table: str
    left_object: str
    right_object: str
    source_row_key: str


def master_key_pairs(catalog: Catalog, plan: ExtractionPlan) -> frozenset[tuple[str, str]]:
    """(field, domain) pairs keying any non-detail table of the graph."""
    pairs = set()
    for table in plan.gor.nodes:
        category = plan.categories.get(table)
        if category is not None and category.value == DETAIL:
            continue
        schema = catalog.table(table)
        for field in schema.primary_key:
            column = schema.column(field)
            pairs.add((column.field, column.domain))
    return frozenset(pairs)


def harvest_links(
    catalog: Catalog,
    detail: str,
    plan: ExtractionPlan,
    diag: Diagnostics | None = None,
) -> Iterator[LinkRecord]:
    """All master-anchored object pairs found in the detail table's rows."""
    diag = diag if diag is not None else Diagnostics()
    category = plan.categories.get(detail)
    if category is None or category.value != DETAIL:
        raise PlanError(f"{detail} is not classified as a detail table")
    schema = catalog.table(detail)
    anchors = master_key_pairs(catalog, plan)
    blocked = frozenset(plan.object_blacklist)
    code_columns = [
        col
        for col in schema.columns
        if catalog.column_kind(col) == CODE and col.field not in blocked
    ]
    key_fields = schema.primary_key or schema.field_names()
    filters = filters_for_table(catalog, plan.filters, detail)
    for row in scan_table(catalog, detail, filters):
        diag.rows_scanned += 1
        source_key = "|".join(row[f] for f in key_fields)
        present = [
            (col, row[col.field]) for col in code_columns if row[col.field]
        ]
        for i, (col_a, value_a) in enumerate(present):
            anchored_a = (col_a.field, col_a.domain) in anchors
            id_a = make_object(col_a.field, col_a.domain, value_a).object_id
            for col_b, value_b in present[i + 1 :]:
                if not anchored_a and (col_b.field, col_b.domain) not in anchors:
                    continue
                id_b = make_object(col_b.field, col_b.domain, value_b).object_id
                if id_a == id_b:
                    continue
                left, right = sorted((id_a, id_b))
                diag.links_harvested += 1
                yield LinkRecord(
                    detail_table=detail,
                    left_object=left,
                    right_object=right,
                    source_row_key=source_key,
                )


def link_adjacency(links: Iterable[LinkRecord]) -> dict[str, frozenset[str]]:
    neighbours: dict[str, set[str]] = {}
    for link in links:
        neighbours.setdefault(link.left_object, set()).add(link.right_object)
        neighbours.setdefault(link.right_object, set()).add(link.left_object)
    return {obj: frozenset(others) for obj, others in neighbours.items()}


def _reachable(start: frozenset[str], adjacency: dict[str, frozenset[str]]) -> set[str]:
    seen = set(start)
    queue = deque(start)
    while queue:
        current = queue.popleft()
        for neighbour in adjacency.get(current, ()):
            if neighbour not in seen:
                seen.add(neighbour)
                queue.append(neighbour)
    return seen


def enrich_events(
    events: Iterable[RawEvent],
    links: Iterable[LinkRecord],
    transitive: bool = False,
    diag: Diagnostics | None = None,
) -> Iterator[RawEvent]:
    """Expand each omap by one hop from its ORIGINAL members.

    Expansion is applied once, never chained, so a payment linked to an
    order does not inherit the order's requisition. ``transitive`` switches
    to full closure for experimentation. Event order and every other field
    are preserved.
    """
    diag = diag if diag is not None else Diagnostics()
    adjacency = link_adjacency(links)
    for event in events:
        if transitive:
            expanded = _reachable(event.omap, adjacency)
        else:
            expanded = set(event.omap)
            for obj in event.omap:
                expanded.update(adjacency.get(obj, ()))
        if expanded == set(event.omap):
            yield event
            continue
        diag.events_enriched += 1
        yield replace(event, omap=frozenset(expanded))
