"""End-to-end orchestration shared by the CLI and the HTTP service.

The pipeline is the only place that wires the stages together: build and
extend the graph, classify to a fixpoint (newly pulled-in masters need
categories too), extract per-class events, harvest links, enrich, and
assemble. Per-table work may run on a thread pool; results are merged in
table-name order so parallel runs emit exactly what sequential runs do.
"""

from __future__ import annotations

import csv
from collections.abc import Callable, Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .catalog import Catalog, KeyFilter
from .classify import (
    CHANGE,
    DEFAULT_RULES,
    DETAIL,
    FLOW,
    RECORD,
    TRANSACTION,
    ClassificationRules,
    classify_all,
    include_masters_of_details,
)
from .connect import LinkRecord, enrich_events, harvest_links
from .errors import MalformedMetadata
from .extract import (
    Diagnostics,
    RawEvent,
    RawObject,
    extract_change_events,
    extract_flow_events,
    extract_record_events,
    extract_transaction_events,
    object_from_id,
    pair_change_tables,
)
from .ocel import OcelLog, assemble
from .plan import ExtractionPlan, SemanticChangeRule, default_plan
from .relations import build_gor, extend_gor

TCODE_LOOKUP_FILE = "tstct.csv"
DOCTYPE_LOOKUP_FILE = "doctypes.csv"

ProgressHook = Callable[[str, int, int, int], None]


def _load_lookup(path: Path, header: tuple[str, str]) -> dict[str, str]:
    if not path.exists():
        return {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first != list(header):
            raise MalformedMetadata(
                str(path), 1, f"expected header {','.join(header)}"
            )
        mapping = {}
        for cells in reader:
            if len(cells) >= 2 and cells[0]:
                mapping[cells[0]] = cells[1]
    return mapping


def load_lookups(snapshot: str | Path) -> tuple[dict[str, str], dict[str, str]]:
    """(transaction-code texts, document-type texts); both files optional."""
    root = Path(snapshot)
    return (
        _load_lookup(root / TCODE_LOOKUP_FILE, ("TCODE", "TTEXT")),
        _load_lookup(root / DOCTYPE_LOOKUP_FILE, ("CODE", "TEXT")),
    )


def classify_to_fixpoint(catalog, gor, rules=DEFAULT_RULES, blacklist=None):
    """Classify, pull in missing masters of detail nodes, re-classify.

    Terminates because each round can only add catalog tables.
    """
    for _ in range(len(catalog.tables) + 1):
        categories, links = classify_all(catalog, gor, rules)
        extended = include_masters_of_details(gor, catalog, categories, blacklist)
        if extended.nodes == gor.nodes:
            return gor, categories, links
        gor = extended
    raise AssertionError("classification did not converge")


def plan_for_master(
    catalog: Catalog,
    master: str,
    row_threshold: int = 0,
    max_distance: int = 3,
    add: Iterable[str] = (),
    rules: ClassificationRules = DEFAULT_RULES,
    blacklist: Iterable[str] | None = None,
    include_parents: bool = True,
    filters: Iterable[KeyFilter] = (),
    change_strategy: str = "tcode",
    semantic_rules: Iterable[SemanticChangeRule] = (),
    **plan_overrides,
) -> ExtractionPlan:
    """Build a validated plan from a master table and defaults."""
    gor = build_gor(
        catalog,
        master,
        row_threshold=row_threshold,
        max_distance=max_distance,
        blacklist=blacklist,
    )
    add = [t for t in add if t not in gor.nodes]
    if add:
        gor = extend_gor(gor, catalog, add, blacklist)
    if include_parents:
        gor, categories, links = classify_to_fixpoint(catalog, gor, rules, blacklist)
    else:
        categories, links = classify_all(catalog, gor, rules)
    return default_plan(
        catalog,
        gor,
        categories,
        links,
        filters=tuple(filters),
        change_strategy=change_strategy,
        semantic_rules=tuple(semantic_rules),
        **plan_overrides,
    )


def _merge_diag(total: Diagnostics, part: Diagnostics) -> None:
    total.rows_scanned += part.rows_scanned
    total.events_emitted += part.events_emitted
    total.skipped_no_timestamp += part.skipped_no_timestamp
    total.orphan_items += part.orphan_items
    total.links_harvested += part.links_harvested
    total.events_enriched += part.events_enriched


TableResult = tuple[list[RawEvent], list[RawObject], list[LinkRecord], Diagnostics]


def _event_task(extractor, *args) -> TableResult:
    diag = Diagnostics()
    events: list[RawEvent] = []
    objects: list[RawObject] = []
    for event, emitted in extractor(*args, diag=diag):
        events.append(event)
        objects.extend(emitted)
    return events, objects, [], diag


def _link_task(catalog, table, plan) -> TableResult:
    diag = Diagnostics()
    links = list(harvest_links(catalog, table, plan, diag=diag))
    return [], [], links, diag


def run_extraction(
    catalog: Catalog,
    plan: ExtractionPlan,
    tcode_lookup: Mapping[str, str] | None = None,
    doctype_lookup: Mapping[str, str] | None = None,
    rules: ClassificationRules = DEFAULT_RULES,
    jobs: int = 1,
    progress: ProgressHook | None = None,
) -> tuple[OcelLog, Diagnostics]:
    """Extract, link, enrich, and assemble one log.

    ``progress`` is called after each finished table with
    (table, tables_done, tables_total, events_so_far).
    """
    tcodes = dict(tcode_lookup or {})
    doctypes = dict(doctype_lookup or {})
    by_class: dict[str, list[str]] = {}
    for table in sorted(plan.gor.nodes):
        by_class.setdefault(plan.categories[table].value, []).append(table)

    tasks: list[tuple[str, Callable[[], TableResult]]] = []
    for table in by_class.get(RECORD, ()):
        tasks.append(
            (table, lambda t=table: _event_task(extract_record_events, catalog, t, plan))
        )
    for table in by_class.get(TRANSACTION, ()):
        tasks.append(
            (
                table,
                lambda t=table: _event_task(
                    extract_transaction_events, catalog, t, plan, tcodes, rules
                ),
            )
        )
    for table in by_class.get(FLOW, ()):
        tasks.append(
            (
                table,
                lambda t=table: _event_task(
                    extract_flow_events, catalog, t, plan, doctypes, rules
                ),
            )
        )
    for header, items in pair_change_tables(catalog, by_class.get(CHANGE, ()), rules):
        tasks.append(
            (
                header,
                lambda h=header, i=items: _event_task(
                    extract_change_events, catalog, h, i, plan, tcodes, rules
                ),
            )
        )
    for table in by_class.get(DETAIL, ()):
        tasks.append((table, lambda t=table: _link_task(catalog, t, plan)))
    tasks.sort(key=lambda pair: pair[0])

    total = len(tasks)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda pair: pair[1](), tasks))
    else:
        results = []
        events_so_far = 0
        for done, (name, task) in enumerate(tasks, start=1):
            result = task()
            results.append(result)
            events_so_far += len(result[0])
            if progress is not None:
                progress(name, done, total, events_so_far)
    if jobs > 1 and progress is not None:
        progress("", total, total, sum(len(r[0]) for r in results))

    events: list[RawEvent] = []
    objects: dict[str, RawObject] = {}
    links: list[LinkRecord] = []
    diag = Diagnostics()
    for event_list, object_list, link_list, part in results:
        events.extend(event_list)
        for obj in object_list:
            objects.setdefault(obj.object_id, obj)
        links.extend(link_list)
        _merge_diag(diag, part)

    enriched = list(
        enrich_events(events, links, transitive=plan.transitive_links, diag=diag)
    )
    for event in enriched:
        for object_id in event.omap:
            if object_id not in objects:
                objects[object_id] = object_from_id(object_id)
    log = assemble(enriched, objects.values())
    return log, diag


def run_report_doc(diag: Diagnostics, log: OcelLog, plan: ExtractionPlan) -> dict:
    return {
        "counts": {
            **diag.to_doc(),
            "events": len(log.events),
            "objects": len(log.objects),
            "object_types": len(log.object_types),
        },
        "tables": {
            table: plan.categories[table].value for table in sorted(plan.gor.nodes)
        },
        "master": plan.gor.master,
    }
