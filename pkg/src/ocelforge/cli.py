"""Command line front end.

Exit codes: 0 success, 1 bad arguments or plan validation, 2 broken
snapshot data or I/O failure. A JSON run report is written next to the
OCEL output even when extraction fails partway.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from .catalog import KeyFilter, load_catalog
from .classify import CATEGORIES, DEFAULT_RULES
from .errors import (
    OcelError,
    OcelforgeError,
    PlanError,
    SnapshotError,
    UnknownCaseType,
)
from .ocel import (
    convergence_stats,
    divergence_stats,
    flat_to_csv_bytes,
    flatten,
    serialize_json,
)
from .pipeline import classify_to_fixpoint, load_lookups, run_extraction, run_report_doc
from .plan import SemanticChangeRule, load_plan, plan_to_doc, save_plan
from .relations import build_gor, gor_to_doc
from .synth import GenSpec, generate


@click.group()
def cli() -> None:
    """Build object-centric event logs from relational table snapshots."""


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


@cli.command()
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--orders", default=50, show_default=True, type=int)
@click.option("--items", default="1:3", show_default=True, help="MIN:MAX items per order.")
@click.option("--change-rate", default=0.0, show_default=True, type=float)
@click.option("--flow-chains", default=0, show_default=True, type=int)
@click.option("--year", "years", multiple=True, type=int)
@click.option("--client", "clients", multiple=True)
def gen(out, seed, orders, items, change_rate, flow_chains, years, clients):
    """Generate a synthetic purchase-to-pay snapshot."""
    lo, _, hi = items.partition(":")
    spec = GenSpec(
        seed=seed,
        n_orders=orders,
        items_min=int(lo),
        items_max=int(hi or lo),
        change_rate=change_rate,
        flow_chains=flow_chains,
        fiscal_years=frozenset(years) if years else frozenset({2021}),
        clients=frozenset(clients) if clients else frozenset({"800"}),
    )
    manifest = generate(spec, out)
    click.echo(f"wrote {len(manifest['tables'])} tables to {out}")


@cli.command()
@click.option("--snapshot", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--master", required=True)
@click.option("--threshold", default=0, show_default=True, type=int)
@click.option("--max-distance", default=3, show_default=True, type=int)
@click.option("--out", type=click.Path(path_type=Path), help="Write the graph as JSON.")
def gor(snapshot, master, threshold, max_distance, out):
    """Build the graph of relations around a master table."""
    catalog = load_catalog(snapshot)
    graph = build_gor(catalog, master, row_threshold=threshold, max_distance=max_distance)
    doc = gor_to_doc(graph, catalog)
    if out is not None:
        _write_json(out, doc)
    click.echo(json.dumps(doc, indent=2, sort_keys=True))


@cli.command()
@click.option("--snapshot", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--master", required=True)
@click.option("--threshold", default=0, show_default=True, type=int)
@click.option("--max-distance", default=3, show_default=True, type=int)
@click.option("--override", "overrides", multiple=True, help="TABLE=CATEGORY, repeatable.")
def classify(snapshot, master, threshold, max_distance, overrides):
    """Classify every table reachable from the master."""
    catalog = load_catalog(snapshot)
    graph = build_gor(catalog, master, row_threshold=threshold, max_distance=max_distance)
    rules = DEFAULT_RULES.with_overrides(_parse_overrides(overrides))
    graph, categories, links = classify_to_fixpoint(catalog, graph, rules)
    for table in sorted(categories):
        cat = categories[table]
        click.echo(f"{table}\t{cat.value}\t{'; '.join(cat.evidence)}")
    for link in sorted(links, key=lambda l: (l.detail_table, l.master_table)):
        click.echo(
            f"# {link.detail_table} -> {link.master_table}"
            f" via {','.join(link.shared_key_fields)}"
        )


def _parse_overrides(pairs) -> dict[str, str]:
    overrides = {}
    for pair in pairs:
        table, sep, category = pair.partition("=")
        if not sep or not table or category not in CATEGORIES:
            raise click.UsageError(
                f"--override wants TABLE=CATEGORY with category in {CATEGORIES}, got {pair!r}"
            )
        overrides[table] = category
    return overrides


def _parse_filters(pairs) -> tuple[KeyFilter, ...]:
    filters = []
    for pair in pairs:
        fld, sep, values = pair.partition("=")
        if not sep or not fld:
            raise click.UsageError(f"--filter wants FIELD=V1,V2,..., got {pair!r}")
        filters.append(KeyFilter(field=fld, allowed_values=[v for v in values.split(",") if v]))
    return tuple(filters)


def _parse_semantic_rules(specs) -> tuple[SemanticChangeRule, ...]:
    rules = []
    for spec in specs:
        parts = spec.split(":", 3)
        if len(parts) != 4:
            raise click.UsageError(
                f"--semantic-rule wants TABLE:FIELD:PREDICATE:NAME, got {spec!r}"
            )
        try:
            rules.append(SemanticChangeRule(*parts))
        except PlanError as exc:
            raise click.UsageError(str(exc))
    return tuple(rules)


@cli.command()
@click.option("--snapshot", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--plan", "plan_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--master")
@click.option("--threshold", default=0, show_default=True, type=int)
@click.option("--max-distance", default=3, show_default=True, type=int)
@click.option("--add", "additions", multiple=True, help="Force a table into the graph.")
@click.option("--override", "overrides", multiple=True, help="TABLE=CATEGORY, repeatable.")
@click.option("--filter", "filters", multiple=True, help="FIELD=V1,V2 key filter, repeatable.")
@click.option(
    "--change-strategy",
    default="tcode",
    show_default=True,
    type=click.Choice(["tcode", "field", "semantic"]),
)
@click.option("--semantic-rule", "semantic_rules", multiple=True, help="TABLE:FIELD:PREDICATE:NAME.")
@click.option("--transitive", is_flag=True, help="Follow link chains beyond one hop.")
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--plan-out", type=click.Path(path_type=Path), help="Save the effective plan.")
@click.option("--flatten", "case_type", help="Also flatten on this object type.")
@click.option("--flat-out", type=click.Path(path_type=Path))
@click.option("--stats-out", type=click.Path(path_type=Path))
@click.option("--jobs", default=1, show_default=True, type=int)
@click.option("--report", type=click.Path(path_type=Path), help="Run report path (default: OUT.report.json).")
def extract(
    snapshot,
    plan_file,
    master,
    threshold,
    max_distance,
    additions,
    overrides,
    filters,
    change_strategy,
    semantic_rules,
    transitive,
    out,
    plan_out,
    case_type,
    flat_out,
    stats_out,
    jobs,
    report,
):
    """Extract an OCEL 1.0 JSON log from a snapshot."""
    if (plan_file is None) == (master is None):
        raise click.UsageError("pass exactly one of --plan or --master")
    report_path = report if report is not None else out.with_name(out.name + ".report.json")
    catalog = load_catalog(snapshot)
    rules = DEFAULT_RULES.with_overrides(_parse_overrides(overrides))
    if plan_file is not None:
        plan = load_plan(plan_file, catalog)
    else:
        from .pipeline import plan_for_master

        plan = plan_for_master(
            catalog,
            master,
            row_threshold=threshold,
            max_distance=max_distance,
            add=additions,
            rules=rules,
            filters=_parse_filters(filters),
            change_strategy=change_strategy,
            semantic_rules=_parse_semantic_rules(semantic_rules),
            transitive_links=transitive,
        )
    if plan_out is not None:
        save_plan(plan, plan_out)

    started = time.monotonic()
    report_doc = {"status": "failed", "snapshot": str(snapshot), "out": str(out)}
    try:
        tcodes, doctypes = load_lookups(snapshot)

        def progress(table: str, done: int, total: int, events: int) -> None:
            click.echo(f"[{done}/{total}] {table}: {events} events so far", err=True)

        log, diag = run_extraction(
            catalog, plan, tcodes, doctypes, rules, jobs=jobs, progress=progress
        )
        out.write_bytes(serialize_json(log))
        report_doc = run_report_doc(diag, log, plan)
        report_doc.update(status="ok", snapshot=str(snapshot), out=str(out))
        click.echo(f"wrote {len(log.events)} events, {len(log.objects)} objects to {out}")

        if case_type is not None:
            flat = flatten(log, case_type)
            stats = {
                "case_type": case_type,
                "cases": len(flat.cases),
                "dropped_events": flat.dropped_events,
                "convergence": convergence_stats(log, case_type).to_doc(),
                "divergence": divergence_stats(flat).to_doc(),
            }
            if flat_out is not None:
                flat_out.write_bytes(flat_to_csv_bytes(flat))
            if stats_out is not None:
                _write_json(stats_out, stats)
            click.echo(json.dumps(stats, indent=2, sort_keys=True))
    except Exception as exc:
        report_doc["error"] = {"type": type(exc).__name__, "message": str(exc)}
        raise
    finally:
        report_doc["elapsed_seconds"] = round(time.monotonic() - started, 3)
        _write_json(report_path, report_doc)


@cli.command("flatten")
@click.option("--ocel", "ocel_file", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--case-type", required=True)
@click.option("--out", type=click.Path(path_type=Path))
@click.option("--stats-out", type=click.Path(path_type=Path))
def flatten_cmd(ocel_file, case_type, out, stats_out):
    """Flatten an OCEL log to a single-case-notion CSV."""
    from .ocel import deserialize_json

    log = deserialize_json(ocel_file.read_bytes())
    flat = flatten(log, case_type)
    stats = {
        "case_type": case_type,
        "cases": len(flat.cases),
        "dropped_events": flat.dropped_events,
        "convergence": convergence_stats(log, case_type).to_doc(),
        "divergence": divergence_stats(flat).to_doc(),
    }
    if out is not None:
        out.write_bytes(flat_to_csv_bytes(flat))
    if stats_out is not None:
        _write_json(stats_out, stats)
    click.echo(json.dumps(stats, indent=2, sort_keys=True))


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=None, type=int, help="Defaults to OCELFORGE_PORT or 5000.")
@click.option("--ui-dir", type=click.Path(file_okay=False, path_type=Path))
def serve(host, port, ui_dir):
    """Run the HTTP session service."""
    from .service import serve as run_service

    run_service(host=host, port=port, ui_dir=ui_dir)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (PlanError, UnknownCaseType, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except (SnapshotError, OcelError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OcelforgeError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
