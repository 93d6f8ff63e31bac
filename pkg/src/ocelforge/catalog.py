"""Snapshot catalog: schema metadata plus row access for one exported snapshot.

A snapshot is a directory holding two metadata files and one data file per
table:

``dd_fields.csv``
    ``TABNAME,FIELDNAME,DOMNAME,KEYFLAG,POSITION`` -- one row per column,
    ``KEYFLAG`` is ``X`` for primary-key columns and empty otherwise.
``dd_domains.csv``
    ``DOMNAME,KIND,DESCRIPTION`` -- ``KIND`` is one of ``DATE``, ``TIME``,
    ``NUM``, ``CODE``, ``TEXT``.
``<TABNAME>.csv``
    Row data, header row = field names, RFC-4180 quoting, UTF-8, LF.

Every cell value is kept as a string; the empty string means "absent".
Interpretation (what is a date, what is a document number) happens
downstream based on the declared domain kind.
"""

from __future__ import annotations

import csv
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

from .errors import (
    DanglingDomain,
    DuplicateColumn,
    MalformedMetadata,
    MissingDataFile,
    RowArityMismatch,
    UnknownColumn,
    UnknownTable,
)

TEMPORAL_DATE = "temporal-date"
TEMPORAL_TIME = "temporal-time"
NUMERIC = "numeric"
CODE = "code"
TEXT = "text"
DOMAIN_KINDS = (TEMPORAL_DATE, TEMPORAL_TIME, NUMERIC, CODE, TEXT)

_KIND_BY_TAG = {
    "DATE": TEMPORAL_DATE,
    "TIME": TEMPORAL_TIME,
    "NUM": NUMERIC,
    "CODE": CODE,
    "TEXT": TEXT,
}
_TAG_BY_KIND = {kind: tag for tag, kind in _KIND_BY_TAG.items()}

FIELDS_FILE = "dd_fields.csv"
DOMAINS_FILE = "dd_domains.csv"
FIELDS_HEADER = ("TABNAME", "FIELDNAME", "DOMNAME", "KEYFLAG", "POSITION")
DOMAINS_HEADER = ("DOMNAME", "KIND", "DESCRIPTION")

Row = dict[str, str]


@dataclass(frozen=True)
class DomainInfo:
    name: str
    kind: str
    description: str = ""


@dataclass(frozen=True)
class ColumnDef:
    table: str
    field: str
    domain: str
    is_key: bool
    position: int


@dataclass(frozen=True)
class TableSchema:
    name: str
    columns: tuple[ColumnDef, ...]
    primary_key: tuple[str, ...]
    row_count: int

    def field_names(self) -> tuple[str, ...]:
        return tuple(col.field for col in self.columns)

    def column(self, field: str) -> ColumnDef:
        for col in self.columns:
            if col.field == field:
                return col
        raise UnknownColumn(self.name, field)

    def has_field(self, field: str) -> bool:
        return any(col.field == field for col in self.columns)


@dataclass(frozen=True)
class KeyFilter:
    """Restricts scanned rows to those whose ``field`` value is allowed."""

    field: str
    allowed_values: frozenset[str]

    def __init__(self, field: str, allowed_values: Iterable[str]) -> None:
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "allowed_values", frozenset(allowed_values))


@dataclass(frozen=True)
class Catalog:
    domains: dict[str, DomainInfo]
    tables: dict[str, TableSchema]
    data_root: Path

    def table(self, name: str) -> TableSchema:
        try:
            return self.tables[name]
        except KeyError:
            raise UnknownTable(name) from None

    def data_path(self, name: str) -> Path:
        return self.data_root / f"{name}.csv"

    def column_kind(self, column: ColumnDef) -> str:
        return self.domains[column.domain].kind


def load_catalog(metadata_path: str | Path) -> Catalog:
    """Load schema metadata (and per-table row counts) from a snapshot.

    Parameters
    ----------
    metadata_path:
        Snapshot directory, or the path of its ``dd_fields.csv``; data files
        are expected alongside the metadata.

    Raises
    ------
    MalformedMetadata
        Structural problems in either metadata file, reported with the
        offending line number.
    DanglingDomain
        A column references a domain that ``dd_domains.csv`` never declares.
    DuplicateColumn
        The same ``(table, field)`` pair is declared twice.
    """
    root = Path(metadata_path)
    if root.is_file():
        root = root.parent
    domains = _read_domains(root / DOMAINS_FILE)
    tables = _read_fields(root / FIELDS_FILE, domains, root)
    return Catalog(domains=domains, tables=tables, data_root=root)


def _read_csv_rows(path: Path, header: Sequence[str]) -> Iterator[tuple[int, list[str]]]:
    if not path.exists():
        raise MalformedMetadata(str(path), 0, "metadata file not found")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first != list(header):
            raise MalformedMetadata(
                str(path), 1, f"expected header {','.join(header)}"
            )
        for line, cells in enumerate(reader, start=2):
            if not cells:
                continue
            if len(cells) != len(header):
                raise MalformedMetadata(
                    str(path), line, f"expected {len(header)} cells, got {len(cells)}"
                )
            yield line, cells


def _read_domains(path: Path) -> dict[str, DomainInfo]:
    domains: dict[str, DomainInfo] = {}
    for line, (name, tag, description) in _read_csv_rows(path, DOMAINS_HEADER):
        if not name:
            raise MalformedMetadata(str(path), line, "empty domain name")
        if tag not in _KIND_BY_TAG:
            raise MalformedMetadata(str(path), line, f"unknown domain kind {tag!r}")
        if name in domains:
            raise MalformedMetadata(str(path), line, f"duplicate domain {name!r}")
        domains[name] = DomainInfo(name=name, kind=_KIND_BY_TAG[tag], description=description)
    return domains


def _read_fields(
    path: Path, domains: dict[str, DomainInfo], data_root: Path
) -> dict[str, TableSchema]:
    columns: dict[str, list[ColumnDef]] = {}
    seen: set[tuple[str, str]] = set()
    for line, (table, field, domain, keyflag, position) in _read_csv_rows(
        path, FIELDS_HEADER
    ):
        if not table or not field:
            raise MalformedMetadata(str(path), line, "empty table or field name")
        if keyflag not in ("X", ""):
            raise MalformedMetadata(str(path), line, f"bad KEYFLAG {keyflag!r}")
        try:
            pos = int(position)
        except ValueError:
            raise MalformedMetadata(
                str(path), line, f"POSITION {position!r} is not an integer"
            ) from None
        if domain not in domains:
            raise DanglingDomain(table, field, domain, line)
        if (table, field) in seen:
            raise DuplicateColumn(table, field, line)
        seen.add((table, field))
        columns.setdefault(table, []).append(
            ColumnDef(table=table, field=field, domain=domain, is_key=keyflag == "X", position=pos)
        )

    tables: dict[str, TableSchema] = {}
    for name in sorted(columns):
        cols = tuple(sorted(columns[name], key=lambda c: (c.position, c.field)))
        primary_key = tuple(c.field for c in cols if c.is_key)
        tables[name] = TableSchema(
            name=name,
            columns=cols,
            primary_key=primary_key,
            row_count=_count_rows(data_root / f"{name}.csv"),
        )
    return tables


def _count_rows(path: Path) -> int:
    if not path.exists():
        return 0
    with path.open(newline="", encoding="utf-8") as fh:
        n = sum(1 for _ in csv.reader(fh))
    return max(n - 1, 0)


def write_catalog(catalog: Catalog, out_dir: str | Path) -> None:
    """Write ``dd_domains.csv`` and ``dd_fields.csv`` for ``catalog``.

    Loading the written metadata back (with the same data files present)
    reproduces the catalog structurally.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with (out / DOMAINS_FILE).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DOMAINS_HEADER)
        for name in sorted(catalog.domains):
            dom = catalog.domains[name]
            writer.writerow([dom.name, _TAG_BY_KIND[dom.kind], dom.description])
    with (out / FIELDS_FILE).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FIELDS_HEADER)
        for name in sorted(catalog.tables):
            for col in catalog.tables[name].columns:
                writer.writerow(
                    [col.table, col.field, col.domain, "X" if col.is_key else "", col.position]
                )


def scan_table(
    catalog: Catalog, table: str, filters: Sequence[KeyFilter] = ()
) -> Iterator[Row]:
    """Stream the rows of ``table`` in file order.

    Filters are conjunctive; a filter whose field the table does not carry
    is skipped. Each yielded row maps every schema field to its string
    value. The stream is repeatable: each call re-reads the file.

    Raises
    ------
    MissingDataFile
        The table has no data file.
    RowArityMismatch
        A data row has the wrong number of cells (reported with its
        1-based row index).
    """
    schema = catalog.table(table)
    path = catalog.data_path(table)
    if not path.exists():
        raise MissingDataFile(table, str(path))
    return _scan(schema, path, tuple(filters))


def _scan(schema: TableSchema, path: Path, filters: tuple[KeyFilter, ...]) -> Iterator[Row]:
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return
        if set(header) != set(schema.field_names()):
            raise MalformedMetadata(
                str(path), 1, f"data header does not match schema of {schema.name}"
            )
        applicable = [f for f in filters if f.field in header]
        width = len(header)
        for index, cells in enumerate(reader, start=1):
            if len(cells) != width:
                raise RowArityMismatch(schema.name, index, width, len(cells))
            row = dict(zip(header, cells))
            if all(row[f.field] in f.allowed_values for f in applicable):
                yield row


def domain_kind(catalog: Catalog, table: str, field: str) -> str:
    """Kind of the domain behind ``table.field`` (one of ``DOMAIN_KINDS``)."""
    column = catalog.table(table).column(field)
    return catalog.domains[column.domain].kind
