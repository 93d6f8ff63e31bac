"""Exception types shared across the package.

The hierarchy mirrors where things go wrong: reading a snapshot,
configuring an extraction, or assembling the resulting log. Service and
CLI layers map these onto HTTP codes and exit codes respectively.
"""

from __future__ import annotations


class OcelforgeError(Exception):
    """Base class for every error raised by this package."""


class SnapshotError(OcelforgeError):
    """A snapshot's metadata or data files are unusable."""


class MalformedMetadata(SnapshotError):
    def __init__(self, path: str, line: int, reason: str) -> None:
        super().__init__(f"{path}:{line}: {reason}")
        self.path = path
        self.line = line
        self.reason = reason


class DanglingDomain(SnapshotError):
    def __init__(self, table: str, field: str, domain: str, line: int) -> None:
        super().__init__(
            f"column {table}.{field} references undeclared domain {domain!r} (line {line})"
        )
        self.table = table
        self.field = field
        self.domain = domain


class DuplicateColumn(SnapshotError):
    def __init__(self, table: str, field: str, line: int) -> None:
        super().__init__(f"column {table}.{field} declared twice (line {line})")
        self.table = table
        self.field = field


class MissingDataFile(SnapshotError):
    def __init__(self, table: str, path: str) -> None:
        super().__init__(f"no data file for table {table}: {path}")
        self.table = table
        self.path = path


class RowArityMismatch(SnapshotError):
    def __init__(self, table: str, row_index: int, expected: int, got: int) -> None:
        super().__init__(
            f"{table}.csv row {row_index}: expected {expected} cells, got {got}"
        )
        self.table = table
        self.row_index = row_index


class UnknownTable(OcelforgeError):
    def __init__(self, table: str) -> None:
        super().__init__(f"unknown table {table!r}")
        self.table = table


class UnknownColumn(OcelforgeError):
    def __init__(self, table: str, field: str) -> None:
        super().__init__(f"unknown column {table}.{field}")
        self.table = table
        self.field = field


class UnknownMasterTable(OcelforgeError):
    def __init__(self, table: str) -> None:
        super().__init__(f"master table {table!r} not in catalog")
        self.table = table


class PlanError(OcelforgeError):
    """An extraction plan is internally inconsistent."""


class FilterFieldNotKey(PlanError):
    def __init__(self, field: str) -> None:
        super().__init__(
            f"filter field {field!r} is not part of any included table's primary key"
        )
        self.field = field


class EmptyFilterValues(PlanError):
    def __init__(self, field: str) -> None:
        super().__init__(f"filter on {field!r} allows no values")
        self.field = field


class MissingSemanticRules(PlanError):
    def __init__(self) -> None:
        super().__init__("change_strategy is 'semantic' but no semantic rules are given")


class UncoveredTable(PlanError):
    def __init__(self, table: str) -> None:
        super().__init__(f"included table {table!r} has no category assigned")
        self.table = table


class NoTimestamp(OcelforgeError):
    """A row offers no usable temporal value."""

    def __init__(self, table: str, row_key: str) -> None:
        super().__init__(f"row {table}:{row_key} has no usable timestamp")
        self.table = table
        self.row_key = row_key


class OcelError(OcelforgeError):
    """Log assembly or flattening failed."""


class DanglingObjectRef(OcelError):
    def __init__(self, event_id: str, object_id: str) -> None:
        super().__init__(f"event {event_id} references unknown object {object_id}")
        self.event_id = event_id
        self.object_id = object_id


class DuplicateEventId(OcelError):
    def __init__(self, event_id: str) -> None:
        super().__init__(f"duplicate event id {event_id}")
        self.event_id = event_id


class UnknownCaseType(OcelError):
    def __init__(self, case_type: str) -> None:
        super().__init__(f"case notion {case_type!r} is not an object type of this log")
        self.case_type = case_type
