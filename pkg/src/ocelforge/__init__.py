"""Object-centric event log extraction from relational table snapshots."""

from .catalog import Catalog, KeyFilter, TableSchema, load_catalog, scan_table
from .classify import (
    CATEGORIES,
    DEFAULT_RULES,
    ClassificationRules,
    DetailLink,
    TableCategory,
    classify_all,
    classify_table,
)
from .connect import LinkRecord, enrich_events, harvest_links
from .errors import (
    DanglingObjectRef,
    DuplicateEventId,
    MalformedMetadata,
    MissingDataFile,
    NoTimestamp,
    OcelError,
    OcelforgeError,
    PlanError,
    SnapshotError,
    UnknownCaseType,
    UnknownColumn,
    UnknownMasterTable,
    UnknownTable,
)
from .extract import Diagnostics, ObjectTypeName, RawEvent, RawObject
from .ocel import (
    OcelLog,
    assemble,
    ConvergenceStats,
    DivergenceStats,
    convergence_stats,
    deserialize_json,
    divergence_stats,
    flat_to_csv_bytes,
    flatten,
    serialize_json,
    validate_ocel_doc,
)
from .pipeline import (
    classify_to_fixpoint,
    load_lookups,
    plan_for_master,
    run_extraction,
)
from .plan import (
    DEFAULT_TIMESTAMP_PRIORITY,
    ExtractionPlan,
    SemanticChangeRule,
    default_plan,
    key_field_union,
    load_plan,
    save_plan,
    validate_plan,
)
from .relations import GraphOfRelations, GorEdge, build_gor, extend_gor, gor_to_doc
from .synth import GenSpec, generate

__version__ = "0.1.0"

__all__ = [
    "CATEGORIES",
    "Catalog",
    "ClassificationRules",
    "ConvergenceStats",
    "DEFAULT_RULES",
    "DEFAULT_TIMESTAMP_PRIORITY",
    "DanglingObjectRef",
    "DetailLink",
    "Diagnostics",
    "DivergenceStats",
    "DuplicateEventId",
    "ExtractionPlan",
    "GenSpec",
    "GorEdge",
    "GraphOfRelations",
    "KeyFilter",
    "LinkRecord",
    "MalformedMetadata",
    "MissingDataFile",
    "NoTimestamp",
    "ObjectTypeName",
    "OcelError",
    "OcelLog",
    "OcelforgeError",
    "PlanError",
    "RawEvent",
    "RawObject",
    "SemanticChangeRule",
    "SnapshotError",
    "TableCategory",
    "TableSchema",
    "UnknownCaseType",
    "UnknownColumn",
    "UnknownMasterTable",
    "UnknownTable",
    "assemble",
    "build_gor",
    "classify_all",
    "classify_table",
    "classify_to_fixpoint",
    "convergence_stats",
    "default_plan",
    "deserialize_json",
    "divergence_stats",
    "enrich_events",
    "extend_gor",
    "flat_to_csv_bytes",
    "flatten",
    "generate",
    "gor_to_doc",
    "harvest_links",
    "key_field_union",
    "load_catalog",
    "load_lookups",
    "load_plan",
    "plan_for_master",
    "run_extraction",
    "save_plan",
    "scan_table",
    "serialize_json",
    "validate_ocel_doc",
    "validate_plan",
]
