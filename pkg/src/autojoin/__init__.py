"""Represent a relational schema as a join graph and synthesize join queries.

The core pipeline: ingest CSVs (:mod:`autojoin.engine`), record or infer
column classes and links (:mod:`autojoin.catalog`, :mod:`autojoin.inference`),
build the directed join graph (:mod:`autojoin.graph`), enumerate and reduce
join paths (:mod:`autojoin.paths`), synthesize minimal join sequences
(:mod:`autojoin.planner`), and translate them to SQL (:mod:`autojoin.sqlgen`).
"""

from .catalog import (
    Catalog,
    ColumnClass,
    ColumnRef,
    ColumnSpec,
    Link,
    RelationshipKind,
    TableSchema,
    catalog_from_document,
    catalog_to_document,
    classify_relationship,
    load_catalog,
    save_catalog,
)
from .engine import Dataset, QueryResult, SqliteBackend, ingest_csv_dir
from .graph import DirectedEdge, JoinGraph, LinkSelection, build_graph, graph_summary
from .inference import (
    FkImport,
    UniquenessReport,
    import_declared_fks,
    infer_column_class,
    infer_links_by_name,
)
from .jsonio import canonical_json
from .paths import (
    DEFAULT_MAX_DEPTH,
    Path,
    PathCache,
    PathSet,
    SimplePaths,
    all_simple_paths,
    paths_between,
    reachable,
    reduce_paths,
)
from .planner import (
    DEFAULT_COMBINATION_CAP,
    JoinSequence,
    PlanDiagnostics,
    PlanResult,
    TargetSet,
    flatten_combination,
    joinable,
    plan,
    superset_filter,
)
from .runtime import Workspace
from .sqlgen import (
    Dialect,
    Filter,
    GENERIC,
    JoinType,
    QuerySpec,
    QueryTemplate,
    ResolutionPolicy,
    SqlQuery,
    emit_count_sql,
    emit_sql,
    join_clause,
    resolve,
)

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "ColumnClass",
    "ColumnRef",
    "ColumnSpec",
    "DEFAULT_COMBINATION_CAP",
    "DEFAULT_MAX_DEPTH",
    "Dataset",
    "Dialect",
    "DirectedEdge",
    "Filter",
    "FkImport",
    "GENERIC",
    "JoinGraph",
    "JoinSequence",
    "JoinType",
    "Link",
    "LinkSelection",
    "Path",
    "PathCache",
    "PathSet",
    "PlanDiagnostics",
    "PlanResult",
    "QueryResult",
    "QuerySpec",
    "QueryTemplate",
    "RelationshipKind",
    "ResolutionPolicy",
    "SimplePaths",
    "SqlQuery",
    "SqliteBackend",
    "TableSchema",
    "TargetSet",
    "UniquenessReport",
    "Workspace",
    "all_simple_paths",
    "build_graph",
    "canonical_json",
    "catalog_from_document",
    "catalog_to_document",
    "classify_relationship",
    "emit_count_sql",
    "emit_sql",
    "flatten_combination",
    "graph_summary",
    "import_declared_fks",
    "infer_column_class",
    "infer_links_by_name",
    "ingest_csv_dir",
    "join_clause",
    "joinable",
    "load_catalog",
    "paths_between",
    "plan",
    "reachable",
    "reduce_paths",
    "resolve",
    "save_catalog",
    "superset_filter",
]
