"""Infer uniqueness classes and propose links from data and backend metadata.

Class inference is data-driven: a column is ONE when no non-null value
repeats, MANY otherwise. Nulls never count as repeats.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Any, Callable, Iterable

from .catalog import Catalog, ColumnClass, ColumnRef, Link
from .engine import SqliteBackend
from .errors import UnknownClass

logger = logging.getLogger(__name__)

ClassLookup = Callable[[ColumnRef], "ColumnClass | None"]


@dataclass(frozen=True)
class UniquenessReport:
    """Evidence behind an inferred column class."""

    inferred_class: ColumnClass
    total_rows: int
    distinct_non_null: int
    null_count: int
    column: ColumnRef | None = None


def infer_column_class(values: Iterable[Any], column: ColumnRef | None = None) -> UniquenessReport:
    """Classify a column from its values; empty input counts as ONE."""
    counts = Counter()
    total = 0
    nulls = 0
    for value in values:
        total += 1
        if value is None:
            nulls += 1
        else:
            counts[value] += 1
    repeats = any(count > 1 for count in counts.values())
    return UniquenessReport(
        inferred_class=ColumnClass.MANY if repeats else ColumnClass.ONE,
        total_rows=total,
        distinct_non_null=len(counts),
        null_count=nulls,
        column=column,
    )


def infer_links_by_name(
    catalog: Catalog, class_lookup: ClassLookup | None = None
) -> list[Link]:
    """Propose a link for every pair of tables sharing a column name.

    When three or more tables share a name, every pairwise combination is
    proposed; curation decides which survive. Endpoint classes come from the
    catalog, falling back to ``class_lookup``; a column with no class from
    either source raises :class:`UnknownClass`. Many-to-many proposals are
    included but flagged non-connectable via :attr:`Link.connectable`.
    """
    by_name: dict[str, list[str]] = {}
    for table in catalog.tables:
        for column in table.columns:
            by_name.setdefault(column.name, []).append(table.name)

    def resolve_class(ref: ColumnRef) -> ColumnClass:
        column_class = catalog.column_class(ref)
        if column_class is None and class_lookup is not None:
            column_class = class_lookup(ref)
        if column_class is None:
            raise UnknownClass(f"no uniqueness class known or derivable for {ref}")
        return column_class

    proposals: list[Link] = []
    for name in sorted(by_name):
        tables = by_name[name]
        if len(tables) < 2:
            continue
        for i, left_table in enumerate(sorted(tables)):
            for right_table in sorted(tables)[i + 1 :]:
                left = ColumnRef(left_table, name)
                right = ColumnRef(right_table, name)
                proposals.append(
                    Link(
                        link_id=f"shared:{name}:{left_table}:{right_table}",
                        left=left,
                        right=right,
                        left_class=resolve_class(left),
                        right_class=resolve_class(right),
                        mandatory=False,
                    )
                )
    return proposals


@dataclass(frozen=True)
class SkippedForeignKey:
    """A declared foreign key the importer could not turn into a link."""

    child_table: str
    parent_table: str
    columns: tuple[str, ...]
    reason: str


@dataclass(frozen=True)
class FkImport:
    """Links produced from declared foreign keys, plus skip diagnostics."""

    links: tuple[Link, ...]
    skipped: tuple[SkippedForeignKey, ...]


def import_declared_fks(backend: SqliteBackend) -> FkImport:
    """Turn backend-declared foreign keys into typed links.

    Endpoint classes are inferred by scanning the live data. Composite keys
    are skipped with a ``CompositeKeySkipped`` diagnostic; single-column
    links are the only supported shape.
    """
    links: list[Link] = []
    skipped: list[SkippedForeignKey] = []
    for declared in backend.declared_foreign_keys():
        if len(declared.child_columns) > 1:
            skipped.append(
                SkippedForeignKey(
                    child_table=declared.child_table,
                    parent_table=declared.parent_table,
                    columns=declared.child_columns,
                    reason="CompositeKeySkipped",
                )
            )
            logger.warning(
                "skipping composite foreign key %s(%s) -> %s",
                declared.child_table,
                ", ".join(declared.child_columns),
                declared.parent_table,
            )
            continue
        child = ColumnRef(declared.child_table, declared.child_columns[0])
        parent = ColumnRef(declared.parent_table, declared.parent_columns[0])
        child_class = infer_column_class(
            backend.scan_column(child.table, child.column), child
        ).inferred_class
        parent_class = infer_column_class(
            backend.scan_column(parent.table, parent.column), parent
        ).inferred_class
        links.append(
            Link(
                link_id=f"fk:{child}->{parent}",
                left=child,
                right=parent,
                left_class=child_class,
                right_class=parent_class,
                mandatory=declared.child_not_null,
            )
        )
    return FkImport(links=tuple(links), skipped=tuple(skipped))


def dataset_class_lookup(dataset) -> ClassLookup:
    """A class lookup that scans dataset columns on demand, memoized."""
    memo: dict[ColumnRef, ColumnClass] = {}

    def lookup(ref: ColumnRef) -> ColumnClass:
        if ref not in memo:
            memo[ref] = infer_column_class(dataset.scan_column(ref), ref).inferred_class
        return memo[ref]

    return lookup
