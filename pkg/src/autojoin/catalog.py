"""Schema metadata: tables, columns, uniqueness classes, and typed links.

The catalog is the persisted source of truth from which the join graph is
rebuilt. Catalogs are immutable; mutation helpers return new instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import IO, Any, Iterator

from .errors import (
    MalformedMetadata,
    SelfReferencingLink,
    UnknownClass,
    UnknownColumn,
    UnknownTable,
)

METADATA_VERSION = 1


class ColumnClass(Enum):
    """Uniqueness class of a joining column.

    ``ONE`` means every non-null value occurs at most once; ``MANY`` means
    values may repeat.
    """

    ONE = "one"
    MANY = "many"


class RelationshipKind(Enum):
    """Classification of a link by the ordered pair of endpoint classes."""

    ONE_TO_ONE = "1-1"
    MANY_TO_ONE = "M-1"
    ONE_TO_MANY = "1-M"
    MANY_TO_MANY = "M-M"


_KINDS = {
    (ColumnClass.ONE, ColumnClass.ONE): RelationshipKind.ONE_TO_ONE,
    (ColumnClass.MANY, ColumnClass.ONE): RelationshipKind.MANY_TO_ONE,
    (ColumnClass.ONE, ColumnClass.MANY): RelationshipKind.ONE_TO_MANY,
    (ColumnClass.MANY, ColumnClass.MANY): RelationshipKind.MANY_TO_MANY,
}


def classify_relationship(left: ColumnClass, right: ColumnClass) -> RelationshipKind:
    """Map the ordered pair of endpoint classes to a relationship kind."""
    return _KINDS[(left, right)]


@dataclass(frozen=True, order=True)
class ColumnRef:
    """A column qualified by its table, e.g. ``products.supplierID``."""

    table: str
    column: str

    def __post_init__(self) -> None:
        if not self.table or not self.column:
            raise ValueError("table and column names must be non-empty")

    def __str__(self) -> str:
        return f"{self.table}.{self.column}"

    @classmethod
    def parse(cls, text: str) -> "ColumnRef":
        """Parse ``table.column`` notation."""
        table, sep, column = text.partition(".")
        if not sep or not table or not column:
            raise ValueError(f"expected 'table.column', got {text!r}")
        return cls(table, column)


def _coerce_ref(value: "ColumnRef | str") -> ColumnRef:
    return value if isinstance(value, ColumnRef) else ColumnRef.parse(value)


@dataclass(frozen=True)
class Link:
    """A foreign-key style connection between columns of two distinct tables."""

    link_id: str
    left: ColumnRef
    right: ColumnRef
    left_class: ColumnClass
    right_class: ColumnClass
    mandatory: bool = False

    def __post_init__(self) -> None:
        if not self.link_id:
            raise ValueError("link_id must be non-empty")
        if self.left.table == self.right.table:
            raise SelfReferencingLink(
                f"link {self.link_id!r} connects {self.left.table!r} to itself"
            )

    @property
    def kind(self) -> RelationshipKind:
        return classify_relationship(self.left_class, self.right_class)

    @property
    def connectable(self) -> bool:
        """Whether this link contributes edges to the join graph.

        Many-to-many links stay in the catalog for bookkeeping but never
        become edges.
        """
        return self.kind is not RelationshipKind.MANY_TO_MANY

    @property
    def table_pair(self) -> frozenset[str]:
        return frozenset((self.left.table, self.right.table))


@dataclass(frozen=True)
class ColumnSpec:
    """A column declaration with an optional uniqueness class."""

    name: str
    column_class: ColumnClass | None = None


@dataclass(frozen=True)
class TableSchema:
    """An ordered set of column declarations for one table."""

    name: str
    columns: tuple[ColumnSpec, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("table name must be non-empty")
        object.__setattr__(self, "columns", tuple(self.columns))
        seen: set[str] = set()
        for col in self.columns:
            if col.name in seen:
                raise ValueError(f"duplicate column {col.name!r} in table {self.name!r}")
            seen.add(col.name)

    def column_names(self) -> tuple[str, ...]:
        return tuple(col.name for col in self.columns)

    def has_column(self, name: str) -> bool:
        return any(col.name == name for col in self.columns)


@dataclass(frozen=True)
class Catalog:
    """Immutable collection of table schemas and links between them."""

    tables: tuple[TableSchema, ...] = ()
    links: tuple[Link, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "tables", tuple(self.tables))
        object.__setattr__(self, "links", tuple(self.links))
        names: set[str] = set()
        for table in self.tables:
            if table.name in names:
                raise ValueError(f"duplicate table {table.name!r}")
            names.add(table.name)
        ids: set[str] = set()
        for link in self.links:
            if link.link_id in ids:
                raise ValueError(f"duplicate link id {link.link_id!r}")
            ids.add(link.link_id)
            for ref in (link.left, link.right):
                self._require_column(ref)

    def _require_table(self, name: str) -> TableSchema:
        for table in self.tables:
            if table.name == name:
                return table
        raise UnknownTable(f"unknown table {name!r}")

    def _require_column(self, ref: ColumnRef) -> ColumnSpec:
        table = self._require_table(ref.table)
        for col in table.columns:
            if col.name == ref.column:
                return col
        raise UnknownColumn(f"unknown column {ref}")

    @property
    def table_names(self) -> tuple[str, ...]:
        return tuple(table.name for table in self.tables)

    def has_table(self, name: str) -> bool:
        return any(table.name == name for table in self.tables)

    def schema(self, name: str) -> TableSchema:
        return self._require_table(name)

    def has_column(self, ref: "ColumnRef | str") -> bool:
        ref = _coerce_ref(ref)
        return self.has_table(ref.table) and self.schema(ref.table).has_column(ref.column)

    def column_class(self, ref: "ColumnRef | str") -> ColumnClass | None:
        return self._require_column(_coerce_ref(ref)).column_class

    def columns(self) -> Iterator[tuple[ColumnRef, ColumnClass | None]]:
        for table in self.tables:
            for col in table.columns:
                yield ColumnRef(table.name, col.name), col.column_class

    def link(self, link_id: str) -> Link:
        for link in self.links:
            if link.link_id == link_id:
                return link
        raise KeyError(link_id)

    def links_between(self, a: str, b: str) -> tuple[Link, ...]:
        pair = frozenset((a, b))
        return tuple(link for link in self.links if link.table_pair == pair)

    def _fresh_link_id(self) -> str:
        existing = {link.link_id for link in self.links}
        n = len(self.links) + 1
        while f"link_{n:03d}" in existing:
            n += 1
        return f"link_{n:03d}"

    def add_link(
        self,
        left: "ColumnRef | str",
        right: "ColumnRef | str",
        *,
        left_class: ColumnClass | None = None,
        right_class: ColumnClass | None = None,
        mandatory: bool = False,
        link_id: str | None = None,
    ) -> "Catalog":
        """Return a new catalog with one more link.

        Endpoint classes default to the classes recorded in the catalog;
        endpoints without a recorded class must be given one explicitly.
        """
        left = _coerce_ref(left)
        right = _coerce_ref(right)
        self._require_column(left)
        self._require_column(right)
        if left.table == right.table:
            raise SelfReferencingLink(f"link would connect {left.table!r} to itself")
        if left_class is None:
            left_class = self.column_class(left)
        if right_class is None:
            right_class = self.column_class(right)
        if left_class is None:
            raise UnknownClass(f"no uniqueness class known for {left}")
        if right_class is None:
            raise UnknownClass(f"no uniqueness class known for {right}")
        link = Link(
            link_id=link_id if link_id is not None else self._fresh_link_id(),
            left=left,
            right=right,
            left_class=left_class,
            right_class=right_class,
            mandatory=mandatory,
        )
        return replace(self, links=self.links + (link,))

    def with_table(self, table: TableSchema) -> "Catalog":
        return replace(self, tables=self.tables + (table,))

    def with_column_classes(
        self, classes: dict[ColumnRef, ColumnClass]
    ) -> "Catalog":
        """Return a new catalog with the given column classes recorded."""
        for ref in classes:
            self._require_column(ref)
        tables = []
        for table in self.tables:
            columns = tuple(
                replace(col, column_class=classes.get(ColumnRef(table.name, col.name), col.column_class))
                for col in table.columns
            )
            tables.append(replace(table, columns=columns))
        return replace(self, tables=tuple(tables))


def catalog_to_document(catalog: Catalog) -> dict[str, Any]:
    """Serialize a catalog to a JSON-compatible metadata document."""
    return {
        "version": METADATA_VERSION,
        "tables": [
            {
                "name": table.name,
                "columns": [
                    {
                        "name": col.name,
                        "class": col.column_class.value if col.column_class else None,
                    }
                    for col in table.columns
                ],
            }
            for table in catalog.tables
        ],
        "links": [
            {
                "id": link.link_id,
                "left": str(link.left),
                "right": str(link.right),
                "left_class": link.left_class.value,
                "right_class": link.right_class.value,
                "mandatory": link.mandatory,
            }
            for link in catalog.links
        ],
    }


def save_catalog(catalog: Catalog, destination: "str | Path | IO[str]") -> dict[str, Any]:
    """Write a catalog as JSON and return the document that was written."""
    document = catalog_to_document(catalog)
    text = json.dumps(document, indent=2) + "\n"
    if isinstance(destination, (str, Path)):
        Path(destination).write_text(text, encoding="utf-8")
    else:
        destination.write(text)
    return document


def _expect(condition: bool, message: str, position: str) -> None:
    if not condition:
        raise MalformedMetadata(message, position=position)


def _parse_class(value: Any, position: str) -> ColumnClass | None:
    if value is None:
        return None
    _expect(isinstance(value, str), "class must be a string or null", position)
    try:
        return ColumnClass(value)
    except ValueError:
        raise MalformedMetadata(f"unknown class {value!r}", position=position) from None


def _parse_ref(value: Any, position: str) -> ColumnRef:
    _expect(isinstance(value, str), "endpoint must be a string", position)
    try:
        return ColumnRef.parse(value)
    except ValueError as exc:
        raise MalformedMetadata(str(exc), position=position) from None


def catalog_from_document(document: Any) -> Catalog:
    """Validate a metadata document and build a catalog from it.

    Raises :class:`MalformedMetadata` with a position pointer on the first
    structural problem found.
    """
    _expect(isinstance(document, dict), "document must be an object", "$")
    version = document.get("version")
    _expect(
        version == METADATA_VERSION,
        f"unsupported metadata version {version!r}",
        "$.version",
    )
    raw_tables = document.get("tables", [])
    _expect(isinstance(raw_tables, list), "tables must be a list", "$.tables")
    tables: list[TableSchema] = []
    table_names: set[str] = set()
    for ti, raw in enumerate(raw_tables):
        pos = f"$.tables[{ti}]"
        _expect(isinstance(raw, dict), "table must be an object", pos)
        name = raw.get("name")
        _expect(isinstance(name, str) and bool(name), "table name must be a non-empty string", f"{pos}.name")
        _expect(name not in table_names, f"duplicate table {name!r}", f"{pos}.name")
        table_names.add(name)
        raw_cols = raw.get("columns", [])
        _expect(isinstance(raw_cols, list), "columns must be a list", f"{pos}.columns")
        columns: list[ColumnSpec] = []
        col_names: set[str] = set()
        for ci, raw_col in enumerate(raw_cols):
            cpos = f"{pos}.columns[{ci}]"
            _expect(isinstance(raw_col, dict), "column must be an object", cpos)
            cname = raw_col.get("name")
            _expect(
                isinstance(cname, str) and bool(cname),
                "column name must be a non-empty string",
                f"{cpos}.name",
            )
            _expect(cname not in col_names, f"duplicate column {cname!r}", f"{cpos}.name")
            col_names.add(cname)
            columns.append(ColumnSpec(cname, _parse_class(raw_col.get("class"), f"{cpos}.class")))
        tables.append(TableSchema(name, tuple(columns)))

    raw_links = document.get("links", [])
    _expect(isinstance(raw_links, list), "links must be a list", "$.links")
    links: list[Link] = []
    link_ids: set[str] = set()
    columns_by_table = {table.name: set(table.column_names()) for table in tables}
    for li, raw in enumerate(raw_links):
        pos = f"$.links[{li}]"
        _expect(isinstance(raw, dict), "link must be an object", pos)
        link_id = raw.get("id")
        _expect(isinstance(link_id, str) and bool(link_id), "link id must be a non-empty string", f"{pos}.id")
        _expect(link_id not in link_ids, f"duplicate link id {link_id!r}", f"{pos}.id")
        link_ids.add(link_id)
        left = _parse_ref(raw.get("left"), f"{pos}.left")
        right = _parse_ref(raw.get("right"), f"{pos}.right")
        for ref, key in ((left, "left"), (right, "right")):
            _expect(
                ref.table in columns_by_table,
                f"link endpoint references missing table {ref.table!r}",
                f"{pos}.{key}",
            )
            _expect(
                ref.column in columns_by_table[ref.table],
                f"link endpoint references missing column {ref}",
                f"{pos}.{key}",
            )
        _expect(left.table != right.table, "link endpoints must be in different tables", pos)
        left_class = _parse_class(raw.get("left_class"), f"{pos}.left_class")
        right_class = _parse_class(raw.get("right_class"), f"{pos}.right_class")
        _expect(left_class is not None, "left_class is required", f"{pos}.left_class")
        _expect(right_class is not None, "right_class is required", f"{pos}.right_class")
        mandatory = raw.get("mandatory", False)
        _expect(isinstance(mandatory, bool), "mandatory must be a boolean", f"{pos}.mandatory")
        links.append(Link(link_id, left, right, left_class, right_class, mandatory))
    return Catalog(tuple(tables), tuple(links))


def load_catalog(source: "str | Path | IO[str]") -> Catalog:
    """Load a catalog from a JSON metadata file or file object."""
    if isinstance(source, (str, Path)):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except FileNotFoundError:
            raise MalformedMetadata(f"metadata file not found: {source}") from None
    else:
        text = source.read()
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedMetadata(
            f"invalid JSON: {exc.msg}", position=f"line {exc.lineno}, column {exc.colno}"
        ) from None
    return catalog_from_document(document)
