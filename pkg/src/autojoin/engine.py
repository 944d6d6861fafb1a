"""Reference data engine: CSV ingestion into an in-memory SQLite store.

The store is read-only once loaded. Column types are inferred
conservatively: a column becomes INTEGER only when every non-null value is
a canonical integer (no leading zeros, so identifiers like ``01581`` stay
text), REAL when every value parses as a plain number, TEXT otherwise.
"""

from __future__ import annotations

import csv
import re
import sqlite3
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

from .catalog import Catalog, ColumnRef, ColumnSpec, TableSchema
from .errors import (
    BackendUnavailable,
    DuplicateHeader,
    EmptyDirectory,
    RaggedRow,
    SqlError,
    UnknownColumn,
    UnknownTable,
    WriteRejected,
)

_CANONICAL_INT = re.compile(r"-?(0|[1-9][0-9]*)$")
_NUMBER = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_DIGITS_ONLY = re.compile(r"[+-]?[0-9]+$")


def _is_numeric(value: str) -> bool:
    """True when converting to float cannot corrupt the value.

    Digit-only strings with leading zeros (``007``, ``01581``) are
    identifiers, not numbers; they stay out of the REAL bucket.
    """
    if not _NUMBER.fullmatch(value):
        return False
    if _DIGITS_ONLY.fullmatch(value) and not _CANONICAL_INT.fullmatch(value):
        return False
    return True


@dataclass(frozen=True)
class QueryResult:
    """Rows returned by a query, with their column labels."""

    columns: tuple[str, ...]
    rows: tuple[tuple[Any, ...], ...]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "columns": list(self.columns),
            "rows": [list(row) for row in self.rows],
            "row_count": len(self.rows),
        }


@dataclass(frozen=True)
class DeclaredForeignKey:
    """A single-table foreign-key declaration read from backend metadata."""

    child_table: str
    child_columns: tuple[str, ...]
    parent_table: str
    parent_columns: tuple[str, ...]
    child_not_null: bool


class SqliteBackend:
    """Thin driver over a SQLite connection.

    Queries are serialized behind a lock so one backend can be shared by
    concurrent readers.
    """

    def __init__(self, connection: sqlite3.Connection) -> None:
        self._connection = connection
        self._lock = threading.Lock()

    @classmethod
    def in_memory(cls) -> "SqliteBackend":
        return cls(sqlite3.connect(":memory:", check_same_thread=False))

    @classmethod
    def from_file(cls, path: "str | Path") -> "SqliteBackend":
        path = Path(path)
        if not path.is_file():
            raise BackendUnavailable(f"no database at {path}")
        try:
            connection = sqlite3.connect(path, check_same_thread=False)
            connection.execute("SELECT 1")
        except sqlite3.Error as exc:
            raise BackendUnavailable(f"cannot open {path}: {exc}") from None
        return cls(connection)

    def set_read_only(self) -> None:
        self._connection.execute("PRAGMA query_only = ON")

    def load_table(self, name: str, columns: Sequence[str], types: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
        quoted = [f'"{col}" {typ}' for col, typ in zip(columns, types)]
        ddl = f'CREATE TABLE "{name}" ({", ".join(quoted)})'
        placeholders = ", ".join("?" for _ in columns)
        insert = f'INSERT INTO "{name}" VALUES ({placeholders})'
        with self._lock:
            self._connection.execute(ddl)
            self._connection.executemany(insert, rows)
            self._connection.commit()

    def execute(self, sql: str, params: Sequence[Any] = ()) -> QueryResult:
        with self._lock:
            try:
                cursor = self._connection.execute(sql, tuple(params))
                rows = cursor.fetchall()
            except sqlite3.OperationalError as exc:
                if "readonly" in str(exc) or "query_only" in str(exc):
                    raise WriteRejected("the dataset is read-only") from None
                raise SqlError(str(exc)) from None
            except sqlite3.Error as exc:
                raise SqlError(str(exc)) from None
            columns = tuple(d[0] for d in cursor.description) if cursor.description else ()
            return QueryResult(columns=columns, rows=tuple(tuple(row) for row in rows))

    def list_tables(self) -> tuple[str, ...]:
        result = self.execute(
            "SELECT name FROM sqlite_master WHERE type = 'table' ORDER BY name"
        )
        return tuple(row[0] for row in result.rows)

    def list_columns(self, table: str) -> tuple[str, ...]:
        if table not in self.list_tables():
            raise UnknownTable(f"unknown table {table!r}")
        result = self.execute(f'PRAGMA table_info("{table}")')
        return tuple(row[1] for row in result.rows)

    def scan_column(self, table: str, column: str) -> tuple[Any, ...]:
        """Every value of one column in storage order, nulls included."""
        if column not in self.list_columns(table):
            raise UnknownColumn(f"unknown column {table}.{column}")
        result = self.execute(f'SELECT "{column}" FROM "{table}" ORDER BY rowid')
        return tuple(row[0] for row in result.rows)

    def declared_foreign_keys(self) -> tuple[DeclaredForeignKey, ...]:
        """Foreign keys declared in the backend schema, in declaration order."""
        declared: list[DeclaredForeignKey] = []
        for table in self.list_tables():
            fk_rows = self.execute(f'PRAGMA foreign_key_list("{table}")').rows
            not_null = {
                row[1]: bool(row[3])
                for row in self.execute(f'PRAGMA table_info("{table}")').rows
            }
            by_id: dict[int, list[tuple[int, str, str, str]]] = {}
            for row in fk_rows:
                fk_id, seq, parent, child_col, parent_col = row[0], row[1], row[2], row[3], row[4]
                by_id.setdefault(fk_id, []).append((seq, parent, child_col, parent_col))
            for fk_id in sorted(by_id):
                parts = sorted(by_id[fk_id])
                parent = parts[0][1]
                child_cols = tuple(part[2] for part in parts)
                parent_cols = tuple(part[3] for part in parts)
                declared.append(
                    DeclaredForeignKey(
                        child_table=table,
                        child_columns=child_cols,
                        parent_table=parent,
                        parent_columns=parent_cols,
                        child_not_null=all(not_null.get(col, False) for col in child_cols),
                    )
                )
        return tuple(declared)


@dataclass(frozen=True)
class TableInfo:
    """Shape of one ingested table."""

    name: str
    columns: tuple[str, ...]
    column_types: tuple[str, ...]
    row_count: int


def _infer_type(values: Iterable[str]) -> str:
    saw_value = False
    all_int = True
    all_number = True
    for value in values:
        if value is None:
            continue
        saw_value = True
        if all_int and not _CANONICAL_INT.fullmatch(value):
            all_int = False
        if all_number and not _is_numeric(value):
            all_number = False
        if not all_int and not all_number:
            return "TEXT"
    if not saw_value:
        return "TEXT"
    if all_int:
        return "INTEGER"
    if all_number:
        return "REAL"
    return "TEXT"


def _convert(value: "str | None", column_type: str) -> Any:
    if value is None:
        return None
    if column_type == "INTEGER":
        return int(value)
    if column_type == "REAL":
        return float(value)
    return value


def _read_csv(path: Path) -> tuple[tuple[str, ...], list[list["str | None"]]]:
    with path.open(newline="", encoding="utf-8-sig") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise RaggedRow(f"{path.name}: file has no header row") from None
        seen: set[str] = set()
        for name in header:
            if not name:
                raise DuplicateHeader(f"{path.name}: empty column name in header")
            if name in seen:
                raise DuplicateHeader(f"{path.name}: column {name!r} appears twice")
            seen.add(name)
        rows: list[list[str | None]] = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise RaggedRow(
                    f"{path.name}: line {reader.line_num} has {len(row)} fields, expected {len(header)}"
                )
            rows.append([value if value != "" else None for value in row])
    return tuple(header), rows


class Dataset:
    """A read-only collection of tables ingested from a CSV directory."""

    def __init__(self, root: Path, backend: SqliteBackend, tables: dict[str, TableInfo]) -> None:
        self.root = root
        self.backend = backend
        self.tables = tables

    @property
    def table_names(self) -> tuple[str, ...]:
        return tuple(self.tables)

    def row_count(self, table: str) -> int:
        if table not in self.tables:
            raise UnknownTable(f"unknown table {table!r}")
        return self.tables[table].row_count

    def execute(self, sql: str, params: Sequence[Any] = ()) -> QueryResult:
        return self.backend.execute(sql, params)

    def scan_column(self, ref: "ColumnRef | str") -> tuple[Any, ...]:
        if isinstance(ref, str):
            ref = ColumnRef.parse(ref)
        if ref.table not in self.tables:
            raise UnknownTable(f"unknown table {ref.table!r}")
        if ref.column not in self.tables[ref.table].columns:
            raise UnknownColumn(f"unknown column {ref}")
        return self.backend.scan_column(ref.table, ref.column)

    def catalog_skeleton(self) -> Catalog:
        """A catalog with every ingested table and column, but no classes or links."""
        return Catalog(
            tables=tuple(
                TableSchema(
                    name=info.name,
                    columns=tuple(ColumnSpec(col) for col in info.columns),
                )
                for info in self.tables.values()
            )
        )


def ingest_csv_dir(path: "str | Path", backend: SqliteBackend | None = None) -> Dataset:
    """Load every ``*.csv`` file under ``path`` into a fresh read-only store.

    Table names are file stems; files load in sorted name order. Empty CSV
    fields become nulls.
    """
    root = Path(path)
    if not root.is_dir():
        raise EmptyDirectory(f"not a directory: {root}")
    files = sorted(root.glob("*.csv"))
    if not files:
        raise EmptyDirectory(f"no CSV files in {root}")
    if backend is None:
        backend = SqliteBackend.in_memory()
    tables: dict[str, TableInfo] = {}
    for file in files:
        header, rows = _read_csv(file)
        types = tuple(
            _infer_type(row[i] for row in rows) for i in range(len(header))
        )
        converted = [
            tuple(_convert(row[i], types[i]) for i in range(len(header)))
            for row in rows
        ]
        backend.load_table(file.stem, header, types, converted)
        tables[file.stem] = TableInfo(
            name=file.stem,
            columns=header,
            column_types=types,
            row_count=len(rows),
        )
    backend.set_read_only()
    return Dataset(root=root, backend=backend, tables=tables)
