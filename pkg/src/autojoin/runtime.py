"""Shared runtime state for the CLI and the HTTP service.

A workspace bundles the ingested dataset, the catalog, the join graph built
from it, a path cache, and the table alias map, so both front ends resolve
names and plan against the same objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import Catalog, ColumnRef, load_catalog
from .engine import Dataset, ingest_csv_dir
from .errors import MalformedMetadata, UnknownTable
from .graph import JoinGraph, build_graph
from .paths import DEFAULT_MAX_DEPTH, PathCache
from .planner import DEFAULT_COMBINATION_CAP


def load_aliases(path: "str | Path") -> dict[str, str]:
    """Load an alias map (``{"ORS": "order_details", ...}``) from JSON."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedMetadata(f"invalid alias file: {exc.msg}") from None
    if not isinstance(raw, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in raw.items()
    ):
        raise MalformedMetadata("alias file must map alias strings to table names")
    return raw


@dataclass
class Workspace:
    """Everything a front end needs to answer planning and query requests."""

    dataset: Dataset | None = None
    catalog: Catalog | None = None
    graph: JoinGraph | None = None
    cache: PathCache = field(default_factory=PathCache)
    aliases: dict[str, str] = field(default_factory=dict)
    max_depth: int = DEFAULT_MAX_DEPTH
    combination_cap: int = DEFAULT_COMBINATION_CAP

    @classmethod
    def load(
        cls,
        data_dir: "str | Path | None" = None,
        metadata_path: "str | Path | None" = None,
        aliases_path: "str | Path | None" = None,
        max_depth: int = DEFAULT_MAX_DEPTH,
        combination_cap: int = DEFAULT_COMBINATION_CAP,
    ) -> "Workspace":
        dataset = ingest_csv_dir(data_dir) if data_dir is not None else None
        catalog = load_catalog(metadata_path) if metadata_path is not None else None
        graph = build_graph(catalog) if catalog is not None else None
        aliases: dict[str, str] = {}
        if aliases_path is None and metadata_path is not None:
            candidate = Path(metadata_path).parent / "aliases.json"
            if candidate.is_file():
                aliases = load_aliases(candidate)
        elif aliases_path is not None:
            aliases = load_aliases(aliases_path)
        return cls(
            dataset=dataset,
            catalog=catalog,
            graph=graph,
            aliases=aliases,
            max_depth=max_depth,
            combination_cap=combination_cap,
        )

    def rebuild_graph(self) -> None:
        self.graph = build_graph(self.catalog) if self.catalog is not None else None

    def resolve_table(self, name: str) -> str:
        """Resolve a table name or alias to a catalog table name."""
        known = self._known_tables()
        if name in known:
            return name
        if name in self.aliases and self.aliases[name] in known:
            return self.aliases[name]
        raise UnknownTable(f"unknown table {name!r}")

    def resolve_column(self, text: "str | ColumnRef") -> ColumnRef:
        ref = ColumnRef.parse(text) if isinstance(text, str) else text
        return ColumnRef(self.resolve_table(ref.table), ref.column)

    def alias_of(self, table: str) -> "str | None":
        for alias, name in self.aliases.items():
            if name == table:
                return alias
        return None

    def _known_tables(self) -> tuple[str, ...]:
        if self.catalog is not None:
            return self.catalog.table_names
        if self.dataset is not None:
            return self.dataset.table_names
        return ()
