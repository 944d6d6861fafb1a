"""Directed join graph derived from catalog links.

Connection rules: a many-to-one link adds a single edge from the many side
to the one side; a one-to-one link adds one edge in each direction; a
many-to-many link adds no edge. One-to-many links are normalized to
many-to-one by swapping endpoints before the rules apply.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping

from .catalog import Catalog, ColumnRef, Link, RelationshipKind
from .errors import UnknownLinkSelected


@dataclass(frozen=True)
class DirectedEdge:
    """One joinable hop: ``src.src_column`` equi-joins onto ``dst.dst_column``."""

    src: str
    dst: str
    src_column: str
    dst_column: str
    link_id: str
    mandatory: bool = False

    @property
    def src_ref(self) -> ColumnRef:
        return ColumnRef(self.src, self.src_column)

    @property
    def dst_ref(self) -> ColumnRef:
        return ColumnRef(self.dst, self.dst_column)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "from": self.src,
            "to": self.dst,
            "link_id": self.link_id,
            "from_column": self.src_column,
            "to_column": self.dst_column,
            "mandatory": self.mandatory,
        }


@dataclass(frozen=True)
class LinkSelection:
    """Per-table-pair choice among parallel links.

    Pairs that appear in ``choices`` are restricted to the chosen link ids;
    every other pair keeps all of its links.
    """

    choices: Mapping[frozenset[str], frozenset[str]]

    @classmethod
    def all_links(cls) -> "LinkSelection":
        return cls({})

    @classmethod
    def only(cls, catalog: Catalog, link_ids: Iterable[str]) -> "LinkSelection":
        """Restrict each mentioned table pair to the given link ids."""
        by_id = {link.link_id: link for link in catalog.links}
        choices: dict[frozenset[str], set[str]] = {}
        for link_id in link_ids:
            link = by_id.get(link_id)
            if link is None:
                raise UnknownLinkSelected(f"unknown link id {link_id!r}")
            choices.setdefault(link.table_pair, set()).add(link_id)
        return cls({pair: frozenset(ids) for pair, ids in choices.items()})

    def allows(self, link: Link) -> bool:
        chosen = self.choices.get(link.table_pair)
        return chosen is None or link.link_id in chosen

    def validate(self, catalog: Catalog) -> None:
        by_id = {link.link_id: link for link in catalog.links}
        for pair, ids in self.choices.items():
            for link_id in ids:
                link = by_id.get(link_id)
                if link is None:
                    raise UnknownLinkSelected(f"unknown link id {link_id!r}")
                if link.table_pair != pair:
                    raise UnknownLinkSelected(
                        f"link {link_id!r} does not connect {set(pair)!r}"
                    )


@dataclass(frozen=True)
class JoinGraph:
    """Immutable directed multigraph over catalog tables."""

    nodes: tuple[str, ...]
    edges: tuple[DirectedEdge, ...]

    def has_node(self, name: str) -> bool:
        return name in self._adjacency

    @cached_property
    def _adjacency(self) -> dict[str, tuple[DirectedEdge, ...]]:
        adjacency: dict[str, list[DirectedEdge]] = {node: [] for node in self.nodes}
        for edge in self.edges:
            adjacency[edge.src].append(edge)
        return {node: tuple(out) for node, out in adjacency.items()}

    def edges_from(self, node: str) -> tuple[DirectedEdge, ...]:
        return self._adjacency[node]

    def out_degree(self, node: str) -> int:
        return len(self._adjacency[node])

    def in_degree(self, node: str) -> int:
        return sum(1 for edge in self.edges if edge.dst == node)

    @cached_property
    def content_hash(self) -> str:
        """Hash of the graph content, used as a cache key component."""
        payload = json.dumps(
            {
                "nodes": list(self.nodes),
                "edges": [edge.to_json_dict() for edge in self.edges],
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "nodes": list(self.nodes),
            "edges": [edge.to_json_dict() for edge in self.edges],
        }

    def to_dot(self) -> str:
        """Render the graph in DOT syntax for visualization."""
        lines = ["digraph joins {"]
        for node in self.nodes:
            lines.append(f'  "{node}";')
        for edge in self.edges:
            label = f"{edge.link_id}: {edge.src_column}={edge.dst_column}"
            lines.append(f'  "{edge.src}" -> "{edge.dst}" [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)


def build_graph(catalog: Catalog, selection: LinkSelection | None = None) -> JoinGraph:
    """Build the directed join graph for a catalog.

    ``selection`` optionally restricts parallel links per table pair; link
    ids that do not match the catalog raise :class:`UnknownLinkSelected`.
    """
    if selection is not None:
        selection.validate(catalog)
    edges: list[DirectedEdge] = []
    for link in catalog.links:
        if selection is not None and not selection.allows(link):
            continue
        kind = link.kind
        if kind is RelationshipKind.MANY_TO_MANY:
            continue
        left, right = link.left, link.right
        if kind is RelationshipKind.ONE_TO_MANY:
            left, right = right, left
        edges.append(
            DirectedEdge(
                src=left.table,
                dst=right.table,
                src_column=left.column,
                dst_column=right.column,
                link_id=link.link_id,
                mandatory=link.mandatory,
            )
        )
        if kind is RelationshipKind.ONE_TO_ONE:
            edges.append(
                DirectedEdge(
                    src=right.table,
                    dst=left.table,
                    src_column=right.column,
                    dst_column=left.column,
                    link_id=link.link_id,
                    mandatory=link.mandatory,
                )
            )
    edges.sort(key=lambda e: (e.link_id, e.src, e.dst))
    return JoinGraph(nodes=catalog.table_names, edges=tuple(edges))


def graph_summary(graph: JoinGraph) -> dict[str, Any]:
    """Node and edge counts plus per-node degrees."""
    return {
        "node_count": len(graph.nodes),
        "edge_count": len(graph.edges),
        "degrees": {
            node: {"in": graph.in_degree(node), "out": graph.out_degree(node)}
            for node in graph.nodes
        },
    }
