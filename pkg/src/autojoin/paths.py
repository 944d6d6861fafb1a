"""Simple-path enumeration and minimal path-set reduction over a join graph.

A path set between two tables keeps only paths whose table sets are not
strict supersets of another path's table set; ties on equal sets are kept.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any, Iterable, Iterator, NamedTuple

from .errors import MixedEndpoints, UnknownTable
from .graph import DirectedEdge, JoinGraph

DEFAULT_MAX_DEPTH = 10


@dataclass(frozen=True)
class Path:
    """A simple directed path; ``steps`` is empty when ``src == dst``."""

    src: str
    dst: str
    steps: tuple[DirectedEdge, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.steps:
            if self.src != self.dst:
                raise ValueError("a path without steps must start and end at the same table")
            return
        if self.steps[0].src != self.src or self.steps[-1].dst != self.dst:
            raise ValueError("path steps do not match endpoints")
        seen = {self.src}
        previous = self.src
        for edge in self.steps:
            if edge.src != previous:
                raise ValueError("path steps do not chain")
            if edge.dst in seen:
                raise ValueError("path revisits a table")
            seen.add(edge.dst)
            previous = edge.dst

    @cached_property
    def node_set(self) -> frozenset[str]:
        return frozenset((self.src,)) | frozenset(edge.dst for edge in self.steps)

    @property
    def link_ids(self) -> tuple[str, ...]:
        return tuple(edge.link_id for edge in self.steps)

    def table_chain(self) -> tuple[str, ...]:
        return (self.src,) + tuple(edge.dst for edge in self.steps)

    @property
    def is_empty(self) -> bool:
        return not self.steps

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class SimplePaths:
    """Enumeration result; ``truncated`` reports a possibly incomplete listing."""

    paths: tuple[Path, ...]
    truncated: bool = False

    def __iter__(self) -> Iterator[Path]:
        return iter(self.paths)

    def __len__(self) -> int:
        return len(self.paths)

    def __getitem__(self, index: int) -> Path:
        return self.paths[index]

    def __bool__(self) -> bool:
        return bool(self.paths)


@dataclass(frozen=True)
class PathSet:
    """Reduced set of minimal paths between one pair of tables."""

    src: str
    dst: str
    paths: tuple[Path, ...]
    truncated: bool = False

    def __iter__(self) -> Iterator[Path]:
        return iter(self.paths)

    def __len__(self) -> int:
        return len(self.paths)

    def __bool__(self) -> bool:
        return bool(self.paths)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "src": self.src,
            "dst": self.dst,
            "truncated": self.truncated,
            "paths": [list(path.table_chain()) for path in self.paths],
        }


class CacheStats(NamedTuple):
    hits: int
    misses: int
    size: int


class PathCache:
    """Thread-safe memo of reduced path sets.

    Keys include the graph content hash, so a rebuilt or edited graph never
    sees stale entries. Concurrent writers race benignly: values for a key
    are identical, so last-write-wins is safe. Hit and miss counters are
    global across all users of the cache instance.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str, str, int], PathSet] = {}
        self._hits = 0
        self._misses = 0

    def get(self, key: tuple[str, str, str, int]) -> PathSet | None:
        with self._lock:
            entry = self._entries.get(key)
            if entry is None:
                self._misses += 1
            else:
                self._hits += 1
            return entry

    def put(self, key: tuple[str, str, str, int], value: PathSet) -> None:
        with self._lock:
            self._entries[key] = value

    def stats(self) -> CacheStats:
        with self._lock:
            return CacheStats(self._hits, self._misses, len(self._entries))

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()
            self._hits = 0
            self._misses = 0

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


def _require_node(graph: JoinGraph, name: str) -> None:
    if not graph.has_node(name):
        raise UnknownTable(f"unknown table {name!r}")


def bfs_distances(graph: JoinGraph, src: str) -> dict[str, int]:
    """Shortest hop counts from ``src`` to every reachable table."""
    _require_node(graph, src)
    distances = {src: 0}
    queue = deque([src])
    while queue:
        node = queue.popleft()
        for edge in graph.edges_from(node):
            if edge.dst not in distances:
                distances[edge.dst] = distances[node] + 1
                queue.append(edge.dst)
    return distances


def reachable(graph: JoinGraph, src: str, dst: str) -> bool:
    """Whether any directed path leads from ``src`` to ``dst``."""
    _require_node(graph, dst)
    return dst in bfs_distances(graph, src)


def all_simple_paths(
    graph: JoinGraph, src: str, dst: str, max_depth: int = DEFAULT_MAX_DEPTH
) -> SimplePaths:
    """Enumerate every simple directed path from ``src`` to ``dst``.

    Paths longer than ``max_depth`` edges are pruned; if any admissible
    extension was pruned the result is flagged ``truncated``.
    """
    _require_node(graph, src)
    _require_node(graph, dst)
    if src == dst:
        raise ValueError("src and dst must differ; a table is trivially joined to itself")
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")

    paths: list[Path] = []
    truncated = False
    path_edges: list[DirectedEdge] = []
    visited = {src}
    stack = [iter(graph.edges_from(src))]
    while stack:
        edge = next(stack[-1], None)
        if edge is None:
            stack.pop()
            if path_edges:
                visited.discard(path_edges.pop().dst)
            continue
        if edge.dst in visited:
            continue
        if len(path_edges) + 1 > max_depth:
            truncated = True
            continue
        if edge.dst == dst:
            paths.append(Path(src, dst, tuple(path_edges) + (edge,)))
            continue
        path_edges.append(edge)
        visited.add(edge.dst)
        stack.append(iter(graph.edges_from(edge.dst)))
    return SimplePaths(tuple(paths), truncated)


def _path_sort_key(path: Path) -> tuple[int, tuple[str, ...]]:
    return (len(path.node_set), path.link_ids)


def reduce_paths(
    paths: Iterable[Path], *, src: str | None = None, dst: str | None = None
) -> PathSet:
    """Keep only paths whose table sets are minimal.

    Paths are ordered by ascending table-set size (ties broken by link id
    sequence); a path is dropped when its table set is a strict superset of
    an already retained one. Equal table sets are all retained.
    """
    materialized = list(paths)
    if materialized:
        first = materialized[0]
        for path in materialized:
            if path.src != first.src or path.dst != first.dst:
                raise MixedEndpoints(
                    f"cannot reduce paths with mixed endpoints: "
                    f"{path.src}->{path.dst} vs {first.src}->{first.dst}"
                )
        if (src is not None and src != first.src) or (dst is not None and dst != first.dst):
            raise MixedEndpoints("given endpoints do not match the paths")
        src, dst = first.src, first.dst
    elif src is None or dst is None:
        raise ValueError("src and dst are required to reduce an empty path collection")

    retained: list[Path] = []
    for path in sorted(materialized, key=_path_sort_key):
        if any(path.node_set > kept.node_set for kept in retained):
            continue
        retained.append(path)
    return PathSet(src, dst, tuple(retained))


def paths_between(
    graph: JoinGraph,
    src: str,
    dst: str,
    max_depth: int = DEFAULT_MAX_DEPTH,
    cache: PathCache | None = None,
) -> PathSet:
    """Reduced set of minimal join paths from ``src`` to ``dst``.

    A table is trivially joined to itself, so ``src == dst`` yields a single
    empty path. Reachability is checked first so that unreachable pairs skip
    enumeration entirely.
    """
    _require_node(graph, src)
    _require_node(graph, dst)
    key = (graph.content_hash, src, dst, max_depth)
    if cache is not None:
        cached = cache.get(key)
        if cached is not None:
            return cached
    if src == dst:
        result = PathSet(src, dst, (Path(src, dst),))
    elif dst not in bfs_distances(graph, src):
        result = PathSet(src, dst, ())
    else:
        enumerated = all_simple_paths(graph, src, dst, max_depth)
        result = replace(reduce_paths(enumerated.paths, src=src, dst=dst), truncated=enumerated.truncated)
    if cache is not None:
        cache.put(key, result)
    return result
