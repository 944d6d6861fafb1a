"""Join-sequence synthesis: find minimal ways to join a set of target tables.

Every table is tried as a candidate origin; per-target path sets are
combined, each combination is flattened into one join sequence, and the
surviving sequences are the ones whose table sets are minimal.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Sequence

from .catalog import ColumnRef
from .errors import EmptyTargets, MixedOrigins, PlanTimeout, UnknownTable
from .graph import DirectedEdge, JoinGraph
from .paths import DEFAULT_MAX_DEPTH, PathCache, bfs_distances, paths_between

DEFAULT_COMBINATION_CAP = 10_000

_DEADLINE_CHECK_EVERY = 256


@dataclass(frozen=True)
class TargetSet:
    """Tables a plan must cover, with optional per-table column selections."""

    tables: tuple[str, ...]
    columns: tuple[ColumnRef, ...] = ()

    @classmethod
    def coerce(cls, value: "TargetSet | Iterable[str]") -> "TargetSet":
        if isinstance(value, TargetSet):
            return value
        return cls(tuple(dict.fromkeys(value)))

    @classmethod
    def from_columns(cls, columns: Iterable[ColumnRef]) -> "TargetSet":
        columns = tuple(columns)
        return cls(tuple(dict.fromkeys(ref.table for ref in columns)), columns)

    def __iter__(self):
        return iter(self.tables)

    def __len__(self) -> int:
        return len(self.tables)

    def __contains__(self, table: str) -> bool:
        return table in self.tables


@dataclass(frozen=True)
class JoinSequence:
    """An ordered, executable join starting at ``origin``.

    Each step's source table is guaranteed to be already joined by the time
    the step applies, so translating steps in order yields a valid query.
    """

    origin: str
    steps: tuple[DirectedEdge, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        joined = {self.origin}
        seen_steps: set[DirectedEdge] = set()
        for step in self.steps:
            if step in seen_steps:
                raise ValueError(f"duplicate step {step.src}->{step.dst} in join sequence")
            seen_steps.add(step)
            if step.src not in joined:
                raise ValueError(
                    f"step joins from {step.src!r} before that table is reached"
                )
            joined.add(step.dst)

    @cached_property
    def table_set(self) -> frozenset[str]:
        return frozenset((self.origin,)) | frozenset(
            table for step in self.steps for table in (step.src, step.dst)
        )

    @property
    def link_ids(self) -> tuple[str, ...]:
        return tuple(step.link_id for step in self.steps)

    def table_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple((step.src, step.dst) for step in self.steps)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "origin": self.origin,
            "steps": [
                {
                    "from": str(step.src_ref),
                    "to": str(step.dst_ref),
                    "link_id": step.link_id,
                }
                for step in self.steps
            ],
            "tables": sorted(self.table_set),
        }


@dataclass(frozen=True)
class PlanDiagnostics:
    """How a plan was produced, for observability and cache verification."""

    origins_considered: tuple[str, ...]
    origins_rejected: tuple[str, ...]
    origins_accepted: tuple[str, ...]
    cache_hits: int
    cache_misses: int
    combination_cap_exceeded: tuple[str, ...] = ()
    truncated: bool = False

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "origins_considered": list(self.origins_considered),
            "origins_rejected": list(self.origins_rejected),
            "origins_accepted": list(self.origins_accepted),
            "cache_hits": self.cache_hits,
            "cache_misses": self.cache_misses,
            "combination_cap_exceeded": list(self.combination_cap_exceeded),
            "truncated": self.truncated,
        }


@dataclass(frozen=True)
class PlanResult:
    """Surviving join sequences for a target set, plus diagnostics."""

    targets: tuple[str, ...]
    sequences: tuple[JoinSequence, ...]
    diagnostics: PlanDiagnostics

    @property
    def feasible(self) -> bool:
        return bool(self.sequences)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "targets": list(self.targets),
            "sequences": [sequence.to_json_dict() for sequence in self.sequences],
            "diagnostics": self.diagnostics.to_json_dict(),
        }


def flatten_combination(combination: Sequence) -> tuple[DirectedEdge, ...]:
    """Concatenate one path per target into a single step list.

    Steps already contributed by an earlier path are dropped; the first
    occurrence keeps its position. All paths must share the same origin.
    """
    paths = tuple(combination)
    if not paths:
        raise ValueError("cannot flatten an empty combination")
    origin = paths[0].src
    for path in paths:
        if path.src != origin:
            raise MixedOrigins(
                f"combination mixes origins {origin!r} and {path.src!r}"
            )
    steps: list[DirectedEdge] = []
    seen: set[DirectedEdge] = set()
    for path in paths:
        for step in path.steps:
            if step not in seen:
                seen.add(step)
                steps.append(step)
    return tuple(steps)


def _sequence_sort_key(sequence: JoinSequence) -> tuple[int, str, tuple[str, ...]]:
    return (len(sequence.table_set), sequence.origin, sequence.link_ids)


def superset_filter(sequences: Iterable[JoinSequence]) -> tuple[JoinSequence, ...]:
    """Drop sequences whose table sets strictly contain a retained one.

    Sequences are considered in ascending table-set size; equal table sets
    are all retained.
    """
    retained: list[JoinSequence] = []
    for sequence in sorted(sequences, key=_sequence_sort_key):
        if any(sequence.table_set > kept.table_set for kept in retained):
            continue
        retained.append(sequence)
    return tuple(retained)


def _check_deadline(deadline: float | None, diagnostics: dict[str, Any]) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise PlanTimeout("plan exceeded its deadline", diagnostics=diagnostics)


def plan(
    graph: JoinGraph,
    targets: "TargetSet | Iterable[str]",
    *,
    max_depth: int = DEFAULT_MAX_DEPTH,
    cache: PathCache | None = None,
    combination_cap: int = DEFAULT_COMBINATION_CAP,
    deadline: float | None = None,
) -> PlanResult:
    """Synthesize all minimal join sequences covering ``targets``.

    ``deadline`` is an absolute ``time.monotonic()`` value; exceeding it
    raises :class:`PlanTimeout` carrying partial diagnostics.
    """
    target_set = TargetSet.coerce(targets)
    if not target_set.tables:
        raise EmptyTargets("at least one target table is required")
    for table in target_set.tables:
        if not graph.has_node(table):
            raise UnknownTable(f"unknown table {table!r}")

    stats_before = cache.stats() if cache is not None else None
    considered: list[str] = []
    rejected: list[str] = []
    accepted: list[str] = []
    cap_exceeded: list[str] = []
    truncated = False
    sequences: list[JoinSequence] = []
    seen: set[tuple[str, tuple[DirectedEdge, ...]]] = set()

    def partial_diagnostics() -> dict[str, Any]:
        return {
            "origins_considered": list(considered),
            "origins_rejected": list(rejected),
            "origins_accepted": list(accepted),
        }

    for origin in graph.nodes:
        _check_deadline(deadline, partial_diagnostics())
        considered.append(origin)
        distances = bfs_distances(graph, origin)
        if any(
            table != origin and distances.get(table, max_depth + 1) > max_depth
            for table in target_set.tables
        ):
            rejected.append(origin)
            continue
        path_sets = [
            paths_between(graph, origin, table, max_depth, cache)
            for table in target_set.tables
        ]
        if any(not path_set for path_set in path_sets):
            rejected.append(origin)
            continue
        accepted.append(origin)
        truncated = truncated or any(path_set.truncated for path_set in path_sets)
        count = 0
        for combination in itertools.product(*(ps.paths for ps in path_sets)):
            if count >= combination_cap:
                cap_exceeded.append(origin)
                break
            count += 1
            if count % _DEADLINE_CHECK_EVERY == 0:
                _check_deadline(deadline, partial_diagnostics())
            steps = flatten_combination(combination)
            key = (origin, steps)
            if key in seen:
                continue
            seen.add(key)
            sequences.append(JoinSequence(origin, steps))

    if cache is not None and stats_before is not None:
        stats_after = cache.stats()
        cache_hits = stats_after.hits - stats_before.hits
        cache_misses = stats_after.misses - stats_before.misses
    else:
        cache_hits = 0
        cache_misses = 0

    diagnostics = PlanDiagnostics(
        origins_considered=tuple(considered),
        origins_rejected=tuple(rejected),
        origins_accepted=tuple(accepted),
        cache_hits=cache_hits,
        cache_misses=cache_misses,
        combination_cap_exceeded=tuple(cap_exceeded),
        truncated=truncated,
    )
    return PlanResult(
        targets=target_set.tables,
        sequences=superset_filter(sequences),
        diagnostics=diagnostics,
    )


def joinable(
    graph: JoinGraph,
    targets: "TargetSet | Iterable[str]",
    *,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> bool:
    """Whether some origin reaches every target within ``max_depth`` hops.

    Equivalent to ``plan(...)`` returning at least one sequence, but without
    enumerating any paths.
    """
    target_set = TargetSet.coerce(targets)
    if not target_set.tables:
        raise EmptyTargets("at least one target table is required")
    for table in target_set.tables:
        if not graph.has_node(table):
            raise UnknownTable(f"unknown table {table!r}")
    for origin in graph.nodes:
        distances = bfs_distances(graph, origin)
        if all(
            distances.get(table, max_depth + 1) <= max_depth
            for table in target_set.tables
        ):
            return True
    return False
