"""Translate join sequences into executable, parameterized SQL.

Identifiers are quoted only when they need it, filter values always travel
as bind parameters, and clashing output column names get ``table__column``
aliases.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Sequence

from .catalog import ColumnRef
from .errors import (
    ColumnMismatch,
    ColumnOutsideSequence,
    ExecutorRequired,
)
from .planner import JoinSequence


class JoinType(Enum):
    INNER = "inner"
    LEFT = "left"


class ResolutionPolicy(Enum):
    """How to turn several surviving join sequences into queries."""

    ALL = "all"
    UNION_DISTINCT = "union_distinct"
    MOST_ROWS = "most_rows"
    PREFER_MANDATORY = "prefer_mandatory"


_BARE_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")

_RESERVED = frozenset(
    """
    all and as asc between by case cast check constraint create cross default
    delete desc distinct drop else end escape except exists foreign from full
    group having in index inner insert intersect into is join key left like
    limit natural not null offset on or order outer primary references right
    select set table then to union unique update using values when where with
    """.split()
)

COMPARISONS = ("=", "!=", "<>", "<", "<=", ">", ">=", "LIKE")


@dataclass(frozen=True)
class Dialect:
    """Identifier quoting and placeholder conventions for a SQL flavor."""

    name: str = "generic"
    quote_char: str = '"'
    quote_always: bool = False
    placeholder: str = "?"
    reserved: frozenset[str] = _RESERVED

    def quote(self, identifier: str) -> str:
        if not self.quote_always and self._is_bare(identifier):
            return identifier
        escaped = identifier.replace(self.quote_char, self.quote_char * 2)
        return f"{self.quote_char}{escaped}{self.quote_char}"

    def _is_bare(self, identifier: str) -> bool:
        return bool(_BARE_IDENTIFIER.fullmatch(identifier)) and identifier.lower() not in self.reserved

    def column(self, ref: ColumnRef) -> str:
        name = "*" if ref.column == "*" else self.quote(ref.column)
        return f"{self.quote(ref.table)}.{name}"


GENERIC = Dialect()


@dataclass(frozen=True)
class Filter:
    """One ``column <op> value`` predicate; the value becomes a parameter."""

    column: ColumnRef
    op: str
    value: Any

    def __post_init__(self) -> None:
        if self.op not in COMPARISONS:
            raise ValueError(f"unsupported comparison {self.op!r}")


@dataclass(frozen=True)
class QueryTemplate:
    """Sequence-independent parts of a query: selection, filters, join type."""

    select: tuple[ColumnRef, ...] = ()
    filters: tuple[Filter, ...] = ()
    join_type: JoinType = JoinType.INNER

    def bind(self, sequence: JoinSequence) -> "QuerySpec":
        return QuerySpec(sequence, self.select, self.filters, self.join_type)


@dataclass(frozen=True)
class QuerySpec:
    """A join sequence plus the selection and filters to apply to it."""

    sequence: JoinSequence
    select: tuple[ColumnRef, ...] = ()
    filters: tuple[Filter, ...] = ()
    join_type: JoinType = JoinType.INNER


@dataclass(frozen=True)
class SqlQuery:
    """Executable SQL with positional bind parameters."""

    sql: str
    params: tuple[Any, ...]
    sequences: tuple[JoinSequence, ...]
    chosen_row_count: int | None = None

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "sql": self.sql,
            "params": list(self.params),
            "sequences": [sequence.to_json_dict() for sequence in self.sequences],
            "chosen_row_count": self.chosen_row_count,
        }


Executor = Callable[[str, Sequence[Any]], Sequence[Sequence[Any]]]


def _validate_tables(spec: QuerySpec) -> None:
    tables = spec.sequence.table_set
    for ref in spec.select:
        if ref.table not in tables:
            raise ColumnOutsideSequence(f"{ref} is not covered by the join sequence")
    for flt in spec.filters:
        if flt.column.table not in tables:
            raise ColumnOutsideSequence(f"{flt.column} is not covered by the join sequence")
    counts: dict[str, int] = {}
    for step in spec.sequence.steps:
        counts[step.dst] = counts.get(step.dst, 0) + 1
    repeated = [table for table, count in counts.items() if count > 1 or table == spec.sequence.origin]
    if repeated:
        raise ValueError(
            f"sequence joins {', '.join(sorted(repeated))} more than once and cannot be translated"
        )


def join_clause(
    sequence: JoinSequence,
    join_type: JoinType = JoinType.INNER,
    dialect: Dialect = GENERIC,
) -> str:
    """The ``FROM ... JOIN ...`` clause for a join sequence."""
    keyword = "JOIN" if join_type is JoinType.INNER else "LEFT JOIN"
    parts = [f"FROM {dialect.quote(sequence.origin)}"]
    for step in sequence.steps:
        parts.append(
            f"{keyword} {dialect.quote(step.dst)} "
            f"ON {dialect.column(step.src_ref)} = {dialect.column(step.dst_ref)}"
        )
    return " ".join(parts)


def _select_list(select: tuple[ColumnRef, ...], dialect: Dialect) -> str:
    if not select:
        return "*"
    name_counts: dict[str, int] = {}
    for ref in select:
        if ref.column != "*":
            name_counts[ref.column] = name_counts.get(ref.column, 0) + 1
    items = []
    for ref in select:
        rendered = dialect.column(ref)
        if ref.column != "*" and name_counts[ref.column] > 1:
            rendered += f" AS {dialect.quote(f'{ref.table}__{ref.column}')}"
        items.append(rendered)
    return ", ".join(items)


def output_columns(select: tuple[ColumnRef, ...]) -> tuple[str, ...]:
    """Column labels a query's result rows will carry (explicit select only)."""
    name_counts: dict[str, int] = {}
    for ref in select:
        if ref.column != "*":
            name_counts[ref.column] = name_counts.get(ref.column, 0) + 1
    labels = []
    for ref in select:
        if ref.column != "*" and name_counts[ref.column] > 1:
            labels.append(f"{ref.table}__{ref.column}")
        else:
            labels.append(ref.column)
    return tuple(labels)


def _where_clause(filters: tuple[Filter, ...], dialect: Dialect) -> tuple[str, tuple[Any, ...]]:
    if not filters:
        return "", ()
    predicates = [
        f"{dialect.column(flt.column)} {flt.op} {dialect.placeholder}" for flt in filters
    ]
    return " WHERE " + " AND ".join(predicates), tuple(flt.value for flt in filters)


def emit_sql(spec: QuerySpec, dialect: Dialect = GENERIC) -> SqlQuery:
    """Render one join sequence as a single SELECT statement."""
    _validate_tables(spec)
    where, params = _where_clause(spec.filters, dialect)
    sql = (
        f"SELECT {_select_list(spec.select, dialect)} "
        f"{join_clause(spec.sequence, spec.join_type, dialect)}{where}"
    )
    return SqlQuery(sql=sql, params=params, sequences=(spec.sequence,))


def emit_count_sql(spec: QuerySpec, dialect: Dialect = GENERIC) -> SqlQuery:
    """Render a COUNT(*) probe for one join sequence."""
    _validate_tables(spec)
    where, params = _where_clause(spec.filters, dialect)
    sql = f"SELECT COUNT(*) {join_clause(spec.sequence, spec.join_type, dialect)}{where}"
    return SqlQuery(sql=sql, params=params, sequences=(spec.sequence,))


def _resolve_union(
    sequences: Sequence[JoinSequence], template: QueryTemplate, dialect: Dialect
) -> list[SqlQuery]:
    if not template.select:
        raise ColumnMismatch(
            "union over several join sequences requires an explicit select list"
        )
    for sequence in sequences:
        missing = [ref for ref in template.select if ref.table not in sequence.table_set]
        if missing:
            raise ColumnMismatch(
                f"column {missing[0]} is not available in every sequence of the union"
            )
    branches = [emit_sql(template.bind(sequence), dialect) for sequence in sequences]
    sql = " UNION ".join(branch.sql for branch in branches)
    params = tuple(value for branch in branches for value in branch.params)
    return [SqlQuery(sql=sql, params=params, sequences=tuple(sequences))]


def _resolve_most_rows(
    sequences: Sequence[JoinSequence],
    template: QueryTemplate,
    dialect: Dialect,
    executor: Executor | None,
) -> list[SqlQuery]:
    if executor is None:
        raise ExecutorRequired("the most_rows policy needs an executor to count rows")
    best: tuple[int, JoinSequence] | None = None
    for sequence in sequences:
        probe = emit_count_sql(template.bind(sequence), dialect)
        rows = executor(probe.sql, probe.params)
        count = int(rows[0][0])
        if best is None or count > best[0]:
            best = (count, sequence)
    count, winner = best
    chosen = emit_sql(template.bind(winner), dialect)
    return [
        SqlQuery(
            sql=chosen.sql,
            params=chosen.params,
            sequences=(winner,),
            chosen_row_count=count,
        )
    ]


def _resolve_prefer_mandatory(
    sequences: Sequence[JoinSequence], template: QueryTemplate, dialect: Dialect
) -> list[SqlQuery]:
    def optional_steps(sequence: JoinSequence) -> int:
        return sum(1 for step in sequence.steps if not step.mandatory)

    fewest = min(optional_steps(sequence) for sequence in sequences)
    kept = [sequence for sequence in sequences if optional_steps(sequence) == fewest]
    return [emit_sql(template.bind(sequence), dialect) for sequence in kept]


def resolve(
    sequences: Sequence[JoinSequence],
    policy: ResolutionPolicy = ResolutionPolicy.ALL,
    template: QueryTemplate | None = None,
    *,
    dialect: Dialect = GENERIC,
    executor: Executor | None = None,
) -> list[SqlQuery]:
    """Apply a resolution policy to the surviving join sequences.

    ``all`` emits one query per sequence; ``union_distinct`` emits a single
    UNION query; ``most_rows`` keeps the sequence whose join yields the most
    rows (ties keep the earliest); ``prefer_mandatory`` keeps the sequences
    using the fewest non-mandatory links.
    """
    sequences = tuple(sequences)
    if not sequences:
        raise ValueError("resolve requires at least one join sequence")
    if template is None:
        template = QueryTemplate()
    if policy is ResolutionPolicy.ALL:
        return [emit_sql(template.bind(sequence), dialect) for sequence in sequences]
    if policy is ResolutionPolicy.UNION_DISTINCT:
        if len(sequences) == 1:
            return [emit_sql(template.bind(sequences[0]), dialect)]
        return _resolve_union(sequences, template, dialect)
    if policy is ResolutionPolicy.MOST_ROWS:
        return _resolve_most_rows(sequences, template, dialect, executor)
    if policy is ResolutionPolicy.PREFER_MANDATORY:
        return _resolve_prefer_mandatory(sequences, template, dialect)
    raise ValueError(f"unsupported policy {policy!r}")
