"""Exception types shared across the package.

Every error exposes a stable ``code`` (its class name) so the CLI and the
HTTP layer can map failures to exit codes and status codes without string
matching.
"""

from __future__ import annotations


class AutoJoinError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class UnknownTable(AutoJoinError):
    """A table name does not exist in the catalog, graph, or dataset."""


class UnknownColumn(AutoJoinError):
    """A column reference does not exist in the catalog or dataset."""


class UnknownClass(AutoJoinError):
    """A link endpoint has no recorded or derivable uniqueness class."""


class SelfReferencingLink(AutoJoinError):
    """A link connects a table to itself, which is not supported."""


class MalformedMetadata(AutoJoinError):
    """A metadata document failed structural validation.

    ``position`` points at the offending element, e.g. ``$.links[2].left``.
    """

    def __init__(self, message: str, position: str | None = None) -> None:
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)


class UnknownLinkSelected(AutoJoinError):
    """A link selection names a link id that does not match the catalog."""


class MixedEndpoints(AutoJoinError):
    """Paths passed to a reduction do not share the same endpoints."""


class MixedOrigins(AutoJoinError):
    """Paths passed to a flatten do not start at the same origin."""


class EmptyTargets(AutoJoinError):
    """A plan was requested for an empty target set."""


class NoJoinPath(AutoJoinError):
    """No origin can reach every requested target."""


class PlanTimeout(AutoJoinError):
    """Planning exceeded its deadline; ``diagnostics`` holds partial state."""

    def __init__(self, message: str, diagnostics: dict | None = None) -> None:
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class ColumnOutsideSequence(AutoJoinError):
    """A selected or filtered column belongs to a table the join never visits."""


class ColumnMismatch(AutoJoinError):
    """Union branches would produce different column lists."""


class ExecutorRequired(AutoJoinError):
    """The chosen resolution policy needs a query executor to compare rows."""


class BackendUnavailable(AutoJoinError):
    """The requested storage backend cannot be opened."""


class WriteRejected(AutoJoinError):
    """A statement attempted to modify a read-only dataset."""


class SqlError(AutoJoinError):
    """The backend rejected a SQL statement."""


class EmptyDirectory(AutoJoinError):
    """An ingest directory contains no CSV files."""


class DuplicateHeader(AutoJoinError):
    """A CSV header names the same column twice."""


class RaggedRow(AutoJoinError):
    """A CSV row has a different number of fields than its header."""
