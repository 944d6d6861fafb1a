"""Command-line front end.

Exit codes: 0 on success, 1 on usage errors, 2 when a plan is infeasible,
3 on data errors (bad CSV, bad metadata, failed queries).
"""

from __future__ import annotations

import csv
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from .catalog import load_catalog, save_catalog
from .engine import SqliteBackend, ingest_csv_dir
from .errors import (
    AutoJoinError,
    NoJoinPath,
)
from .graph import graph_summary
from .inference import dataset_class_lookup, import_declared_fks, infer_links_by_name
from .jsonio import canonical_json
from .paths import DEFAULT_MAX_DEPTH
from .planner import TargetSet, plan
from .runtime import Workspace
from .sqlgen import (
    Filter,
    JoinType,
    QueryTemplate,
    ResolutionPolicy,
    output_columns,
    resolve,
)


@dataclass
class CliState:
    data_dir: "Path | None"
    metadata_path: "Path | None"
    aliases_path: "Path | None"
    max_depth: int

    def workspace(self, *, need_data: bool = False, need_catalog: bool = False) -> Workspace:
        if need_data and self.data_dir is None:
            raise click.UsageError("this command needs --data-dir")
        if need_catalog and self.metadata_path is None:
            raise click.UsageError("this command needs --metadata")
        return Workspace.load(
            data_dir=self.data_dir if (need_data or self.data_dir) else None,
            metadata_path=self.metadata_path,
            aliases_path=self.aliases_path,
            max_depth=self.max_depth,
        )


@click.group()
@click.option("--data-dir", type=click.Path(path_type=Path), default=None, help="Directory of CSV files.")
@click.option("--metadata", "metadata_path", type=click.Path(path_type=Path), default=None, help="Catalog metadata JSON file.")
@click.option("--aliases", "aliases_path", type=click.Path(path_type=Path), default=None, help="Table alias map JSON file.")
@click.option("--max-depth", default=DEFAULT_MAX_DEPTH, show_default=True, help="Maximum join path length in hops.")
@click.pass_context
def cli(ctx: click.Context, data_dir, metadata_path, aliases_path, max_depth: int) -> None:
    """Synthesize and run join queries over a relational CSV dataset."""
    ctx.obj = CliState(data_dir, metadata_path, aliases_path, max_depth)


@cli.command()
@click.argument("directory", type=click.Path(path_type=Path))
@click.option("--write-metadata", type=click.Path(path_type=Path), default=None, help="Write a catalog skeleton for the ingested tables.")
def ingest(directory: Path, write_metadata: "Path | None") -> None:
    """Load a directory of CSV files and report the resulting tables."""
    dataset = ingest_csv_dir(directory)
    for name in dataset.table_names:
        info = dataset.tables[name]
        click.echo(f"{name}: {info.row_count} rows, {len(info.columns)} columns")
    if write_metadata is not None:
        save_catalog(dataset.catalog_skeleton(), write_metadata)
        click.echo(f"wrote catalog skeleton to {write_metadata}")


@cli.group()
def links() -> None:
    """Inspect and curate links between tables."""


@links.command()
@click.option("--accept-inferred", is_flag=True, help="Add the proposals to the metadata file.")
@click.pass_obj
def infer(state: CliState, accept_inferred: bool) -> None:
    """Propose links for columns that share a name across tables."""
    workspace = state.workspace(need_data=True)
    catalog = workspace.catalog
    if catalog is None:
        catalog = workspace.dataset.catalog_skeleton()
    lookup = dataset_class_lookup(workspace.dataset)
    proposals = infer_links_by_name(catalog, lookup)
    existing_pairs = {(link.left, link.right) for link in catalog.links}
    existing_pairs |= {(link.right, link.left) for link in catalog.links}
    for link in proposals:
        status = "connectable" if link.connectable else "not connectable"
        known = " (already linked)" if (link.left, link.right) in existing_pairs else ""
        click.echo(f"{link.left} ~ {link.right} [{link.kind.value}] {status}{known}")
    if accept_inferred:
        if state.metadata_path is None:
            raise click.UsageError("--accept-inferred needs --metadata")
        added = 0
        for link in proposals:
            if (link.left, link.right) in existing_pairs:
                continue
            catalog = catalog.add_link(
                link.left,
                link.right,
                left_class=link.left_class,
                right_class=link.right_class,
                link_id=link.link_id,
            )
            added += 1
        save_catalog(catalog, state.metadata_path)
        click.echo(f"added {added} links to {state.metadata_path}")


@links.command("import-fk")
@click.option("--db", "db_path", type=click.Path(path_type=Path), required=True, help="SQLite database with declared foreign keys.")
@click.option("--accept", is_flag=True, help="Merge the imported links into the metadata file.")
@click.pass_obj
def import_fk(state: CliState, db_path: Path, accept: bool) -> None:
    """Turn foreign keys declared in a SQLite database into links."""
    backend = SqliteBackend.from_file(db_path)
    imported = import_declared_fks(backend)
    for link in imported.links:
        flag = " mandatory" if link.mandatory else ""
        click.echo(f"{link.left} -> {link.right} [{link.kind.value}]{flag}")
    for skipped in imported.skipped:
        click.echo(
            f"skipped {skipped.child_table}({', '.join(skipped.columns)}) -> "
            f"{skipped.parent_table}: {skipped.reason}",
            err=True,
        )
    if accept:
        if state.metadata_path is None:
            raise click.UsageError("--accept needs --metadata")
        catalog = load_catalog(state.metadata_path)
        existing = {(link.left, link.right) for link in catalog.links}
        added = 0
        for link in imported.links:
            if (link.left, link.right) in existing:
                continue
            catalog = catalog.add_link(
                link.left,
                link.right,
                left_class=link.left_class,
                right_class=link.right_class,
                mandatory=link.mandatory,
                link_id=link.link_id,
            )
            added += 1
        save_catalog(catalog, state.metadata_path)
        click.echo(f"added {added} links to {state.metadata_path}")


@cli.group()
def graph() -> None:
    """Inspect the join graph."""


@graph.command()
@click.option("--dot", "as_dot", is_flag=True, help="Print DOT syntax for visualization.")
@click.option("--json", "as_json", is_flag=True, help="Print the graph as JSON.")
@click.pass_obj
def show(state: CliState, as_dot: bool, as_json: bool) -> None:
    """Summarize the join graph built from the metadata."""
    workspace = state.workspace(need_catalog=True)
    if as_dot:
        click.echo(workspace.graph.to_dot())
        return
    if as_json:
        click.echo(canonical_json(workspace.graph.to_json_dict()))
        return
    summary = graph_summary(workspace.graph)
    click.echo(f"{summary['node_count']} tables, {summary['edge_count']} edges")
    for node, degrees in summary["degrees"].items():
        click.echo(f"  {node}: in {degrees['in']}, out {degrees['out']}")


class _Infeasible(Exception):
    """Internal signal: planning succeeded but found no join sequence."""


def _print_plan(result, workspace: Workspace) -> None:
    if not result.sequences:
        click.echo(f"no join path covers {', '.join(result.targets)}")
        return
    click.echo(f"plan for {', '.join(result.targets)}")
    for index, sequence in enumerate(result.sequences, start=1):
        click.echo(f"{index}. origin {sequence.origin}")
        for step in sequence.steps:
            click.echo(f"   {step.src_ref} -> {step.dst_ref} [{step.link_id}]")
        click.echo(f"   tables: {', '.join(sorted(sequence.table_set))}")


@cli.command("plan")
@click.argument("tables")
@click.option("--json", "as_json", is_flag=True, help="Print the full plan result as JSON.")
@click.pass_obj
def plan_command(state: CliState, tables: str, as_json: bool) -> None:
    """Synthesize the minimal join sequences covering TABLES (comma-separated)."""
    workspace = state.workspace(need_catalog=True)
    targets = [workspace.resolve_table(name.strip()) for name in tables.split(",") if name.strip()]
    result = plan(
        workspace.graph,
        targets,
        max_depth=workspace.max_depth,
        cache=workspace.cache,
        combination_cap=workspace.combination_cap,
    )
    if as_json:
        click.echo(canonical_json(result.to_json_dict()))
    else:
        _print_plan(result, workspace)
    if not result.sequences:
        raise _Infeasible()


_FILTER_PATTERN = re.compile(r"(.+?)(<=|>=|!=|<>|=|<|>|~)(.*)$", re.DOTALL)
_CANONICAL_INT = re.compile(r"-?(0|[1-9][0-9]*)$")


def _literal(value: str):
    if _CANONICAL_INT.fullmatch(value):
        return int(value)
    try:
        return float(value)
    except ValueError:
        return value


def _parse_filter(text: str, workspace: Workspace) -> Filter:
    match = _FILTER_PATTERN.match(text)
    if match is None:
        raise click.BadParameter(f"expected column<op>value, got {text!r}", param_hint="--filter")
    column, op, raw = match.groups()
    op = "LIKE" if op == "~" else op
    return Filter(workspace.resolve_column(column.strip()), op, _literal(raw))


def _print_table(columns, rows) -> None:
    widths = [len(str(col)) for col in columns]
    for row in rows:
        for i, value in enumerate(row):
            widths[i] = max(widths[i], len(str(value)))
    header = "  ".join(str(col).ljust(widths[i]) for i, col in enumerate(columns))
    click.echo(header)
    click.echo("  ".join("-" * width for width in widths))
    for row in rows:
        click.echo("  ".join(str(value).ljust(widths[i]) for i, value in enumerate(row)))


@cli.command()
@click.argument("columns")
@click.option("--filter", "filters", multiple=True, help="Predicate column<op>value; ~ means LIKE.")
@click.option(
    "--policy",
    type=click.Choice(["all", "union-distinct", "most-rows", "prefer-mandatory"]),
    default="all",
    show_default=True,
)
@click.option("--join-type", type=click.Choice(["inner", "left"]), default="inner", show_default=True)
@click.option("--format", "output_format", type=click.Choice(["table", "csv", "json"]), default="table", show_default=True)
@click.pass_obj
def query(state: CliState, columns: str, filters, policy: str, join_type: str, output_format: str) -> None:
    """Plan, translate, and run a query for COLUMNS (comma-separated table.column)."""
    workspace = state.workspace(need_data=True, need_catalog=True)
    select = tuple(
        workspace.resolve_column(text.strip()) for text in columns.split(",") if text.strip()
    )
    parsed_filters = tuple(_parse_filter(text, workspace) for text in filters)
    targets = TargetSet.from_columns(select + tuple(flt.column for flt in parsed_filters))
    result = plan(
        workspace.graph,
        targets,
        max_depth=workspace.max_depth,
        cache=workspace.cache,
        combination_cap=workspace.combination_cap,
    )
    if not result.sequences:
        click.echo(f"no join path covers {', '.join(targets.tables)}", err=True)
        raise _Infeasible()
    template = QueryTemplate(
        select=select,
        filters=parsed_filters,
        join_type=JoinType(join_type),
    )
    queries = resolve(
        result.sequences,
        ResolutionPolicy(policy.replace("-", "_")),
        template,
        executor=lambda sql, params: workspace.dataset.execute(sql, params).rows,
    )
    payload = []
    for sql_query in queries:
        executed = workspace.dataset.execute(sql_query.sql, sql_query.params)
        labels = output_columns(select) if select else executed.columns
        payload.append((sql_query, labels, executed.rows))

    if output_format == "json":
        click.echo(
            canonical_json(
                [
                    {
                        "sql": sql_query.sql,
                        "params": list(sql_query.params),
                        "columns": list(labels),
                        "rows": [list(row) for row in rows],
                        "row_count": len(rows),
                        "chosen_row_count": sql_query.chosen_row_count,
                    }
                    for sql_query, labels, rows in payload
                ]
            )
        )
        return
    if output_format == "csv":
        writer = csv.writer(sys.stdout)
        for sql_query, labels, rows in payload:
            writer.writerow(labels)
            writer.writerows(rows)
        return
    for index, (sql_query, labels, rows) in enumerate(payload):
        if len(payload) > 1:
            click.echo(f"-- query {index + 1} of {len(payload)}")
        click.echo(f"-- {sql_query.sql}")
        _print_table(labels, rows)
        click.echo(f"({len(rows)} rows)")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--ui-dir", type=click.Path(path_type=Path), default=None, help="Directory with a built UI to serve at /.")
@click.option("--dev-cors", is_flag=True, help="Allow cross-origin requests (development only).")
@click.option("--plan-timeout", default=10.0, show_default=True, help="Seconds before a plan request times out.")
@click.pass_obj
def serve(state: CliState, host: str, port: int, ui_dir: "Path | None", dev_cors: bool, plan_timeout: float) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    workspace = state.workspace()
    if ui_dir is None:
        default_ui = Path("frontend") / "dist"
        if default_ui.is_dir():
            ui_dir = default_ui
    app = create_app(workspace, dev_cors=dev_cors, plan_timeout=plan_timeout, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


def main(argv=None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    except _Infeasible:
        return 2
    except NoJoinPath:
        return 2
    except AutoJoinError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
