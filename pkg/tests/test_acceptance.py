"""Acceptance gate: one test per shipping criterion.

Each test prints a ``[acceptance] PASS/FAIL`` line through the conftest
report hook so the whole gate can be read at a glance.
"""

import random
import time

from autojoin.catalog import Catalog, ColumnClass, ColumnSpec, TableSchema, load_catalog
from autojoin.engine import ingest_csv_dir
from autojoin.graph import build_graph
from autojoin.inference import dataset_class_lookup
from autojoin.jsonio import canonical_json
from autojoin.paths import PathCache, all_simple_paths, reduce_paths
from autojoin.planner import joinable, plan
from autojoin.sqlgen import QueryTemplate, emit_sql

from oracles import literal_plan_table_sets, random_catalog, random_targets

GOLDEN_SQL = (
    "SELECT * FROM order_details "
    "JOIN orders ON order_details.orderID = orders.orderID "
    "JOIN customers ON orders.customerID = customers.customerID "
    "JOIN products ON order_details.productID = products.productID "
    "JOIN suppliers ON products.supplierID = suppliers.supplierID "
    "JOIN categories ON products.categoryID = categories.categoryID"
)

GOLDEN_ROW_COUNT = 18


def test_three_target_plan_is_the_single_golden_sequence(northwind_graph):
    """{customers, suppliers, categories} has exactly one minimal sequence."""
    start = time.perf_counter()
    result = plan(northwind_graph, ("customers", "suppliers", "categories"))
    assert len(result.sequences) == 1
    sequence = result.sequences[0]
    query = emit_sql(QueryTemplate().bind(sequence))
    elapsed = time.perf_counter() - start
    assert sequence.origin == "order_details"
    assert sequence.table_pairs() == (
        ("order_details", "orders"),
        ("orders", "customers"),
        ("order_details", "products"),
        ("products", "suppliers"),
        ("products", "categories"),
    )
    assert query.sql.split() == GOLDEN_SQL.split()
    assert elapsed < 1.0


def test_two_target_plan_keeps_both_routes(northwind_graph):
    """{customers, suppliers} is reachable through products or vendors."""
    start = time.perf_counter()
    result = plan(northwind_graph, ("customers", "suppliers"))
    elapsed = time.perf_counter() - start
    assert [s.table_set for s in result.sequences] == [
        {"order_details", "orders", "customers", "products", "suppliers"},
        {"order_details", "orders", "customers", "vendors", "suppliers"},
    ]
    assert elapsed < 1.0


def test_path_reduction_drops_the_dominated_route(northwind_graph):
    """Three simple paths reach suppliers; superset elimination keeps two."""
    enumerated = all_simple_paths(northwind_graph, "order_details", "suppliers")
    assert len(enumerated) == 3
    reduced = reduce_paths(enumerated)
    assert {path.table_chain() for path in reduced} == {
        ("order_details", "products", "suppliers"),
        ("order_details", "vendors", "suppliers"),
    }
    eliminated = {path.table_chain() for path in enumerated} - {
        path.table_chain() for path in reduced
    }
    assert eliminated == {("order_details", "products", "vendors", "suppliers")}


def test_disconnected_targets_are_reported_infeasible(northwind_graph):
    """No table reaches both territories and orders."""
    result = plan(northwind_graph, ("territories", "orders"))
    assert result.sequences == ()
    assert not result.feasible
    assert joinable(northwind_graph, ("territories", "orders")) is False


def test_paths_sharing_a_prefix_edge_are_both_kept():
    """Reduction compares visited-table sets, not edge disjointness."""
    tables = [TableSchema("a", (ColumnSpec("b_id", ColumnClass.MANY),))]
    tables.append(
        TableSchema(
            "b",
            (
                ColumnSpec("b_id", ColumnClass.ONE),
                ColumnSpec("c_id", ColumnClass.MANY),
                ColumnSpec("d_id", ColumnClass.MANY),
            ),
        )
    )
    tables.append(
        TableSchema(
            "c", (ColumnSpec("c_id", ColumnClass.ONE), ColumnSpec("e_id", ColumnClass.MANY))
        )
    )
    tables.append(
        TableSchema(
            "d", (ColumnSpec("d_id", ColumnClass.ONE), ColumnSpec("e_id", ColumnClass.MANY))
        )
    )
    tables.append(TableSchema("e", (ColumnSpec("e_id", ColumnClass.ONE),)))
    catalog = Catalog(tuple(tables))
    catalog = catalog.add_link("a.b_id", "b.b_id", link_id="ab")
    catalog = catalog.add_link("b.c_id", "c.c_id", link_id="bc")
    catalog = catalog.add_link("b.d_id", "d.d_id", link_id="bd")
    catalog = catalog.add_link("c.e_id", "e.e_id", link_id="ce")
    catalog = catalog.add_link("d.e_id", "e.e_id", link_id="de")
    graph = build_graph(catalog)
    reduced = reduce_paths(all_simple_paths(graph, "a", "e"))
    assert {path.table_chain() for path in reduced} == {
        ("a", "b", "c", "e"),
        ("a", "b", "d", "e"),
    }


def test_planner_matches_the_literal_procedure_on_a_thousand_graphs():
    """Optimized planner == literal transcription across 1000 random graphs."""
    start = time.perf_counter()
    for seed in range(1000):
        rng = random.Random(seed)
        catalog = random_catalog(rng)
        graph = build_graph(catalog)
        targets = random_targets(rng, catalog)
        expected = literal_plan_table_sets(graph, targets, 10)
        result = plan(graph, targets)
        actual = {sequence.table_set for sequence in result.sequences}
        assert actual == expected, f"seed {seed}: {actual} != {expected}"
        assert joinable(graph, targets) == bool(expected), f"seed {seed}"
    assert time.perf_counter() - start < 60.0


def test_connection_rules_produce_the_expected_edges():
    """M-1 adds one edge, 1-1 two, M-M none; 1-M normalizes by swapping."""
    catalog = Catalog(
        tables=(
            TableSchema(
                "orders",
                (
                    ColumnSpec("customerID", ColumnClass.MANY),
                    ColumnSpec("orderID", ColumnClass.ONE),
                    ColumnSpec("tag", ColumnClass.MANY),
                ),
            ),
            TableSchema(
                "customers",
                (
                    ColumnSpec("customerID", ColumnClass.ONE),
                    ColumnSpec("profileID", ColumnClass.ONE),
                    ColumnSpec("tag", ColumnClass.MANY),
                ),
            ),
            TableSchema("profiles", (ColumnSpec("profileID", ColumnClass.ONE),)),
        )
    )
    many_to_one = build_graph(catalog.add_link("orders.customerID", "customers.customerID"))
    assert [(e.src, e.dst) for e in many_to_one.edges] == [("orders", "customers")]

    one_to_one = build_graph(catalog.add_link("customers.profileID", "profiles.profileID"))
    assert {(e.src, e.dst) for e in one_to_one.edges} == {
        ("customers", "profiles"),
        ("profiles", "customers"),
    }
    assert len({e.link_id for e in one_to_one.edges}) == 1

    many_to_many = build_graph(catalog.add_link("orders.tag", "customers.tag"))
    assert many_to_many.edges == ()

    swapped = build_graph(catalog.add_link("customers.customerID", "orders.customerID"))
    assert [(e.src, e.dst) for e in swapped.edges] == [("orders", "customers")]
    assert swapped.edges[0].src_column == "customerID"


def test_end_to_end_from_csv_files_to_joined_rows(fixture_dir):
    """Ingest, infer classes, link, plan, and execute against the engine."""
    dataset = ingest_csv_dir(fixture_dir)
    lookup = dataset_class_lookup(dataset)
    skeleton = dataset.catalog_skeleton()
    inferred = skeleton.with_column_classes(
        {ref: lookup(ref) for ref, _ in skeleton.columns()}
    )
    curated = load_catalog(fixture_dir / "links.json")
    catalog = inferred
    for link in curated.links:
        catalog = catalog.add_link(
            link.left, link.right, mandatory=link.mandatory, link_id=link.link_id
        )
    graph = build_graph(catalog)
    assert set(graph.nodes) == set(curated.table_names)
    assert graph.edges == build_graph(curated).edges

    result = plan(graph, ("customers", "suppliers", "categories"))
    assert len(result.sequences) == 1
    query = emit_sql(QueryTemplate().bind(result.sequences[0]))
    executed = dataset.execute(query.sql, query.params)
    assert len(executed.rows) > 0
    assert len(executed.rows) == GOLDEN_ROW_COUNT


def test_repeated_plans_are_identical_and_served_from_the_cache(northwind_graph):
    """Caching changes diagnostics counters, never the plan content."""
    cache = PathCache()
    targets = ("customers", "suppliers", "categories")
    first = plan(northwind_graph, targets, cache=cache)
    second = plan(northwind_graph, targets, cache=cache)

    def content(result):
        payload = result.to_json_dict()
        return canonical_json({"targets": payload["targets"], "sequences": payload["sequences"]})

    assert content(first) == content(second)
    assert first.diagnostics.cache_hits == 0
    assert first.diagnostics.cache_misses > 0
    assert second.diagnostics.cache_hits > 0
    assert second.diagnostics.cache_misses == 0
