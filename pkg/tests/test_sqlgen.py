import pytest

from autojoin.catalog import Catalog, ColumnClass, ColumnRef, ColumnSpec, TableSchema
from autojoin.errors import ColumnMismatch, ColumnOutsideSequence, ExecutorRequired
from autojoin.graph import build_graph
from autojoin.planner import plan
from autojoin.sqlgen import (
    GENERIC,
    Dialect,
    Filter,
    JoinType,
    QueryTemplate,
    ResolutionPolicy,
    emit_count_sql,
    emit_sql,
    join_clause,
    output_columns,
    resolve,
)

APPENDIX_SQL = (
    "SELECT * FROM order_details "
    "JOIN orders ON order_details.orderID = orders.orderID "
    "JOIN customers ON orders.customerID = customers.customerID "
    "JOIN products ON order_details.productID = products.productID "
    "JOIN suppliers ON products.supplierID = suppliers.supplierID "
    "JOIN categories ON products.categoryID = categories.categoryID"
)


@pytest.fixture(scope="module")
def appendix_sequence(northwind_graph):
    result = plan(northwind_graph, ("customers", "suppliers", "categories"))
    assert len(result.sequences) == 1
    return result.sequences[0]


@pytest.fixture(scope="module")
def two_route_sequences(northwind_graph):
    result = plan(northwind_graph, ("customers", "suppliers"))
    assert len(result.sequences) == 2
    return result.sequences


class TestEmitSql:
    def test_full_join_chain_golden(self, appendix_sequence):
        query = emit_sql(QueryTemplate().bind(appendix_sequence))
        assert query.sql == APPENDIX_SQL
        assert query.params == ()
        assert query.sequences == (appendix_sequence,)

    def test_single_table_select(self, northwind_graph):
        sequence = plan(northwind_graph, ("suppliers",)).sequences[0]
        query = emit_sql(QueryTemplate().bind(sequence))
        assert query.sql == "SELECT * FROM suppliers"

    def test_left_join_variant(self, northwind_graph):
        sequence = plan(northwind_graph, ("orders", "customers")).sequences[0]
        query = emit_sql(QueryTemplate(join_type=JoinType.LEFT).bind(sequence))
        assert query.sql == (
            "SELECT * FROM orders "
            "LEFT JOIN customers ON orders.customerID = customers.customerID"
        )

    def test_explicit_select_list(self, northwind_graph):
        sequence = plan(northwind_graph, ("orders", "customers")).sequences[0]
        template = QueryTemplate(
            select=(ColumnRef.parse("customers.companyName"), ColumnRef.parse("orders.orderID"))
        )
        query = emit_sql(template.bind(sequence))
        assert query.sql.startswith("SELECT customers.companyName, orders.orderID FROM orders ")

    def test_clashing_select_names_get_table_aliases(self, two_route_sequences):
        """customers and suppliers both expose companyName."""
        select = (
            ColumnRef.parse("customers.companyName"),
            ColumnRef.parse("suppliers.companyName"),
        )
        query = emit_sql(QueryTemplate(select=select).bind(two_route_sequences[0]))
        assert query.sql.startswith(
            "SELECT customers.companyName AS customers__companyName, "
            "suppliers.companyName AS suppliers__companyName FROM "
        )
        assert output_columns(select) == (
            "customers__companyName",
            "suppliers__companyName",
        )

    def test_unique_select_names_stay_unaliased(self):
        select = (ColumnRef.parse("orders.orderID"), ColumnRef.parse("customers.city"))
        assert output_columns(select) == ("orderID", "city")

    def test_filters_become_bind_parameters(self, northwind_graph):
        sequence = plan(northwind_graph, ("orders", "customers")).sequences[0]
        template = QueryTemplate(
            filters=(
                Filter(ColumnRef.parse("customers.city"), "=", "Berlin"),
                Filter(ColumnRef.parse("orders.orderID"), ">", 10250),
            )
        )
        query = emit_sql(template.bind(sequence))
        assert query.sql.endswith(
            " WHERE customers.city = ? AND orders.orderID > ?"
        )
        assert query.params == ("Berlin", 10250)

    def test_like_filter(self, northwind_graph):
        sequence = plan(northwind_graph, ("customers",)).sequences[0]
        template = QueryTemplate(
            filters=(Filter(ColumnRef.parse("customers.city"), "LIKE", "Ber%"),)
        )
        query = emit_sql(template.bind(sequence))
        assert query.sql == "SELECT * FROM customers WHERE customers.city LIKE ?"
        assert query.params == ("Ber%",)

    def test_unsupported_comparison_is_rejected(self):
        with pytest.raises(ValueError, match="unsupported comparison"):
            Filter(ColumnRef.parse("customers.city"), "REGEXP", ".*")

    def test_select_outside_the_sequence_is_rejected(self, northwind_graph):
        sequence = plan(northwind_graph, ("orders", "customers")).sequences[0]
        template = QueryTemplate(select=(ColumnRef.parse("products.productName"),))
        with pytest.raises(ColumnOutsideSequence):
            emit_sql(template.bind(sequence))

    def test_filter_outside_the_sequence_is_rejected(self, northwind_graph):
        sequence = plan(northwind_graph, ("orders", "customers")).sequences[0]
        template = QueryTemplate(
            filters=(Filter(ColumnRef.parse("products.unitPrice"), ">", 10),)
        )
        with pytest.raises(ColumnOutsideSequence):
            emit_sql(template.bind(sequence))

    def test_count_probe_golden(self, appendix_sequence):
        query = emit_count_sql(QueryTemplate().bind(appendix_sequence))
        assert query.sql == APPENDIX_SQL.replace("SELECT *", "SELECT COUNT(*)")

    def test_sequence_that_revisits_a_table_cannot_be_translated(self):
        catalog = Catalog(
            tables=(
                TableSchema(
                    "a",
                    (ColumnSpec("x", ColumnClass.MANY), ColumnSpec("y", ColumnClass.MANY)),
                ),
                TableSchema(
                    "b",
                    (ColumnSpec("x", ColumnClass.ONE), ColumnSpec("y", ColumnClass.ONE)),
                ),
            )
        )
        catalog = catalog.add_link("a.x", "b.x", link_id="via_x")
        catalog = catalog.add_link("a.y", "b.y", link_id="via_y")
        graph = build_graph(catalog)
        edges = {edge.link_id: edge for edge in graph.edges}
        from autojoin.planner import JoinSequence

        sequence = JoinSequence("a", (edges["via_x"], edges["via_y"]))
        with pytest.raises(ValueError, match="more than once"):
            emit_sql(QueryTemplate().bind(sequence))


class TestQuoting:
    def test_reserved_word_table_is_quoted(self):
        assert GENERIC.quote("order") == '"order"'

    def test_plain_identifier_stays_bare(self):
        assert GENERIC.quote("order_details") == "order_details"

    def test_identifier_with_space_is_quoted(self):
        assert GENERIC.quote("unit price") == '"unit price"'

    def test_embedded_quote_is_doubled(self):
        assert GENERIC.quote('we"ird') == '"we""ird"'

    def test_quote_always_dialect(self):
        eager = Dialect(name="eager", quote_always=True)
        assert eager.quote("plain") == '"plain"'

    def test_quoted_identifiers_flow_into_the_join_clause(self):
        catalog = Catalog(
            tables=(
                TableSchema("order", (ColumnSpec("group id", ColumnClass.MANY),)),
                TableSchema("grp", (ColumnSpec("group id", ColumnClass.ONE),)),
            )
        )
        catalog = catalog.add_link("order.group id", "grp.group id", link_id="l1")
        graph = build_graph(catalog)
        sequence = plan(graph, ("order", "grp")).sequences[0]
        assert join_clause(sequence) == (
            'FROM "order" JOIN grp ON "order"."group id" = grp."group id"'
        )


class TestResolutionPolicies:
    def test_all_emits_one_query_per_sequence(self, two_route_sequences):
        queries = resolve(two_route_sequences, ResolutionPolicy.ALL)
        assert len(queries) == 2
        assert "JOIN products" in queries[0].sql
        assert "JOIN vendors" in queries[1].sql

    def test_union_requires_an_explicit_select(self, two_route_sequences):
        with pytest.raises(ColumnMismatch, match="explicit select"):
            resolve(two_route_sequences, ResolutionPolicy.UNION_DISTINCT)

    def test_union_rejects_columns_missing_from_a_branch(self, two_route_sequences):
        """products columns exist in only one of the two routes."""
        template = QueryTemplate(select=(ColumnRef.parse("products.productName"),))
        with pytest.raises(ColumnMismatch, match="not available in every sequence"):
            resolve(two_route_sequences, ResolutionPolicy.UNION_DISTINCT, template)

    def test_union_merges_branches_into_one_query(self, two_route_sequences):
        template = QueryTemplate(
            select=(
                ColumnRef.parse("customers.companyName"),
                ColumnRef.parse("suppliers.companyName"),
            ),
            filters=(Filter(ColumnRef.parse("customers.city"), "=", "Berlin"),),
        )
        queries = resolve(two_route_sequences, ResolutionPolicy.UNION_DISTINCT, template)
        assert len(queries) == 1
        query = queries[0]
        assert query.sql.count(" UNION ") == 1
        assert query.sql.count("FROM order_details") == 2
        assert query.params == ("Berlin", "Berlin")
        assert query.sequences == tuple(two_route_sequences)

    def test_union_with_one_sequence_skips_the_union(self, appendix_sequence):
        template = QueryTemplate(select=(ColumnRef.parse("customers.companyName"),))
        queries = resolve([appendix_sequence], ResolutionPolicy.UNION_DISTINCT, template)
        assert len(queries) == 1
        assert "UNION" not in queries[0].sql

    def test_most_rows_needs_an_executor(self, two_route_sequences):
        with pytest.raises(ExecutorRequired):
            resolve(two_route_sequences, ResolutionPolicy.MOST_ROWS)

    def test_most_rows_probes_and_keeps_the_widest_route(
        self, two_route_sequences, northwind_dataset
    ):
        """The products route matches 18 detail rows, the vendors route 14."""
        probes = []

        def executor(sql, params):
            probes.append(sql)
            return northwind_dataset.execute(sql, params).rows

        queries = resolve(
            two_route_sequences, ResolutionPolicy.MOST_ROWS, executor=executor
        )
        assert len(probes) == 2
        assert all(sql.startswith("SELECT COUNT(*)") for sql in probes)
        assert len(queries) == 1
        query = queries[0]
        assert query.chosen_row_count == 18
        assert query.sequences == (two_route_sequences[0],)
        assert "JOIN products" in query.sql

    def test_most_rows_tie_keeps_the_earliest_sequence(self, two_route_sequences):
        queries = resolve(
            two_route_sequences,
            ResolutionPolicy.MOST_ROWS,
            executor=lambda sql, params: [(7,)],
        )
        assert queries[0].sequences == (two_route_sequences[0],)
        assert queries[0].chosen_row_count == 7

    def test_prefer_mandatory_drops_the_optional_route(self, two_route_sequences):
        """Only the vendors route crosses a non-mandatory link."""
        optional = [
            sum(1 for step in sequence.steps if not step.mandatory)
            for sequence in two_route_sequences
        ]
        assert optional == [0, 1]
        queries = resolve(two_route_sequences, ResolutionPolicy.PREFER_MANDATORY)
        assert len(queries) == 1
        assert queries[0].sequences == (two_route_sequences[0],)

    def test_prefer_mandatory_keeps_ties(self, appendix_sequence):
        queries = resolve(
            [appendix_sequence, appendix_sequence], ResolutionPolicy.PREFER_MANDATORY
        )
        assert len(queries) == 2

    def test_resolve_rejects_an_empty_sequence_list(self):
        with pytest.raises(ValueError, match="at least one"):
            resolve([], ResolutionPolicy.ALL)


class TestExecutability:
    def test_every_fixture_plan_produces_runnable_sql(
        self, northwind_graph, northwind_dataset
    ):
        target_sets = [
            ("customers", "suppliers", "categories"),
            ("customers", "suppliers"),
            ("employees", "regions"),
            ("orders", "products"),
            ("vendors", "categories"),
        ]
        for targets in target_sets:
            for sequence in plan(northwind_graph, targets).sequences:
                query = emit_sql(QueryTemplate().bind(sequence))
                northwind_dataset.execute(query.sql, query.params)

    def test_appendix_join_returns_eighteen_rows(
        self, appendix_sequence, northwind_dataset
    ):
        query = emit_sql(QueryTemplate().bind(appendix_sequence))
        result = northwind_dataset.execute(query.sql, query.params)
        assert len(result.rows) == 18

    def test_query_json_shape(self, appendix_sequence):
        payload = emit_sql(QueryTemplate().bind(appendix_sequence)).to_json_dict()
        assert payload["sql"] == APPENDIX_SQL
        assert payload["params"] == []
        assert payload["chosen_row_count"] is None
        assert payload["sequences"][0]["origin"] == "order_details"
