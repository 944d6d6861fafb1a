from pathlib import Path

import pytest

from autojoin.catalog import load_catalog
from autojoin.engine import ingest_csv_dir
from autojoin.graph import build_graph
from autojoin.runtime import load_aliases

FIXTURE_DIR = Path(__file__).parent.parent / "fixtures" / "northwind"


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE_DIR


@pytest.fixture(scope="session")
def northwind_catalog():
    return load_catalog(FIXTURE_DIR / "links.json")


@pytest.fixture(scope="session")
def northwind_graph(northwind_catalog):
    return build_graph(northwind_catalog)


@pytest.fixture(scope="session")
def northwind_dataset():
    return ingest_csv_dir(FIXTURE_DIR)


@pytest.fixture(scope="session")
def northwind_aliases():
    return load_aliases(FIXTURE_DIR / "aliases.json")


def pytest_runtest_logreport(report):
    """Print one pass/fail line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    outcome = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {outcome} {name}")
