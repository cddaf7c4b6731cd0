import pathlib

import pytest

from benchforge.evaluation import ExecutionBackend
from benchforge.sqlmodel import load_schema
from benchforge.workflow import Workspace, split_statements

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture(scope="session")
def db_dir() -> pathlib.Path:
    return FIXTURES / "db"


@pytest.fixture()
def db(db_dir):
    backend = ExecutionBackend.from_fixture_dir(db_dir)
    yield backend
    backend.close()


@pytest.fixture(scope="session")
def corpus_queries():
    return split_statements((FIXTURES / "queries.sql").read_text())


@pytest.fixture(scope="session")
def nested_queries():
    return split_statements((FIXTURES / "nested_queries.sql").read_text())


@pytest.fixture(scope="session")
def invertible_queries():
    return split_statements((FIXTURES / "invertible_queries.sql").read_text())


@pytest.fixture(scope="session")
def schema_ddl(db_dir):
    return (db_dir / "schema.sql").read_text()


@pytest.fixture(scope="session")
def catalog(schema_ddl):
    return load_schema(schema_ddl, format_hint="ddl-text", schema_id="campus")


class FakeClock:
    """Injectable clock so lease-expiry tests don't sleep."""

    def __init__(self, start: float = 1_000_000.0):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def advance(self, secs: float) -> None:
        self.now += secs


@pytest.fixture()
def clock():
    return FakeClock()


@pytest.fixture()
def workspace(tmp_path, clock):
    return Workspace(tmp_path / "ws", clock=clock)
