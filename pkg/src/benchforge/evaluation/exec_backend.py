"""Execution backend over sqlite fixture databases.

Fixture format: a directory with `schema.sql` (CREATE TABLE statements) and
one `<table>.csv` per table. Loading is hermetic and deterministic.
"""

from __future__ import annotations

import csv
import sqlite3
from dataclasses import dataclass
from pathlib import Path

from benchforge.errors import ExecError


@dataclass
class ResultTable:
    column_names: list[str]
    rows: list[tuple]
    ordered: bool = False

    def __post_init__(self):
        arity = len(self.column_names)
        for row in self.rows:
            if len(row) != arity:
                raise ValueError("row arity does not match column count")


class ExecutionBackend:
    """Wraps one sqlite database; `run` maps failures to ExecError categories."""

    def __init__(self, connection: sqlite3.Connection):
        self._conn = connection

    @classmethod
    def in_memory(cls) -> "ExecutionBackend":
        return cls(sqlite3.connect(":memory:"))

    @classmethod
    def from_fixture_dir(cls, path: str | Path) -> "ExecutionBackend":
        path = Path(path)
        conn = sqlite3.connect(":memory:")
        schema_file = path / "schema.sql"
        if schema_file.exists():
            conn.executescript(schema_file.read_text(encoding="utf-8"))
        for csv_file in sorted(path.glob("*.csv")):
            _load_csv(conn, csv_file)
        conn.commit()
        return cls(conn)

    def run(self, sql: str) -> ResultTable:
        try:
            cursor = self._conn.execute(sql)
            rows = [tuple(r) for r in cursor.fetchall()]
            columns = [d[0] for d in cursor.description] if cursor.description else []
        except sqlite3.Error as exc:
            message = str(exc)
            lowered = message.lower()
            if "syntax error" in lowered or isinstance(exc, sqlite3.Warning):
                category = "syntax"
            elif "no such table" in lowered or "no such column" in lowered or \
                    "no such function" in lowered:
                category = "unknown_object"
            else:
                category = "runtime"
            raise ExecError(category, message) from exc
        return ResultTable(column_names=columns, rows=rows,
                           ordered=_has_top_level_order_by(sql))

    def close(self):
        self._conn.close()


def execute(db: ExecutionBackend, sql: str) -> ResultTable:
    """Run one statement; raises ExecError with a category on failure."""
    return db.run(sql)


def _load_csv(conn: sqlite3.Connection, csv_file: Path) -> None:
    table = csv_file.stem
    with open(csv_file, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            return
        placeholders = ", ".join("?" for _ in header)
        cols = ", ".join(header)
        for row in reader:
            values = [_coerce(v) for v in row]
            conn.execute(
                f"INSERT INTO {table} ({cols}) VALUES ({placeholders})", values
            )


def _coerce(value: str):
    if value == "":
        return None
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value


def _has_top_level_order_by(sql: str) -> bool:
    """True iff the statement has an ORDER BY outside any parentheses."""
    depth = 0
    upper = sql.upper()
    i = 0
    in_string = False
    while i < len(upper):
        ch = upper[i]
        if in_string:
            if ch == "'":
                in_string = False
            i += 1
            continue
        if ch == "'":
            in_string = True
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and upper.startswith("ORDER", i):
            before_ok = i == 0 or not (upper[i - 1].isalnum() or upper[i - 1] == "_")
            rest = upper[i + 5:].lstrip()
            if before_ok and rest.startswith("BY"):
                return True
        i += 1
    return False
