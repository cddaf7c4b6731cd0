"""Schema catalogs: table/column definitions loaded from DDL text or JSON.

JSON format:
    {"schema_id": str,
     "tables": [{"name": str, "columns": [[name, type], ...],
                 "primary_key": [str, ...]}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from benchforge.errors import DuplicateTable, SchemaParseError
from benchforge.sqlmodel.tokens import EOF, IDENT, OP, QIDENT, Token, tokenize


@dataclass(frozen=True)
class ColumnDef:
    name: str
    declared_type: str
    nullable: bool = True


@dataclass(frozen=True)
class TableDef:
    name: str
    columns: tuple[ColumnDef, ...]
    primary_key: tuple[str, ...] = ()

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def signature_text(self) -> str:
        """Text embedded for table retrieval: name plus column names."""
        return " ".join([self.name, *self.column_names()])


@dataclass
class SchemaCatalog:
    schema_id: str
    tables: list[TableDef] = field(default_factory=list)
    source_format: str = "json-tables"  # or "ddl-text"

    def __post_init__(self):
        seen: set[str] = set()
        for table in self.tables:
            key = _fold(table.name)
            if key in seen:
                raise DuplicateTable(table.name)
            seen.add(key)
            cols: set[str] = set()
            for col in table.columns:
                ckey = _fold(col.name)
                if ckey in cols:
                    raise SchemaParseError(
                        f"duplicate column {col.name!r} in table {table.name!r}"
                    )
                cols.add(ckey)

    def lookup(self, name: str) -> TableDef | None:
        key = _fold(name)
        for table in self.tables:
            if _fold(table.name) == key:
                return table
        return None

    def to_json(self) -> dict:
        return {
            "schema_id": self.schema_id,
            "tables": [
                {
                    "name": t.name,
                    "columns": [[c.name, c.declared_type] for c in t.columns],
                    "primary_key": list(t.primary_key),
                }
                for t in self.tables
            ],
        }


def _fold(name: str) -> str:
    return name.strip('"').lower()


def load_schema(data: bytes | str, format_hint: str | None = None,
                schema_id: str = "default") -> SchemaCatalog:
    """Load a catalog from DDL text or the JSON table format."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if format_hint is None:
        format_hint = "json-tables" if text.lstrip().startswith("{") else "ddl-text"
    if format_hint == "json-tables":
        return _load_json(text, schema_id)
    if format_hint == "ddl-text":
        return _load_ddl(text, schema_id)
    raise SchemaParseError(f"unknown schema format: {format_hint}")


def _load_json(text: str, schema_id: str) -> SchemaCatalog:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaParseError(f"invalid schema JSON: {exc}") from exc
    if not isinstance(doc, dict) or "tables" not in doc:
        raise SchemaParseError("schema JSON must be an object with a 'tables' list")
    tables = []
    for spec in doc["tables"]:
        try:
            columns = tuple(
                ColumnDef(name=c[0], declared_type=str(c[1])) for c in spec["columns"]
            )
            tables.append(
                TableDef(
                    name=spec["name"],
                    columns=columns,
                    primary_key=tuple(spec.get("primary_key", ())),
                )
            )
        except (KeyError, IndexError, TypeError) as exc:
            raise SchemaParseError(f"malformed table entry: {spec!r}") from exc
    return SchemaCatalog(
        schema_id=doc.get("schema_id", schema_id), tables=tables,
        source_format="json-tables",
    )


def _load_ddl(text: str, schema_id: str) -> SchemaCatalog:
    tokens = tokenize(text)
    tables: list[TableDef] = []
    pos = 0

    def peek(off: int = 0) -> Token:
        return tokens[min(pos + off, len(tokens) - 1)]

    while peek().kind != EOF:
        tok = peek()
        if tok.kind == OP and tok.value == ";":
            pos += 1
            continue
        if tok.kind == IDENT and tok.upper() == "CREATE":
            table, pos = _parse_create(tokens, pos)
            if table is not None:
                tables.append(table)
            continue
        raise SchemaParseError(
            f"expected CREATE TABLE, found {tok.value!r} "
            f"(line {tok.line}, column {tok.column})"
        )
    return SchemaCatalog(schema_id=schema_id, tables=tables, source_format="ddl-text")


_COLUMN_CONSTRAINT_STARTERS = {
    "PRIMARY", "NOT", "NULL", "DEFAULT", "UNIQUE", "REFERENCES", "CHECK",
    "COLLATE", "AUTOINCREMENT", "AUTO_INCREMENT", "GENERATED",
}
_TABLE_CONSTRAINT_STARTERS = {"PRIMARY", "FOREIGN", "UNIQUE", "CHECK", "CONSTRAINT"}


def _parse_create(tokens: list[Token], pos: int) -> tuple[TableDef | None, int]:
    def peek(off: int = 0) -> Token:
        return tokens[min(pos + off, len(tokens) - 1)]

    def err(msg: str) -> SchemaParseError:
        tok = peek()
        return SchemaParseError(f"{msg} (line {tok.line}, column {tok.column})")

    pos += 1  # CREATE
    if peek().kind == IDENT and peek().upper() in ("TEMP", "TEMPORARY"):
        pos += 1
    if not (peek().kind == IDENT and peek().upper() == "TABLE"):
        raise err(f"expected TABLE after CREATE, found {peek().value!r}")
    pos += 1
    if peek().kind == IDENT and peek().upper() == "IF":
        pos += 3  # IF NOT EXISTS
    if peek().kind not in (IDENT, QIDENT):
        raise err("expected table name")
    name = peek().value
    pos += 1
    if peek().kind == OP and peek().value == ".":  # schema-qualified name
        pos += 1
        name = peek().value
        pos += 1
    if not (peek().kind == OP and peek().value == "("):
        raise err("expected '(' after table name")
    pos += 1

    columns: list[ColumnDef] = []
    primary_key: list[str] = []
    while True:
        tok = peek()
        if tok.kind == EOF:
            raise err("unterminated CREATE TABLE")
        if tok.kind == IDENT and tok.upper() in _TABLE_CONSTRAINT_STARTERS:
            if tok.upper() == "PRIMARY":
                pos += 2  # PRIMARY KEY
                if peek().kind == OP and peek().value == "(":
                    depth = 0
                    while True:
                        t2 = peek()
                        if t2.kind == OP and t2.value == "(":
                            depth += 1
                        elif t2.kind == OP and t2.value == ")":
                            depth -= 1
                            if depth == 0:
                                pos += 1
                                break
                        elif t2.kind in (IDENT, QIDENT):
                            primary_key.append(t2.value)
                        pos += 1
            else:
                pos = _skip_constraint(tokens, pos)
        else:
            col, pk, nullable, pos = _parse_column(tokens, pos)
            columns.append(ColumnDef(col[0], col[1], nullable))
            if pk:
                primary_key.append(col[0])
        tok = peek()
        if tok.kind == OP and tok.value == ",":
            pos += 1
            continue
        if tok.kind == OP and tok.value == ")":
            pos += 1
            break
        raise err(f"expected ',' or ')' in column list, found {tok.value!r}")

    # trailing table options up to ';'
    while peek().kind != EOF and not (peek().kind == OP and peek().value == ";"):
        pos += 1
    return TableDef(name=name, columns=tuple(columns),
                    primary_key=tuple(primary_key)), pos


def _parse_column(tokens: list[Token], pos: int):
    def peek(off: int = 0) -> Token:
        return tokens[min(pos + off, len(tokens) - 1)]

    if peek().kind not in (IDENT, QIDENT):
        tok = peek()
        raise SchemaParseError(
            f"expected column name, found {tok.value!r} "
            f"(line {tok.line}, column {tok.column})"
        )
    name = peek().value
    pos += 1
    type_parts: list[str] = []
    while peek().kind == IDENT and peek().upper() not in _COLUMN_CONSTRAINT_STARTERS:
        type_parts.append(peek().upper())
        pos += 1
    if peek().kind == OP and peek().value == "(":
        depth = 0
        while True:
            tok = peek()
            type_parts.append(tok.value)
            if tok.kind == OP and tok.value == "(":
                depth += 1
            elif tok.kind == OP and tok.value == ")":
                depth -= 1
                if depth == 0:
                    pos += 1
                    break
            pos += 1
    declared_type = " ".join(type_parts).replace("( ", "(").replace(" )", ")")
    pk = False
    nullable = True
    while True:
        tok = peek()
        if tok.kind == OP and tok.value in (",", ")"):
            break
        if tok.kind == EOF:
            break
        if tok.kind == IDENT and tok.upper() == "PRIMARY":
            pk = True
            pos += 2  # PRIMARY KEY
            continue
        if tok.kind == IDENT and tok.upper() == "NOT" and peek(1).upper() == "NULL":
            nullable = False
            pos += 2
            continue
        if tok.kind == OP and tok.value == "(":  # e.g. CHECK (...)
            depth = 0
            while True:
                t2 = peek()
                if t2.kind == OP and t2.value == "(":
                    depth += 1
                elif t2.kind == OP and t2.value == ")":
                    depth -= 1
                    if depth == 0:
                        pos += 1
                        break
                pos += 1
            continue
        pos += 1
    return (name, declared_type), pk, nullable, pos


def _skip_constraint(tokens: list[Token], pos: int) -> int:
    """Skip a table-level constraint up to the next top-level ',' or ')'."""
    depth = 0
    while True:
        tok = tokens[min(pos, len(tokens) - 1)]
        if tok.kind == EOF:
            return pos
        if tok.kind == OP:
            if tok.value == "(":
                depth += 1
            elif tok.value == ")":
                if depth == 0:
                    return pos
                depth -= 1
            elif tok.value == "," and depth == 0:
                return pos
        pos += 1
