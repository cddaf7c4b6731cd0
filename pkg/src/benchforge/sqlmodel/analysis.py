"""Structural analysis over parsed SQL: nesting depth and table extraction."""

from __future__ import annotations

from benchforge.errors import UnknownTable
from benchforge.sqlmodel import ast as a
from benchforge.sqlmodel.schema import SchemaCatalog, TableDef


def immediate_subqueries(query: a.Query) -> list[a.Query]:
    """Queries nested exactly one level below `query` (CTE bodies included)."""
    found: list[a.Query] = []

    def visit(node):
        if isinstance(node, a.Query):
            found.append(node)
            return
        for child in a._children(node):
            visit(child)

    for _, cte in query.ctes:
        found.append(cte)
    visit(query.body)
    for item in query.order_by:
        visit(item.expr)
    if query.limit is not None:
        visit(query.limit)
    if query.offset is not None:
        visit(query.offset)
    return found


def query_depth(query: a.Query) -> int:
    children = immediate_subqueries(query)
    if not children:
        return 0
    return 1 + max(query_depth(c) for c in children)


def nesting_depth(ast: a.SqlAst) -> int:
    """Maximum nesting level of select-cores below the root (0 = flat)."""
    return query_depth(ast.root)


def referenced_table_names(node) -> list[str]:
    """Base table names referenced anywhere, CTE names excluded, in order
    of first appearance (case-insensitive dedup)."""
    cte_names = {
        name.strip('"').lower()
        for n in a.walk(node)
        if isinstance(n, a.Query)
        for name, _ in n.ctes
    }
    names: list[str] = []
    seen: set[str] = set()
    for n in a.walk(node):
        if isinstance(n, a.TableRef):
            key = n.name.strip('"').lower()
            if key in cte_names or key in seen:
                continue
            seen.add(key)
            names.append(n.name)
    return names


def extract_tables(ast: a.SqlAst, catalog: SchemaCatalog) -> list[TableDef]:
    """Every base table the query references, with full column lists.

    Raises UnknownTable for names absent from the catalog; callers may fall
    back to embedding-based retrieval.
    """
    tables: list[TableDef] = []
    for name in referenced_table_names(ast):
        table = catalog.lookup(name)
        if table is None:
            raise UnknownTable(name)
        tables.append(table)
    return tables
