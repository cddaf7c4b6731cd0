"""SQL parsing, rendering, analysis, and CTE decomposition."""

from benchforge.sqlmodel.analysis import (
    extract_tables,
    nesting_depth,
    referenced_table_names,
)
from benchforge.sqlmodel.ast import DecompositionPlan, DecompositionStep, SqlAst
from benchforge.sqlmodel.decompose import decompose, plan_step_sql, plan_to_sql
from benchforge.sqlmodel.parser import parse_sql
from benchforge.sqlmodel.render import render_sql
from benchforge.sqlmodel.schema import ColumnDef, SchemaCatalog, TableDef, load_schema

__all__ = [
    "ColumnDef",
    "DecompositionPlan",
    "DecompositionStep",
    "SchemaCatalog",
    "SqlAst",
    "TableDef",
    "decompose",
    "extract_tables",
    "load_schema",
    "nesting_depth",
    "parse_sql",
    "plan_step_sql",
    "plan_to_sql",
    "referenced_table_names",
    "render_sql",
]
