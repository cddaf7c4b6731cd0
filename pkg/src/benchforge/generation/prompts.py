"""Prompt construction for candidate generation, merging, and backtranslation.

Prompts are deterministic: identical context yields byte-identical text.
Sections appear in a fixed order — task instruction, tables, examples,
annotator guidance, the fenced target SQL, then the output-format line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from benchforge.errors import UnknownTemplate
from benchforge.sqlmodel.schema import TableDef

DESCRIBE_TASK = (
    "Task: Write one plain-sentence natural language description of the SQL "
    "query below."
)
MERGE_TASK = (
    "Task: Combine the step descriptions below into a single coherent "
    "description of the original SQL query."
)
BACKTRANSLATE_TASK = (
    "Task: Translate the description into a single SQL query for the schema "
    "below."
)


@dataclass
class PromptContext:
    target_sql: str
    tables: list[TableDef] = field(default_factory=list)
    examples: list[tuple[str, str]] = field(default_factory=list)
    refinement_notes: list[str] = field(default_factory=list)
    mode: str = "describe"  # 'describe' | 'merge'
    sub_descriptions: list[tuple[str, str]] = field(default_factory=list)


def _table_lines(tables: list[TableDef]) -> list[str]:
    lines = ["Tables:"]
    for table in tables:
        cols = ", ".join(table.column_names())
        lines.append(f"- {table.name}: {cols}")
    return lines


def build_prompt(ctx: PromptContext, template_id: str = "describe-v1") -> str:
    if template_id == "describe-v1":
        return _build_describe(ctx)
    if template_id == "merge-v1":
        return _build_merge(ctx)
    raise UnknownTemplate(template_id)


def _build_describe(ctx: PromptContext) -> str:
    lines = [DESCRIBE_TASK]
    if ctx.tables:
        lines.extend(_table_lines(ctx.tables))
    for i, (sql, nl) in enumerate(ctx.examples, start=1):
        lines.append(f"Example {i}:")
        lines.append(f"SQL: {sql}")
        lines.append(f"Description: {nl}")
    for note in ctx.refinement_notes:
        lines.append(f"Annotator guidance: {note}")
    lines.append("SQL:")
    lines.append("```sql")
    lines.append(ctx.target_sql)
    lines.append("```")
    lines.append(
        "Respond with a single plain sentence describing what the query returns."
    )
    return "\n".join(lines)


def _build_merge(ctx: PromptContext) -> str:
    lines = [MERGE_TASK]
    if ctx.tables:
        lines.extend(_table_lines(ctx.tables))
    lines.append("Steps:")
    for name, nl in ctx.sub_descriptions:
        lines.append(f"- {name}: {nl}")
    for note in ctx.refinement_notes:
        lines.append(f"Annotator guidance: {note}")
    lines.append("SQL:")
    lines.append("```sql")
    lines.append(ctx.target_sql)
    lines.append("```")
    lines.append("Respond with one unified plain-sentence description.")
    return "\n".join(lines)


def build_backtranslation_prompt(nl: str, tables: list[TableDef]) -> str:
    """Vanilla prompt: schema plus the description only, no examples."""
    lines = [BACKTRANSLATE_TASK]
    if tables:
        lines.extend(_table_lines(tables))
    lines.append(f"Description: {nl}")
    lines.append("Respond with only the SQL query.")
    return "\n".join(lines)
