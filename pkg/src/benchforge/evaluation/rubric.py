"""Automated 5-level fidelity rubric for backtranslated SQL.

Mechanical approximation of the human grading scale, so results are total
and deterministic; judgments carry an `auto` flag and can be overridden by a
reviewer (the override is recorded with the annotator id).

Decision procedure, first match wins:
 1. regenerated SQL fails to execute               -> level 1
 2. executes, different base-table set             -> level 2
 3. same tables, result multiset differs           -> level 3
 4. multiset equal, but ordering wrong when the original is ordered,
    or superfluous ORDER BY/DISTINCT added         -> level 4
 5. full execution match, no superfluous clauses   -> level 5
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from benchforge.errors import BenchforgeError, ExecError
from benchforge.evaluation.compare import _rows_equal, results_match
from benchforge.evaluation.exec_backend import ExecutionBackend
from benchforge.sqlmodel.analysis import referenced_table_names
from benchforge.sqlmodel.parser import parse_sql

LEVEL_NAMES = {
    1: "invalid",
    2: "structurally_incorrect",
    3: "column_level_errors",
    4: "minor_issues",
    5: "fully_correct",
}


@dataclass
class RubricJudgment:
    level: int
    reason: str
    detail: str = ""
    auto: bool = True
    overridden_by: str | None = None

    def __post_init__(self):
        if self.level not in LEVEL_NAMES:
            raise ValueError(f"rubric level must be 1..5, got {self.level}")

    def override(self, level: int, annotator_id: str) -> "RubricJudgment":
        return RubricJudgment(
            level=level,
            reason="human_override",
            detail=f"auto level was {self.level}",
            auto=False,
            overridden_by=annotator_id,
        )

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "reason": self.reason,
            "detail": self.detail,
            "auto": self.auto,
            "overridden_by": self.overridden_by,
        }


def _base_tables(sql: str) -> frozenset[str]:
    try:
        names = referenced_table_names(parse_sql(sql))
    except BenchforgeError:
        # executable but outside our grammar: fall back to a keyword scan
        names = re.findall(
            r"\b(?:FROM|JOIN)\s+([A-Za-z_][A-Za-z0-9_]*)", sql, re.IGNORECASE
        )
    return frozenset(n.strip('"').lower() for n in names)


def _has_superfluous_clauses(original_sql: str, regen_sql: str) -> bool:
    """Regen adds ORDER BY or DISTINCT the original does not have."""
    def flags(sql: str) -> tuple[bool, bool]:
        has_order = bool(re.search(r"\border\s+by\b", sql, re.IGNORECASE))
        has_distinct = bool(re.search(r"\bdistinct\b", sql, re.IGNORECASE))
        return has_order, has_distinct

    orig_order, orig_distinct = flags(original_sql)
    regen_order, regen_distinct = flags(regen_sql)
    return (regen_order and not orig_order) or (regen_distinct and not orig_distinct)


def classify_rubric(
    original_sql: str, regen_sql: str, db: ExecutionBackend, catalog=None
) -> RubricJudgment:
    """Grade the regenerated SQL against the original on a fixture database.

    The original must execute (precondition of a well-formed benchmark item).
    """
    original = db.run(original_sql)
    try:
        regen = db.run(regen_sql)
    except ExecError as exc:
        return RubricJudgment(level=1, reason="fails_to_execute",
                              detail=f"{exc.category}: {exc}")

    if _base_tables(regen_sql) != _base_tables(original_sql):
        return RubricJudgment(level=2, reason="wrong_tables",
                              detail="base-table sets differ")

    multiset_ok = (
        len(regen.column_names) == len(original.column_names)
        and results_match(
            regen,
            # compare as multisets regardless of the original's ordering
            type(original)(original.column_names, original.rows, ordered=False),
        )
    )
    if not multiset_ok:
        return RubricJudgment(level=3, reason="wrong_results",
                              detail="result multisets differ")

    if original.ordered and not _rows_equal(regen.rows, original.rows, ordered=True):
        return RubricJudgment(level=4, reason="incorrect_sorting",
                              detail="rows match as a multiset but not in order")
    if _has_superfluous_clauses(original_sql, regen_sql):
        return RubricJudgment(level=4, reason="superfluous_clauses",
                              detail="extra ORDER BY or DISTINCT")
    return RubricJudgment(level=5, reason="fully_correct")
