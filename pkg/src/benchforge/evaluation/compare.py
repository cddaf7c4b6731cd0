"""Result comparison: execution-accuracy matching and syntactic exact match."""

from __future__ import annotations

from collections import Counter
from itertools import permutations

from benchforge.errors import BenchforgeError, ExecError
from benchforge.evaluation.exec_backend import ExecutionBackend, ResultTable
from benchforge.sqlmodel.parser import parse_sql
from benchforge.sqlmodel.render import render_sql

_MAX_PERMUTATION_ARITY = 6


def results_match(pred: ResultTable, gold: ResultTable) -> bool:
    """Value-level equality: multiset of rows, column order insensitive.

    Column names are ignored (aliases do not affect values). When the gold
    query is ordered, row sequences must match, not just multisets.
    """
    if len(pred.column_names) != len(gold.column_names):
        return False
    if _rows_equal(pred.rows, gold.rows, gold.ordered):
        return True
    arity = len(gold.column_names)
    if arity <= 1 or arity > _MAX_PERMUTATION_ARITY:
        return False
    for perm in permutations(range(arity)):
        if perm == tuple(range(arity)):
            continue
        permuted = [tuple(row[i] for i in perm) for row in pred.rows]
        if _rows_equal(permuted, gold.rows, gold.ordered):
            return True
    return False


def _rows_equal(pred_rows: list[tuple], gold_rows: list[tuple], ordered: bool) -> bool:
    if ordered:
        return pred_rows == gold_rows
    return Counter(pred_rows) == Counter(gold_rows)


def exec_accuracy_match(pred_sql: str, gold_sql: str, db: ExecutionBackend) -> bool:
    """True iff both queries execute and their results match (gold's order
    semantics). Execution failure of either side is a mismatch, not an error."""
    try:
        pred = db.run(pred_sql)
        gold = db.run(gold_sql)
    except ExecError:
        return False
    return results_match(pred, gold)


def exact_match(a: str, b: str) -> bool:
    """Equality of canonical renderings; falls back to whitespace-normalized
    comparison when either side does not parse."""
    try:
        return render_sql(parse_sql(a)) == render_sql(parse_sql(b))
    except BenchforgeError:
        return " ".join(a.split()) == " ".join(b.split())
