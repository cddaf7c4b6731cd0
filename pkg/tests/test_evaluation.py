"""Execution backend, result comparison, rubric, and report tests."""

import json

import pytest

from benchforge.errors import ExecError, NoAcceptedItems
from benchforge.evaluation import (
    ExecutionBackend,
    backtranslate,
    classify_rubric,
    exact_match,
    exec_accuracy_match,
    evaluate_project,
    execute,
    strip_code_fences,
)
from benchforge.generation import GenerationParams, MockBackend
from benchforge.workflow import Workspace


class TestExecutionBackend:
    def test_select_one(self, db):
        result = execute(db, "SELECT 1")
        assert result.rows == [(1,)]
        assert len(result.column_names) == 1

    def test_unknown_table(self, db):
        with pytest.raises(ExecError) as exc:
            db.run("SELECT * FROM no_such_table")
        assert exc.value.category == "unknown_object"

    def test_syntax_error(self, db):
        with pytest.raises(ExecError) as exc:
            db.run("SELEC")
        assert exc.value.category == "syntax"

    def test_fixture_row_counts(self, db):
        # hand-counted from the CSVs
        assert len(db.run("SELECT * FROM students").rows) == 12
        assert len(db.run("SELECT * FROM students WHERE year = 2024").rows) == 4
        assert len(db.run("SELECT * FROM terms").rows) == 6

    def test_ordered_flag(self, db):
        assert db.run("SELECT name FROM students ORDER BY name").ordered
        assert not db.run("SELECT name FROM students").ordered
        # ORDER BY inside a subquery is not top-level
        assert not db.run(
            "SELECT * FROM (SELECT name FROM students ORDER BY name) AS x"
        ).ordered


# (pred, gold, expected) triples per the execution-accuracy definition
EXEC_ACC_CASES = [
    # reflexivity
    ("SELECT name FROM students", "SELECT name FROM students", True),
    # aliases do not affect values
    ("SELECT name AS n FROM students WHERE year = 2024",
     "SELECT name FROM students WHERE year = 2024", True),
    # column-permutation alignment
    ("SELECT year, name FROM students", "SELECT name, year FROM students", True),
    # ordered gold: reversed order fails
    ("SELECT name FROM students ORDER BY name DESC",
     "SELECT name FROM students ORDER BY name ASC", False),
    # ordered gold: same order passes
    ("SELECT name FROM students ORDER BY name",
     "SELECT name FROM students ORDER BY name ASC", True),
    # unordered gold: any order passes
    ("SELECT name FROM students ORDER BY gpa", "SELECT name FROM students", True),
    # multiset sensitivity: dedup is a mismatch
    ("SELECT DISTINCT department FROM students",
     "SELECT department FROM students", False),
    # different rows
    ("SELECT name FROM students WHERE year = 2023",
     "SELECT name FROM students WHERE year = 2024", False),
    # arity mismatch
    ("SELECT name, year FROM students", "SELECT name FROM students", False),
    # pred execution failure -> false, not an error
    ("SELECT * FROM no_such_table", "SELECT name FROM students", False),
]


class TestExecAccuracy:
    @pytest.mark.parametrize("pred,gold,expected", EXEC_ACC_CASES)
    def test_crafted_pairs(self, db, pred, gold, expected):
        assert exec_accuracy_match(pred, gold, db) is expected

    def test_gold_failure_is_false(self, db):
        assert exec_accuracy_match("SELECT 1", "SELECT * FROM nope", db) is False


class TestExactMatch:
    def test_canonicalization(self):
        assert exact_match("select a from t", "SELECT a FROM t")

    def test_different_columns(self):
        assert not exact_match("SELECT a FROM t", "SELECT b FROM t")

    def test_alias_difference_is_syntactic(self):
        assert not exact_match("SELECT a AS x FROM t", "SELECT a FROM t")

    def test_unparsable_fallback(self):
        assert exact_match("SELEC  a", "SELEC a")


# 15-case rubric suite: (original, regenerated, expected level)
RUBRIC_CASES = [
    # level 1: fails to execute
    ("SELECT name FROM students", "SELEC", 1),
    ("SELECT name FROM students", "SELECT * FROM no_such_table", 1),
    ("SELECT year FROM terms", "SELECT year FROM", 1),
    # level 2: executes, wrong base-table set
    ("SELECT name FROM students", "SELECT name FROM employees", 2),
    ("SELECT year FROM terms", "SELECT year FROM students", 2),
    ("SELECT students.name FROM students JOIN enrollments "
     "ON students.id = enrollments.student_id",
     "SELECT name FROM students", 2),
    # level 3: same tables, result multiset differs
    ("SELECT name FROM students WHERE year = 2024",
     "SELECT name FROM students WHERE year = 2023", 3),
    ("SELECT gpa FROM students", "SELECT name FROM students", 3),
    ("SELECT COUNT(*) FROM students",
     "SELECT COUNT(*) FROM students WHERE year = 2024", 3),
    # level 4: multiset equal, ordering or superfluous-clause issues
    ("SELECT name FROM students ORDER BY name ASC",
     "SELECT name FROM students ORDER BY name DESC", 4),
    ("SELECT name FROM students",
     "SELECT name FROM students ORDER BY name", 4),
    ("SELECT dept_name FROM departments",
     "SELECT DISTINCT dept_name FROM departments", 4),
    # level 5: full match
    ("SELECT name FROM students WHERE year = 2024",
     "SELECT name FROM students WHERE year = 2024", 5),
    ("SELECT name FROM students WHERE year = 2024",
     "SELECT name AS n FROM students WHERE year = 2024", 5),
    ("SELECT name FROM students ORDER BY name",
     "select name from students order by name asc", 5),
]


class TestRubric:
    @pytest.mark.parametrize("original,regen,level", RUBRIC_CASES)
    def test_crafted_levels(self, db, original, regen, level):
        judgment = classify_rubric(original, regen, db)
        assert judgment.level == level, judgment

    @pytest.mark.parametrize("original,regen,level", RUBRIC_CASES)
    def test_deterministic(self, db, original, regen, level):
        a = classify_rubric(original, regen, db)
        b = classify_rubric(original, regen, db)
        assert (a.level, a.reason) == (b.level, b.reason)

    @pytest.mark.parametrize("original,regen,level", RUBRIC_CASES)
    def test_consistency_with_exec_match(self, db, original, regen, level):
        judgment = classify_rubric(original, regen, db)
        exec_ok = exec_accuracy_match(regen, original, db)
        if judgment.level == 5:
            assert exec_ok
        if judgment.level <= 3:
            assert not exec_ok

    def test_level4_implies_multiset_match(self, db):
        from collections import Counter
        for original, regen, level in RUBRIC_CASES:
            if level != 4:
                continue
            a = Counter(db.run(original).rows)
            b = Counter(db.run(regen).rows)
            assert a == b

    def test_override_records_annotator(self, db):
        auto = classify_rubric("SELECT name FROM students",
                               "SELECT name FROM students", db)
        human = auto.override(3, "reviewer-7")
        assert human.level == 3
        assert not human.auto
        assert human.overridden_by == "reviewer-7"
        assert "5" in human.detail

    def test_invalid_level_rejected(self, db):
        auto = classify_rubric("SELECT 1", "SELECT 1", db)
        with pytest.raises(ValueError):
            auto.override(6, "reviewer")


class TestBacktranslate:
    def test_strip_code_fences(self):
        assert strip_code_fences("```sql\nSELECT 1\n```") == "SELECT 1"
        assert strip_code_fences("SELECT 1") == "SELECT 1"

    def test_empty_nl_rejected(self, catalog):
        with pytest.raises(ValueError):
            backtranslate("  ", catalog, MockBackend())

    def test_mock_round_trip(self, catalog, db):
        nl = "List name from students where year = 2024."
        sql = backtranslate(nl, catalog, MockBackend())
        assert exec_accuracy_match(sql, "SELECT name FROM students WHERE year = 2024", db)


def _annotated_project(tmp_path, clock, schema_ddl, queries):
    ws = Workspace(tmp_path / "ws", clock=clock)
    engine = ws.create_project("eval-proj")
    engine.ingest_schema(schema_ddl)
    engine.ingest_queries(queries)
    while True:
        try:
            item = engine.annotate_next("ann")
        except Exception:
            break
        engine.accept(item.item_id, "ann", item.candidates[0].candidate_id)
    return engine


class TestEvaluateProject:
    def test_empty_project_raises(self, tmp_path, clock, schema_ddl, db):
        ws = Workspace(tmp_path / "ws", clock=clock)
        engine = ws.create_project("empty")
        with pytest.raises(NoAcceptedItems):
            evaluate_project(engine, db)

    def test_invertible_items_all_level5(self, tmp_path, clock, schema_ddl, db):
        engine = _annotated_project(
            tmp_path, clock, schema_ddl,
            "SELECT name FROM students WHERE year = 2024;\n"
            "SELECT department, COUNT(*) FROM students GROUP BY department;")
        report = evaluate_project(engine, db)
        assert len(report.items) == 2
        assert report.execution_accuracy == 1.0
        assert all(i.judgment.level == 5 for i in report.items)

    def test_corrupted_nl_drops_accuracy(self, tmp_path, clock, schema_ddl, db):
        engine = _annotated_project(
            tmp_path, clock, schema_ddl,
            "SELECT name FROM students WHERE year = 2024;\n"
            "SELECT name FROM employees;")
        # corrupt the second item's accepted text to reference the wrong table
        bad = engine.accepted_items()[1]
        bad.accepted_text = "List name from students."
        report = evaluate_project(engine, db)
        assert report.execution_accuracy == 0.5
        assert report.items[1].judgment.level <= 3

    def test_histogram_sums_to_item_count(self, tmp_path, clock, schema_ddl, db):
        engine = _annotated_project(
            tmp_path, clock, schema_ddl,
            "SELECT name FROM students;\nSELECT year FROM terms;")
        report = evaluate_project(engine, db)
        assert sum(report.level_histogram.values()) == len(report.items)

    def test_bleu_rouge_against_reference_question(self, tmp_path, clock,
                                                   schema_ddl, db):
        benchmark = json.dumps([{
            "question": "List name from students where year = 2024.",
            "query": "SELECT name FROM students WHERE year = 2024",
            "db_id": "campus",
        }])
        engine = _annotated_project(tmp_path, clock, schema_ddl, benchmark)
        report = evaluate_project(engine, db)
        assert report.items[0].bleu is not None
        assert report.items[0].rouge_l is not None
        assert 0.0 <= report.items[0].bleu <= 1.0

    def test_report_files_written(self, tmp_path, clock, schema_ddl, db):
        engine = _annotated_project(
            tmp_path, clock, schema_ddl, "SELECT name FROM students;")
        report = evaluate_project(engine, db)
        json_path, txt_path = report.write(tmp_path / "out")
        doc = json.loads(json_path.read_text())
        assert doc["aggregates"]["item_count"] == 1
        assert "level 5" in txt_path.read_text()
