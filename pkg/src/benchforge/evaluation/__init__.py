"""Backtranslation fidelity evaluation: execution, rubric, and metrics."""

from benchforge.evaluation.backtranslate import backtranslate, strip_code_fences
from benchforge.evaluation.compare import (
    exact_match,
    exec_accuracy_match,
    results_match,
)
from benchforge.evaluation.exec_backend import ExecutionBackend, ResultTable, execute
from benchforge.evaluation.metrics import bleu, rouge_l, tokenize
from benchforge.evaluation.report import EvalReport, ItemEval, evaluate_project
from benchforge.evaluation.rubric import (
    LEVEL_NAMES,
    RubricJudgment,
    classify_rubric,
)

__all__ = [
    "LEVEL_NAMES",
    "EvalReport",
    "ExecutionBackend",
    "ItemEval",
    "ResultTable",
    "RubricJudgment",
    "backtranslate",
    "bleu",
    "classify_rubric",
    "evaluate_project",
    "exact_match",
    "exec_accuracy_match",
    "execute",
    "results_match",
    "rouge_l",
    "strip_code_fences",
    "tokenize",
]
