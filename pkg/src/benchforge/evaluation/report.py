"""Project-level backtranslation evaluation report.

For every accepted item: regenerate SQL from the accepted description,
grade it on the rubric, and compute execution/exact-match plus BLEU and
ROUGE-L against the reference question when one was ingested.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from benchforge.errors import NoAcceptedItems
from benchforge.evaluation.backtranslate import backtranslate
from benchforge.evaluation.compare import exact_match, exec_accuracy_match
from benchforge.evaluation.exec_backend import ExecutionBackend
from benchforge.evaluation.metrics import bleu, rouge_l
from benchforge.evaluation.rubric import LEVEL_NAMES, RubricJudgment, classify_rubric
from benchforge.generation.backends import CompletionBackend, GenerationParams


@dataclass
class ItemEval:
    item_id: str
    sql: str
    question: str
    regenerated_sql: str
    judgment: RubricJudgment
    exec_match: bool
    exact: bool
    bleu: float | None = None
    rouge_l: float | None = None

    def to_json(self) -> dict:
        return {
            "item_id": self.item_id,
            "sql": self.sql,
            "question": self.question,
            "regenerated_sql": self.regenerated_sql,
            "rubric": self.judgment.to_json(),
            "exec_match": self.exec_match,
            "exact_match": self.exact,
            "bleu": self.bleu,
            "rouge_l": self.rouge_l,
        }


@dataclass
class EvalReport:
    items: list[ItemEval] = field(default_factory=list)

    @property
    def level_histogram(self) -> dict[int, int]:
        hist = {level: 0 for level in LEVEL_NAMES}
        for item in self.items:
            hist[item.judgment.level] += 1
        return hist

    @property
    def execution_accuracy(self) -> float:
        if not self.items:
            return 0.0
        return sum(1 for i in self.items if i.exec_match) / len(self.items)

    def _mean(self, attr: str) -> float | None:
        values = [getattr(i, attr) for i in self.items
                  if getattr(i, attr) is not None]
        if not values:
            return None
        return sum(values) / len(values)

    def to_json(self) -> dict:
        return {
            "items": [i.to_json() for i in self.items],
            "aggregates": {
                "item_count": len(self.items),
                "level_histogram": {str(k): v
                                    for k, v in self.level_histogram.items()},
                "execution_accuracy": self.execution_accuracy,
                "mean_bleu": self._mean("bleu"),
                "mean_rouge_l": self._mean("rouge_l"),
            },
        }

    def histogram_text(self) -> str:
        """Plain-text bar chart of the rubric level distribution."""
        hist = self.level_histogram
        total = len(self.items)
        lines = [f"Rubric levels over {total} item(s)"]
        for level in sorted(LEVEL_NAMES):
            count = hist[level]
            bar = "#" * count
            lines.append(
                f"  level {level} ({LEVEL_NAMES[level]:<24}): {count:3d} {bar}"
            )
        lines.append(f"execution accuracy: {self.execution_accuracy:.3f}")
        return "\n".join(lines) + "\n"

    def write(self, out_dir: str | Path) -> tuple[Path, Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        json_path = out_dir / "eval_report.json"
        txt_path = out_dir / "eval_report.txt"
        json_path.write_text(
            json.dumps(self.to_json(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        txt_path.write_text(self.histogram_text(), encoding="utf-8")
        return json_path, txt_path


def evaluate_project(engine, db: ExecutionBackend,
                     backend: CompletionBackend | None = None) -> EvalReport:
    """Backtranslate and grade every accepted item of a project."""
    accepted = engine.accepted_items()
    if not accepted:
        raise NoAcceptedItems("project has no accepted items to evaluate")
    backend = backend or engine.backend
    params = GenerationParams(
        model_name=engine.project.config.params.model_name,
        seed=engine.project.config.params.seed,
        n_candidates=1,
    )
    report = EvalReport()
    for item in accepted:
        regen = backtranslate(item.accepted_text, engine.catalog, backend, params)
        judgment = classify_rubric(item.sql, regen, db, engine.catalog)
        record = engine.queries.get(item.query_id)
        reference = record.reference_question if record else None
        report.items.append(ItemEval(
            item_id=item.item_id,
            sql=item.sql,
            question=item.accepted_text,
            regenerated_sql=regen,
            judgment=judgment,
            exec_match=exec_accuracy_match(regen, item.sql, db),
            exact=exact_match(regen, item.sql),
            bleu=bleu(item.accepted_text, [reference]) if reference else None,
            rouge_l=rouge_l(item.accepted_text, reference) if reference else None,
        ))
    return report
