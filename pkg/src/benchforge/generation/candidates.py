"""Candidate generation and recomposition of sub-descriptions."""

from __future__ import annotations

import hashlib
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from benchforge.errors import EmptyCompletion, MissingSubDescription
from benchforge.generation.backends import CompletionBackend, GenerationParams
from benchforge.generation.prompts import PromptContext, build_prompt
from benchforge.sqlmodel.ast import DecompositionPlan
from benchforge.sqlmodel.decompose import plan_to_sql


@dataclass
class Candidate:
    candidate_id: str
    text: str
    origin: str = "generated"  # 'generated' | 'merged' | 'annotator_edited'
    model_id: str = ""
    prompt_hash: str = ""
    rank: int | None = None
    status: str = "proposed"  # 'proposed' | 'edited' | 'accepted' | 'discarded'
    created_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat()
    )

    def to_json(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "text": self.text,
            "origin": self.origin,
            "model_id": self.model_id,
            "prompt_hash": self.prompt_hash,
            "rank": self.rank,
            "status": self.status,
            "created_at": self.created_at,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Candidate":
        return cls(**doc)


def _prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:16]


def _normalize(text: str) -> str:
    return " ".join(text.lower().split())


def _complete_distinct(
    prompt: str, params: GenerationParams, backend: CompletionBackend
) -> list[str]:
    """Backend call with the duplicate policy: regenerate once, then suffix."""
    texts = backend.complete(prompt, params)
    texts = [t for t in texts if t.strip()]
    if not texts:
        raise EmptyCompletion("backend returned blank text for all completions")
    texts = texts[: params.n_candidates]
    if len({_normalize(t) for t in texts}) < params.n_candidates:
        retry = [t for t in backend.complete(prompt, params) if t.strip()]
        seen = {_normalize(t) for t in texts}
        for t in retry:
            if len(texts) >= params.n_candidates and len(seen) >= len(texts):
                break
            if _normalize(t) not in seen:
                seen.add(_normalize(t))
                if len(texts) < params.n_candidates:
                    texts.append(t)
                else:
                    # replace a duplicate
                    for i in range(len(texts)):
                        if sum(1 for x in texts if _normalize(x) == _normalize(texts[i])) > 1:
                            texts[i] = t
                            break
    # pad up to n_candidates if the backend under-delivered
    while len(texts) < params.n_candidates:
        texts.append(texts[0])
    # still-colliding duplicates get a visible variant note
    seen_counts: dict[str, int] = {}
    out = []
    for t in texts[: params.n_candidates]:
        key = _normalize(t)
        seen_counts[key] = seen_counts.get(key, 0) + 1
        if seen_counts[key] > 1:
            t = f"{t} (duplicate variant {seen_counts[key]})"
        out.append(t)
    return out


def generate_candidates(
    ctx: PromptContext,
    params: GenerationParams,
    backend: CompletionBackend,
    template_id: str = "describe-v1",
) -> list[Candidate]:
    """Exactly params.n_candidates proposed candidates with provenance."""
    prompt = build_prompt(ctx, template_id)
    texts = _complete_distinct(prompt, params, backend)
    phash = _prompt_hash(prompt)
    return [
        Candidate(
            candidate_id=uuid.uuid4().hex,
            text=text,
            origin="generated",
            model_id=getattr(backend, "model_id", params.model_name),
            prompt_hash=phash,
        )
        for text in texts
    ]


def merge_descriptions(
    plan: DecompositionPlan,
    sub_nl: list[tuple[str, str]],
    params: GenerationParams,
    backend: CompletionBackend,
    tables=None,
) -> list[Candidate]:
    """Merge per-step descriptions into unified candidates (origin=merged).

    `sub_nl` must cover every plan step plus 'final', in topological order.
    """
    provided = dict(sub_nl)
    required = [s.cte_name for s in plan.steps] + ["final"]
    for name in required:
        if not provided.get(name):
            raise MissingSubDescription(name)
    ordered = [(name, provided[name]) for name in required]
    ctx = PromptContext(
        target_sql=plan_to_sql(plan),
        tables=tables or [],
        mode="merge",
        sub_descriptions=ordered,
    )
    prompt = build_prompt(ctx, "merge-v1")
    texts = _complete_distinct(prompt, params, backend)
    phash = _prompt_hash(prompt)
    return [
        Candidate(
            candidate_id=uuid.uuid4().hex,
            text=text,
            origin="merged",
            model_id=getattr(backend, "model_id", params.model_name),
            prompt_hash=phash,
        )
        for text in texts
    ]
