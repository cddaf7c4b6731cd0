"""Workflow domain objects: projects, query records, annotation items."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import datetime, timezone

from benchforge.generation.backends import GenerationParams
from benchforge.generation.candidates import Candidate

STATES = ("pending", "drafted", "in_review", "accepted", "discarded")

# legal item-state transitions; accepted -> in_review only via explicit reopen
ALLOWED_TRANSITIONS = {
    "pending": {"drafted"},
    "drafted": {"in_review", "accepted", "pending"},
    "in_review": {"accepted", "discarded", "drafted"},
    "accepted": {"in_review"},
    "discarded": set(),
}

FEEDBACK_KINDS = ("rank", "edit", "discard", "refine", "accept", "reopen", "flag")

DEFAULT_LEASE_TTL_SECS = 30 * 60


def utcnow_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def content_id(*parts: str) -> str:
    return hashlib.sha1("\x1f".join(parts).encode("utf-8")).hexdigest()[:12]


@dataclass
class ProjectConfig:
    params: GenerationParams = field(default_factory=GenerationParams)
    template_id: str = "describe-v1"
    k_examples: int = 3
    k_tables: int = 5
    lease_ttl_secs: int = DEFAULT_LEASE_TTL_SECS
    direction: str = "sql_to_nl"

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "template_id": self.template_id,
            "k_examples": self.k_examples,
            "k_tables": self.k_tables,
            "lease_ttl_secs": self.lease_ttl_secs,
            "direction": self.direction,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ProjectConfig":
        doc = dict(doc)
        params = GenerationParams.from_json(doc.pop("params", {}))
        return cls(params=params, **doc)


@dataclass
class Project:
    project_id: str
    name: str
    dialect: str = "generic"
    config: ProjectConfig = field(default_factory=ProjectConfig)
    schema_id: str | None = None
    created_at: str = field(default_factory=utcnow_iso)

    def to_json(self) -> dict:
        return {
            "project_id": self.project_id,
            "name": self.name,
            "dialect": self.dialect,
            "config": self.config.to_json(),
            "schema_id": self.schema_id,
            "created_at": self.created_at,
        }


@dataclass
class QueryRecord:
    query_id: str
    raw_sql: str
    normalized_sql: str
    source_tag: str = ""
    is_nested: bool = False
    correlated: bool = False
    decomposition: list[tuple[str, str]] | None = None  # (cte_name, sql) pairs
    reference_question: str | None = None

    def to_json(self) -> dict:
        return {
            "query_id": self.query_id,
            "raw_sql": self.raw_sql,
            "normalized_sql": self.normalized_sql,
            "source_tag": self.source_tag,
            "is_nested": self.is_nested,
            "correlated": self.correlated,
            "decomposition": self.decomposition,
            "reference_question": self.reference_question,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "QueryRecord":
        doc = dict(doc)
        if doc.get("decomposition"):
            doc["decomposition"] = [tuple(p) for p in doc["decomposition"]]
        return cls(**doc)


@dataclass
class FeedbackEvent:
    event_id: str
    annotator_id: str
    kind: str  # one of FEEDBACK_KINDS
    payload: dict = field(default_factory=dict)
    timestamp: str = field(default_factory=utcnow_iso)

    def to_json(self) -> dict:
        return {
            "event_id": self.event_id,
            "annotator_id": self.annotator_id,
            "kind": self.kind,
            "payload": self.payload,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FeedbackEvent":
        return cls(**doc)


@dataclass
class Lease:
    annotator_id: str
    expires_at: float  # unix timestamp

    def expired(self, now: float) -> bool:
        return now >= self.expires_at

    def to_json(self) -> dict:
        return {"annotator_id": self.annotator_id, "expires_at": self.expires_at}

    @classmethod
    def from_json(cls, doc: dict) -> "Lease":
        return cls(**doc)


@dataclass
class AnnotationItem:
    item_id: str
    query_id: str
    sql: str  # normalized SQL this item describes (sub-items: the step SQL)
    state: str = "pending"
    cte_name: str | None = None  # set on sub-items ('step_k' or 'final')
    parent_id: str | None = None
    candidates: list[Candidate] = field(default_factory=list)
    sub_items: list["AnnotationItem"] = field(default_factory=list)
    feedback_log: list[FeedbackEvent] = field(default_factory=list)
    refinement_notes: list[str] = field(default_factory=list)
    lease: Lease | None = None
    accepted_text: str | None = None
    used_retrieval_fallback: bool = False
    created_seq: int = 0

    @property
    def is_nested(self) -> bool:
        return bool(self.sub_items)

    def find_candidate(self, candidate_id: str) -> Candidate | None:
        for cand in self.candidates:
            if cand.candidate_id == candidate_id:
                return cand
        return None

    def next_unaccepted_sub(self) -> "AnnotationItem | None":
        for sub in self.sub_items:
            if sub.state != "accepted":
                return sub
        return None

    def to_json(self) -> dict:
        return {
            "item_id": self.item_id,
            "query_id": self.query_id,
            "sql": self.sql,
            "state": self.state,
            "cte_name": self.cte_name,
            "parent_id": self.parent_id,
            "candidates": [c.to_json() for c in self.candidates],
            "sub_items": [s.to_json() for s in self.sub_items],
            "feedback_log": [e.to_json() for e in self.feedback_log],
            "refinement_notes": list(self.refinement_notes),
            "lease": self.lease.to_json() if self.lease else None,
            "accepted_text": self.accepted_text,
            "used_retrieval_fallback": self.used_retrieval_fallback,
            "created_seq": self.created_seq,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "AnnotationItem":
        doc = dict(doc)
        doc["candidates"] = [Candidate.from_json(c) for c in doc.get("candidates", [])]
        doc["sub_items"] = [cls.from_json(s) for s in doc.get("sub_items", [])]
        doc["feedback_log"] = [
            FeedbackEvent.from_json(e) for e in doc.get("feedback_log", [])
        ]
        if doc.get("lease"):
            doc["lease"] = Lease.from_json(doc["lease"])
        return cls(**doc)


@dataclass
class IngestionReport:
    accepted: int = 0
    skipped_duplicate: int = 0
    skipped_non_select: int = 0
    parse_failures: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def total(self) -> int:
        return (self.accepted + self.skipped_duplicate
                + self.skipped_non_select + self.parse_failures)

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "skipped_duplicate": self.skipped_duplicate,
            "skipped_non_select": self.skipped_non_select,
            "parse_failures": self.parse_failures,
            "failures": self.failures,
        }
