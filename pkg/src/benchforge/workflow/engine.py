"""Project engine: ingestion, the annotation state machine, and export.

All mutations flow through the event log (command validates, then appends an
event and applies it), so replaying the log reconstructs the state exactly.
A per-project lock serializes mutations; generation backend calls run
outside the lock so slow completions never block other annotators' reads.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from pathlib import Path

from benchforge.errors import (
    BackendError,
    CorrelatedSubquery,
    DuplicateName,
    InvalidTransition,
    LeaseMismatch,
    NothingAccepted,
    QueueEmpty,
    SqlSyntaxError,
    UnknownCandidate,
    UnknownItem,
    UnknownProject,
    UnsupportedConstruct,
)
from benchforge.generation.backends import CompletionBackend, MockBackend
from benchforge.generation.candidates import (
    Candidate,
    generate_candidates,
    merge_descriptions,
)
from benchforge.generation.prompts import PromptContext
from benchforge.retrieval import (
    VectorIndex,
    index_table_signatures,
    retrieve_examples,
    retrieve_schema_context,
)
from benchforge.sqlmodel import (
    decompose,
    load_schema,
    nesting_depth,
    parse_sql,
    plan_step_sql,
    render_sql,
)
from benchforge.sqlmodel.schema import SchemaCatalog
from benchforge.workflow.models import (
    ALLOWED_TRANSITIONS,
    AnnotationItem,
    FeedbackEvent,
    IngestionReport,
    Lease,
    Project,
    ProjectConfig,
    QueryRecord,
    content_id,
    utcnow_iso,
)
from benchforge.workflow.store import EventLog


class ProjectEngine:
    def __init__(
        self,
        project: Project,
        log: EventLog,
        backend: CompletionBackend | None = None,
        clock=time.time,
    ):
        self.project = project
        self.log = log
        self.backend = backend or MockBackend()
        self.clock = clock
        self.lock = threading.RLock()

        self.catalog: SchemaCatalog | None = None
        self.queries: dict[str, QueryRecord] = {}
        self.items: list[AnnotationItem] = []  # top-level, creation order
        self._items_by_id: dict[str, AnnotationItem] = {}
        self.index = VectorIndex()
        self._next_seq = 0

        if len(log) == 0:
            self._append({"type": "project_created", "project": project.to_json()})
        else:
            for event in log.events():
                self._apply(event)

    # --- event machinery ---------------------------------------------------

    def _append(self, event: dict) -> None:
        self.log.append(event)
        self._apply(event)

    def _apply(self, event: dict) -> None:
        handler = getattr(self, f"_apply_{event['type']}")
        handler(event)

    def _apply_project_created(self, event: dict) -> None:
        doc = event["project"]
        self.project = Project(
            project_id=doc["project_id"],
            name=doc["name"],
            dialect=doc["dialect"],
            config=ProjectConfig.from_json(doc["config"]),
            schema_id=doc.get("schema_id"),
            created_at=doc["created_at"],
        )

    def _apply_schema_ingested(self, event: dict) -> None:
        self.catalog = load_schema(
            json.dumps(event["schema"]), format_hint="json-tables"
        )
        self.project.schema_id = self.catalog.schema_id
        index_table_signatures(self.index, self.catalog)

    def _apply_query_ingested(self, event: dict) -> None:
        record = QueryRecord.from_json(event["query"])
        item = AnnotationItem.from_json(event["item"])
        self.queries[record.query_id] = record
        self.items.append(item)
        self._register(item)
        self._next_seq = max(self._next_seq, item.created_seq + 1)

    def _register(self, item: AnnotationItem) -> None:
        self._items_by_id[item.item_id] = item
        for sub in item.sub_items:
            self._items_by_id[sub.item_id] = sub

    def _apply_item_leased(self, event: dict) -> None:
        item = self._items_by_id[event["item_id"]]
        item.lease = Lease(event["annotator_id"], event["expires_at"])

    def _apply_lease_released(self, event: dict) -> None:
        item = self._items_by_id[event["item_id"]]
        item.lease = None

    def _apply_candidates_set(self, event: dict) -> None:
        item = self._items_by_id[event["item_id"]]
        if event.get("discard_previous"):
            for cand in item.candidates:
                if cand.status == "proposed":
                    cand.status = "discarded"
        item.candidates.extend(Candidate.from_json(c) for c in event["candidates"])
        if event.get("fallback"):
            item.used_retrieval_fallback = True
        if item.state == "pending":
            item.state = "drafted"

    def _apply_feedback(self, event: dict) -> None:
        item = self._items_by_id[event["item_id"]]
        fb = FeedbackEvent.from_json(event["event"])
        item.feedback_log.append(fb)
        if fb.kind == "rank":
            ordering = fb.payload["ordering"]
            for rank, cid in enumerate(ordering, start=1):
                cand = item.find_candidate(cid)
                cand.rank = rank
        elif fb.kind == "edit":
            item.candidates.append(Candidate.from_json(fb.payload["new_candidate"]))
        elif fb.kind == "discard":
            item.find_candidate(fb.payload["candidate_id"]).status = "discarded"
        elif fb.kind == "refine":
            item.refinement_notes.append(fb.payload["note"])
        elif fb.kind == "flag":
            item.state = "in_review"

    def _apply_item_accepted(self, event: dict) -> None:
        item = self._items_by_id[event["item_id"]]
        for fb_doc in event["events"]:
            item.feedback_log.append(FeedbackEvent.from_json(fb_doc))
        cand = item.find_candidate(event["candidate_id"])
        cand.status = "accepted"
        item.state = "accepted"
        item.accepted_text = event["text"]
        item.lease = None
        entry_id = f"ex:{item.item_id}"
        if not any(e.entry_id == entry_id for e in self.index.entries):
            self.index.add(entry_id, "example",
                           f"{item.sql}\n{event['text']}",
                           (item.sql, event["text"]))
        if item.parent_id and event.get("release_parent"):
            parent = self._items_by_id[item.parent_id]
            parent.lease = None

    def _apply_item_reopened(self, event: dict) -> None:
        item = self._items_by_id[event["item_id"]]
        item.feedback_log.append(FeedbackEvent.from_json(event["event"]))
        for cand in item.candidates:
            if cand.status == "accepted":
                cand.status = "proposed"
        item.state = "in_review"
        item.accepted_text = None

    # --- queries over state -------------------------------------------------

    def get_item(self, item_id: str) -> AnnotationItem:
        item = self._items_by_id.get(item_id)
        if item is None:
            raise UnknownItem(f"no such item: {item_id}")
        return item

    def list_items(self, state: str | None = None) -> list[AnnotationItem]:
        items = sorted(self.items, key=lambda i: i.created_seq)
        if state:
            items = [i for i in items if i.state == state]
        return items

    def accepted_items(self) -> list[AnnotationItem]:
        return self.list_items("accepted")

    def stats(self) -> dict:
        counts: dict[str, int] = {}
        for item in self.items:
            counts[item.state] = counts.get(item.state, 0) + 1
        return {"items": len(self.items), "by_state": counts}

    # --- schema & query ingestion -------------------------------------------

    def ingest_schema(self, data: bytes | str, format_hint: str | None = None) -> SchemaCatalog:
        catalog = load_schema(data, format_hint=format_hint, schema_id="default")
        if catalog.schema_id == "default":
            # no intrinsic id in the file: derive one from the content so the
            # same schema gets the same id in every project (stable db_id)
            catalog.schema_id = content_id(
                "schema", json.dumps(catalog.to_json(), sort_keys=True)
            )
        with self.lock:
            self._append({"type": "schema_ingested", "schema": catalog.to_json()})
        return self.catalog

    def ingest_queries(self, data: str, source_tag: str = "") -> IngestionReport:
        entries = _parse_log_input(data)
        report = IngestionReport()
        with self.lock:
            seen = {q.normalized_sql for q in self.queries.values()}
            for raw_sql, question in entries:
                try:
                    ast = parse_sql(raw_sql, self.project.dialect)
                except UnsupportedConstruct as exc:
                    report.skipped_non_select += 1
                    report.failures.append({"sql": raw_sql, "error": str(exc)})
                    continue
                except SqlSyntaxError as exc:
                    report.parse_failures += 1
                    report.failures.append({"sql": raw_sql, "error": str(exc)})
                    continue
                normalized = render_sql(ast)
                if normalized in seen:
                    report.skipped_duplicate += 1
                    continue
                seen.add(normalized)
                record, item = self._build_query(ast, raw_sql, normalized,
                                                 source_tag, question)
                self._append({
                    "type": "query_ingested",
                    "query": record.to_json(),
                    "item": item.to_json(),
                })
                report.accepted += 1
        return report

    def _build_query(self, ast, raw_sql: str, normalized: str, source_tag: str,
                     question: str | None) -> tuple[QueryRecord, AnnotationItem]:
        depth = nesting_depth(ast)
        decomposition = None
        correlated = False
        if depth >= 1:
            try:
                plan = decompose(ast)
                decomposition = plan_step_sql(plan)
            except (CorrelatedSubquery, UnsupportedConstruct):
                correlated = True
        query_id = content_id("query", normalized)
        record = QueryRecord(
            query_id=query_id,
            raw_sql=raw_sql,
            normalized_sql=normalized,
            source_tag=source_tag,
            is_nested=depth >= 1,
            correlated=correlated,
            decomposition=decomposition,
            reference_question=question,
        )
        item = AnnotationItem(
            item_id=content_id("item", normalized),
            query_id=query_id,
            sql=normalized,
            created_seq=self._next_seq,
        )
        self._next_seq += 1
        if decomposition:
            for cte_name, step_sql in decomposition:
                item.sub_items.append(AnnotationItem(
                    item_id=content_id("item", normalized, cte_name),
                    query_id=query_id,
                    sql=step_sql,
                    cte_name=cte_name,
                    parent_id=item.item_id,
                ))
        return record, item

    # --- annotation loop ------------------------------------------------------

    def annotate_next(self, annotator_id: str) -> AnnotationItem:
        """Lease the oldest eligible item, generate candidates, return it.

        For nested items the next unaccepted sub-item is served first; the
        parent is only drafted (via recomposition) once every sub-item has
        an accepted description.
        """
        if not annotator_id:
            raise ValueError("annotator_id must be non-empty")
        now = self.clock()
        with self.lock:
            parent = self._pick_eligible(now)
            expires = now + self.project.config.lease_ttl_secs
            self._append({
                "type": "item_leased", "item_id": parent.item_id,
                "annotator_id": annotator_id, "expires_at": expires,
            })
            target = parent
            if parent.sub_items:
                sub = parent.next_unaccepted_sub()
                if sub is not None:
                    self._append({
                        "type": "item_leased", "item_id": sub.item_id,
                        "annotator_id": annotator_id, "expires_at": expires,
                    })
                    target = sub

        if target.candidates and target.state == "drafted":
            return target  # re-leased after an expired lease; keep drafts
        try:
            if target is parent and parent.sub_items:
                event = self._merge_parent(parent)
            else:
                event = self._generate_for(target)
        except BackendError:
            with self.lock:
                self._append({"type": "lease_released", "item_id": target.item_id})
                if target is not parent:
                    self._append({"type": "lease_released", "item_id": parent.item_id})
            raise
        with self.lock:
            self._append(event)
        return target

    def _pick_eligible(self, now: float) -> AnnotationItem:
        for item in self.list_items():
            if item.state not in ("pending", "drafted"):
                continue
            if item.lease is not None and not item.lease.expired(now):
                continue
            return item
        raise QueueEmpty("no schedulable items")

    def _generate_for(self, item: AnnotationItem) -> dict:
        examples: list[tuple[str, str]] = []
        tables = []
        fallback = False
        if self.catalog is not None and self.catalog.tables:
            tables, fallback = retrieve_schema_context(
                item.sql, self.catalog, self.index, self.project.config.k_tables
            )
        examples = retrieve_examples(self.index, item.sql,
                                     self.project.config.k_examples)
        ctx = PromptContext(
            target_sql=item.sql,
            tables=tables,
            examples=examples,
            refinement_notes=list(item.refinement_notes),
        )
        candidates = generate_candidates(
            ctx, self.project.config.params, self.backend,
            self.project.config.template_id,
        )
        return {
            "type": "candidates_set",
            "item_id": item.item_id,
            "candidates": [c.to_json() for c in candidates],
            "fallback": fallback,
            "discard_previous": False,
        }

    def _merge_parent(self, parent: AnnotationItem) -> dict:
        record = self.queries[parent.query_id]
        plan = decompose(parse_sql(record.normalized_sql, self.project.dialect))
        sub_nl = [(s.cte_name, s.accepted_text or "") for s in parent.sub_items]
        tables = []
        if self.catalog is not None and self.catalog.tables:
            tables, _ = retrieve_schema_context(
                parent.sql, self.catalog, self.index, self.project.config.k_tables
            )
        candidates = merge_descriptions(
            plan, sub_nl, self.project.config.params, self.backend, tables
        )
        return {
            "type": "candidates_set",
            "item_id": parent.item_id,
            "candidates": [c.to_json() for c in candidates],
            "fallback": False,
            "discard_previous": False,
        }

    # --- feedback --------------------------------------------------------------

    def _check_lease(self, item: AnnotationItem, annotator_id: str) -> None:
        now = self.clock()
        if item.lease is None or item.lease.expired(now):
            raise LeaseMismatch(f"no live lease on item {item.item_id}")
        if item.lease.annotator_id != annotator_id:
            raise LeaseMismatch(
                f"item {item.item_id} is leased by {item.lease.annotator_id}"
            )

    def submit_feedback(self, item_id: str, annotator_id: str, kind: str,
                        payload: dict) -> AnnotationItem:
        with self.lock:
            item = self.get_item(item_id)
            self._check_lease(item, annotator_id)
            if item.state not in ("drafted", "in_review"):
                raise InvalidTransition(
                    f"cannot apply {kind} feedback in state {item.state}"
                )
            if kind == "rank":
                event = self._validate_rank(item, annotator_id, payload)
            elif kind == "edit":
                event = self._validate_edit(item, annotator_id, payload)
            elif kind == "discard":
                event = self._validate_discard(item, annotator_id, payload)
            elif kind == "flag":
                event = self._make_feedback(item, annotator_id, "flag", {
                    "reason": str(payload.get("reason", ""))
                })
            elif kind == "refine":
                note = payload.get("note", "").strip()
                if not note:
                    raise InvalidTransition("refine requires a non-empty note")
                event = self._make_feedback(item, annotator_id, "refine",
                                            {"note": note})
            else:
                raise InvalidTransition(f"unknown feedback kind: {kind}")
            self._append(event)
            if kind != "refine":
                return item
            notes = list(item.refinement_notes)

        # refine regenerates with the accumulated guidance notes
        ctx_item = item
        try:
            gen_event = self._generate_for(ctx_item)
        except BackendError:
            raise
        gen_event["discard_previous"] = True
        with self.lock:
            self._append(gen_event)
        return item

    def _make_feedback(self, item: AnnotationItem, annotator_id: str, kind: str,
                       payload: dict) -> dict:
        fb = FeedbackEvent(
            event_id=uuid.uuid4().hex, annotator_id=annotator_id,
            kind=kind, payload=payload,
        )
        return {"type": "feedback", "item_id": item.item_id, "event": fb.to_json()}

    def _validate_rank(self, item, annotator_id, payload) -> dict:
        ordering = payload.get("ordering", [])
        live = [c.candidate_id for c in item.candidates if c.status != "discarded"]
        if len(set(ordering)) != len(ordering):
            raise InvalidTransition("rank ordering contains duplicates")
        for cid in ordering:
            if cid not in live:
                raise UnknownCandidate(f"cannot rank candidate {cid}")
        return self._make_feedback(item, annotator_id, "rank",
                                   {"ordering": list(ordering)})

    def _validate_edit(self, item, annotator_id, payload) -> dict:
        cid = payload.get("candidate_id")
        text = payload.get("text", "").strip()
        source = item.find_candidate(cid)
        if source is None or source.status == "discarded":
            raise UnknownCandidate(f"cannot edit candidate {cid}")
        if not text:
            raise InvalidTransition("edited text must be non-empty")
        new = Candidate(
            candidate_id=uuid.uuid4().hex, text=text, origin="annotator_edited",
            model_id=source.model_id, prompt_hash=source.prompt_hash,
            status="edited",
        )
        return self._make_feedback(item, annotator_id, "edit", {
            "candidate_id": cid, "text": text, "new_candidate": new.to_json(),
        })

    def _validate_discard(self, item, annotator_id, payload) -> dict:
        cid = payload.get("candidate_id")
        cand = item.find_candidate(cid)
        if cand is None or cand.status == "discarded":
            raise UnknownCandidate(f"cannot discard candidate {cid}")
        return self._make_feedback(item, annotator_id, "discard",
                                   {"candidate_id": cid})

    # --- accept / reopen ----------------------------------------------------------

    def accept(self, item_id: str, annotator_id: str, candidate_id: str,
               final_text: str | None = None) -> AnnotationItem:
        with self.lock:
            item = self.get_item(item_id)
            self._check_lease(item, annotator_id)
            if "accepted" not in ALLOWED_TRANSITIONS[item.state]:
                raise InvalidTransition(f"cannot accept from state {item.state}")
            cand = item.find_candidate(candidate_id)
            if cand is None or cand.status == "discarded":
                raise UnknownCandidate(f"cannot accept candidate {candidate_id}")
            text = final_text if final_text is not None else cand.text
            if not text.strip():
                raise InvalidTransition("accepted text must be non-empty")
            events = []
            if text != cand.text:
                events.append(FeedbackEvent(
                    event_id=uuid.uuid4().hex, annotator_id=annotator_id,
                    kind="edit",
                    payload={"candidate_id": candidate_id, "text": text,
                             "implicit": True},
                ).to_json())
            events.append(FeedbackEvent(
                event_id=uuid.uuid4().hex, annotator_id=annotator_id,
                kind="accept", payload={"candidate_id": candidate_id},
            ).to_json())
            self._append({
                "type": "item_accepted",
                "item_id": item.item_id,
                "candidate_id": candidate_id,
                "text": text,
                "annotator_id": annotator_id,
                "events": events,
                "release_parent": bool(item.parent_id),
            })
            return item

    def reopen(self, item_id: str, annotator_id: str) -> AnnotationItem:
        with self.lock:
            item = self.get_item(item_id)
            if item.state != "accepted":
                raise InvalidTransition(f"cannot reopen from state {item.state}")
            fb = FeedbackEvent(
                event_id=uuid.uuid4().hex, annotator_id=annotator_id,
                kind="reopen", payload={},
            )
            self._append({
                "type": "item_reopened", "item_id": item.item_id,
                "event": fb.to_json(),
            })
            # reopening grants the caller a fresh lease for rework
            self._append({
                "type": "item_leased", "item_id": item.item_id,
                "annotator_id": annotator_id,
                "expires_at": self.clock() + self.project.config.lease_ttl_secs,
            })
            return item

    # --- export ------------------------------------------------------------------

    def export_records(self) -> list[dict]:
        accepted = self.accepted_items()
        if not accepted:
            raise NothingAccepted("no accepted items to export")
        records = []
        db_id = self.project.schema_id or self.project.project_id
        for item in accepted:
            accept_events = [e for e in item.feedback_log if e.kind == "accept"]
            annotator = accept_events[-1].annotator_id if accept_events else ""
            accepted_cand = next(
                (c for c in item.candidates if c.status == "accepted"), None
            )
            fb_count = len(item.feedback_log) + sum(
                len(s.feedback_log) for s in item.sub_items
            )
            records.append({
                "id": content_id("export", db_id, item.sql),
                "question": item.accepted_text,
                "sql": item.sql,
                "db_id": db_id,
                "provenance": {
                    "model_id": accepted_cand.model_id if accepted_cand else "",
                    "annotator_id": annotator,
                    "feedback_event_count": fb_count,
                },
            })
        return records

    def export_json(self) -> str:
        return json.dumps(self.export_records(), indent=2, ensure_ascii=False) + "\n"


class Workspace:
    """A directory of projects, each persisted as projects/<id>/events.jsonl."""

    def __init__(self, root: str | Path | None = None,
                 backend: CompletionBackend | None = None, clock=time.time):
        self.root = Path(root) if root is not None else None
        self.backend = backend or MockBackend()
        self.clock = clock
        self._engines: dict[str, ProjectEngine] = {}
        self._lock = threading.RLock()
        if self.root is not None:
            projects_dir = self.root / "projects"
            if projects_dir.is_dir():
                for log_path in sorted(projects_dir.glob("*/events.jsonl")):
                    self._load(log_path.parent.name, log_path)

    def _load(self, project_id: str, log_path: Path) -> None:
        log = EventLog(log_path)
        placeholder = Project(project_id=project_id, name=project_id)
        engine = ProjectEngine(placeholder, log, backend=self.backend,
                               clock=self.clock)
        self._engines[engine.project.project_id] = engine

    def _log_for(self, project_id: str) -> EventLog:
        if self.root is None:
            return EventLog()
        return EventLog(self.root / "projects" / project_id / "events.jsonl")

    def create_project(self, name: str, dialect: str = "generic",
                       config: ProjectConfig | None = None) -> ProjectEngine:
        if not name.strip():
            raise ValueError("project name must be non-empty")
        config = config or ProjectConfig()
        if config.direction != "sql_to_nl":
            raise NotImplementedError(
                f"annotation direction {config.direction!r} is reserved"
            )
        with self._lock:
            for engine in self._engines.values():
                if engine.project.name == name:
                    raise DuplicateName(f"project name already in use: {name}")
            project_id = uuid.uuid4().hex[:12]
            project = Project(project_id=project_id, name=name, dialect=dialect,
                              config=config)
            engine = ProjectEngine(project, self._log_for(project_id),
                                   backend=self.backend, clock=self.clock)
            self._engines[project_id] = engine
            return engine

    def get(self, project_id: str) -> ProjectEngine:
        engine = self._engines.get(project_id)
        if engine is None:
            raise UnknownProject(f"no such project: {project_id}")
        return engine

    def by_name(self, name: str) -> ProjectEngine:
        for engine in self._engines.values():
            if engine.project.name == name:
                return engine
        raise UnknownProject(f"no project named: {name}")

    def find(self, ref: str) -> ProjectEngine:
        """Resolve a project by id, falling back to name."""
        if ref in self._engines:
            return self._engines[ref]
        return self.by_name(ref)

    def list_projects(self) -> list[Project]:
        engines = sorted(self._engines.values(),
                         key=lambda e: e.project.created_at)
        return [e.project for e in engines]

    def find_item(self, item_id: str):
        """Locate an item across projects; returns (engine, item)."""
        for engine in self._engines.values():
            item = engine._items_by_id.get(item_id)
            if item is not None:
                return engine, item
        raise UnknownItem(f"no such item: {item_id}")


def _parse_log_input(data: str) -> list[tuple[str, str | None]]:
    """Split a query-log input into (sql, reference_question) entries.

    Accepts plain semicolon-separated SQL text, a JSON array of SQL strings,
    or benchmark-format JSON ({question?, query/SQL/sql, db_id?} objects).
    """
    stripped = data.lstrip()
    if stripped.startswith("["):
        doc = json.loads(data)
        entries: list[tuple[str, str | None]] = []
        for element in doc:
            if isinstance(element, str):
                entries.append((element, None))
            elif isinstance(element, dict):
                sql = element.get("query") or element.get("SQL") or element.get("sql")
                if not sql:
                    continue
                entries.append((sql, element.get("question")))
        return entries
    return [(stmt, None) for stmt in split_statements(data)]


def split_statements(text: str) -> list[str]:
    """Split SQL text on semicolons, respecting strings and comments."""
    statements = []
    current: list[str] = []
    i = 0
    n = len(text)
    in_string = False
    while i < n:
        ch = text[i]
        if in_string:
            current.append(ch)
            if ch == "'":
                if i + 1 < n and text[i + 1] == "'":
                    current.append("'")
                    i += 1
                else:
                    in_string = False
            i += 1
            continue
        if ch == "'":
            in_string = True
            current.append(ch)
            i += 1
            continue
        if text.startswith("--", i):
            j = text.find("\n", i)
            i = n if j == -1 else j
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            i = n if j == -1 else j + 2
            continue
        if ch == ";":
            stmt = "".join(current).strip()
            if stmt:
                statements.append(stmt)
            current = []
            i += 1
            continue
        current.append(ch)
        i += 1
    stmt = "".join(current).strip()
    if stmt:
        statements.append(stmt)
    return statements
