"""Annotation workflow: projects, items, leases, and the event-sourced engine."""

from benchforge.workflow.engine import (
    ProjectEngine,
    Workspace,
    split_statements,
)
from benchforge.workflow.models import (
    ALLOWED_TRANSITIONS,
    DEFAULT_LEASE_TTL_SECS,
    FEEDBACK_KINDS,
    STATES,
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

__all__ = [
    "ALLOWED_TRANSITIONS",
    "DEFAULT_LEASE_TTL_SECS",
    "FEEDBACK_KINDS",
    "STATES",
    "AnnotationItem",
    "EventLog",
    "FeedbackEvent",
    "IngestionReport",
    "Lease",
    "Project",
    "ProjectConfig",
    "ProjectEngine",
    "QueryRecord",
    "Workspace",
    "content_id",
    "split_statements",
    "utcnow_iso",
]
