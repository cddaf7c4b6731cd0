"""Shared exception hierarchy.

Every domain error raised by benchforge derives from BenchforgeError so the
CLI and server can map them to exit code 1 / structured JSON uniformly.
"""

from __future__ import annotations


class BenchforgeError(Exception):
    """Base class for all domain errors."""

    code = "error"


# --- SQL model ---------------------------------------------------------------

class SqlSyntaxError(BenchforgeError):
    """Input text is not a well-formed SQL statement."""

    code = "syntax_error"

    def __init__(self, message: str, line: int, column: int, token: str = ""):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
        self.token = token


class UnsupportedConstruct(BenchforgeError):
    """Valid SQL, but outside the supported grammar; names the construct."""

    code = "unsupported_construct"

    def __init__(self, construct: str):
        super().__init__(f"unsupported SQL construct: {construct}")
        self.construct = construct


class UnknownTable(BenchforgeError):
    code = "unknown_table"

    def __init__(self, name: str):
        super().__init__(f"table not in catalog: {name}")
        self.name = name


class NotNested(BenchforgeError):
    code = "not_nested"


class CorrelatedSubquery(BenchforgeError):
    """Decomposition refuses correlated subqueries; annotate the query whole."""

    code = "correlated_subquery"


class SchemaParseError(BenchforgeError):
    code = "schema_parse_error"


class DuplicateTable(BenchforgeError):
    code = "duplicate_table"

    def __init__(self, name: str):
        super().__init__(f"duplicate table in schema: {name}")
        self.name = name


# --- Retrieval / generation --------------------------------------------------

class EmbedderUnavailable(BenchforgeError):
    code = "embedder_unavailable"


class UnknownTemplate(BenchforgeError):
    code = "unknown_template"

    def __init__(self, template_id: str):
        super().__init__(f"no such prompt template: {template_id}")
        self.template_id = template_id


class BackendError(BenchforgeError):
    code = "backend_error"

    def __init__(self, message: str, attempts: int = 1):
        super().__init__(message)
        self.attempts = attempts


class EmptyCompletion(BenchforgeError):
    code = "empty_completion"


class MissingSubDescription(BenchforgeError):
    code = "missing_sub_description"

    def __init__(self, step_name: str):
        super().__init__(f"no accepted description for step: {step_name}")
        self.step_name = step_name


# --- Workflow ----------------------------------------------------------------

class DuplicateName(BenchforgeError):
    code = "duplicate_name"


class QueueEmpty(BenchforgeError):
    code = "queue_empty"


class LeaseMismatch(BenchforgeError):
    code = "lease_mismatch"


class InvalidTransition(BenchforgeError):
    code = "invalid_transition"


class UnknownCandidate(BenchforgeError):
    code = "unknown_candidate"


class NothingAccepted(BenchforgeError):
    code = "nothing_accepted"


class UnknownProject(BenchforgeError):
    code = "unknown_project"


class UnknownItem(BenchforgeError):
    code = "unknown_item"


# --- Evaluation ---------------------------------------------------------------

class ExecError(BenchforgeError):
    """SQL execution failure; category is one of syntax/unknown_object/runtime."""

    code = "exec_error"

    def __init__(self, category: str, message: str):
        super().__init__(message)
        self.category = category


class NoAcceptedItems(BenchforgeError):
    code = "no_accepted_items"
