"""Command-line front door mirroring the HTTP API.

Exit codes: 0 success, 1 domain error, 2 usage error. Every subcommand
supports --json for machine-readable output.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from benchforge.errors import BenchforgeError, QueueEmpty
from benchforge.evaluation import ExecutionBackend, evaluate_project
from benchforge.workflow import ProjectConfig, Workspace

DEFAULT_ROOT = "benchforge_data"


def _emit(ctx: click.Context, doc: dict, human: str | None = None) -> None:
    if ctx.obj["json"]:
        click.echo(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        click.echo(human if human is not None else json.dumps(doc, indent=2))


def _fail(ctx: click.Context, exc: BenchforgeError) -> None:
    doc = {"error": {"code": exc.code, "message": str(exc)}}
    if ctx.obj["json"]:
        click.echo(json.dumps(doc), err=True)
    else:
        click.echo(f"error [{exc.code}]: {exc}", err=True)
    sys.exit(1)


def _workspace(ctx: click.Context) -> Workspace:
    return Workspace(ctx.obj["root"])


@click.group()
@click.option("--root", default=DEFAULT_ROOT, show_default=True,
              help="Workspace directory holding project event logs.")
@click.option("--json", "json_out", is_flag=True, help="Machine-readable output.")
@click.pass_context
def main(ctx: click.Context, root: str, json_out: bool):
    """Curate text-to-SQL benchmarks: ingest, annotate, export, evaluate."""
    ctx.ensure_object(dict)
    ctx.obj["root"] = root
    ctx.obj["json"] = json_out


@main.command()
@click.argument("name")
@click.option("--dialect", default="generic", show_default=True)
@click.option("--config", "config_file", type=click.Path(exists=True),
              help="JSON file overriding the default project config.")
@click.pass_context
def init(ctx, name: str, dialect: str, config_file: str | None):
    """Create a new annotation project."""
    config = None
    if config_file:
        config = ProjectConfig.from_json(
            json.loads(Path(config_file).read_text(encoding="utf-8"))
        )
    try:
        engine = _workspace(ctx).create_project(name, dialect, config)
    except BenchforgeError as exc:
        _fail(ctx, exc)
    doc = engine.project.to_json()
    _emit(ctx, doc, f"created project {doc['project_id']} ({name})")


@main.command()
@click.option("--project", required=True, help="Project id or name.")
@click.option("--queries", "queries_file", type=click.Path(exists=True),
              help="SQL log (.sql) or benchmark JSON file.")
@click.option("--schema", "schema_file", type=click.Path(exists=True),
              help="Schema file (DDL or JSON table list).")
@click.option("--source-tag", default="", help="Provenance tag for the log.")
@click.pass_context
def ingest(ctx, project: str, queries_file: str | None,
           schema_file: str | None, source_tag: str):
    """Load a schema and/or a query log into a project."""
    if not queries_file and not schema_file:
        raise click.UsageError("provide --queries and/or --schema")
    try:
        engine = _workspace(ctx).find(project)
        out: dict = {}
        if schema_file:
            catalog = engine.ingest_schema(
                Path(schema_file).read_text(encoding="utf-8")
            )
            out["schema"] = {"schema_id": catalog.schema_id,
                             "tables": len(catalog.tables)}
        if queries_file:
            tag = source_tag or Path(queries_file).name
            report = engine.ingest_queries(
                Path(queries_file).read_text(encoding="utf-8"), tag
            )
            out["queries"] = report.to_json()
    except BenchforgeError as exc:
        _fail(ctx, exc)
    human_parts = []
    if "schema" in out:
        human_parts.append(f"schema: {out['schema']['tables']} tables")
    if "queries" in out:
        q = out["queries"]
        human_parts.append(
            f"queries: {q['accepted']} accepted, "
            f"{q['skipped_duplicate']} duplicate, "
            f"{q['skipped_non_select']} non-select, "
            f"{q['parse_failures']} parse failures"
        )
    _emit(ctx, out, "; ".join(human_parts))


@main.command()
@click.option("--project", required=True, help="Project id or name.")
@click.option("--annotator", default="cli", show_default=True)
@click.option("--auto-accept-rank1", is_flag=True,
              help="Batch mode for smoke pipelines: accept the first "
                   "candidate of every item WITHOUT human review.")
@click.option("--max-items", default=0, show_default=True,
              help="Stop after N items (0 = drain the queue).")
@click.pass_context
def annotate(ctx, project: str, annotator: str, auto_accept_rank1: bool,
             max_items: int):
    """Lease the next item(s) and generate candidates."""
    try:
        engine = _workspace(ctx).find(project)
        processed = []
        while True:
            try:
                item = engine.annotate_next(annotator)
            except QueueEmpty:
                break
            if auto_accept_rank1:
                live = [c for c in item.candidates if c.status != "discarded"]
                ranked = sorted(live, key=lambda c: (c.rank or 1, c.created_at))
                engine.accept(item.item_id, annotator, ranked[0].candidate_id)
            processed.append(item.to_json())
            if not auto_accept_rank1:
                break
            if max_items and len(processed) >= max_items:
                break
    except BenchforgeError as exc:
        _fail(ctx, exc)
    doc = {"processed": len(processed), "items": processed}
    if not processed:
        _emit(ctx, doc, "queue empty; nothing to annotate")
        return
    if auto_accept_rank1:
        _emit(ctx, doc, f"auto-accepted {len(processed)} item(s)")
    else:
        item = processed[0]
        lines = [f"item {item['item_id']} — {item['sql']}"]
        for i, cand in enumerate(item["candidates"], start=1):
            if cand["status"] == "discarded":
                continue
            lines.append(f"  [{i}] ({cand['candidate_id'][:8]}) {cand['text']}")
        _emit(ctx, doc, "\n".join(lines))


@main.command()
@click.option("--item", "item_id", required=True)
@click.option("--annotator", default="cli", show_default=True)
@click.option("--kind", required=True,
              type=click.Choice(["rank", "edit", "discard", "refine", "flag",
                                 "reopen"]))
@click.option("--payload", default="{}",
              help="JSON payload (e.g. '{\"note\": \"mention grouping\"}').")
@click.pass_context
def feedback(ctx, item_id: str, annotator: str, kind: str, payload: str):
    """Submit a feedback event against a leased item."""
    try:
        payload_doc = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"--payload is not valid JSON: {exc}")
    try:
        ws = _workspace(ctx)
        engine, _ = ws.find_item(item_id)
        if kind == "reopen":
            item = engine.reopen(item_id, annotator)
        else:
            item = engine.submit_feedback(item_id, annotator, kind, payload_doc)
    except BenchforgeError as exc:
        _fail(ctx, exc)
    _emit(ctx, item.to_json(),
          f"{kind} recorded; item {item_id} now {item.state}")


@main.command()
@click.option("--item", "item_id", required=True)
@click.option("--annotator", default="cli", show_default=True)
@click.option("--candidate", "candidate_id", required=True)
@click.option("--text", "final_text", default=None,
              help="Final text when it differs from the candidate's.")
@click.pass_context
def accept(ctx, item_id: str, annotator: str, candidate_id: str,
           final_text: str | None):
    """Accept a candidate as the item's description."""
    try:
        engine, _ = _workspace(ctx).find_item(item_id)
        item = engine.accept(item_id, annotator, candidate_id, final_text)
    except BenchforgeError as exc:
        _fail(ctx, exc)
    _emit(ctx, item.to_json(), f"accepted: {item.accepted_text}")


@main.command()
@click.option("--project", required=True, help="Project id or name.")
@click.option("--out", "out_file", required=True, type=click.Path())
@click.pass_context
def export(ctx, project: str, out_file: str):
    """Write accepted items as a benchmark-format JSON array."""
    try:
        engine = _workspace(ctx).find(project)
        payload = engine.export_json()
    except BenchforgeError as exc:
        _fail(ctx, exc)
    Path(out_file).write_text(payload, encoding="utf-8")
    count = len(json.loads(payload))
    _emit(ctx, {"count": count, "path": out_file},
          f"exported {count} record(s) to {out_file}")


@main.command("eval")
@click.option("--project", required=True, help="Project id or name.")
@click.option("--db", "db_dir", required=True, type=click.Path(exists=True),
              help="Fixture directory (schema.sql + per-table CSVs).")
@click.option("--out", "out_dir", default=None, type=click.Path(),
              help="Directory for eval_report.json / eval_report.txt.")
@click.pass_context
def eval_cmd(ctx, project: str, db_dir: str, out_dir: str | None):
    """Backtranslate and grade every accepted item."""
    try:
        engine = _workspace(ctx).find(project)
        db = ExecutionBackend.from_fixture_dir(db_dir)
        report = evaluate_project(engine, db)
    except BenchforgeError as exc:
        _fail(ctx, exc)
    if out_dir:
        report.write(out_dir)
    _emit(ctx, report.to_json(), report.histogram_text())


@main.command()
@click.option("--port", default=8765, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.pass_context
def serve(ctx, port: int, host: str):
    """Run the HTTP API for the web UI."""
    from benchforge.server import serve as run_server

    run_server(ctx.obj["root"], port=port, host=host)


if __name__ == "__main__":
    main()
