"""Deterministic SQL<->NL templating used by the mock completion backend.

`describe_sql` turns a flat SELECT into a stylized English clause chain;
`nl_to_sql` inverts sentences of that shape. The pair is what makes fixture
(SQL, NL) items round-trip to execution-equivalent SQL in hermetic tests.
SQL fragments (conditions, join predicates) are embedded verbatim, so
inversion never has to re-derive them.
"""

from __future__ import annotations

import re

from benchforge.errors import BenchforgeError
from benchforge.sqlmodel import ast as a
from benchforge.sqlmodel.parser import parse_sql
from benchforge.sqlmodel.render import render_expr, render_query

RUN_PREFIX = "the result of running: "

_AGG_PHRASES = {
    "AVG": "the average of",
    "SUM": "the total of",
    "MAX": "the maximum of",
    "MIN": "the minimum of",
}
_PHRASE_AGGS = {v: k for k, v in _AGG_PHRASES.items()}

_JOIN_PHRASES = [
    ("LEFT JOIN", " left joined with "),
    ("RIGHT JOIN", " right joined with "),
    ("FULL JOIN", " full joined with "),
    ("CROSS JOIN", " cross joined with "),
    ("JOIN", " joined with "),
]


def describe_sql(sql: str) -> str:
    """Sentence body (no leading verb, no period) describing `sql`."""
    try:
        ast = parse_sql(sql)
    except BenchforgeError:
        return RUN_PREFIX + sql.strip().rstrip(";")
    query = ast.root
    if query.ctes or not isinstance(query.body, a.SelectCore):
        return RUN_PREFIX + render_query(query)
    core = query.body

    parts = [_projection_phrase(core)]
    if core.source is not None:
        parts.append("from " + _source_phrase(core))
    if core.where is not None:
        parts.append("where " + render_expr(core.where))
    if core.group_by:
        parts.append("grouped by " + ", ".join(render_expr(e) for e in core.group_by))
    if core.having is not None:
        parts.append("having " + render_expr(core.having))
    if query.order_by:
        parts.append("ordered by " + ", ".join(
            _order_phrase(o) for o in query.order_by
        ))
    if query.limit is not None:
        phrase = "limited to " + render_expr(query.limit) + " rows"
        if query.offset is not None:
            phrase += " starting at " + render_expr(query.offset)
        parts.append(phrase)
    return " ".join(parts)


def _projection_phrase(core: a.SelectCore) -> str:
    items = [_proj_item_phrase(p) for p in core.projections]
    if len(items) == 1:
        joined = items[0]
    else:
        joined = ", ".join(items[:-1]) + " and " + items[-1]
    if core.distinct:
        return "distinct " + joined
    return joined


def _proj_item_phrase(proj: a.Projection) -> str:
    expr = proj.expr
    if isinstance(expr, a.Star):
        if expr.table:
            return f"all columns of {expr.table}"
        return "everything"
    if isinstance(expr, a.ColumnRef):
        return render_expr(expr)
    if isinstance(expr, a.FuncCall):
        if expr.name == "COUNT":
            if expr.star:
                return "the number of rows"
            if expr.args:
                inner = render_expr(expr.args[0])
                if expr.distinct:
                    return f"the number of unique {inner}"
                return f"the count of {inner}"
        if expr.name in _AGG_PHRASES and expr.args and not expr.distinct:
            return f"{_AGG_PHRASES[expr.name]} {render_expr(expr.args[0])}"
    return "the value of " + render_expr(expr)


def _source_phrase(core: a.SelectCore) -> str:
    parts = [_from_item_phrase(core.source)]
    for join in core.joins:
        if join.kind == ",":
            parts.append(", " + _from_item_phrase(join.item))
            continue
        phrase = dict(_JOIN_PHRASES)[join.kind] + _from_item_phrase(join.item)
        if join.on is not None:
            phrase += " on " + render_expr(join.on)
        parts.append(phrase)
    return "".join(parts)


def _from_item_phrase(item: a.Node) -> str:
    if isinstance(item, a.TableRef):
        return item.name + (f" AS {item.alias}" if item.alias else "")
    if isinstance(item, a.SubqueryRef):
        text = f"({render_query(item.query)})"
        if item.alias:
            text += f" AS {item.alias}"
        return text
    raise TypeError(f"not a FROM item: {item!r}")


def _order_phrase(item: a.OrderItem) -> str:
    text = render_expr(item.expr)
    if item.direction == "DESC":
        return text + " descending"
    if item.direction == "ASC":
        return text + " ascending"
    return text


# --- inversion -----------------------------------------------------------------


def nl_to_sql(nl: str) -> str:
    """Invert a sentence of the shape produced by describe_sql into SQL."""
    body = nl.strip()
    if body.endswith("."):
        body = body[:-1]
    body = _strip_parentheticals(body)
    # drop the leading verb ("List", "Show", ...)
    first, _, rest = body.partition(" ")
    if first.isalpha() and rest:
        body = rest
    if body.lower().startswith(RUN_PREFIX):
        return body[len(RUN_PREFIX):].strip()

    body, limit_part = _rpart(body, " limited to ")
    body, order_part = _rpart(body, " ordered by ")
    body, having_part = _rpart(body, " having ")
    body, group_part = _rpart(body, " grouped by ")
    body, where_part = _rpart(body, " where ")
    proj_part, _, source_part = body.partition(" from ")

    distinct = False
    if proj_part.startswith("distinct "):
        distinct = True
        proj_part = proj_part[len("distinct "):]

    select_items = _invert_projections(proj_part)
    sql = "SELECT " + ("DISTINCT " if distinct else "") + ", ".join(select_items)
    if source_part:
        sql += " FROM " + _invert_source(source_part)
    if where_part:
        sql += " WHERE " + where_part
    if group_part:
        sql += " GROUP BY " + group_part
    if having_part:
        sql += " HAVING " + having_part
    if order_part:
        sql += " ORDER BY " + _invert_order(order_part)
    if limit_part:
        sql += _invert_limit(limit_part)
    return sql


def _strip_parentheticals(text: str) -> str:
    while text.endswith(")"):
        idx = text.rfind(" (")
        if idx == -1:
            break
        text = text[:idx].rstrip()
    return text


def _rpart(text: str, marker: str) -> tuple[str, str]:
    head, sep, tail = text.rpartition(marker)
    if not sep:
        return text, ""
    return head, tail


def _invert_projections(proj_part: str) -> list[str]:
    raw = proj_part.split(", ")
    items: list[str] = []
    for chunk in raw:
        items.extend(chunk.split(" and "))
    out = []
    for item in items:
        item = item.strip()
        if item == "everything":
            out.append("*")
        elif item.startswith("all columns of "):
            out.append(item[len("all columns of "):] + ".*")
        elif item == "the number of rows":
            out.append("COUNT(*)")
        elif item.startswith("the number of unique "):
            out.append(f"COUNT(DISTINCT {item[len('the number of unique '):]})")
        elif item.startswith("the count of "):
            out.append(f"COUNT({item[len('the count of '):]})")
        elif item.startswith("the value of "):
            out.append(item[len("the value of "):])
        else:
            matched = False
            for phrase, func in _PHRASE_AGGS.items():
                if item.startswith(phrase + " "):
                    out.append(f"{func}({item[len(phrase) + 1:]})")
                    matched = True
                    break
            if not matched:
                out.append(item)
    return out


def _invert_source(source_part: str) -> str:
    text = source_part
    for sql_kw, phrase in _JOIN_PHRASES:
        text = text.replace(phrase, f" {sql_kw} ")
    return re.sub(r" on ", " ON ", text)


def _invert_order(order_part: str) -> str:
    items = []
    for chunk in order_part.split(", "):
        if chunk.endswith(" descending"):
            items.append(chunk[: -len(" descending")] + " DESC")
        elif chunk.endswith(" ascending"):
            items.append(chunk[: -len(" ascending")] + " ASC")
        else:
            items.append(chunk)
    return ", ".join(items)


def _invert_limit(limit_part: str) -> str:
    match = re.match(r"^(\S+) rows(?: starting at (\S+))?$", limit_part)
    if not match:
        return ""
    sql = f" LIMIT {match.group(1)}"
    if match.group(2):
        sql += f" OFFSET {match.group(2)}"
    return sql
