"""Canonical SQL rendering.

Canonical form: uppercase keywords, single-space separation, explicit AS for
aliases, parentheses inserted only where precedence demands. The guarantee
backing the round-trip tests is parse(render(ast)) == ast.
"""

from __future__ import annotations

from benchforge.sqlmodel import ast as a

# expression precedence, higher binds tighter
_PREC_OR = 1
_PREC_AND = 2
_PREC_NOT = 3
_PREC_CMP = 4
_PREC_CONCAT = 5
_PREC_ADD = 6
_PREC_MUL = 7
_PREC_UNARY = 8
_PREC_PRIMARY = 9

_BINARY_PREC = {
    "OR": _PREC_OR,
    "AND": _PREC_AND,
    "=": _PREC_CMP, "<": _PREC_CMP, ">": _PREC_CMP, "<=": _PREC_CMP,
    ">=": _PREC_CMP, "<>": _PREC_CMP, "!=": _PREC_CMP,
    "LIKE": _PREC_CMP, "NOT LIKE": _PREC_CMP,
    "||": _PREC_CONCAT,
    "+": _PREC_ADD, "-": _PREC_ADD,
    "*": _PREC_MUL, "/": _PREC_MUL, "%": _PREC_MUL,
}


def render_sql(ast: a.SqlAst) -> str:
    """Render an AST to its canonical single-statement text."""
    return render_query(ast.root)


def render_expr(node: a.Node) -> str:
    """Render a standalone expression (no outer parentheses)."""
    return _render_expr(node, _PREC_OR)


def render_query(query: a.Query) -> str:
    parts: list[str] = []
    if query.ctes:
        ctes = ", ".join(f"{name} AS ({render_query(q)})" for name, q in query.ctes)
        parts.append(f"WITH {ctes}")
    parts.append(_render_body(query.body))
    if query.order_by:
        items = ", ".join(
            _render_expr(o.expr, _PREC_OR) + (f" {o.direction}" if o.direction else "")
            for o in query.order_by
        )
        parts.append(f"ORDER BY {items}")
    if query.limit is not None:
        parts.append(f"LIMIT {_render_expr(query.limit, _PREC_OR)}")
    if query.offset is not None:
        parts.append(f"OFFSET {_render_expr(query.offset, _PREC_OR)}")
    return " ".join(parts)


def _render_body(body: a.Node) -> str:
    if isinstance(body, a.SetOp):
        return f"{_render_body(body.left)} {body.op} {_render_body(body.right)}"
    return _render_core(body)


def _render_core(core: a.SelectCore) -> str:
    parts = ["SELECT"]
    if core.distinct:
        parts.append("DISTINCT")
    parts.append(", ".join(_render_projection(p) for p in core.projections))
    if core.source is not None:
        parts.append("FROM")
        parts.append(_render_from_item(core.source))
        for join in core.joins:
            if join.kind == ",":
                parts[-1] += f", {_render_from_item(join.item)}"
            else:
                clause = f"{join.kind} {_render_from_item(join.item)}"
                if join.on is not None:
                    clause += f" ON {_render_expr(join.on, _PREC_OR)}"
                parts.append(clause)
    if core.where is not None:
        parts.append(f"WHERE {_render_expr(core.where, _PREC_OR)}")
    if core.group_by:
        parts.append(
            "GROUP BY " + ", ".join(_render_expr(e, _PREC_OR) for e in core.group_by)
        )
    if core.having is not None:
        parts.append(f"HAVING {_render_expr(core.having, _PREC_OR)}")
    return " ".join(parts)


def _render_projection(proj: a.Projection) -> str:
    text = _render_expr(proj.expr, _PREC_OR)
    if proj.alias:
        text += f" AS {proj.alias}"
    return text


def _render_from_item(item: a.Node) -> str:
    if isinstance(item, a.TableRef):
        text = item.name
        if item.alias:
            text += f" AS {item.alias}"
        return text
    if isinstance(item, a.SubqueryRef):
        text = f"({render_query(item.query)})"
        if item.alias:
            text += f" AS {item.alias}"
        return text
    raise TypeError(f"not a FROM item: {item!r}")


def _prec(node: a.Node) -> int:
    if isinstance(node, a.Binary):
        return _BINARY_PREC[node.op]
    if isinstance(node, a.Unary):
        return _PREC_NOT if node.op == "NOT" else _PREC_UNARY
    if isinstance(node, (a.IsNull, a.Between, a.InList, a.InSubquery)):
        return _PREC_CMP
    return _PREC_PRIMARY


def _render_expr(node: a.Node, context_prec: int) -> str:
    text = _render_expr_inner(node)
    if _prec(node) < context_prec:
        return f"({text})"
    return text


def _render_expr_inner(node: a.Node) -> str:
    if isinstance(node, a.Literal):
        return node.text
    if isinstance(node, a.ColumnRef):
        return f"{node.table}.{node.name}" if node.table else node.name
    if isinstance(node, a.Star):
        return f"{node.table}.*" if node.table else "*"
    if isinstance(node, a.Binary):
        prec = _BINARY_PREC[node.op]
        left = _render_expr(node.left, prec)
        right = _render_expr(node.right, prec + 1)
        return f"{left} {node.op} {right}"
    if isinstance(node, a.Unary):
        if node.op == "NOT":
            return f"NOT {_render_expr(node.operand, _PREC_CMP)}"
        # nested unary signs get parens so "--x" never lexes as a comment
        return f"{node.op}{_render_expr(node.operand, _PREC_PRIMARY)}"
    if isinstance(node, a.IsNull):
        middle = "IS NOT NULL" if node.negated else "IS NULL"
        return f"{_render_expr(node.operand, _PREC_CONCAT)} {middle}"
    if isinstance(node, a.Between):
        kw = "NOT BETWEEN" if node.negated else "BETWEEN"
        return (
            f"{_render_expr(node.operand, _PREC_CONCAT)} {kw} "
            f"{_render_expr(node.low, _PREC_CONCAT)} AND "
            f"{_render_expr(node.high, _PREC_CONCAT)}"
        )
    if isinstance(node, a.InList):
        kw = "NOT IN" if node.negated else "IN"
        items = ", ".join(_render_expr(e, _PREC_OR) for e in node.items)
        return f"{_render_expr(node.operand, _PREC_CONCAT)} {kw} ({items})"
    if isinstance(node, a.InSubquery):
        kw = "NOT IN" if node.negated else "IN"
        return f"{_render_expr(node.operand, _PREC_CONCAT)} {kw} ({render_query(node.query)})"
    if isinstance(node, a.Exists):
        kw = "NOT EXISTS" if node.negated else "EXISTS"
        return f"{kw} ({render_query(node.query)})"
    if isinstance(node, a.ScalarSubquery):
        return f"({render_query(node.query)})"
    if isinstance(node, a.FuncCall):
        if node.star:
            inner = "*"
        else:
            args = ", ".join(_render_expr(e, _PREC_OR) for e in node.args)
            inner = f"DISTINCT {args}" if node.distinct else args
        text = f"{node.name}({inner})"
        if node.over is not None:
            text += f" OVER ({node.over})"
        return text
    if isinstance(node, a.Case):
        parts = ["CASE"]
        if node.operand is not None:
            parts.append(_render_expr(node.operand, _PREC_OR))
        for cond, result in node.whens:
            parts.append(
                f"WHEN {_render_expr(cond, _PREC_OR)} THEN {_render_expr(result, _PREC_OR)}"
            )
        if node.default is not None:
            parts.append(f"ELSE {_render_expr(node.default, _PREC_OR)}")
        parts.append("END")
        return " ".join(parts)
    if isinstance(node, a.Cast):
        return f"CAST({_render_expr(node.operand, _PREC_OR)} AS {node.type_name})"
    raise TypeError(f"cannot render node: {node!r}")
