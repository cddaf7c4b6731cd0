"""Rewrite nested queries into an ordered chain of CTE steps.

Innermost subqueries become the earliest steps (step_1..step_n, a valid
topological order of their dependencies); the final query references base
tables and step names only. Correlated subqueries are refused: pulling them
out of their enclosing scope would change semantics, so those queries flow
through the pipeline whole.
"""

from __future__ import annotations

import dataclasses

from benchforge.errors import CorrelatedSubquery, NotNested, UnsupportedConstruct
from benchforge.sqlmodel import ast as a
from benchforge.sqlmodel.analysis import nesting_depth, referenced_table_names
from benchforge.sqlmodel.render import render_query, render_sql


def decompose(ast: a.SqlAst) -> a.DecompositionPlan:
    """Produce a DecompositionPlan for a nested, uncorrelated query."""
    if nesting_depth(ast) == 0:
        raise NotNested("query has no nested subqueries")
    for node in a.walk(ast.root):
        if isinstance(node, a.Query) and node.ctes:
            raise UnsupportedConstruct("decomposition of queries that already use WITH")
    for sub in _nested_queries(ast.root):
        if _is_correlated(sub):
            raise CorrelatedSubquery(
                "query contains a correlated subquery; annotate it whole"
            )

    steps: list[a.DecompositionStep] = []

    def extract(subquery: a.Query) -> tuple[str, list[str]]:
        processed = _process_query(subquery, extract)
        named, out_names = _ensure_named(processed)
        name = f"step_{len(steps) + 1}"
        existing = {s.cte_name for s in steps}
        deps = frozenset(
            n for n in referenced_table_names(named) if n in existing
        )
        steps.append(
            a.DecompositionStep(
                cte_name=name,
                subquery=a.SqlAst(root=named, dialect=ast.dialect),
                depends_on=deps,
            )
        )
        return name, out_names

    final_root = _process_query(ast.root, extract)
    return a.DecompositionPlan(
        steps=tuple(steps), final=a.SqlAst(root=final_root, dialect=ast.dialect)
    )


def plan_to_sql(plan: a.DecompositionPlan) -> str:
    """Render a plan as one WITH statement, steps in topological order."""
    root = plan.final.root
    combined = a.Query(
        body=root.body,
        ctes=tuple((s.cte_name, s.subquery.root) for s in plan.steps),
        order_by=root.order_by,
        limit=root.limit,
        offset=root.offset,
    )
    return render_query(combined)


def plan_step_sql(plan: a.DecompositionPlan) -> list[tuple[str, str]]:
    """(cte_name, rendered subquery) pairs plus the final query as ('final', sql)."""
    pairs = [(s.cte_name, render_sql(s.subquery)) for s in plan.steps]
    pairs.append(("final", render_sql(plan.final)))
    return pairs


# --- internals -----------------------------------------------------------------


def _nested_queries(query: a.Query) -> list[a.Query]:
    return [n for n in a.walk(query.body) if isinstance(n, a.Query)]


def _relation_names_within(query: a.Query) -> set[str]:
    """All relation names/aliases visible anywhere inside `query`.

    Over-approximates scoping (a deep alias is treated as visible to
    siblings), which can only under-detect correlation when names collide.
    """
    names: set[str] = set()
    for node in a.walk(query):
        if isinstance(node, a.TableRef):
            names.add(_fold(node.alias or node.name))
            names.add(_fold(node.name))
        elif isinstance(node, a.SubqueryRef) and node.alias:
            names.add(_fold(node.alias))
        elif isinstance(node, a.Query):
            names.update(_fold(n) for n, _ in node.ctes)
    return names


def _is_correlated(query: a.Query) -> bool:
    """True when a qualified column inside `query` escapes its own scope.

    Unqualified columns are assumed local to the subquery's own relations.
    """
    local = _relation_names_within(query)
    for node in a.walk(query):
        if isinstance(node, a.ColumnRef) and node.table is not None:
            if _fold(node.table) not in local:
                return True
    return False


def _fold(name: str) -> str:
    return name.strip('"').lower()


def _process_query(query: a.Query, extract) -> a.Query:
    """Rewrite `query` so every directly nested subquery becomes a CTE ref."""
    return a.Query(
        body=_rewrite(query.body, extract),
        ctes=(),
        order_by=tuple(
            a.OrderItem(_rewrite(o.expr, extract), o.direction) for o in query.order_by
        ),
        limit=_rewrite(query.limit, extract) if query.limit is not None else None,
        offset=_rewrite(query.offset, extract) if query.offset is not None else None,
    )


def _rewrite(node: a.Node, extract) -> a.Node:
    if isinstance(node, a.SubqueryRef):
        name, _ = extract(node.query)
        return a.TableRef(name=name, alias=node.alias or None)
    if isinstance(node, a.InSubquery):
        name, outs = extract(node.query)
        return a.InSubquery(
            operand=_rewrite(node.operand, extract),
            query=_select_from_step(name, outs[:1]),
            negated=node.negated,
        )
    if isinstance(node, a.ScalarSubquery):
        name, outs = extract(node.query)
        return a.ScalarSubquery(query=_select_from_step(name, outs[:1]))
    if isinstance(node, a.Exists):
        name, _ = extract(node.query)
        return a.Exists(query=_select_from_step(name, ["*"]), negated=node.negated)
    if isinstance(node, a.Query):
        # only reachable for constructs the pre-checks refused
        raise UnsupportedConstruct("unexpected nested query during decomposition")

    changes = {}
    for f in node.__dataclass_fields__:
        val = getattr(node, f)
        if isinstance(val, a.Node):
            new = _rewrite(val, extract)
            if new is not val:
                changes[f] = new
        elif isinstance(val, tuple) and val and any(
            isinstance(x, (a.Node, tuple)) for x in val
        ):
            new_items = []
            for item in val:
                if isinstance(item, a.Node):
                    new_items.append(_rewrite(item, extract))
                elif isinstance(item, tuple):  # CASE whens
                    new_items.append(
                        tuple(
                            _rewrite(x, extract) if isinstance(x, a.Node) else x
                            for x in item
                        )
                    )
                else:
                    new_items.append(item)
            changes[f] = tuple(new_items)
    return dataclasses.replace(node, **changes) if changes else node


def _select_from_step(step_name: str, outs: list[str]) -> a.Query:
    if not outs or outs[0] == "*":
        projections: tuple[a.Projection, ...] = (a.Projection(expr=a.Star()),)
    else:
        projections = tuple(
            a.Projection(expr=a.ColumnRef(table=None, name=n)) for n in outs
        )
    return a.Query(
        body=a.SelectCore(
            projections=projections, source=a.TableRef(name=step_name)
        )
    )


def _ensure_named(query: a.Query) -> tuple[a.Query, list[str]]:
    """Give every output column of `query` a referenceable name.

    Plain column projections keep their names; expression projections without
    an alias gain col_<i>. Only the leftmost select core of a set operation
    is renamed (it determines result column names).
    """
    core = query.body
    while isinstance(core, a.SetOp):
        core = core.left

    out_names: list[str] = []
    new_projections: list[a.Projection] = []
    changed = False
    for i, proj in enumerate(core.projections):
        if isinstance(proj.expr, a.Star):
            out_names.append("*")
            new_projections.append(proj)
            continue
        if proj.alias:
            out_names.append(proj.alias)
            new_projections.append(proj)
            continue
        if isinstance(proj.expr, a.ColumnRef):
            out_names.append(proj.expr.name)
            new_projections.append(proj)
            continue
        alias = f"col_{i + 1}"
        out_names.append(alias)
        new_projections.append(a.Projection(expr=proj.expr, alias=alias))
        changed = True

    if not changed:
        return query, out_names
    new_core = dataclasses.replace(core, projections=tuple(new_projections))
    new_body = _replace_leftmost(query.body, new_core)
    return dataclasses.replace(query, body=new_body), out_names


def _replace_leftmost(body: a.Node, new_core: a.SelectCore) -> a.Node:
    if isinstance(body, a.SetOp):
        return dataclasses.replace(body, left=_replace_leftmost(body.left, new_core))
    return new_core
