"""Immutable SQL AST nodes.

All nodes are frozen dataclasses with tuple-valued children, so structural
equality (``==``) is the tree-equality used by round-trip tests, and nodes
are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Node:
    pass


# --- expressions --------------------------------------------------------------

@dataclass(frozen=True)
class Literal(Node):
    text: str  # verbatim: 123, 1.5, 'abc', NULL, TRUE, FALSE


@dataclass(frozen=True)
class ColumnRef(Node):
    table: str | None
    name: str


@dataclass(frozen=True)
class Star(Node):
    table: str | None = None


@dataclass(frozen=True)
class FuncCall(Node):
    name: str  # uppercased
    args: tuple[Node, ...] = ()
    distinct: bool = False
    star: bool = False  # COUNT(*)
    over: str | None = None  # raw OVER-clause body, canonical token join


@dataclass(frozen=True)
class Unary(Node):
    op: str  # '-', '+', 'NOT'
    operand: Node


@dataclass(frozen=True)
class Binary(Node):
    op: str  # arithmetic, comparison, AND, OR, LIKE, NOT LIKE, ||
    left: Node
    right: Node


@dataclass(frozen=True)
class IsNull(Node):
    operand: Node
    negated: bool = False


@dataclass(frozen=True)
class Between(Node):
    operand: Node
    low: Node
    high: Node
    negated: bool = False


@dataclass(frozen=True)
class InList(Node):
    operand: Node
    items: tuple[Node, ...]
    negated: bool = False


@dataclass(frozen=True)
class InSubquery(Node):
    operand: Node
    query: "Query"
    negated: bool = False


@dataclass(frozen=True)
class Exists(Node):
    query: "Query"
    negated: bool = False


@dataclass(frozen=True)
class ScalarSubquery(Node):
    query: "Query"


@dataclass(frozen=True)
class Case(Node):
    operand: Node | None
    whens: tuple[tuple[Node, Node], ...]
    default: Node | None


@dataclass(frozen=True)
class Cast(Node):
    operand: Node
    type_name: str


# --- relations ----------------------------------------------------------------

@dataclass(frozen=True)
class TableRef(Node):
    name: str
    alias: str | None = None


@dataclass(frozen=True)
class SubqueryRef(Node):
    query: "Query"
    alias: str


@dataclass(frozen=True)
class Join(Node):
    kind: str  # 'JOIN', 'LEFT JOIN', 'RIGHT JOIN', 'FULL JOIN', 'CROSS JOIN', ','
    item: Node  # TableRef | SubqueryRef
    on: Node | None = None


@dataclass(frozen=True)
class Projection(Node):
    expr: Node
    alias: str | None = None


@dataclass(frozen=True)
class SelectCore(Node):
    projections: tuple[Projection, ...]
    distinct: bool = False
    source: Node | None = None  # TableRef | SubqueryRef
    joins: tuple[Join, ...] = ()
    where: Node | None = None
    group_by: tuple[Node, ...] = ()
    having: Node | None = None


@dataclass(frozen=True)
class SetOp(Node):
    op: str  # 'UNION', 'UNION ALL', 'INTERSECT', 'EXCEPT'
    left: Node  # SelectCore | SetOp
    right: Node


@dataclass(frozen=True)
class OrderItem(Node):
    expr: Node
    direction: str | None = None  # 'ASC' | 'DESC' | None


@dataclass(frozen=True)
class Query(Node):
    body: Node  # SelectCore | SetOp
    ctes: tuple[tuple[str, "Query"], ...] = ()
    order_by: tuple[OrderItem, ...] = ()
    limit: Node | None = None
    offset: Node | None = None


@dataclass(frozen=True)
class SqlAst:
    root: Query
    dialect: str = "generic"


@dataclass(frozen=True)
class DecompositionStep:
    cte_name: str
    subquery: SqlAst
    depends_on: frozenset[str] = field(default_factory=frozenset)


@dataclass(frozen=True)
class DecompositionPlan:
    steps: tuple[DecompositionStep, ...]
    final: SqlAst


def _children(node):
    if isinstance(node, Query):
        # CTEs come first in statement text
        order = ("ctes", "body", "order_by", "limit", "offset")
    else:
        order = tuple(node.__dataclass_fields__)
    for f in order:
        val = getattr(node, f)
        if isinstance(val, Node):
            yield val
        elif isinstance(val, tuple):
            for item in val:
                if isinstance(item, Node):
                    yield item
                elif isinstance(item, tuple):  # CTE pairs, CASE whens
                    yield from (x for x in item if isinstance(x, Node))


def walk(node):
    """Yield every AST node under `node`, deterministic pre-order.

    Accepts any AST dataclass, including SqlAst wrappers.
    """
    yield node
    for child in _children(node):
        yield from walk(child)
