"""Recursive-descent parser for the supported SELECT grammar.

Grammar scope: SELECT statements with joins, set operations, subqueries in
FROM/WHERE/HAVING, WITH clauses, ORDER BY/LIMIT/OFFSET, CASE, CAST, and
window functions (the OVER clause is kept opaque). DML/DDL statements raise
UnsupportedConstruct naming the statement kind.
"""

from __future__ import annotations

from benchforge.errors import SqlSyntaxError, UnsupportedConstruct
from benchforge.sqlmodel import ast as a
from benchforge.sqlmodel.tokens import EOF, IDENT, NUMBER, OP, QIDENT, STRING, Token, tokenize

RESERVED = {
    "SELECT", "FROM", "WHERE", "GROUP", "HAVING", "ORDER", "LIMIT", "OFFSET",
    "JOIN", "LEFT", "RIGHT", "FULL", "INNER", "OUTER", "CROSS", "ON", "USING",
    "UNION", "INTERSECT", "EXCEPT", "AS", "AND", "OR", "NOT", "IN", "IS",
    "BETWEEN", "LIKE", "EXISTS", "CASE", "WHEN", "THEN", "ELSE", "END",
    "NULL", "TRUE", "FALSE", "WITH", "DISTINCT", "ALL", "ASC", "DESC", "BY",
    "CAST", "OVER",
}

_UNSUPPORTED_STATEMENTS = {
    "INSERT", "UPDATE", "DELETE", "CREATE", "DROP", "ALTER", "REPLACE",
    "MERGE", "TRUNCATE", "GRANT", "REVOKE", "PRAGMA", "EXPLAIN", "SET",
    "BEGIN", "COMMIT", "ROLLBACK", "VACUUM", "ANALYZE", "ATTACH", "COPY",
}

_JOIN_STARTERS = {"JOIN", "LEFT", "RIGHT", "FULL", "INNER", "CROSS"}


def parse_sql(text: str, dialect: str = "generic") -> a.SqlAst:
    """Parse a single SELECT statement into an SqlAst."""
    if not text or not text.strip():
        raise SqlSyntaxError("empty statement", 1, 1)
    parser = _Parser(tokenize(text), dialect)
    return parser.parse_statement()


class _Parser:
    def __init__(self, tokens: list[Token], dialect: str):
        self.tokens = tokens
        self.pos = 0
        self.dialect = dialect

    # --- token helpers ---------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def at_kw(self, *words: str) -> bool:
        tok = self.peek()
        return tok.kind == IDENT and tok.upper() in words

    def take_kw(self, *words: str) -> bool:
        if self.at_kw(*words):
            self.advance()
            return True
        return False

    def expect_kw(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind == IDENT and tok.upper() == word:
            return self.advance()
        raise self.error(f"expected {word}")

    def at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok.kind == OP and tok.value in ops

    def take_op(self, *ops: str) -> bool:
        if self.at_op(*ops):
            self.advance()
            return True
        return False

    def expect_op(self, op: str) -> Token:
        tok = self.peek()
        if tok.kind == OP and tok.value == op:
            return self.advance()
        raise self.error(f"expected {op!r}")

    def error(self, message: str) -> SqlSyntaxError:
        tok = self.peek()
        shown = tok.value if tok.kind != EOF else "<end of input>"
        return SqlSyntaxError(
            f"{message}, found {shown!r}", tok.line, tok.column, token=tok.value
        )

    # --- entry point ------------------------------------------------------

    def parse_statement(self) -> a.SqlAst:
        tok = self.peek()
        if tok.kind == IDENT and tok.upper() in _UNSUPPORTED_STATEMENTS:
            raise UnsupportedConstruct(f"{tok.upper()} statement")
        query = self.parse_query()
        self.take_op(";")
        if self.peek().kind != EOF:
            raise self.error("unexpected trailing input")
        return a.SqlAst(root=query, dialect=self.dialect)

    # --- query structure ---------------------------------------------------

    def parse_query(self) -> a.Query:
        ctes: list[tuple[str, a.Query]] = []
        if self.take_kw("WITH"):
            if self.at_kw("RECURSIVE"):
                raise UnsupportedConstruct("WITH RECURSIVE")
            while True:
                name = self.parse_identifier("CTE name")
                self.expect_kw("AS")
                self.expect_op("(")
                ctes.append((name, self.parse_query()))
                self.expect_op(")")
                if not self.take_op(","):
                    break
        body = self.parse_set_expr()
        order_by: tuple[a.OrderItem, ...] = ()
        limit = offset = None
        if self.take_kw("ORDER"):
            self.expect_kw("BY")
            items = []
            while True:
                expr = self.parse_expr()
                direction = None
                if self.take_kw("ASC"):
                    direction = "ASC"
                elif self.take_kw("DESC"):
                    direction = "DESC"
                items.append(a.OrderItem(expr, direction))
                if not self.take_op(","):
                    break
            order_by = tuple(items)
        if self.take_kw("LIMIT"):
            first = self.parse_expr()
            if self.take_kw("OFFSET"):
                limit, offset = first, self.parse_expr()
            elif self.take_op(","):
                # LIMIT off, count normalizes to LIMIT count OFFSET off
                offset, limit = first, self.parse_expr()
            else:
                limit = first
        elif self.take_kw("OFFSET"):
            offset = self.parse_expr()
        return a.Query(
            body=body, ctes=tuple(ctes), order_by=order_by, limit=limit, offset=offset
        )

    def parse_set_expr(self) -> a.Node:
        left = self.parse_set_operand()
        while self.at_kw("UNION", "INTERSECT", "EXCEPT"):
            op = self.advance().upper()
            if op == "UNION" and self.take_kw("ALL"):
                op = "UNION ALL"
            elif self.take_kw("DISTINCT"):
                pass  # UNION DISTINCT is plain UNION
            right = self.parse_set_operand()
            left = a.SetOp(op=op, left=left, right=right)
        return left

    def parse_set_operand(self) -> a.Node:
        if self.at_op("(") and self.peek(1).kind == IDENT and self.peek(1).upper() in (
            "SELECT", "WITH",
        ):
            # parenthesized set operand; parens are dropped in canonical form
            self.expect_op("(")
            inner = self.parse_set_expr()
            self.expect_op(")")
            return inner
        return self.parse_select_core()

    def parse_select_core(self) -> a.SelectCore:
        self.expect_kw("SELECT")
        distinct = False
        if self.take_kw("DISTINCT"):
            distinct = True
        else:
            self.take_kw("ALL")
        projections = [self.parse_projection()]
        while self.take_op(","):
            projections.append(self.parse_projection())
        source = None
        joins: list[a.Join] = []
        if self.take_kw("FROM"):
            source = self.parse_from_item()
            while True:
                if self.take_op(","):
                    joins.append(a.Join(kind=",", item=self.parse_from_item()))
                    continue
                kind = self.parse_join_kind()
                if kind is None:
                    break
                item = self.parse_from_item()
                on = None
                if self.take_kw("ON"):
                    on = self.parse_expr()
                elif self.at_kw("USING"):
                    raise UnsupportedConstruct("JOIN ... USING")
                joins.append(a.Join(kind=kind, item=item, on=on))
        where = self.parse_expr() if self.take_kw("WHERE") else None
        group_by: tuple[a.Node, ...] = ()
        having = None
        if self.take_kw("GROUP"):
            self.expect_kw("BY")
            exprs = [self.parse_expr()]
            while self.take_op(","):
                exprs.append(self.parse_expr())
            group_by = tuple(exprs)
        if self.take_kw("HAVING"):
            having = self.parse_expr()
        return a.SelectCore(
            projections=tuple(projections),
            distinct=distinct,
            source=source,
            joins=tuple(joins),
            where=where,
            group_by=group_by,
            having=having,
        )

    def parse_join_kind(self) -> str | None:
        if self.take_kw("JOIN"):
            return "JOIN"
        if self.at_kw("INNER") and self.peek(1).upper() == "JOIN":
            self.advance(), self.advance()
            return "JOIN"
        for word in ("LEFT", "RIGHT", "FULL"):
            if self.at_kw(word):
                nxt = self.peek(1).upper()
                if nxt == "JOIN":
                    self.advance(), self.advance()
                    return f"{word} JOIN"
                if nxt == "OUTER" and self.peek(2).upper() == "JOIN":
                    self.advance(), self.advance(), self.advance()
                    return f"{word} JOIN"
        if self.at_kw("CROSS") and self.peek(1).upper() == "JOIN":
            self.advance(), self.advance()
            return "CROSS JOIN"
        return None

    def parse_from_item(self) -> a.Node:
        if self.take_op("("):
            if self.at_kw("SELECT", "WITH"):
                query = self.parse_query()
                self.expect_op(")")
                alias = self.parse_optional_alias()
                return a.SubqueryRef(query=query, alias=alias or "")
            raise self.error("expected subquery after '(' in FROM")
        name = self.parse_identifier("table name")
        alias = self.parse_optional_alias()
        return a.TableRef(name=name, alias=alias)

    def parse_projection(self) -> a.Projection:
        tok = self.peek()
        if tok.kind == OP and tok.value == "*":
            self.advance()
            return a.Projection(expr=a.Star())
        if (
            tok.kind in (IDENT, QIDENT)
            and self.peek(1).kind == OP
            and self.peek(1).value == "."
            and self.peek(2).kind == OP
            and self.peek(2).value == "*"
        ):
            self.advance(), self.advance(), self.advance()
            return a.Projection(expr=a.Star(table=tok.value))
        expr = self.parse_expr()
        alias = self.parse_optional_alias()
        return a.Projection(expr=expr, alias=alias)

    def parse_optional_alias(self) -> str | None:
        if self.take_kw("AS"):
            return self.parse_identifier("alias")
        tok = self.peek()
        if tok.kind == QIDENT or (tok.kind == IDENT and tok.upper() not in RESERVED):
            self.advance()
            return tok.value
        return None

    def parse_identifier(self, what: str) -> str:
        tok = self.peek()
        if tok.kind == QIDENT:
            self.advance()
            return tok.value
        if tok.kind == IDENT and tok.upper() not in RESERVED:
            self.advance()
            return tok.value
        raise self.error(f"expected {what}")

    # --- expressions --------------------------------------------------------

    def parse_expr(self) -> a.Node:
        return self.parse_or()

    def parse_or(self) -> a.Node:
        left = self.parse_and()
        while self.at_kw("OR"):
            self.advance()
            left = a.Binary(op="OR", left=left, right=self.parse_and())
        return left

    def parse_and(self) -> a.Node:
        left = self.parse_not()
        while self.at_kw("AND"):
            self.advance()
            left = a.Binary(op="AND", left=left, right=self.parse_not())
        return left

    def parse_not(self) -> a.Node:
        if self.take_kw("NOT"):
            return a.Unary(op="NOT", operand=self.parse_not())
        return self.parse_predicate()

    def parse_predicate(self) -> a.Node:
        left = self.parse_concat()
        while True:
            if self.at_op("=", "<", ">", "<=", ">=", "<>", "!="):
                op = self.advance().value
                left = a.Binary(op=op, left=left, right=self.parse_concat())
                continue
            negated = False
            save = self.pos
            if self.take_kw("NOT"):
                if self.at_kw("IN", "BETWEEN", "LIKE"):
                    negated = True
                else:
                    self.pos = save
                    break
            if self.take_kw("IS"):
                neg = self.take_kw("NOT")
                self.expect_kw("NULL")
                left = a.IsNull(operand=left, negated=neg)
                continue
            if self.take_kw("LIKE"):
                op = "NOT LIKE" if negated else "LIKE"
                left = a.Binary(op=op, left=left, right=self.parse_concat())
                continue
            if self.take_kw("BETWEEN"):
                low = self.parse_concat()
                self.expect_kw("AND")
                high = self.parse_concat()
                left = a.Between(operand=left, low=low, high=high, negated=negated)
                continue
            if self.take_kw("IN"):
                self.expect_op("(")
                if self.at_kw("SELECT", "WITH"):
                    query = self.parse_query()
                    self.expect_op(")")
                    left = a.InSubquery(operand=left, query=query, negated=negated)
                else:
                    items = [self.parse_expr()]
                    while self.take_op(","):
                        items.append(self.parse_expr())
                    self.expect_op(")")
                    left = a.InList(operand=left, items=tuple(items), negated=negated)
                continue
            break
        return left

    def parse_concat(self) -> a.Node:
        left = self.parse_additive()
        while self.at_op("||"):
            self.advance()
            left = a.Binary(op="||", left=left, right=self.parse_additive())
        return left

    def parse_additive(self) -> a.Node:
        left = self.parse_term()
        while self.at_op("+", "-"):
            op = self.advance().value
            left = a.Binary(op=op, left=left, right=self.parse_term())
        return left

    def parse_term(self) -> a.Node:
        left = self.parse_factor()
        while self.at_op("*", "/", "%"):
            op = self.advance().value
            left = a.Binary(op=op, left=left, right=self.parse_factor())
        return left

    def parse_factor(self) -> a.Node:
        if self.at_op("-", "+"):
            op = self.advance().value
            return a.Unary(op=op, operand=self.parse_factor())
        return self.parse_primary()

    def parse_primary(self) -> a.Node:
        tok = self.peek()
        if tok.kind == NUMBER or tok.kind == STRING:
            self.advance()
            return a.Literal(text=tok.value)
        if tok.kind == OP and tok.value == "(":
            self.advance()
            if self.at_kw("SELECT", "WITH"):
                query = self.parse_query()
                self.expect_op(")")
                return a.ScalarSubquery(query=query)
            expr = self.parse_expr()
            self.expect_op(")")
            return expr
        if tok.kind == QIDENT:
            return self.parse_name_or_call()
        if tok.kind != IDENT:
            raise self.error("expected expression")
        upper = tok.upper()
        if upper in ("NULL", "TRUE", "FALSE"):
            self.advance()
            return a.Literal(text=upper)
        if upper == "EXISTS":
            self.advance()
            self.expect_op("(")
            query = self.parse_query()
            self.expect_op(")")
            return a.Exists(query=query)
        if upper == "CASE":
            return self.parse_case()
        if upper == "CAST":
            self.advance()
            self.expect_op("(")
            operand = self.parse_expr()
            self.expect_kw("AS")
            type_name = self.parse_type_name()
            self.expect_op(")")
            return a.Cast(operand=operand, type_name=type_name)
        if upper in RESERVED:
            raise self.error("expected expression")
        return self.parse_name_or_call()

    def parse_name_or_call(self) -> a.Node:
        name_tok = self.advance()
        if self.at_op("("):
            return self.parse_call(name_tok)
        if self.at_op(".") and self.peek(1).kind in (IDENT, QIDENT):
            self.advance()
            col = self.advance()
            return a.ColumnRef(table=name_tok.value, name=col.value)
        return a.ColumnRef(table=None, name=name_tok.value)

    def parse_call(self, name_tok: Token) -> a.Node:
        self.expect_op("(")
        name = name_tok.upper()
        distinct = False
        star = False
        args: tuple[a.Node, ...] = ()
        if self.take_op(")"):
            pass
        elif self.at_op("*") and self.peek(1).value == ")":
            self.advance(), self.advance()
            star = True
        else:
            if self.take_kw("DISTINCT"):
                distinct = True
            exprs = [self.parse_expr()]
            while self.take_op(","):
                exprs.append(self.parse_expr())
            self.expect_op(")")
            args = tuple(exprs)
        over = None
        if self.at_kw("OVER"):
            self.advance()
            over = self.capture_over_body()
        return a.FuncCall(name=name, args=args, distinct=distinct, star=star, over=over)

    def capture_over_body(self) -> str:
        """Capture the OVER (...) body as a canonical token string (opaque)."""
        self.expect_op("(")
        depth = 1
        parts: list[str] = []
        while depth > 0:
            tok = self.peek()
            if tok.kind == EOF:
                raise self.error("unterminated OVER clause")
            if tok.kind == OP and tok.value == "(":
                depth += 1
            elif tok.kind == OP and tok.value == ")":
                depth -= 1
                if depth == 0:
                    self.advance()
                    break
            word = tok.value
            if tok.kind == IDENT and tok.upper() in RESERVED | {
                "PARTITION", "ROWS", "RANGE", "PRECEDING", "FOLLOWING",
                "UNBOUNDED", "CURRENT", "ROW",
            }:
                word = tok.upper()
            parts.append(word)
            self.advance()
        return " ".join(parts)

    def parse_case(self) -> a.Node:
        self.expect_kw("CASE")
        operand = None
        if not self.at_kw("WHEN"):
            operand = self.parse_expr()
        whens: list[tuple[a.Node, a.Node]] = []
        while self.take_kw("WHEN"):
            cond = self.parse_expr()
            self.expect_kw("THEN")
            whens.append((cond, self.parse_expr()))
        if not whens:
            raise self.error("CASE requires at least one WHEN")
        default = self.parse_expr() if self.take_kw("ELSE") else None
        self.expect_kw("END")
        return a.Case(operand=operand, whens=tuple(whens), default=default)

    def parse_type_name(self) -> str:
        name = self.parse_identifier("type name").upper()
        if self.take_op("("):
            args = [self.advance().value]
            while self.take_op(","):
                args.append(self.advance().value)
            self.expect_op(")")
            name = f"{name}({', '.join(args)})"
        return name
