"""SQL lexer: text -> token stream with line/column tracking.

Comments (``--`` and ``/* */``) are stripped here so the parser never sees
them. String literals and numbers are kept verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass

from benchforge.errors import SqlSyntaxError

# token kinds
IDENT = "IDENT"      # bare identifier or keyword (case preserved)
QIDENT = "QIDENT"    # quoted identifier, normalized to "double quoted" text
NUMBER = "NUMBER"
STRING = "STRING"
OP = "OP"
EOF = "EOF"

_MULTI_OPS = ("<=", ">=", "<>", "!=", "||")
_SINGLE_OPS = "=<>+-*/%(),.;"


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    column: int

    def upper(self) -> str:
        return self.value.upper()


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def err(msg: str) -> SqlSyntaxError:
        return SqlSyntaxError(msg, line, col)

    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            j = text.find("\n", i)
            if j == -1:
                break
            i = j
            continue
        if text.startswith("/*", i):
            j = text.find("*/", i + 2)
            if j == -1:
                raise err("unterminated comment")
            skipped = text[i : j + 2]
            line += skipped.count("\n")
            col = 1 if "\n" in skipped else col + len(skipped)
            i = j + 2
            continue
        if ch == "'":
            j = i + 1
            while True:
                j = text.find("'", j)
                if j == -1:
                    raise err("unterminated string literal")
                if j + 1 < n and text[j + 1] == "'":  # escaped quote
                    j += 2
                    continue
                break
            tokens.append(Token(STRING, text[i : j + 1], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch in ('"', "`", "["):
            closer = {"\"": "\"", "`": "`", "[": "]"}[ch]
            j = text.find(closer, i + 1)
            if j == -1:
                raise err("unterminated quoted identifier")
            inner = text[i + 1 : j]
            tokens.append(Token(QIDENT, f'"{inner}"', line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            # exponent part
            if j < n and text[j] in "eE" and j + 1 < n and (
                text[j + 1].isdigit() or text[j + 1] in "+-"
            ):
                j += 2
                while j < n and text[j].isdigit():
                    j += 1
            tokens.append(Token(NUMBER, text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token(IDENT, text[i:j], line, col))
            col += j - i
            i = j
            continue
        two = text[i : i + 2]
        if two in _MULTI_OPS:
            tokens.append(Token(OP, two, line, col))
            i += 2
            col += 2
            continue
        if ch in _SINGLE_OPS:
            tokens.append(Token(OP, ch, line, col))
            i += 1
            col += 1
            continue
        raise err(f"unexpected character {ch!r}")

    tokens.append(Token(EOF, "", line, col))
    return tokens
