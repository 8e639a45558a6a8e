"""Tokenizer for specification source text.

Keywords are case-sensitive; identifiers are ``[a-zA-Z_][a-zA-Z0-9_]*``.
The logical connectives accept both ASCII (``&&``, ``||``) and the
mathematical glyphs (``∧``, ``∨``) so printed fragments paste in cleanly.
``//`` starts a comment running to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

KEYWORDS = {
    "input",
    "output",
    "trigger",
    "filter",
    "if",
    "then",
    "else",
    "true",
    "false",
    "Float64",
    "Bool",
}

# token type -> fixed lexeme (multi-char operators first, longest match wins)
SYMBOLS = [
    (":=", "ASSIGN"),
    ("<=", "LE"),
    (">=", "GE"),
    ("==", "EQ"),
    ("!=", "NE"),
    ("&&", "AND"),
    ("||", "OR"),
    ("∧", "AND"),
    ("∨", "OR"),
    ("<", "LT"),
    (">", "GT"),
    ("+", "PLUS"),
    ("-", "MINUS"),
    ("*", "STAR"),
    ("/", "SLASH"),
    ("!", "BANG"),
    ("(", "LPAREN"),
    (")", "RPAREN"),
    (",", "COMMA"),
    (":", "COLON"),
    ("@", "AT"),
    (".", "DOT"),
]


@dataclass(frozen=True)
class Token:
    type: str
    value: str
    line: int
    col: int

    def __repr__(self) -> str:
        return f"Token({self.type}, {self.value!r}, {self.line}:{self.col})"


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def emit(ttype: str, value: str, start_col: int) -> None:
        tokens.append(Token(ttype, value, line, start_col))

    while i < n:
        ch = source[i]

        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
            continue

        if ch == '"':
            start_col = col
            i += 1
            col += 1
            buf: list[str] = []
            while i < n and source[i] != '"':
                if source[i] == "\n":
                    raise ParseError("unterminated string literal", line, start_col)
                if source[i] == "\\" and i + 1 < n:
                    i += 1
                    col += 1
                    esc = source[i]
                    buf.append({"n": "\n", "t": "\t"}.get(esc, esc))
                else:
                    buf.append(source[i])
                i += 1
                col += 1
            if i >= n:
                raise ParseError("unterminated string literal", line, start_col)
            i += 1
            col += 1
            emit("STRING", "".join(buf), start_col)
            continue

        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            start, start_col = i, col
            while i < n and source[i].isdigit():
                i += 1
            # fractional part: a dot only counts when a digit follows,
            # so `1.0.defaults` leaves the method dot alone
            if i < n and source[i] == "." and i + 1 < n and source[i + 1].isdigit():
                i += 1
                while i < n and source[i].isdigit():
                    i += 1
            # scientific notation: 1e-6, 2.5E3
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    i = j
                    while i < n and source[i].isdigit():
                        i += 1
            col = start_col + (i - start)
            emit("NUMBER", source[start:i], start_col)
            continue

        if ch.isalpha() or ch == "_":
            start, start_col = i, col
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
                col += 1
            text = source[start:i]
            emit(text if text in KEYWORDS else "IDENT", text, start_col)
            continue

        for lexeme, ttype in SYMBOLS:
            if source.startswith(lexeme, i):
                emit(ttype, lexeme, col)
                i += len(lexeme)
                col += len(lexeme)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)

    tokens.append(Token("EOF", "", line, col))
    return tokens
