"""Tokenizer for MiniJ source text.

Ordinary comments are dropped. A doc comment (`/** ... */`) is not a token of
its own: its cleaned text is attached to the next token, so the parser can hand
it to the declaration that starts there.
"""

import re
from dataclasses import dataclass
from typing import List, Optional

from exceptions import MiniJSyntaxError
from syntax_tree import SourceLocation

KEYWORDS = frozenset(
    {
        "package",
        "import",
        "static",
        "class",
        "extends",
        "public",
        "private",
        "protected",
        "final",
        "abstract",
        "void",
        "throws",
        "if",
        "else",
        "for",
        "try",
        "catch",
        "return",
        "throw",
        "new",
        "this",
        "instanceof",
        "true",
        "false",
        "null",
    }
)

IDENT = "IDENT"
KEYWORD = "KEYWORD"
NUMBER = "NUMBER"
STRING = "STRING"
CHAR = "CHAR"
OP = "OP"
EOF = "EOF"

_RULES = [
    ("WS", r"[ \t\r\n\f]+"),
    ("DOC", r"/\*\*(?!/)[\s\S]*?\*/"),
    ("COMMENT", r"/\*[\s\S]*?\*/|//[^\n]*"),
    ("UNTERMINATED", r"/\*"),
    (STRING, r'"(?:\\.|[^"\\\n])*"'),
    (CHAR, r"'(?:\\.|[^'\\\n])'"),
    (NUMBER, r"\d+(?:\.\d+)?[lLfFdD]?"),
    ("WORD", r"(?:[^\W\d]|\$)[\w$]*"),
    (OP, r"\.\.\.|==|!=|<=|>=|&&|\|\||[{}()\[\];,.@=<>!+\-*/%?:&|]"),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _RULES))


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    doc: Optional[str] = None

    def is_op(self, *texts: str) -> bool:
        return self.kind == OP and self.text in texts

    def is_keyword(self, *texts: str) -> bool:
        return self.kind == KEYWORD and self.text in texts

    def describe(self) -> str:
        if self.kind == EOF:
            return "end of file"
        return f"'{self.text}'"


def clean_doc(raw: str) -> str:
    """Strip the comment delimiters and the leading `*` gutter of each line, then trim"""
    body = raw[3:-2]
    lines = []
    for line in body.split("\n"):
        stripped = line.strip()
        if stripped.startswith("*"):
            stripped = stripped[1:].strip()
        lines.append(stripped)
    return "\n".join(lines).strip()


def tokenize(source_text: str, file: str) -> List[Token]:
    """Split source text into tokens, ending with a single EOF token"""
    tokens: List[Token] = []
    pos = 0
    line = 1
    line_start = 0
    pending_doc: Optional[str] = None

    while pos < len(source_text):
        match = _MASTER.match(source_text, pos)
        column = pos - line_start + 1
        if match is None:
            raise MiniJSyntaxError(
                SourceLocation(file, line, column), "a token", repr(source_text[pos])
            )

        kind = match.lastgroup
        text = match.group()
        if kind == "UNTERMINATED":
            raise MiniJSyntaxError(
                SourceLocation(file, line, column), "'*/'", "unterminated comment"
            )
        if kind == "DOC":
            pending_doc = clean_doc(text)
        elif kind not in ("WS", "COMMENT"):
            if kind == "WORD":
                kind = KEYWORD if text in KEYWORDS else IDENT
            tokens.append(Token(kind, text, line, column, pending_doc))
            pending_doc = None

        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = match.end()

    tokens.append(Token(EOF, "", line, pos - line_start + 1, pending_doc))
    return tokens
