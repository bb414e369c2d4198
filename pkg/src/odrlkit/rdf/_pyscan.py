"""Regex-driven Turtle tokenizer (pure-Python fallback for ``_scanner``).

Both implementations must emit identical token lists and raise
:class:`TurtleSyntaxError` at the same position for the same input.
Tokens are ``(kind, value, line, column)`` tuples; kinds are the integer
constants below.
"""

from __future__ import annotations

import re

from .errors import TurtleSyntaxError, excerpt_at

IRI = 1
PNAME = 2
BNODE = 3
STRING = 4
LANGTAG = 5
INTEGER = 6
DECIMAL = 7
DOUBLE = 8
BOOLEAN = 9
A = 10
PREFIX_AT = 11
BASE_AT = 12
SPARQL_PREFIX = 13
SPARQL_BASE = 14
DOT = 15
SEMI = 16
COMMA = 17
LBRACKET = 18
RBRACKET = 19
LPAREN = 20
RPAREN = 21
DTYPE = 22

_BASE = (
    "A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF"
    "\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF"
    "\uFDF0-\uFFFD\U00010000-\U000EFFFF"
)
_U = _BASE + "_"
_CHARS = _U + "\\-0-9\u00B7\u0300-\u036F\u203F-\u2040"
_PLX = r"(?:%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?#@%])"
_PREFIX = f"[{_BASE}](?:[{_CHARS}.]*[{_CHARS}])?"
_LOCAL = f"(?:[{_U}:0-9]|{_PLX})(?:(?:[{_CHARS}.:]|{_PLX})*(?:[{_CHARS}:]|{_PLX}))?"
_ECHAR = r"\\(?:[tbnrf\"'\\]|u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8})"
_EXP = r"[eE][+-]?[0-9]+"

_TOKEN = re.compile(
    "|".join(
        [
            r"(?P<ws>[ \t\r\n]+|\#[^\r\n]*)",
            r"(?P<iri><(?:[^\x00-\x20<>\"{}|^`\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*>)",
            f'(?P<slong>"""(?:(?:"|"")?(?:[^"\\\\]|{_ECHAR}))*""")',
            f"(?P<slong1>'''(?:(?:'|'')?(?:[^'\\\\]|{_ECHAR}))*''')",
            f'(?P<sshort>"(?:[^"\\\\\\n\\r]|{_ECHAR})*")',
            f"(?P<sshort1>'(?:[^'\\\\\\n\\r]|{_ECHAR})*')",
            r"(?P<lang>@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*)",
            f"(?P<double>[+-]?(?:[0-9]+\\.[0-9]*{_EXP}|\\.[0-9]+{_EXP}|[0-9]+{_EXP}))",
            r"(?P<decimal>[+-]?[0-9]*\.[0-9]+)",
            r"(?P<integer>[+-]?[0-9]+)",
            f"(?P<bnode>_:[{_U}0-9](?:[{_CHARS}.]*[{_CHARS}])?)",
            f"(?P<pname>(?:{_PREFIX})?:(?:{_LOCAL})?)",
            f"(?P<word>{_PREFIX})",
            r"(?P<dtype>\^\^)",
            r"(?P<punct>[.;,\[\]()])",
        ]
    )
)

_PUNCT = {".": DOT, ";": SEMI, ",": COMMA, "[": LBRACKET, "]": RBRACKET, "(": LPAREN, ")": RPAREN}
_ESCAPE = re.compile(_ECHAR)
_LOCAL_ESCAPE = re.compile(r"\\([_~.\-!$&'()*+,;=/?#@%])")
_SIMPLE = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape_match(m: re.Match) -> str:
    body = m.group(0)[1:]
    if body[0] in "uU":
        return chr(int(body[1:], 16))
    return _SIMPLE[body]


def _unescape(text: str) -> str:
    if "\\" not in text:
        return text
    return _ESCAPE.sub(_unescape_match, text)


def tokenize(text: str) -> list:
    tokens = []
    append = tokens.append
    pos = 0
    n = len(text)
    line = 1
    line_start = 0
    match = _TOKEN.match
    while pos < n:
        m = match(text, pos)
        if m is None:
            raise TurtleSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1, excerpt_at(text, line)
            )
        kind = m.lastgroup
        end = m.end()
        col = pos - line_start + 1
        if kind == "ws":
            pass
        elif kind == "iri":
            append((IRI, _unescape(m.group()[1:-1]), line, col))
        elif kind == "pname":
            tok = m.group()
            if "\\" in tok:
                tok = _LOCAL_ESCAPE.sub(r"\1", tok)
            append((PNAME, tok, line, col))
        elif kind in ("slong", "slong1"):
            append((STRING, _unescape(m.group()[3:-3]), line, col))
        elif kind in ("sshort", "sshort1"):
            append((STRING, _unescape(m.group()[1:-1]), line, col))
        elif kind == "punct":
            append((_PUNCT[m.group()], m.group(), line, col))
        elif kind == "lang":
            tag = m.group()[1:]
            if tag == "prefix":
                append((PREFIX_AT, tag, line, col))
            elif tag == "base":
                append((BASE_AT, tag, line, col))
            else:
                append((LANGTAG, tag, line, col))
        elif kind == "integer":
            append((INTEGER, m.group(), line, col))
        elif kind == "decimal":
            append((DECIMAL, m.group(), line, col))
        elif kind == "double":
            append((DOUBLE, m.group(), line, col))
        elif kind == "bnode":
            append((BNODE, m.group()[2:], line, col))
        elif kind == "dtype":
            append((DTYPE, "^^", line, col))
        else:
            word = m.group()
            if word == "a":
                append((A, word, line, col))
            elif word in ("true", "false"):
                append((BOOLEAN, word, line, col))
            elif word.upper() == "PREFIX":
                append((SPARQL_PREFIX, word, line, col))
            elif word.upper() == "BASE":
                append((SPARQL_BASE, word, line, col))
            else:
                raise TurtleSyntaxError(f"unexpected word {word!r}", line, col, excerpt_at(text, line))
        if kind in ("ws", "slong", "slong1"):
            nl = text.count("\n", pos, end)
            if nl:
                line += nl
                line_start = text.rfind("\n", pos, end) + 1
        pos = end
    return tokens
