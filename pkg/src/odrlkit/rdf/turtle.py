"""Turtle reader and writer.

Covers Turtle 1.1 without RDF-star: directives in both ``@prefix`` and
SPARQL style, predicate/object lists, anonymous and labelled blank nodes,
collections, and the literal shorthands.  Blank-node labels are replaced by
``b0, b1, ...`` in document order, so parsing is deterministic.
"""

from __future__ import annotations

import re
from typing import Mapping, Optional
from urllib.parse import urljoin

from . import _pyscan
from . import lexer as lx
from .errors import TurtleSyntaxError, UndefinedPrefix, excerpt_at
from .graph import Graph
from .terms import RDF_LANGSTRING, XSD_STRING, BlankNode, Iri, Literal, Triple

_RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
_XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_TYPE = Iri(_RDF + "type")
RDF_FIRST = Iri(_RDF + "first")
RDF_REST = Iri(_RDF + "rest")
RDF_NIL = Iri(_RDF + "nil")
XSD_INTEGER = Iri(_XSD + "integer")
XSD_DECIMAL = Iri(_XSD + "decimal")
XSD_DOUBLE = Iri(_XSD + "double")
XSD_BOOLEAN = Iri(_XSD + "boolean")

_NUMERIC = {lx.INTEGER: XSD_INTEGER, lx.DECIMAL: XSD_DECIMAL, lx.DOUBLE: XSD_DOUBLE}
_KIND_NAMES = {
    lx.IRI: "IRI",
    lx.PNAME: "prefixed name",
    lx.BNODE: "blank node",
    lx.STRING: "string",
    lx.LANGTAG: "language tag",
    lx.INTEGER: "integer",
    lx.DECIMAL: "decimal",
    lx.DOUBLE: "double",
    lx.BOOLEAN: "boolean",
    lx.A: "'a'",
    lx.PREFIX_AT: "@prefix",
    lx.BASE_AT: "@base",
    lx.SPARQL_PREFIX: "PREFIX",
    lx.SPARQL_BASE: "BASE",
    lx.DOT: "'.'",
    lx.SEMI: "';'",
    lx.COMMA: "','",
    lx.LBRACKET: "'['",
    lx.RBRACKET: "']'",
    lx.LPAREN: "'('",
    lx.RPAREN: "')'",
    lx.DTYPE: "'^^'",
}


class _Parser:
    def __init__(self, text: str, base: Optional[str]) -> None:
        self.text = text
        self.tokens = lx.tokenize(text)
        self.pos = 0
        self.base = base
        self.prefixes: dict = {}
        self.triples: list = []
        self.bnodes: dict = {}
        self.counter = 0

    # -- token helpers -------------------------------------------------
    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return None

    def next(self):
        tok = self.peek()
        if tok is None:
            self.fail_eof()
        self.pos += 1
        return tok

    def expect(self, kind: int, what: str):
        tok = self.next()
        if tok[0] != kind:
            self.fail(tok, f"expected {what}, found {_KIND_NAMES[tok[0]]}")
        return tok

    def fail(self, tok, message: str):
        raise TurtleSyntaxError(message, tok[2], tok[3], excerpt_at(self.text, tok[2]))

    def fail_eof(self):
        lines = self.text.split("\n")
        line = len(lines)
        raise TurtleSyntaxError("unexpected end of document", line, len(lines[-1]) + 1, lines[-1])

    def fresh(self) -> BlankNode:
        node = BlankNode(f"b{self.counter}")
        self.counter += 1
        return node

    def emit(self, s, p, o) -> None:
        self.triples.append(Triple(s, p, o))

    # -- grammar -------------------------------------------------------
    def parse(self) -> Graph:
        while self.peek() is not None:
            tok = self.peek()
            kind = tok[0]
            if kind == lx.PREFIX_AT:
                self.pos += 1
                self.prefix_decl()
                self.expect(lx.DOT, "'.' after @prefix")
            elif kind == lx.BASE_AT:
                self.pos += 1
                self.base_decl()
                self.expect(lx.DOT, "'.' after @base")
            elif kind == lx.SPARQL_PREFIX:
                self.pos += 1
                self.prefix_decl()
            elif kind == lx.SPARQL_BASE:
                self.pos += 1
                self.base_decl()
            else:
                self.triples_stmt()
                self.expect(lx.DOT, "'.' at end of statement")
        return Graph(self.triples, self.prefixes)

    def prefix_decl(self) -> None:
        tok = self.expect(lx.PNAME, "prefix label")
        label, _, local = tok[1].partition(":")
        if local:
            self.fail(tok, f"prefix label must end with ':', found {tok[1]!r}")
        iri_tok = self.expect(lx.IRI, "namespace IRI")
        self.prefixes[label] = self.resolve(iri_tok)

    def base_decl(self) -> None:
        iri_tok = self.expect(lx.IRI, "base IRI")
        self.base = self.resolve(iri_tok)

    def resolve(self, tok) -> str:
        value = tok[1]
        if self.base and not _is_absolute(value):
            value = urljoin(self.base, value)
        return value

    def make_iri(self, tok, value: str) -> Iri:
        try:
            return Iri(value)
        except ValueError:
            self.fail(tok, f"invalid IRI {value!r}")

    def iri(self, tok) -> Iri:
        if tok[0] == lx.IRI:
            return self.make_iri(tok, self.resolve(tok))
        label, _, local = tok[1].partition(":")
        ns = self.prefixes.get(label)
        if ns is None:
            raise UndefinedPrefix(label, tok[2], tok[3], excerpt_at(self.text, tok[2]))
        return self.make_iri(tok, ns + local)

    def triples_stmt(self) -> None:
        tok = self.peek()
        if tok[0] == lx.LBRACKET:
            nxt = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else None
            if nxt is not None and nxt[0] == lx.RBRACKET:
                self.pos += 2
                subject = self.fresh()
                self.predicate_object_list(subject)
                return
            self.pos += 1
            subject = self.fresh()
            self.predicate_object_list(subject)
            self.expect(lx.RBRACKET, "']'")
            nxt = self.peek()
            if nxt is not None and nxt[0] != lx.DOT:
                self.predicate_object_list(subject)
            return
        subject = self.subject()
        self.predicate_object_list(subject)

    def subject(self):
        tok = self.next()
        kind = tok[0]
        if kind in (lx.IRI, lx.PNAME):
            return self.iri(tok)
        if kind == lx.BNODE:
            return self.labelled(tok[1])
        if kind == lx.LBRACKET:
            self.expect(lx.RBRACKET, "']' (anonymous blank node subject)")
            return self.fresh()
        if kind == lx.LPAREN:
            return self.collection()
        self.fail(tok, f"expected subject, found {_KIND_NAMES[kind]}")

    def labelled(self, label: str) -> BlankNode:
        node = self.bnodes.get(label)
        if node is None:
            node = self.bnodes[label] = self.fresh()
        return node

    def predicate_object_list(self, subject) -> None:
        self.verb_object_list(subject)
        while True:
            tok = self.peek()
            if tok is None or tok[0] != lx.SEMI:
                return
            while tok is not None and tok[0] == lx.SEMI:
                self.pos += 1
                tok = self.peek()
            if tok is None or tok[0] in (lx.DOT, lx.RBRACKET):
                return
            self.verb_object_list(subject)

    def verb_object_list(self, subject) -> None:
        tok = self.next()
        if tok[0] == lx.A:
            predicate = RDF_TYPE
        elif tok[0] in (lx.IRI, lx.PNAME):
            predicate = self.iri(tok)
        else:
            self.fail(tok, f"expected predicate, found {_KIND_NAMES[tok[0]]}")
        self.emit(subject, predicate, self.object())
        while True:
            tok = self.peek()
            if tok is None or tok[0] != lx.COMMA:
                return
            self.pos += 1
            self.emit(subject, predicate, self.object())

    def object(self):
        tok = self.next()
        kind = tok[0]
        if kind in (lx.IRI, lx.PNAME):
            return self.iri(tok)
        if kind == lx.BNODE:
            return self.labelled(tok[1])
        if kind == lx.LBRACKET:
            node = self.fresh()
            nxt = self.peek()
            if nxt is not None and nxt[0] == lx.RBRACKET:
                self.pos += 1
                return node
            self.predicate_object_list(node)
            self.expect(lx.RBRACKET, "']'")
            return node
        if kind == lx.LPAREN:
            return self.collection()
        if kind == lx.STRING:
            nxt = self.peek()
            if nxt is not None and nxt[0] == lx.LANGTAG:
                self.pos += 1
                return Literal(tok[1], language=nxt[1])
            if nxt is not None and nxt[0] == lx.DTYPE:
                self.pos += 1
                dt_tok = self.next()
                if dt_tok[0] not in (lx.IRI, lx.PNAME):
                    self.fail(dt_tok, "expected datatype IRI after '^^'")
                datatype = self.iri(dt_tok)
                if datatype.value == RDF_LANGSTRING:
                    self.fail(dt_tok, "rdf:langString literal needs a language tag")
                return Literal(tok[1], datatype)
            return Literal(tok[1])
        if kind in _NUMERIC:
            return Literal(tok[1], _NUMERIC[kind])
        if kind == lx.BOOLEAN:
            return Literal(tok[1], XSD_BOOLEAN)
        self.fail(tok, f"expected object, found {_KIND_NAMES[kind]}")

    def collection(self):
        items = []
        while True:
            tok = self.peek()
            if tok is None:
                self.fail_eof()
            if tok[0] == lx.RPAREN:
                self.pos += 1
                break
            items.append(self.object())
        if not items:
            return RDF_NIL
        head = self.fresh()
        node = head
        for i, item in enumerate(items):
            self.emit(node, RDF_FIRST, item)
            if i + 1 < len(items):
                nxt = self.fresh()
                self.emit(node, RDF_REST, nxt)
                node = nxt
            else:
                self.emit(node, RDF_REST, RDF_NIL)
        return head


_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")


def _is_absolute(iri: str) -> bool:
    return bool(_SCHEME.match(iri))


def parse_turtle(text: str, base: Optional[str] = None) -> Graph:
    """Parse a Turtle document into a :class:`Graph`.

    Raises :class:`TurtleSyntaxError` (1-based line/column plus excerpt) on
    malformed input and :class:`UndefinedPrefix` for undeclared labels.
    """
    return _Parser(text, base).parse()


def parse_turtle_file(path, base: Optional[str] = None) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_turtle(fh.read(), base)


# ---------------------------------------------------------------------------
# Writer
# ---------------------------------------------------------------------------

_LOCAL_SAFE = re.compile(r"^[A-Za-z_0-9](?:[A-Za-z_0-9\-.]*[A-Za-z_0-9\-])?$")
_PREFIX_SAFE = re.compile(f"^(?:{_pyscan._PREFIX})?$")
_INTEGER = re.compile(r"^[+-]?[0-9]+$")
_DECIMAL = re.compile(r"^[+-]?[0-9]*\.[0-9]+$")
_DOUBLE = re.compile(r"^[+-]?(?:[0-9]+\.[0-9]*[eE][+-]?[0-9]+|\.[0-9]+[eE][+-]?[0-9]+|[0-9]+[eE][+-]?[0-9]+)$")
_SHORTHAND = {
    XSD_INTEGER.value: _INTEGER,
    XSD_DECIMAL.value: _DECIMAL,
    XSD_DOUBLE.value: _DOUBLE,
}


class _Writer:
    def __init__(self, graph: Graph, prefixes: Mapping[str, str]) -> None:
        self.graph = graph
        # Longest namespace first so the most specific prefix wins.
        self.prefixes = sorted(
            ((label, ns) for label, ns in prefixes.items() if _PREFIX_SAFE.match(label)),
            key=lambda item: (-len(item[1]), item[0]),
        )
        self.refs: dict = {}
        for t in graph.triples:
            if isinstance(t.object, BlankNode):
                self.refs[t.object] = self.refs.get(t.object, 0) + 1
        self.lists: dict = {}
        self.list_nodes: set = set()
        self._find_lists()
        self.inline = self._inline_candidates()
        self.done: set = set()

    # -- structure discovery -------------------------------------------
    def _find_lists(self) -> None:
        g = self.graph
        heads = [t.object for t in g.triples if isinstance(t.object, BlankNode) and t.predicate != RDF_REST]
        for head in sorted(set(heads), key=BlankNode.n3):
            if self.refs.get(head) != 1:
                continue
            members = []
            nodes = []
            node = head
            ok = True
            while node != RDF_NIL:
                if not isinstance(node, BlankNode) or node in nodes or node in self.list_nodes:
                    ok = False
                    break
                about = g.match(node)
                if len(about) != 2 or {t.predicate for t in about} != {RDF_FIRST, RDF_REST}:
                    ok = False
                    break
                if node != head and self.refs.get(node) != 1:
                    ok = False
                    break
                nodes.append(node)
                members.append(g.value(node, RDF_FIRST))
                node = g.value(node, RDF_REST)
            if ok and nodes:
                self.lists[head] = members
                self.list_nodes.update(nodes)

    def _inline_candidates(self) -> set:
        g = self.graph
        parent = {}
        for t in g.triples:
            if isinstance(t.object, BlankNode) and self.refs.get(t.object) == 1:
                parent[t.object] = t.subject
        candidates = {b for b in parent if b not in self.list_nodes or b in self.lists}
        for node in self.list_nodes:
            if node not in self.lists:
                parent.pop(node, None)
        # List interior nodes hang off their head.
        for head in self.lists:
            for node in self._list_chain(head):
                if node is not head:
                    parent[node] = head
        changed = True
        while changed:
            changed = False
            for b in sorted(candidates, key=BlankNode.n3):
                seen = set()
                cur = b
                while (cur in candidates or cur in self.list_nodes) and cur in parent:
                    if cur in seen:
                        candidates.discard(b)
                        if b in self.lists:
                            for node in self._list_chain(b):
                                self.list_nodes.discard(node)
                            del self.lists[b]
                        changed = True
                        break
                    seen.add(cur)
                    cur = parent[cur]
                if changed:
                    break
        return candidates

    def _list_chain(self, head):
        node = head
        while node != RDF_NIL:
            yield node
            node = self.graph.value(node, RDF_REST)

    # -- rendering -----------------------------------------------------
    def predicate(self, iri: Iri) -> str:
        if iri == RDF_TYPE:
            return "a"
        return _qname_or_full(self, iri)

    def literal(self, lit: Literal) -> str:
        dt = lit.datatype.value
        if lit.language is None:
            pattern = _SHORTHAND.get(dt)
            if pattern is not None and pattern.match(lit.lexical):
                return lit.lexical
            if dt == XSD_BOOLEAN.value and lit.lexical in ("true", "false"):
                return lit.lexical
            if dt != XSD_STRING:
                body = Literal(lit.lexical).n3()
                return body + "^^" + _qname_or_full(self, lit.datatype)
        return lit.n3()

    def term(self, term, indent: int) -> str:
        if isinstance(term, Iri):
            return _qname_or_full(self, term)
        if isinstance(term, Literal):
            return self.literal(term)
        if term in self.lists and term in self.inline:
            self.done.update(self._list_chain(term))
            return "(" + " ".join(self.term(m, indent) for m in self.lists[term]) + ")"
        if term in self.inline:
            self.done.add(term)
            body = self.po_list(term, indent + 1)
            if not body:
                return "[]"
            pad = "    " * indent
            return "[\n" + body + "\n" + pad + "]"
        return term.n3()

    def po_list(self, subject, indent: int) -> str:
        triples = self.graph.match(subject)
        groups: dict = {}
        for t in triples:
            groups.setdefault(t.predicate, []).append(t.object)
        order = sorted(groups, key=lambda p: (p != RDF_TYPE, p.n3()))
        pad = "    " * indent
        lines = []
        for p in order:
            objs = ", ".join(self.term(o, indent) for o in sorted(groups[p], key=_object_key))
            lines.append(f"{pad}{self.predicate(p)} {objs}")
        return " ;\n".join(lines)

    def write(self) -> str:
        out = []
        for label, ns in sorted(self.prefixes, key=lambda item: item[0]):
            out.append(f"@prefix {label}: {Iri(ns).n3() if ns else '<>'} .")
        if out:
            out.append("")
        subjects = sorted({t.subject for t in self.graph.triples}, key=_subject_key)
        pending = [s for s in subjects if s not in self.inline]
        for s in pending:
            if s in self.done:
                continue
            self.done.add(s)
            body = self.po_list(s, 1)
            out.append(self.term_subject(s) + "\n" + body + " .\n")
        # Anything unreachable from a top-level subject (shouldn't happen once
        # cycles are demoted) is written with explicit labels.
        leftovers = [s for s in subjects if s not in self.done]
        for s in leftovers:
            if s in self.done:
                continue
            self.inline.discard(s)
            self.done.add(s)
            out.append(s.n3() + "\n" + self.po_list(s, 1) + " .\n")
        return "\n".join(out).rstrip() + "\n"

    def term_subject(self, s) -> str:
        if isinstance(s, Iri):
            return _qname_or_full(self, s)
        return s.n3()


def _qname_or_full(writer: _Writer, iri: Iri) -> str:
    value = iri.value
    for label, ns in writer.prefixes:
        if value.startswith(ns):
            local = value[len(ns):]
            if local == "" or _LOCAL_SAFE.match(local):
                return f"{label}:{local}"
    return iri.n3()


def _subject_key(term):
    return (isinstance(term, BlankNode), term.n3())


def _object_key(term):
    return (type(term).__name__, term.n3())


def serialize_turtle(graph: Graph, prefixes: Optional[Mapping[str, str]] = None) -> str:
    """Render ``graph`` as Turtle.

    All prefixes of the graph (plus ``prefixes``) are declared.  Blank nodes
    referenced once are written inline as ``[...]`` or ``(...)``; the rest get
    generated labels.
    """
    merged = dict(graph.prefixes)
    if prefixes:
        merged.update(prefixes)
    return _Writer(graph, merged).write()
