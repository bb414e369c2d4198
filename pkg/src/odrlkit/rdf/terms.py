"""RDF terms and triples.

Terms are immutable value objects; equality is term equality (no value
canonicalisation of literals).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

XSD_STRING = "http://www.w3.org/2001/XMLSchema#string"
RDF_LANGSTRING = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"

_WS = frozenset(" \t\r\n\f\v")


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self) -> None:
        if not self.value or any(c in _WS for c in self.value):
            raise ValueError(f"invalid IRI {self.value!r}")

    def n3(self) -> str:
        return "<" + _escape_iri(self.value) + ">"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def n3(self) -> str:
        return "_:" + self.label

    def __str__(self) -> str:
        return "_:" + self.label


@dataclass(frozen=True, slots=True, init=False)
class Literal:
    lexical: str
    datatype: Iri
    language: Optional[str]

    def __init__(self, lexical: str, datatype: Optional[Iri] = None, language: Optional[str] = None) -> None:
        if language:
            language = language.lower()
            if datatype is not None and datatype.value != RDF_LANGSTRING:
                raise ValueError("a language-tagged literal must have datatype rdf:langString")
            datatype = Iri(RDF_LANGSTRING)
        else:
            language = None
            if datatype is None:
                datatype = Iri(XSD_STRING)
            elif datatype.value == RDF_LANGSTRING:
                raise ValueError("rdf:langString requires a language tag")
        object.__setattr__(self, "lexical", lexical)
        object.__setattr__(self, "datatype", datatype)
        object.__setattr__(self, "language", language)

    def n3(self) -> str:
        body = '"' + escape_string(self.lexical) + '"'
        if self.language:
            return body + "@" + self.language
        if self.datatype.value == XSD_STRING:
            return body
        return body + "^^" + self.datatype.n3()

    def __str__(self) -> str:
        return self.lexical


Term = Union[Iri, BlankNode, Literal]
Subject = Union[Iri, BlankNode]


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Subject
    predicate: Iri
    object: Term

    def __post_init__(self) -> None:
        if not isinstance(self.subject, (Iri, BlankNode)):
            raise TypeError("triple subject must be an IRI or blank node")
        if not isinstance(self.predicate, Iri):
            raise TypeError("triple predicate must be an IRI")
        if not isinstance(self.object, (Iri, BlankNode, Literal)):
            raise TypeError("triple object must be an RDF term")

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))

    def sort_key(self) -> tuple[str, str, str]:
        return (self.subject.n3(), self.predicate.n3(), self.object.n3())


def term_key(term: Term) -> str:
    return term.n3()


_STRING_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def escape_string(value: str) -> str:
    out = []
    for ch in value:
        esc = _STRING_ESCAPES.get(ch)
        if esc is not None:
            out.append(esc)
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


_IRI_FORBIDDEN = frozenset('<>"{}|^`\\')


def _escape_iri(value: str) -> str:
    out = []
    for ch in value:
        if ch in _IRI_FORBIDDEN or ord(ch) <= 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)
