"""Namespace IRIs used across the toolkit."""

from __future__ import annotations

import re
from typing import Mapping

from .rdf.terms import Iri


class Namespace:
    """A namespace IRI; attribute or item access mints member IRIs."""

    __slots__ = ("base",)

    def __init__(self, base: str) -> None:
        self.base = base

    def term(self, local: str) -> Iri:
        return Iri(self.base + local)

    def __getattr__(self, local: str) -> Iri:
        if local.startswith("__"):
            raise AttributeError(local)
        return self.term(local)

    __getitem__ = term

    def __contains__(self, iri: object) -> bool:
        return isinstance(iri, Iri) and iri.value.startswith(self.base)

    def __str__(self) -> str:
        return self.base

    def __repr__(self) -> str:
        return f"Namespace({self.base!r})"


ODRL = Namespace("http://www.w3.org/ns/odrl/2/")
RDF = Namespace("http://www.w3.org/1999/02/22-rdf-syntax-ns#")
RDFS = Namespace("http://www.w3.org/2000/01/rdf-schema#")
OWL = Namespace("http://www.w3.org/2002/07/owl#")
SKOS = Namespace("http://www.w3.org/2004/02/skos/core#")
XSD = Namespace("http://www.w3.org/2001/XMLSchema#")
SH = Namespace("http://www.w3.org/ns/shacl#")
DC = Namespace("http://purl.org/dc/elements/1.1/")
DCTERMS = Namespace("http://purl.org/dc/terms/")
# Annotations on the shipped shapes that are not SHACL vocabulary.
OSH = Namespace("https://w3id.org/odrlkit/shapes#")

STANDARD_PREFIXES = {
    "odrl": str(ODRL),
    "rdf": str(RDF),
    "rdfs": str(RDFS),
    "owl": str(OWL),
    "skos": str(SKOS),
    "xsd": str(XSD),
    "sh": str(SH),
    "dc": str(DC),
    "dcterms": str(DCTERMS),
}

_LOCAL = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$|^$")


def curie(iri: Iri, prefixes: Mapping[str, str] = STANDARD_PREFIXES) -> str:
    """Compact ``prefix:local`` form when a prefix matches, else ``<iri>``."""
    best = None
    for label, base in prefixes.items():
        if iri.value.startswith(base) and (best is None or len(base) > len(best[1])):
            local = iri.value[len(base):]
            if _LOCAL.match(local):
                best = (label, base)
    if best is None:
        return iri.n3()
    return f"{best[0]}:{iri.value[len(best[1]):]}"
