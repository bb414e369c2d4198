"""Immutable RDF graph with a prefix map and pattern matching."""

from __future__ import annotations

from collections import defaultdict
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional

from .terms import BlankNode, Iri, Literal, Term, Triple


class Graph:
    """A set of triples plus the prefix declarations it was written with.

    Instances never change after construction; the ``with_*``/``without``
    helpers return new graphs.
    """

    __slots__ = ("_triples", "_prefixes", "_by_s", "_by_p", "_by_o", "_sorted")

    def __init__(self, triples: Iterable[Triple] = (), prefixes: Optional[Mapping[str, str]] = None) -> None:
        self._triples = frozenset(triples)
        self._prefixes = MappingProxyType(dict(prefixes or {}))
        self._by_s = None
        self._by_p = None
        self._by_o = None
        self._sorted = None

    @property
    def triples(self) -> frozenset:
        return self._triples

    @property
    def prefixes(self) -> Mapping[str, str]:
        return self._prefixes

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.sorted_triples())

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def __repr__(self) -> str:
        return f"<Graph with {len(self._triples)} triples>"

    def sorted_triples(self) -> tuple:
        if self._sorted is None:
            self._sorted = tuple(sorted(self._triples, key=Triple.sort_key))
        return self._sorted

    def _index(self) -> None:
        by_s, by_p, by_o = defaultdict(list), defaultdict(list), defaultdict(list)
        for t in self.sorted_triples():
            by_s[t.subject].append(t)
            by_p[t.predicate].append(t)
            by_o[t.object].append(t)
        self._by_s, self._by_p, self._by_o = dict(by_s), dict(by_p), dict(by_o)

    def match(
        self,
        subject: Optional[Term] = None,
        predicate: Optional[Iri] = None,
        object: Optional[Term] = None,
    ) -> list:
        """Triples agreeing with every bound position, sorted by serialized terms."""
        if subject is None and predicate is None and object is None:
            return list(self.sorted_triples())
        if self._by_s is None:
            self._index()
        candidates = None
        for index, key in ((self._by_s, subject), (self._by_p, predicate), (self._by_o, object)):
            if key is None:
                continue
            found = index.get(key, ())
            if candidates is None or len(found) < len(candidates):
                candidates = found
        return [
            t
            for t in candidates
            if (subject is None or t.subject == subject)
            and (predicate is None or t.predicate == predicate)
            and (object is None or t.object == object)
        ]

    def objects(self, subject: Term, predicate: Iri) -> list:
        return [t.object for t in self.match(subject, predicate)]

    def subjects(self, predicate: Optional[Iri] = None, object: Optional[Term] = None) -> list:
        seen = []
        for t in self.match(None, predicate, object):
            if t.subject not in seen:
                seen.append(t.subject)
        return seen

    def value(self, subject: Term, predicate: Iri) -> Optional[Term]:
        objs = self.objects(subject, predicate)
        return objs[0] if objs else None

    def blank_nodes(self) -> set:
        out = set()
        for t in self._triples:
            if isinstance(t.subject, BlankNode):
                out.add(t.subject)
            if isinstance(t.object, BlankNode):
                out.add(t.object)
        return out

    def with_triples(self, triples: Iterable[Triple]) -> "Graph":
        return Graph(self._triples | frozenset(triples), self._prefixes)

    def without(self, triples: Iterable[Triple]) -> "Graph":
        return Graph(self._triples - frozenset(triples), self._prefixes)

    def with_prefixes(self, prefixes: Mapping[str, str]) -> "Graph":
        merged = dict(self._prefixes)
        merged.update(prefixes)
        return Graph(self._triples, merged)


def match(
    graph: Graph,
    subject: Optional[Term] = None,
    predicate: Optional[Iri] = None,
    object: Optional[Term] = None,
) -> list:
    return graph.match(subject, predicate, object)


def collection_items(graph: Graph, head: Term) -> Optional[list]:
    """Members of a well-formed RDF list starting at ``head``; None if malformed."""
    from ..namespaces import RDF

    items = []
    seen = set()
    node = head
    nil = RDF.nil
    while node != nil:
        if node in seen or isinstance(node, Literal):
            return None
        seen.add(node)
        first = graph.objects(node, RDF.first)
        rest = graph.objects(node, RDF.rest)
        if len(first) != 1 or len(rest) != 1:
            return None
        items.append(first[0])
        node = rest[0]
    return items
