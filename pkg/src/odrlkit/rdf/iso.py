"""Blank-node isomorphism between graphs.

Colour refinement narrows the candidate images of each blank node, then a
backtracking search looks for a bijection that maps one triple set exactly
onto the other.
"""

from __future__ import annotations

import hashlib
from collections import defaultdict

from .graph import Graph
from .terms import BlankNode

_B = "\x00b"


def _split(graph: Graph):
    ground = set()
    blank = []
    for t in graph.triples:
        if isinstance(t.subject, BlankNode) or isinstance(t.object, BlankNode):
            blank.append(t)
        else:
            ground.add(t)
    return ground, blank


def _h(*parts: str) -> str:
    return hashlib.blake2b("\x1f".join(parts).encode("utf-8", "surrogatepass"), digest_size=12).hexdigest()


def _colours(triples, rounds: int | None = None) -> dict:
    nodes = set()
    for t in triples:
        if isinstance(t.subject, BlankNode):
            nodes.add(t.subject)
        if isinstance(t.object, BlankNode):
            nodes.add(t.object)
    colour = {b: "0" for b in nodes}

    def label(term):
        return colour[term] if isinstance(term, BlankNode) else term.n3()

    limit = rounds if rounds is not None else len(nodes) + 1
    for _ in range(limit):
        sig = defaultdict(list)
        for t in triples:
            p = t.predicate.n3()
            if isinstance(t.subject, BlankNode):
                sig[t.subject].append("s" + p + "\x1e" + label(t.object))
            if isinstance(t.object, BlankNode):
                sig[t.object].append("o" + p + "\x1e" + label(t.subject))
        new = {b: _h(colour[b], *sorted(sig[b])) for b in nodes}
        if len(set(new.values())) == len(set(colour.values())):
            colour = new
            break
        colour = new
    return colour


def isomorphic(a: Graph, b: Graph) -> bool:
    """True iff some bijection between blank nodes maps ``a`` onto ``b``."""
    if len(a) != len(b):
        return False
    ground_a, blank_a = _split(a)
    ground_b, blank_b = _split(b)
    if ground_a != ground_b or len(blank_a) != len(blank_b):
        return False
    if not blank_a:
        return True

    col_a = _colours(blank_a)
    col_b = _colours(blank_b)
    if sorted(col_a.values()) != sorted(col_b.values()):
        return False

    by_colour_b = defaultdict(list)
    for node, c in col_b.items():
        by_colour_b[c].append(node)
    target = frozenset(blank_b)

    # Triples of a indexed by the blank nodes they mention, so each partial
    # assignment can be checked as soon as all its blank nodes are bound.
    mentions = defaultdict(list)
    for t in blank_a:
        for term in (t.subject, t.object):
            if isinstance(term, BlankNode):
                mentions[term].append(t)

    order = sorted(col_a, key=lambda n: (len(by_colour_b[col_a[n]]), col_a[n], n.label))
    mapping: dict = {}
    used: set = set()

    def image(term):
        return mapping.get(term, term) if isinstance(term, BlankNode) else term

    def consistent(node) -> bool:
        for t in mentions[node]:
            s, o = t.subject, t.object
            if (isinstance(s, BlankNode) and s not in mapping) or (isinstance(o, BlankNode) and o not in mapping):
                continue
            if type(t)(image(s), t.predicate, image(o)) not in target:
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        node = order[i]
        for cand in by_colour_b[col_a[node]]:
            if cand in used:
                continue
            mapping[node] = cand
            used.add(cand)
            if consistent(node) and search(i + 1):
                return True
            del mapping[node]
            used.discard(cand)
        return False

    return search(0)
