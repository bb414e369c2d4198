from __future__ import annotations

import os
import subprocess
import sys

import pytest
import rdflib
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import brute_isomorphic, rdflib_parse, to_rdflib
from rdflib.compare import isomorphic as rdflib_isomorphic
from strategies import EX, small_graphs

from odrlkit.namespaces import OWL, RDF, XSD
from odrlkit.rdf import (
    BlankNode,
    Graph,
    Iri,
    Literal,
    Triple,
    TurtleSyntaxError,
    UndefinedPrefix,
    isomorphic,
    lexer,
    parse_turtle,
    serialize_turtle,
)
from odrlkit.resources import GOLD_DIR, ontology_text

# Frozen from rdflib 7 on the bundled ontology file.
ONTOLOGY_TRIPLES = 1508


def ex(local):
    return Iri(EX + local)


def test_minimal_document():
    g = parse_turtle("@prefix ex: <http://e/> . ex:a ex:p ex:b .")
    assert g.sorted_triples() == (Triple(Iri("http://e/a"), Iri("http://e/p"), Iri("http://e/b")),)


def test_typed_literal():
    g = parse_turtle(
        '@prefix ex: <http://e/> . @prefix xsd: <http://www.w3.org/2001/XMLSchema#> . ex:x ex:p "5"^^xsd:integer .'
    )
    (t,) = g.triples
    assert t.object == Literal("5", XSD.integer)
    assert t.object.lexical == "5"


def test_ontology_triple_count_matches_reference():
    text = ontology_text()
    ours = parse_turtle(text)
    assert len(ours) == ONTOLOGY_TRIPLES
    assert len(rdflib.Graph().parse(data=text, format="turtle")) == ONTOLOGY_TRIPLES


def test_ontology_parse_isomorphic_to_reference():
    text = ontology_text()
    assert rdflib_isomorphic(to_rdflib(parse_turtle(text)), rdflib.Graph().parse(data=text, format="turtle"))


def test_ontology_class_declarations_match_reference():
    text = ontology_text()
    ours = parse_turtle(text).match(None, RDF.type, OWL.Class)
    ref = rdflib.Graph().parse(data=text, format="turtle")
    expected = set(ref.subjects(rdflib.RDF.type, rdflib.OWL.Class))
    assert len(ours) == len(expected) > 20
    named = {t.subject.value for t in ours if isinstance(t.subject, Iri)}
    assert named == {str(s) for s in expected if isinstance(s, rdflib.URIRef)}


FEATURES = r"""
@base <http://base.test/dir/> .
PREFIX ex: <http://example.org/>
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .

<rel> a ex:Thing ;
    ex:name "caf\u00e9", 'single', """ + '"""multi\nline "quoted" text"""' + r""" ;
    ex:lang "hallo"@de, "colour"@en-GB ;
    ex:num 42, -7, 3.14, 1.0e3, true, false ;
    ex:typed "2025-05-10"^^xsd:date, "x"^^<http://example.org/dt> ;
    ex:list ( ex:a "b" 3 ( ) ) ;
    ex:nested [ ex:p [ ex:q ex:r ] ; ex:s _:shared ] .
_:shared ex:back <../up#frag> .
[] ex:anon ex:x .
ex:esc ex:s "tab\there\\ \"q\" \U0001F600" ; ex:local ex:with\.dot .
"""


def test_turtle_features_match_reference():
    ours = parse_turtle(FEATURES)
    ref = rdflib_parse(FEATURES)
    assert len(ours) == len(ref)
    assert isomorphic(ours, ref)


def test_numeric_lexical_forms_are_kept():
    g = parse_turtle("<http://e/a> <http://e/p> .5, 1.0e3, +01 .")
    assert {t.object for t in g} == {
        Literal(".5", XSD.decimal),
        Literal("1.0e3", XSD.double),
        Literal("+01", XSD.integer),
    }


def test_relative_iri_resolution():
    g = parse_turtle(FEATURES)
    subjects = {t.subject for t in g}
    assert Iri("http://base.test/dir/rel") in subjects
    assert g.match(None, ex("back"), Iri("http://base.test/up#frag"))


def test_parser_is_deterministic():
    assert parse_turtle(FEATURES).triples == parse_turtle(FEATURES).triples


def test_undefined_prefix_reports_position():
    with pytest.raises(UndefinedPrefix) as info:
        parse_turtle("@prefix ex: <http://e/> .\nex:a nope:p ex:b .")
    err = info.value
    assert err.prefix == "nope"
    assert (err.line, err.column) == (2, 6)


@pytest.mark.parametrize(
    "text, line",
    [
        ("@prefix ex: <http://e/> .\nex:a ex:p .", 2),
        ("<http://e/a> <http://e/p> <http://e/b>", 1),
        ('<http://e/a> <http://e/p> "open .', 1),
        ("<http://e/a> <http://e/p> ( <http://e/b> .", 1),
        ("\n\n<http://e/a> <http://e/p> ] .", 3),
    ],
)
def test_syntax_errors_have_line_numbers(text, line):
    with pytest.raises(TurtleSyntaxError) as info:
        parse_turtle(text)
    assert info.value.line == line
    assert str(info.value).find(f"line {line}") > 0


def test_serialize_empty_graph():
    text = serialize_turtle(Graph())
    assert len(parse_turtle(text)) == 0
    assert all(line.startswith("@prefix") for line in text.splitlines() if line.strip())


def test_serialize_single_triple():
    g = Graph([Triple(ex("a"), ex("p"), Literal("v"))])
    assert parse_turtle(serialize_turtle(g)) == g


def test_serialize_anonymous_blank_node():
    b = BlankNode("n1")
    g = Graph([Triple(ex("a"), ex("p"), b), Triple(b, ex("q"), Literal("1", XSD.integer))])
    text = serialize_turtle(g)
    back = parse_turtle(text)
    assert "[" in text and "_:n1" not in text
    assert isomorphic(back, g)


def test_serialize_collection_inline():
    g = parse_turtle("@prefix ex: <http://e/> . ex:a ex:p ( ex:b ex:c ) .")
    text = serialize_turtle(g)
    assert "(ex:b ex:c)" in text
    assert isomorphic(parse_turtle(text), g)


def test_serialize_is_deterministic_and_reference_readable():
    g = parse_turtle(FEATURES)
    text = serialize_turtle(g)
    assert text == serialize_turtle(parse_turtle(FEATURES))
    assert isomorphic(rdflib_parse(text), g)


def test_gold_policies_round_trip():
    for path in sorted(GOLD_DIR.glob("*.ttl")):
        g = parse_turtle(path.read_text(encoding="utf-8"))
        assert parse_turtle(serialize_turtle(g)) == g, path.name


# Isomorphism ---------------------------------------------------------------


def test_isomorphic_empty():
    assert isomorphic(Graph(), Graph())


def test_isomorphic_relabelled():
    a = Graph([Triple(BlankNode("x"), ex("p"), BlankNode("y")), Triple(BlankNode("y"), ex("p"), ex("o"))])
    b = Graph([Triple(BlankNode("u"), ex("p"), BlankNode("v")), Triple(BlankNode("v"), ex("p"), ex("o"))])
    assert isomorphic(a, b)
    assert brute_isomorphic(a, b)


def test_isomorphic_datatype_difference():
    nodes = [BlankNode(f"b{i}") for i in range(5)]
    base = [Triple(nodes[i], ex("next"), nodes[i + 1]) for i in range(4)]
    a = Graph(base + [Triple(nodes[4], ex("v"), Literal("1", XSD.integer))])
    b = Graph(base + [Triple(nodes[4], ex("v"), Literal("1", XSD.decimal))])
    assert brute_isomorphic(a, b) is False
    assert isomorphic(a, b) is False


def test_isomorphic_needs_backtracking():
    # Two 2-cycles versus one 4-cycle: identical colours, different structure.
    b = [BlankNode(f"n{i}") for i in range(4)]
    p = ex("p")
    two = Graph([Triple(b[0], p, b[1]), Triple(b[1], p, b[0]), Triple(b[2], p, b[3]), Triple(b[3], p, b[2])])
    four = Graph([Triple(b[0], p, b[1]), Triple(b[1], p, b[2]), Triple(b[2], p, b[3]), Triple(b[3], p, b[0])])
    assert not brute_isomorphic(two, four)
    assert not isomorphic(two, four)


def _relabel(g: Graph, seed: int) -> Graph:
    nodes = sorted(g.blank_nodes(), key=lambda n: n.label)
    import random

    shuffled = nodes[:]
    random.Random(seed).shuffle(shuffled)
    m = {n: BlankNode("r" + s.label) for n, s in zip(nodes, shuffled)}

    def f(t):
        return m.get(t, t)

    return Graph(Triple(f(t.subject), t.predicate, f(t.object)) for t in g)


@settings(max_examples=200, deadline=None)
@given(small_graphs(max_triples=8), st.integers(0, 1000))
def test_isomorphic_agrees_with_brute_force(g, seed):
    h = _relabel(g, seed)
    assert isomorphic(g, h) and brute_isomorphic(g, h)
    if len(g):
        dropped = Graph(list(h.sorted_triples())[1:])
        assert isomorphic(g, dropped) == brute_isomorphic(g, dropped) == False  # noqa: E712


@settings(max_examples=200, deadline=None)
@given(small_graphs(max_triples=6), small_graphs(max_triples=6))
def test_isomorphic_pairs_agree_with_brute_force(a, b):
    assert isomorphic(a, b) == brute_isomorphic(a, b)


@settings(max_examples=200, deadline=None)
@given(small_graphs(), small_graphs())
def test_isomorphic_reflexive_symmetric(a, b):
    assert isomorphic(a, a)
    assert isomorphic(a, b) == isomorphic(b, a)


@settings(max_examples=200, deadline=None)
@given(small_graphs(), small_graphs())
def test_isomorphic_is_set_equality_without_blank_nodes(a, b):
    def ground(g):
        return Graph(t for t in g if not t.subject.n3().startswith("_:") and not t.object.n3().startswith("_:"))

    a, b = ground(a), ground(b)
    assert isomorphic(a, b) == (a.triples == b.triples)


# match -----------------------------------------------------------------------


def test_match_empty_graph():
    assert Graph().match() == []


def test_match_subject():
    g = Graph([Triple(ex("a"), ex("p"), ex("b")), Triple(ex("a"), ex("q"), ex("c")), Triple(ex("b"), ex("p"), ex("c"))])
    assert g.match(ex("a")) == [Triple(ex("a"), ex("p"), ex("b")), Triple(ex("a"), ex("q"), ex("c"))]
    assert g.match(None, ex("p"), ex("c")) == [Triple(ex("b"), ex("p"), ex("c"))]
    assert g.match(ex("c")) == []


@settings(max_examples=200, deadline=None)
@given(small_graphs())
def test_match_unbound_returns_everything(g):
    assert len(g.match()) == len(g)
    assert set(g.match()) == set(g.triples)


@settings(max_examples=200, deadline=None)
@given(small_graphs())
def test_match_agrees_with_filter(g):
    for t in g.sorted_triples()[:3]:
        for pattern in ((t.subject, None, None), (None, t.predicate, None), (None, None, t.object), tuple(t)):
            expected = sorted(
                (u for u in g if all(x is None or x == y for x, y in zip(pattern, u))), key=Triple.sort_key
            )
            assert g.match(*pattern) == expected


# Round trip ----------------------------------------------------------------


@settings(max_examples=300, deadline=None)
@given(small_graphs())
def test_round_trip_reference_parser(g):
    # rdflib must read our output and agree with it.
    text = serialize_turtle(g)
    assert rdflib_isomorphic(rdflib.Graph().parse(data=text, format="turtle"), to_rdflib(g))


# Scanner backends ------------------------------------------------------------

needs_compiled = pytest.mark.skipif(lexer.compiled_tokenize is None, reason="compiled scanner not built")


@needs_compiled
def test_scanner_backends_agree_on_shipped_turtle():
    texts = [ontology_text(), FEATURES] + [p.read_text(encoding="utf-8") for p in sorted(GOLD_DIR.glob("*.ttl"))]
    for text in texts:
        assert lexer.compiled_tokenize(text) == lexer.python_tokenize(text)


def _outcome(fn, text):
    try:
        return ("ok", fn(text))
    except TurtleSyntaxError as exc:
        return ("error", exc.line, exc.column)


@needs_compiled
@settings(max_examples=300, deadline=None)
@given(small_graphs())
def test_scanner_backends_agree_on_serialized_graphs(g):
    text = serialize_turtle(g)
    assert lexer.compiled_tokenize(text) == lexer.python_tokenize(text)


_FRAGMENTS = ["<http://e/a>", "ex:p", "_:b1", '"s"', "'''x'''", "@prefix", "@en", "^^", "1.5e3", "-2", ".",
              ";", ",", "[", "]", "(", ")", "a", "true", "PREFIX", "#c\n", "\n", " ", '"bad', "<unterminated", "{",
              "\\", "ex:with\\.dot", "\"\\u00e9\"", "@", "0.", "e5", "'"]


@needs_compiled
@settings(max_examples=500, deadline=None)
@given(st.lists(st.sampled_from(_FRAGMENTS), max_size=25).map(" ".join))
def test_scanner_backends_agree_on_noise(text):
    assert _outcome(lexer.compiled_tokenize, text) == _outcome(lexer.python_tokenize, text)


def test_pure_python_fallback_selected_by_environment():
    env = dict(os.environ, ODRLKIT_PURE_PYTHON="1")
    code = (
        "from odrlkit.rdf import SCANNER_BACKEND, parse_turtle;"
        "from odrlkit.resources import ontology_text;"
        "print(SCANNER_BACKEND, len(parse_turtle(ontology_text())))"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", str(ONTOLOGY_TRIPLES)]
