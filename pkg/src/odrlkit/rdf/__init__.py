"""RDF graph model with a Turtle reader/writer."""

from .errors import TurtleSyntaxError, UndefinedPrefix
from .graph import Graph, collection_items, match
from .iso import isomorphic
from .lexer import BACKEND as SCANNER_BACKEND
from .terms import BlankNode, Iri, Literal, Term, Triple
from .turtle import parse_turtle, parse_turtle_file, serialize_turtle

__all__ = [
    "BlankNode",
    "Graph",
    "Iri",
    "Literal",
    "SCANNER_BACKEND",
    "Term",
    "Triple",
    "TurtleSyntaxError",
    "UndefinedPrefix",
    "collection_items",
    "isomorphic",
    "match",
    "parse_turtle",
    "parse_turtle_file",
    "serialize_turtle",
]
