"""A small SHACL engine for the ODRL quality shapes.

Supports node shapes with ``sh:targetClass`` and predicate-path property
shapes using minCount, maxCount, datatype, class, nodeKind, in, hasValue,
pattern and or. Node shapes flagged ``osh:closedVocabulary`` additionally get
an ODRL vocabulary pass: terms in the ODRL namespace must be defined by the
ontology unless the data declares an ``odrl:profile``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterable, Optional, Union

from .namespaces import ODRL, OSH, RDF, RDFS, SH, XSD, curie
from .rdf import BlankNode, Graph, Iri, Literal, Triple, collection_items, parse_turtle
from .rdf.terms import term_key


class UnsupportedFeature(ValueError):
    def __init__(self, term: str) -> None:
        super().__init__(term)
        self.term = term

    def __str__(self) -> str:
        return f"unsupported SHACL feature: {self.term}"


class MalformedShape(ValueError):
    pass


# Constraint components ------------------------------------------------------


@dataclass(frozen=True)
class MinCount:
    n: int
    name = "MinCount"


@dataclass(frozen=True)
class MaxCount:
    n: int
    name = "MaxCount"


@dataclass(frozen=True)
class Datatype:
    datatype: Iri
    name = "Datatype"


@dataclass(frozen=True)
class ClassConstraint:
    cls: Iri
    name = "Class"


@dataclass(frozen=True)
class NodeKind:
    kind: Iri
    name = "NodeKind"


@dataclass(frozen=True)
class InList:
    values: tuple
    name = "In"

    def __post_init__(self) -> None:
        if not self.values:
            raise MalformedShape("sh:in list must be non-empty")


@dataclass(frozen=True)
class HasValue:
    value: object
    name = "HasValue"


@dataclass(frozen=True)
class Pattern:
    regex: str
    flags: str = ""
    name = "Pattern"


@dataclass(frozen=True)
class Or:
    branches: tuple  # tuple of tuples of value-node components
    name = "Or"


ConstraintComponent = Union[MinCount, MaxCount, Datatype, ClassConstraint, NodeKind, InList, HasValue, Pattern, Or]
VOCABULARY = "OdrlVocabulary"


@dataclass(frozen=True)
class PropertyShape:
    shape_iri: object
    path: Iri
    constraints: tuple
    message: str = ""

    @property
    def criterion(self) -> Optional[str]:
        return criterion_of(self.message)


@dataclass(frozen=True)
class NodeShape:
    shape_iri: object
    target_class: Iri
    property_shapes: tuple
    mandatory: Union[bool, str] = False
    applies_to: Optional[frozenset] = None
    closed_vocabulary: bool = False
    label: str = ""

    def applies(self, policy_type: str) -> bool:
        return self.applies_to is None or policy_type in self.applies_to


@dataclass(frozen=True)
class ValidationResult:
    focus: object
    path: Optional[Iri]
    source_shape: object
    component: str
    message: str
    value: object = None

    @property
    def criterion(self) -> Optional[str]:
        return criterion_of(self.message)

    def key(self) -> tuple:
        return (self.focus, self.path, self.component)


@dataclass(frozen=True)
class ValidationReport:
    results: tuple = ()

    @property
    def conforms(self) -> bool:
        return not self.results

    def to_text(self) -> str:
        return report_text(self)

    def to_graph(self) -> Graph:
        return report_graph(self)


_CRITERION = re.compile(r"^(C[1-9])\b")


def criterion_of(message: str) -> Optional[str]:
    m = _CRITERION.match(message or "")
    return m.group(1) if m else None


# Shape parsing ---------------------------------------------------------------

_SUPPORTED = {
    SH.targetClass, SH.property, SH.path, SH.minCount, SH.maxCount, SH.datatype, SH["class"],
    SH.nodeKind, SH["in"], SH.hasValue, SH.pattern, SH.flags, SH["or"], SH.message, SH.name,
    SH.description, SH.severity, SH.order,
}
_NODE_KINDS = {
    SH.IRI, SH.BlankNode, SH.Literal, SH.BlankNodeOrIRI, SH.BlankNodeOrLiteral, SH.IRIOrLiteral,
}


def _one(graph: Graph, node, predicate, what: str):
    values = graph.objects(node, predicate)
    if len(values) > 1:
        raise MalformedShape(f"{what}: more than one {curie(predicate)}")
    return values[0] if values else None


def _count(graph: Graph, node, predicate) -> Optional[int]:
    value = _one(graph, node, predicate, str(node))
    if value is None:
        return None
    try:
        n = int(value.lexical) if isinstance(value, Literal) else None
    except ValueError:
        n = None
    if n is None or n < 0:
        raise MalformedShape(f"{node}: {curie(predicate)} must be a non-negative integer")
    return n


def _list(graph: Graph, head, what: str) -> list:
    items = collection_items(graph, head)
    if items is None:
        raise MalformedShape(f"{what}: expected an RDF list")
    return items


def _value_components(graph: Graph, node, what: str) -> list:
    out = []
    dt = _one(graph, node, SH.datatype, what)
    if dt is not None:
        out.append(Datatype(dt))
    for cls in graph.objects(node, SH["class"]):
        out.append(ClassConstraint(cls))
    kind = _one(graph, node, SH.nodeKind, what)
    if kind is not None:
        if kind not in _NODE_KINDS:
            raise MalformedShape(f"{what}: unknown sh:nodeKind {kind}")
        out.append(NodeKind(kind))
    head = _one(graph, node, SH["in"], what)
    if head is not None:
        out.append(InList(tuple(_list(graph, head, what))))
    for v in graph.objects(node, SH.hasValue):
        out.append(HasValue(v))
    pattern = _one(graph, node, SH.pattern, what)
    if pattern is not None:
        flags = _one(graph, node, SH.flags, what)
        out.append(Pattern(pattern.lexical, flags.lexical if flags is not None else ""))
    return out


def _property_shape(graph: Graph, node) -> PropertyShape:
    what = str(node)
    path = _one(graph, node, SH.path, what)
    if path is None:
        raise MalformedShape(f"{what}: property shape without sh:path")
    if not isinstance(path, Iri):
        raise UnsupportedFeature("non-predicate sh:path")
    constraints = []
    n = _count(graph, node, SH.minCount)
    if n is not None:
        constraints.append(MinCount(n))
    n = _count(graph, node, SH.maxCount)
    if n is not None:
        constraints.append(MaxCount(n))
    constraints += _value_components(graph, node, what)
    for head in graph.objects(node, SH["or"]):
        branches = []
        for member in _list(graph, head, what):
            if graph.objects(member, SH.path):
                raise UnsupportedFeature("sh:or branch with sh:path")
            comps = _value_components(graph, member, what)
            if not comps:
                raise MalformedShape(f"{what}: empty sh:or branch")
            branches.append(tuple(comps))
        constraints.append(Or(tuple(branches)))
    if not constraints:
        raise MalformedShape(f"{what}: property shape without constraints")
    message = _one(graph, node, SH.message, what)
    return PropertyShape(node, path, tuple(constraints), message.lexical if isinstance(message, Literal) else "")


def parse_shapes(shapes_graph: Graph) -> list:
    """Node shapes with a class target, in IRI order."""
    # Report the outermost unsupported term (named subjects first) so the error is stable.
    unsupported = sorted(
        (isinstance(t.subject, BlankNode), curie(t.predicate))
        for t in shapes_graph.triples
        if t.predicate in SH and t.predicate not in _SUPPORTED
    )
    if unsupported:
        raise UnsupportedFeature(unsupported[0][1])
    shapes = []
    for node in shapes_graph.subjects(RDF.type, SH.NodeShape):
        target = _one(shapes_graph, node, SH.targetClass, str(node))
        if target is None:
            continue
        props = tuple(
            _property_shape(shapes_graph, p)
            for p in sorted(shapes_graph.objects(node, SH.property), key=term_key)
        )
        mandatory_value = shapes_graph.value(node, OSH.mandatory)
        if mandatory_value == OSH.whenConstraintsRequired:
            mandatory: Union[bool, str] = "constraints"
        else:
            mandatory = isinstance(mandatory_value, Literal) and mandatory_value.lexical == "true"
        applies = shapes_graph.objects(node, OSH.appliesTo)
        closed = shapes_graph.value(node, OSH.closedVocabulary)
        label = shapes_graph.value(node, RDFS.label)
        shapes.append(
            NodeShape(
                shape_iri=node,
                target_class=target,
                property_shapes=props,
                mandatory=mandatory,
                applies_to=frozenset(v.lexical for v in applies) if applies else None,
                closed_vocabulary=isinstance(closed, Literal) and closed.lexical == "true",
                label=label.lexical if isinstance(label, Literal) else "",
            )
        )
    shapes.sort(key=lambda s: term_key(s.shape_iri))
    return shapes


def load_shapes_graph(directory=None) -> Graph:
    """Union of every ``*.ttl`` file in ``directory`` (default: the shipped shapes)."""
    from .resources import SHAPES_DIR

    directory = Path(directory) if directory is not None else SHAPES_DIR
    files = sorted(directory.glob("*.ttl"))
    if not files:
        raise FileNotFoundError(f"no shape files in {directory}")
    triples = set()
    prefixes = {}
    for f in files:
        g = parse_turtle(f.read_text(encoding="utf-8"))
        triples |= g.triples
        prefixes.update(g.prefixes)
    return Graph(triples, prefixes)


def load_shapes(directory=None) -> list:
    return parse_shapes(load_shapes_graph(directory))


# Validation -----------------------------------------------------------------


class _Closure:
    """rdfs:subClassOf closure over an ontology graph."""

    def __init__(self, ontology: Graph) -> None:
        self.parents: dict = {}
        for t in ontology.match(None, RDFS.subClassOf, None):
            self.parents.setdefault(t.subject, set()).add(t.object)
        self._cache: dict = {}

    def supers(self, cls) -> frozenset:
        if cls not in self._cache:
            seen = {cls}
            stack = [cls]
            while stack:
                for p in self.parents.get(stack.pop(), ()):
                    if p not in seen:
                        seen.add(p)
                        stack.append(p)
            self._cache[cls] = frozenset(seen)
        return self._cache[cls]

    def is_subclass(self, cls, target) -> bool:
        return target in self.supers(cls)


def focus_nodes(data: Graph, shape: NodeShape, ontology: Graph, closure: Optional[_Closure] = None) -> list:
    """Nodes typed with the shape's target class or one of its subclasses."""
    closure = closure or _Closure(ontology)
    nodes = set()
    for t in data.match(None, RDF.type, None):
        if closure.is_subclass(t.object, shape.target_class):
            nodes.add(t.subject)
    return sorted(nodes, key=term_key)


_DATE = re.compile(r"^-?\d{4,}-\d{2}-\d{2}(Z|[+-]\d{2}:\d{2})?$")
_DATETIME = re.compile(r"^-?\d{4,}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?(Z|[+-]\d{2}:\d{2})?$")


def _valid_ymd(text: str) -> bool:
    sign = -1 if text.startswith("-") else 1
    y, m, d = text.lstrip("-").split("T")[0].split("-")[:3]
    year, month, day = sign * int(y), int(m), int(d[:2])
    if not 1 <= month <= 12:
        return False
    leap = year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)
    days = [31, 29 if leap else 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31][month - 1]
    return 1 <= day <= days


def _lexically_valid(lit: Literal) -> bool:
    dt = lit.datatype
    text = lit.lexical
    try:
        if dt == XSD.date:
            return bool(_DATE.match(text)) and _valid_ymd(text)
        if dt == XSD.dateTime:
            return bool(_DATETIME.match(text)) and _valid_ymd(text)
        if dt in (XSD.integer, XSD.int, XSD.long, XSD.nonNegativeInteger, XSD.positiveInteger):
            value = int(text.strip())
            if dt == XSD.nonNegativeInteger and value < 0:
                return False
            if dt == XSD.positiveInteger and value <= 0:
                return False
            return True
        if dt == XSD.decimal:
            Decimal(text.strip())
            return "e" not in text.lower() and text.strip().lower() not in ("nan", "inf", "-inf", "infinity")
        if dt in (XSD.double, XSD.float):
            float(text.strip())
            return True
        if dt == XSD.boolean:
            return text in ("true", "false", "1", "0")
    except (ValueError, InvalidOperation):
        return False
    return True


def _types(node, data: Graph, ontology: Graph) -> set:
    return set(data.objects(node, RDF.type)) | set(ontology.objects(node, RDF.type))


def _value_ok(comp, value, data: Graph, ontology: Graph, closure: _Closure) -> bool:
    if isinstance(comp, Datatype):
        return isinstance(value, Literal) and value.datatype == comp.datatype and _lexically_valid(value)
    if isinstance(comp, ClassConstraint):
        if isinstance(value, Literal):
            return False
        return any(closure.is_subclass(t, comp.cls) for t in _types(value, data, ontology))
    if isinstance(comp, NodeKind):
        k = comp.kind
        if isinstance(value, Iri):
            return k in (SH.IRI, SH.BlankNodeOrIRI, SH.IRIOrLiteral)
        if isinstance(value, BlankNode):
            return k in (SH.BlankNode, SH.BlankNodeOrIRI, SH.BlankNodeOrLiteral)
        return k in (SH.Literal, SH.BlankNodeOrLiteral, SH.IRIOrLiteral)
    if isinstance(comp, InList):
        return value in comp.values
    if isinstance(comp, Pattern):
        if isinstance(value, BlankNode):
            return False
        text = value.lexical if isinstance(value, Literal) else value.value
        flags = 0
        for ch in comp.flags:
            flags |= {"i": re.I, "m": re.M, "s": re.S, "x": re.X}.get(ch, 0)
        return re.search(comp.regex, text, flags) is not None
    if isinstance(comp, Or):
        return any(all(_value_ok(c, value, data, ontology, closure) for c in branch) for branch in comp.branches)
    raise TypeError(f"not a value-node component: {comp!r}")


def _check_property(focus, ps: PropertyShape, data: Graph, ontology: Graph, closure: _Closure) -> list:
    values = data.objects(focus, ps.path)
    out = []
    for comp in ps.constraints:
        if isinstance(comp, MinCount):
            if len(values) < comp.n:
                out.append(ValidationResult(focus, ps.path, ps.shape_iri, comp.name, ps.message))
        elif isinstance(comp, MaxCount):
            if len(values) > comp.n:
                out.append(ValidationResult(focus, ps.path, ps.shape_iri, comp.name, ps.message))
        elif isinstance(comp, HasValue):
            if comp.value not in values:
                out.append(ValidationResult(focus, ps.path, ps.shape_iri, comp.name, ps.message))
        else:
            for v in values:
                if not _value_ok(comp, v, data, ontology, closure):
                    out.append(ValidationResult(focus, ps.path, ps.shape_iri, comp.name, ps.message, v))
    return out


_CONTROLLED = (ODRL.action, ODRL.leftOperand, ODRL.operator)


def _vocabulary_pass(focus, shape: NodeShape, data: Graph, defined: frozenset) -> list:
    out = []
    by_path = {ps.path: ps.shape_iri for ps in shape.property_shapes}
    for t in data.match(focus, None, None):
        p, o = t.predicate, t.object
        if p in ODRL and p not in defined:
            msg = f"C9: {curie(p)} is not defined in the ODRL vocabulary and no odrl:profile is declared."
            out.append(ValidationResult(focus, p, shape.shape_iri, VOCABULARY, msg, o))
        elif p in _CONTROLLED and not (isinstance(o, Iri) and o in defined):
            shown = curie(o) if isinstance(o, Iri) else o.n3()
            msg = f"C9: {shown} used as {curie(p)} is not defined in the ODRL vocabulary and no odrl:profile is declared."
            out.append(ValidationResult(focus, p, by_path.get(p, shape.shape_iri), VOCABULARY, msg, o))
        elif p == RDF.type and o in ODRL and o not in defined:
            msg = f"C9: class {curie(o)} is not defined in the ODRL vocabulary and no odrl:profile is declared."
            out.append(ValidationResult(focus, p, shape.shape_iri, VOCABULARY, msg, o))
    return out


def defined_terms(ontology: Graph) -> frozenset:
    return frozenset(t.subject for t in ontology.triples if isinstance(t.subject, Iri))


def _result_key(r: ValidationResult) -> tuple:
    return (
        term_key(r.focus),
        r.path.value if r.path is not None else "",
        r.component,
        term_key(r.source_shape),
        term_key(r.value) if r.value is not None else ("",),
    )


def validate(data: Graph, shapes: Iterable[NodeShape], ontology: Graph) -> ValidationReport:
    closure = _Closure(ontology)
    defined = defined_terms(ontology)
    profiled = bool(data.match(None, ODRL.profile, None))
    results = []
    for shape in shapes:
        for focus in focus_nodes(data, shape, ontology, closure):
            for ps in shape.property_shapes:
                results.extend(_check_property(focus, ps, data, ontology, closure))
            if shape.closed_vocabulary and not profiled:
                results.extend(_vocabulary_pass(focus, shape, data, defined))
    results.sort(key=_result_key)
    return ValidationReport(tuple(results))


# Export ---------------------------------------------------------------------


def _show(term) -> str:
    if term is None:
        return "-"
    if isinstance(term, Iri):
        return curie(term, {**_EXPORT_PREFIXES})
    return term.n3()


_EXPORT_PREFIXES = {"odrl": str(ODRL), "osh": str(OSH), "rdf": str(RDF), "dc": "http://purl.org/dc/elements/1.1/"}


def report_text(report: ValidationReport) -> str:
    """One block per result: focus, path, component, sourceShape, message."""
    lines = [f"conforms: {'true' if report.conforms else 'false'}", f"results: {len(report.results)}"]
    for r in report.results:
        lines += [
            "",
            f"focus: {_show(r.focus)}",
            f"path: {_show(r.path)}",
            f"component: {r.component}",
            f"sourceShape: {_show(r.source_shape)}",
            f"message: {r.message}",
        ]
        if r.value is not None:
            lines.append(f"value: {_show(r.value)}")
    return "\n".join(lines) + "\n"


def component_iri(name: str) -> Iri:
    if name == VOCABULARY:
        return OSH[name + "ConstraintComponent"]
    return SH[name + "ConstraintComponent"]


def report_graph(report: ValidationReport) -> Graph:
    """The report as an ``sh:ValidationReport`` graph."""
    root = BlankNode("report")
    triples = [
        Triple(root, RDF.type, SH.ValidationReport),
        Triple(root, SH.conforms, Literal("true" if report.conforms else "false", XSD.boolean)),
    ]
    for i, r in enumerate(report.results):
        node = BlankNode(f"r{i}")
        triples += [
            Triple(root, SH.result, node),
            Triple(node, RDF.type, SH.ValidationResult),
            Triple(node, SH.focusNode, r.focus),
            Triple(node, SH.sourceShape, r.source_shape),
            Triple(node, SH.sourceConstraintComponent, component_iri(r.component)),
            Triple(node, SH.resultSeverity, SH.Violation),
            Triple(node, SH.resultMessage, Literal(r.message)),
        ]
        if r.path is not None:
            triples.append(Triple(node, SH.resultPath, r.path))
        if r.value is not None:
            triples.append(Triple(node, SH.value, r.value))
    return Graph(triples, {"sh": str(SH), "xsd": str(XSD), "rdf": str(RDF), **_EXPORT_PREFIXES})
