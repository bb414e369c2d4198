"""LLM Guidance Templates: ontology distillation and prompt assembly.

A template is an ordered list of ``(heading, body)`` sections. The
ontology-only template carries the raw Turtle ontology; the OSES template
carries a verbalized ontology plus curated syntax, semantics, examples and
class guidelines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .namespaces import ODRL, OWL, RDF, RDFS, SKOS, curie
from .rdf import Graph, Iri, Literal, TurtleSyntaxError, collection_items, parse_turtle, serialize_turtle
from .tasks import METHODOLOGIES, POLICY_TYPES, TaskDescription


class EmptyOntology(ValueError):
    """The ontology graph declares no classes."""


class MissingSection(Exception):
    """A curated file required by an OSES template is absent."""

    def __init__(self, section: str) -> None:
        super().__init__(section)
        self.section = section

    def __str__(self) -> str:
        return f"missing curated section: {self.section}"


class InvalidExamples(ValueError):
    """The curated examples do not contain a policy of the template's type."""


@dataclass(frozen=True)
class ClassEntry:
    iri: Iri
    label: str
    definition: str
    notes: tuple = ()
    parents: tuple = ()


@dataclass(frozen=True)
class PropertyEntry:
    iri: Iri
    label: str
    definition: str
    domains: tuple = ()
    ranges: tuple = ()
    parents: tuple = ()


@dataclass(frozen=True)
class IndividualEntry:
    iri: Iri
    type: Iri
    label: str
    definition: str = ""


@dataclass(frozen=True)
class OntologySummary:
    classes: tuple
    properties: tuple
    individuals: tuple

    def iris(self) -> list:
        return [e.iri for e in (*self.classes, *self.properties, *self.individuals)]

    def find(self, iri: Iri):
        for e in (*self.classes, *self.properties, *self.individuals):
            if e.iri == iri:
                return e
        return None


_CLASS_TYPES = (OWL.Class, RDFS.Class)
_PROPERTY_TYPES = (RDF.Property, OWL.ObjectProperty, OWL.DatatypeProperty, OWL.AnnotationProperty)


def _text(graph: Graph, subject, predicate) -> str:
    values = [o for o in graph.objects(subject, predicate) if isinstance(o, Literal)]
    if not values:
        return ""
    english = [v for v in values if v.language in ("en", None) or (v.language or "").startswith("en-")]
    return (english or values)[0].lexical


def _expand(graph: Graph, values) -> tuple:
    out = []
    for v in values:
        if isinstance(v, Iri):
            members = [v]
        else:
            members = []
            for head in graph.objects(v, OWL.unionOf):
                members.extend(m for m in (collection_items(graph, head) or []) if isinstance(m, Iri))
        for m in members:
            if m not in out:
                out.append(m)
    return tuple(out)


def extract_summary(ontology: Graph) -> OntologySummary:
    """Read classes, properties and named individuals with their annotations."""
    class_iris = sorted(
        {s for t in _CLASS_TYPES for s in ontology.subjects(RDF.type, t) if isinstance(s, Iri)},
        key=lambda i: i.value,
    )
    if not class_iris:
        raise EmptyOntology("ontology declares no owl:Class or rdfs:Class")
    class_set = set(class_iris)
    prop_iris = sorted(
        {s for t in _PROPERTY_TYPES for s in ontology.subjects(RDF.type, t) if isinstance(s, Iri)},
        key=lambda i: i.value,
    )
    classes = tuple(
        ClassEntry(
            iri=c,
            label=_text(ontology, c, RDFS.label),
            definition=_text(ontology, c, SKOS.definition),
            notes=tuple(o.lexical for o in ontology.objects(c, SKOS.note) if isinstance(o, Literal)),
            parents=tuple(o for o in ontology.objects(c, RDFS.subClassOf) if isinstance(o, Iri)),
        )
        for c in class_iris
    )
    properties = tuple(
        PropertyEntry(
            iri=p,
            label=_text(ontology, p, RDFS.label),
            definition=_text(ontology, p, SKOS.definition),
            domains=_expand(ontology, ontology.objects(p, RDFS.domain)),
            ranges=_expand(ontology, ontology.objects(p, RDFS.range)),
            parents=tuple(o for o in ontology.objects(p, RDFS.subPropertyOf) if isinstance(o, Iri)),
        )
        for p in prop_iris
    )
    skip = class_set | set(prop_iris)
    individuals = []
    for t in ontology.match(None, RDF.type, None):
        s = t.subject
        if not isinstance(s, Iri) or s in skip or t.object not in class_set:
            continue
        if any(i.iri == s for i in individuals):
            continue
        types = sorted((o for o in ontology.objects(s, RDF.type) if o in class_set), key=lambda i: i.value)
        individuals.append(
            IndividualEntry(
                iri=s,
                type=types[0],
                label=_text(ontology, s, RDFS.label),
                definition=_text(ontology, s, SKOS.definition),
            )
        )
    individuals.sort(key=lambda e: e.iri.value)
    return OntologySummary(classes, properties, tuple(individuals))


def _names(iris) -> str:
    return " | ".join(curie(i) for i in iris) if iris else "(unrestricted)"


def _verbalize(summary: OntologySummary, compact: bool) -> str:
    out = ["# Classes", ""]
    for c in summary.classes:
        out.append(f"### {c.iri.value}")
        out.append(f"Name: {curie(c.iri)}" + (f" ({c.label})" if c.label else ""))
        if c.definition:
            out.append(f"Definition: {c.definition}")
        for note in c.notes:
            out.append(f"Note: {note}")
        if c.parents:
            out.append(f"Subclass of: {_names(c.parents)}")
        out.append("")
    out += ["# Properties", ""]
    for p in summary.properties:
        out.append(f"### {p.iri.value}")
        out.append(f"Name: {curie(p.iri)}" + (f" ({p.label})" if p.label else ""))
        if p.definition:
            out.append(f"Definition: {p.definition}")
        if p.parents:
            out.append(f"Subproperty of: {_names(p.parents)}")
        out.append(f"Domain → range: {_names(p.domains)} → {_names(p.ranges)}")
        out.append("")
    if summary.individuals:
        out += ["# Named individuals", ""]
        groups: dict = {}
        for i in summary.individuals:
            groups.setdefault(i.type, []).append(i)
        for typ in sorted(groups, key=lambda t: t.value):
            members = groups[typ]
            if compact:
                out.append(f"{curie(typ)}: " + ", ".join(curie(m.iri) for m in members))
            else:
                out.append(f"Instances of {curie(typ)}:")
                for m in members:
                    line = f"- {m.iri.value}"
                    if m.label:
                        line += f" ({m.label})"
                    if m.definition:
                        line += f": {m.definition}"
                    out.append(line)
            out.append("")
    return "\n".join(out).rstrip() + "\n"


def verbalize(summary: OntologySummary, char_limit: Optional[int] = None) -> str:
    """Plain-text rendering: classes, then properties, then individuals.

    When the full rendering is longer than ``char_limit`` the individuals are
    collapsed into one comma-separated line per type; classes and properties
    are always rendered in full.
    """
    if not (summary.classes or summary.properties or summary.individuals):
        raise EmptyOntology("nothing to verbalize")
    text = _verbalize(summary, compact=False)
    if char_limit is not None and len(text) > char_limit:
        text = _verbalize(summary, compact=True)
    return text


# Section headings, in template order, and the curated file backing each.
OSES_SECTIONS = (
    ("OntologySerialization", None),
    ("SyntacticInterpretation", "syntax.txt"),
    ("Semantics", "semantics.txt"),
    ("Examples", "examples.ttl"),
    ("ClassGuidelines", "guidelines.txt"),
)
CURATED_FILES = {name: heading for heading, name in OSES_SECTIONS if name}

DUTY_RULE = (
    "Duty placement: an odrl:Duty linked to the policy with odrl:obligation is an obligation the "
    "assignee must fulfil. An odrl:Duty linked to an odrl:Permission with odrl:duty is a "
    "pre-condition that must be met before the permission can be exercised."
)


@dataclass(frozen=True)
class CuratedBundle:
    """Curated text keyed by file name (``syntax.txt`` ...); absent files are missing keys."""

    files: dict = field(default_factory=dict)

    def get(self, name: str) -> Optional[str]:
        return self.files.get(name)


def load_bundle(directory) -> CuratedBundle:
    directory = Path(directory)
    files = {}
    for name in CURATED_FILES:
        path = directory / name
        if path.is_file():
            files[name] = path.read_text(encoding="utf-8")
    return CuratedBundle(files)


def default_bundle(policy_type: str) -> CuratedBundle:
    from .resources import TEMPLATES_DIR

    return load_bundle(TEMPLATES_DIR / policy_type)


@dataclass(frozen=True)
class GuidanceTemplate:
    policy_type: str
    methodology: str
    sections: tuple

    def headings(self) -> list:
        return [h for h, _ in self.sections]

    def section(self, heading: str) -> str:
        for h, body in self.sections:
            if h == heading:
                return body
        raise KeyError(heading)

    def dump(self) -> str:
        parts = []
        for heading, body in self.sections:
            parts.append(f"## {heading}\n{body.rstrip()}\n")
        return "\n".join(parts)


_KNOWN_HEADINGS = {h for h, _ in OSES_SECTIONS}
_HEADING_LINE = re.compile(r"^## (\w+)\n", re.M)


def parse_template_dump(text: str, policy_type: str, methodology: str) -> GuidanceTemplate:
    """Inverse of :meth:`GuidanceTemplate.dump`."""
    marks = [m for m in _HEADING_LINE.finditer(text) if m.group(1) in _KNOWN_HEADINGS]
    sections = []
    for i, m in enumerate(marks):
        end = marks[i + 1].start() if i + 1 < len(marks) else len(text)
        sections.append((m.group(1), text[m.end():end].rstrip("\n") + "\n"))
    return GuidanceTemplate(policy_type, methodology, tuple(sections))


def _has_policy_of_type(examples: str, policy_type: str) -> bool:
    try:
        graph = parse_turtle(examples)
    except TurtleSyntaxError as exc:
        raise InvalidExamples(f"examples are not valid Turtle: {exc}") from exc
    return bool(graph.match(None, RDF.type, ODRL[policy_type]))


def build_template(
    policy_type: str,
    methodology: str,
    ontology: Graph,
    curated: Optional[CuratedBundle] = None,
    *,
    ontology_text: Optional[str] = None,
    char_limit: Optional[int] = None,
) -> GuidanceTemplate:
    """Assemble the guidance template for one policy type and methodology.

    ``ontology_text`` is the Turtle source of ``ontology``; when omitted the
    ontology-only template serializes the graph instead.
    """
    if policy_type not in POLICY_TYPES:
        raise ValueError(f"unknown policy type {policy_type!r}")
    if methodology not in METHODOLOGIES:
        raise ValueError(f"unknown methodology {methodology!r}")
    if methodology == "OntologyGuided":
        text = ontology_text if ontology_text is not None else serialize_turtle(ontology)
        return GuidanceTemplate(policy_type, methodology, (("OntologySerialization", text),))

    curated = curated or CuratedBundle()
    bodies = {}
    for heading, name in OSES_SECTIONS[1:]:
        body = curated.get(name)
        if body is None or not body.strip():
            raise MissingSection(heading)
        bodies[heading] = body.rstrip() + "\n"
    semantics = bodies["Semantics"]
    if "odrl:obligation" not in semantics or "odrl:duty" not in semantics:
        bodies["Semantics"] = semantics + "\n" + DUTY_RULE + "\n"
    if not _has_policy_of_type(bodies["Examples"], policy_type):
        raise InvalidExamples(f"examples contain no odrl:{policy_type} policy")
    sections = [("OntologySerialization", verbalize(extract_summary(ontology), char_limit))]
    sections += [(heading, bodies[heading]) for heading, _ in OSES_SECTIONS[1:]]
    return GuidanceTemplate(policy_type, methodology, tuple(sections))


def default_template(policy_type: str, methodology: str, *, char_limit: Optional[int] = None) -> GuidanceTemplate:
    """Template built from the bundled ontology and curated files."""
    from .resources import odrl_ontology, ontology_text

    curated = default_bundle(policy_type) if methodology == "OSES" else None
    return build_template(
        policy_type, methodology, odrl_ontology(), curated, ontology_text=ontology_text(), char_limit=char_limit
    )


OUTPUT_INSTRUCTION = (
    "Output exactly one complete Turtle document that encodes this task as a single odrl:{policy_type} "
    "policy. Declare every prefix you use. Do not write anything outside the Turtle document."
)


def render_prompt(template: GuidanceTemplate, task: TaskDescription) -> tuple:
    """``(system, user)`` prompt texts for one generation call."""
    system = template.dump()
    header = f"Task {task.id}: {task.title}".rstrip() if task.title else f"Task {task.id}"
    user = f"{header}\n\n{task.text.strip()}\n\n" + OUTPUT_INSTRUCTION.format(policy_type=template.policy_type)
    return system, user
