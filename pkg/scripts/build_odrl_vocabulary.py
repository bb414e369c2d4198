"""Regenerate ``src/odrlkit/data/ontology/ODRL22.ttl``.

Term names and definitions come from rdflib's ``ODRL2`` namespace module
(generated upstream from the W3C ODRL22.ttl); class hierarchy, property
domains/ranges and action inclusions are maintained in the tables below.

    python scripts/build_odrl_vocabulary.py
"""

from __future__ import annotations

import inspect
import re
from pathlib import Path

import rdflib.namespace._ODRL2 as odrl_module

OUT = Path(__file__).resolve().parents[1] / "src/odrlkit/data/ontology/ODRL22.ttl"

CLASSES = {
    "Action": None,
    "Agreement": "Policy",
    "Assertion": "Policy",
    "Asset": None,
    "AssetCollection": "Asset",
    "AssetScope": None,
    "ConflictTerm": None,
    "Constraint": None,
    "Duty": "Rule",
    "LeftOperand": None,
    "LogicalConstraint": None,
    "Offer": "Policy",
    "Operator": None,
    "Party": None,
    "PartyCollection": "Party",
    "PartyScope": None,
    "Permission": "Rule",
    "Policy": None,
    "Privacy": "Policy",
    "Prohibition": "Rule",
    "Request": "Policy",
    "RightOperand": None,
    "Rule": None,
    "Set": "Policy",
    "Ticket": "Policy",
    "UndefinedTerm": None,
}

CLASS_NOTES = {
    "Policy": "A Policy MUST have one uid property value (of type IRI) to identify the Policy. "
    "A Policy MUST have at least one permission, prohibition, or obligation property value of type Rule.",
    "Agreement": "An Agreement Policy MUST contain at least one Permission or Prohibition rule, "
    "a Party with Assigner function, and a Party with Assignee function (in the same Rule).",
    "Offer": "An Offer Policy MUST contain at least one Permission or Prohibition rule and a Party "
    "with Assigner function (in the same Rule). An Offer MAY contain a Party with Assignee function.",
    "Set": "An ODRL Policy of subclass Set represents any combination of Rules.",
    "Permission": "A Permission MUST have one target property value of type Asset and one action. "
    "A Permission MAY have none, one or many duty property values.",
    "Prohibition": "A Prohibition MUST have one target property value of type Asset and one action.",
    "Duty": "A Duty linked to a Policy via obligation is an obligation of the assignee; a Duty linked "
    "to a Permission via duty is a pre-condition of exercising that Permission.",
    "Constraint": "A Constraint MUST have one leftOperand, one operator and one rightOperand or "
    "rightOperandReference.",
    "Asset": "An Asset SHOULD have one uid property value (of type IRI) to identify the Asset.",
    "Party": "A Party SHOULD have one uid property value (of type IRI) to identify the Party.",
}

UNION = "union"
# property: (types, domain, range, super-property)
PROPERTIES = {
    "action": ("object", "Rule", "Action", None),
    "and": ("object", "LogicalConstraint", None, "operand"),
    "andSequence": ("object", "LogicalConstraint", None, "operand"),
    "assignee": ("object", (UNION, "Policy", "Rule"), "Party", "function"),
    "assigneeOf": ("object", "Party", "Policy", None),
    "assigner": ("object", (UNION, "Policy", "Rule"), "Party", "function"),
    "assignerOf": ("object", "Party", "Policy", None),
    "attributedParty": ("object", None, "Party", "function"),
    "attributingParty": ("object", None, "Party", "function"),
    "compensatedParty": ("object", None, "Party", "function"),
    "compensatingParty": ("object", None, "Party", "function"),
    "conflict": ("object", "Policy", "ConflictTerm", None),
    "consentedParty": ("object", None, "Party", "function"),
    "consentingParty": ("object", None, "Party", "function"),
    "consequence": ("object", "Duty", "Duty", "failure"),
    "constraint": ("object", "Rule", (UNION, "Constraint", "LogicalConstraint"), None),
    "contractedParty": ("object", None, "Party", "function"),
    "contractingParty": ("object", None, "Party", "function"),
    "dataType": ("plain", "Constraint", None, None),
    "duty": ("object", "Permission", "Duty", None),
    "failure": ("object", "Rule", "Rule", None),
    "function": ("object", "Rule", "Party", None),
    "hasPolicy": ("object", "Asset", "Policy", None),
    "implies": ("object", "Action", "Action", None),
    "includedIn": ("object", "Action", "Action", None),
    "informedParty": ("object", None, "Party", "function"),
    "informingParty": ("object", None, "Party", "function"),
    "inheritAllowed": ("datatype", "Policy", "xsd:boolean", None),
    "inheritFrom": ("object", "Policy", "Policy", None),
    "inheritRelation": ("plain", "Policy", None, None),
    "leftOperand": ("object", "Constraint", "LeftOperand", None),
    "obligation": ("object", "Policy", "Duty", None),
    "operand": ("object", "LogicalConstraint", None, None),
    "operator": ("object", "Constraint", "Operator", None),
    "or": ("object", "LogicalConstraint", None, "operand"),
    "output": ("object", "Rule", "Asset", "relation"),
    "partOf": ("object", (UNION, "Asset", "Party"), (UNION, "AssetCollection", "PartyCollection"), None),
    "payeeParty": ("object", None, "Party", "function"),
    "permission": ("object", "Policy", "Permission", None),
    "profile": ("object", "Policy", None, None),
    "prohibition": ("object", "Policy", "Prohibition", None),
    "proximity": ("plain", None, None, None),
    "refinement": (
        "object",
        (UNION, "Action", "AssetCollection", "PartyCollection"),
        (UNION, "Constraint", "LogicalConstraint"),
        None,
    ),
    "relation": ("object", "Rule", "Asset", None),
    "remedy": ("object", "Prohibition", "Duty", "failure"),
    "rightOperand": ("plain", "Constraint", None, None),
    "rightOperandReference": ("plain", "Constraint", None, None),
    "scope": ("object", (UNION, "Asset", "Party"), (UNION, "AssetScope", "PartyScope"), None),
    "source": ("object", (UNION, "AssetCollection", "PartyCollection"), None, None),
    "status": ("plain", "Constraint", None, None),
    "target": ("object", (UNION, "Rule", "Policy"), "Asset", "relation"),
    "timedCount": ("plain", None, None, None),
    "trackedParty": ("object", None, "Party", "function"),
    "trackingParty": ("object", None, "Party", "function"),
    "uid": ("plain", None, None, None),
    "undefined": ("object", "Policy", "UndefinedTerm", None),
    "unit": ("plain", "Constraint", None, None),
    "xone": ("object", "LogicalConstraint", None, "operand"),
}

OPERATORS = {"eq", "gt", "gteq", "lt", "lteq", "neq", "hasPart", "isA", "isAllOf", "isAnyOf", "isNoneOf", "isPartOf"}
CONFLICT_TERMS = {"perm", "prohibit", "invalid"}
UNDEFINED_TERMS = {"ignore", "support", "invalid"}
PARTY_SCOPES = {"All", "All2ndConnections", "AllConnections", "AllGroups", "Group", "Individual"}
RIGHT_OPERANDS = {"policyUsage"}
TRANSFER_ACTIONS = {"sell", "give"}
TOP_ACTIONS = {"use", "transfer"}

EXTRA_DEFINITIONS = {
    "and": "The relation is satisfied when all of the Constraints are satisfied.",
    "or": "The relation is satisfied when at least one of the Constraints is satisfied.",
}


def _parse_module():
    source = inspect.getsource(odrl_module)
    sections: dict = {}
    current = None
    pending = None
    for raw in source.splitlines():
        line = raw.strip()
        header = re.match(r"# (http\S+)$", line)
        if header:
            current = header.group(1)
            sections.setdefault(current, {})
            continue
        if current is None:
            continue
        if line.startswith("# Valid non-python"):
            break
        m = re.match(r"(\w+): URIRef\s+# (.*)$", line)
        if m:
            sections[current][m.group(1)] = m.group(2).strip()
            continue
        m = re.match(r"(\w+): \($", line)
        if m:
            pending = m.group(1)
            continue
        m = re.match(r"URIRef\s+# (.*)$", line)
        if m and pending:
            sections[current][pending] = m.group(1).strip()
            pending = None
    return sections


def _label(name: str) -> str:
    words = re.sub(r"(?<=[a-z0-9])(?=[A-Z])", " ", name).split()
    return " ".join(w[:1].upper() + w[1:] for w in words)


def _lit(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"@en'


def _ref(value) -> str:
    if value is None:
        return ""
    if isinstance(value, tuple):
        members = " ".join(f"odrl:{m}" for m in value[1:])
        return f"[ a owl:Class ; owl:unionOf ( {members} ) ]"
    if ":" in value:
        return value
    return f"odrl:{value}"


def build() -> str:
    sections = _parse_module()
    props = sections["http://www.w3.org/1999/02/22-rdf-syntax-ns#Property"]
    props.update({k: v for k, v in EXTRA_DEFINITIONS.items() if k not in props})
    individuals = sections["http://www.w3.org/2002/07/owl#NamedIndividual"]
    concepts = sections["http://www.w3.org/2004/02/skos/core#Concept"]

    out = [
        "@prefix odrl: <http://www.w3.org/ns/odrl/2/> .",
        "@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .",
        "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .",
        "@prefix owl: <http://www.w3.org/2002/07/owl#> .",
        "@prefix skos: <http://www.w3.org/2004/02/skos/core#> .",
        "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .",
        "@prefix dct: <http://purl.org/dc/terms/> .",
        "",
        "# ODRL Version 2.2 vocabulary (reconstructed; see scripts/build_odrl_vocabulary.py).",
        "",
        "<http://www.w3.org/ns/odrl/2/>",
        "    a owl:Ontology ;",
        '    dct:title "ODRL Version 2.2"@en ;',
        '    owl:versionInfo "2.2" ;',
        '    rdfs:comment "The ODRL Vocabulary and Expression defines a set of concepts and terms (the vocabulary) '
        "and encoding mechanism (the expression) for permissions and obligations statements describing digital "
        'content usage based on the ODRL Information Model."@en .',
        "",
        "### Classes",
        "",
    ]
    for name in sorted(CLASSES):
        parent = CLASSES[name]
        lines = [
            f"odrl:{name}",
            "    a rdfs:Class, owl:Class, skos:Concept ;",
            "    rdfs:isDefinedBy odrl: ;",
            f"    rdfs:label {_lit(_label(name))} ;",
        ]
        if parent:
            lines.append(f"    rdfs:subClassOf odrl:{parent} ;")
        if name in CLASS_NOTES:
            lines.append(f"    skos:note {_lit(CLASS_NOTES[name])} ;")
        lines.append(f"    skos:definition {_lit(concepts[name])} .")
        out.extend(lines + [""])

    out += ["### Properties", ""]
    for name in sorted(props):
        kind, domain, range_, parent = PROPERTIES[name]
        types = {"object": "rdf:Property, owl:ObjectProperty", "datatype": "rdf:Property, owl:DatatypeProperty"}
        lines = [
            f"odrl:{name}",
            f"    a {types.get(kind, 'rdf:Property')} ;",
            "    rdfs:isDefinedBy odrl: ;",
            f"    rdfs:label {_lit(_label(name))} ;",
        ]
        if parent:
            lines.append(f"    rdfs:subPropertyOf odrl:{parent} ;")
        if domain:
            lines.append(f"    rdfs:domain {_ref(domain)} ;")
        if range_:
            lines.append(f"    rdfs:range {_ref(range_)} ;")
        lines.append(f"    skos:definition {_lit(props[name])} .")
        out.extend(lines + [""])

    out += ["### Actions", ""]
    actions = sorted(n for n in concepts if n not in CLASSES and n != "core")
    for name in actions:
        lines = [
            f"odrl:{name}",
            "    a odrl:Action, skos:Concept ;",
            "    rdfs:isDefinedBy odrl: ;",
            f"    rdfs:label {_lit(_label(name))} ;",
        ]
        if name in TRANSFER_ACTIONS:
            lines.append("    odrl:includedIn odrl:transfer ;")
        elif name not in TOP_ACTIONS:
            lines.append("    odrl:includedIn odrl:use ;")
        lines.append(f"    skos:definition {_lit(concepts[name])} .")
        out.extend(lines + [""])

    out += ["### Constraint operands, operators and policy terms", ""]
    for name in sorted(individuals):
        if name in OPERATORS:
            types = ["odrl:Operator"]
        elif name in PARTY_SCOPES:
            types = ["odrl:PartyScope"]
        elif name in RIGHT_OPERANDS:
            types = ["odrl:RightOperand"]
        elif name in CONFLICT_TERMS | UNDEFINED_TERMS:
            types = []
            if name in CONFLICT_TERMS:
                types.append("odrl:ConflictTerm")
            if name in UNDEFINED_TERMS:
                types.append("odrl:UndefinedTerm")
        else:
            types = ["odrl:LeftOperand"]
        lines = [
            f"odrl:{name}",
            f"    a {', '.join(types)}, owl:NamedIndividual, skos:Concept ;",
            "    rdfs:isDefinedBy odrl: ;",
            f"    rdfs:label {_lit(_label(name))} ;",
            f"    skos:definition {_lit(individuals[name])} .",
        ]
        out.extend(lines + [""])

    out += [
        "odrl:core",
        "    a skos:Concept ;",
        "    rdfs:isDefinedBy odrl: ;",
        f"    rdfs:label {_lit('Core Profile')} ;",
        f"    skos:definition {_lit(concepts['core'])} .",
        "",
        "### Collections",
        "",
    ]
    collections = {
        "#actions": ("Actions", actions),
        "#constraintRelationalOperators": ("Constraint Relational Operators", sorted(OPERATORS)),
        "#constraintLeftOperandCommon": (
            "Constraint Left Operands",
            sorted(n for n in individuals if n not in OPERATORS | PARTY_SCOPES | RIGHT_OPERANDS | CONFLICT_TERMS | UNDEFINED_TERMS),
        ),
        "#policySubClasses": ("Policy Subclasses", sorted(n for n, p in CLASSES.items() if p == "Policy")),
        "#partyRolesCommon": (
            "Party Roles",
            sorted(n for n, spec in PROPERTIES.items() if spec[3] == "function"),
        ),
    }
    for local, (label, members) in collections.items():
        out.append(f"<http://www.w3.org/ns/odrl/2/{local}>")
        out.append("    a skos:Collection ;")
        out.append(f"    rdfs:label {_lit(label)} ;")
        out.append("    skos:member " + ", ".join(f"odrl:{m}" for m in members) + " .")
        out.append("")
    return "\n".join(out).rstrip() + "\n"


if __name__ == "__main__":
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(build(), encoding="utf-8")
    print(f"wrote {OUT}")
