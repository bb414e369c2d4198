"""0/1 check-unit scoring over validation reports.

A check unit is one (focus node, property shape) pair. Node shapes that a
policy type requires but that have no focus node in the data contribute one
failed unit per property shape, so omissions cost as much as malformations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from .namespaces import curie
from .rdf import Graph
from .shacl import NodeShape, ValidationReport, _Closure, focus_nodes, validate
from .tasks import POLICY_TYPES

MISSING = None  # focus placeholder for units of an absent mandatory node


@dataclass(frozen=True)
class CheckUnit:
    focus: object
    property_shape: object
    passed: bool = True
    node_shape: object = None

    @property
    def missing(self) -> bool:
        return self.focus is MISSING


@dataclass(frozen=True)
class ScoreCard:
    units: tuple
    R: int
    T: int

    @property
    def accuracy(self) -> float:
        return self.R / self.T * 100.0 if self.T else 0.0

    def failed(self) -> list:
        return [u for u in self.units if not u.passed]

    def to_record(self, **meta) -> dict:
        return {
            **meta,
            "R": self.R,
            "T": self.T,
            "accuracy": round(self.accuracy, 2),
            "per_unit": [
                {
                    "focus": "(missing)" if u.missing else _show(u.focus),
                    "shape": _show(u.property_shape),
                    "passed": u.passed,
                }
                for u in self.units
            ],
        }

    def to_json(self, **meta) -> str:
        return json.dumps(self.to_record(**meta), indent=2, ensure_ascii=False) + "\n"


def _show(term) -> str:
    from .namespaces import OSH

    return curie(term, {"osh": str(OSH), "drk": "https://w3id.org/drk/ontology/"}) if hasattr(term, "value") else term.n3()


def applicable_shapes(shapes: Iterable[NodeShape], policy_type: str) -> list:
    if policy_type not in POLICY_TYPES:
        raise ValueError(f"unknown policy type {policy_type!r}")
    return [s for s in shapes if s.applies(policy_type)]


def applicable_property_count(shapes: Iterable[NodeShape], policy_type: str) -> int:
    """Property shapes that can produce units for ``policy_type``."""
    return sum(len(s.property_shapes) for s in applicable_shapes(shapes, policy_type))


def _is_mandatory(shape: NodeShape, require_constraints: bool) -> bool:
    if shape.mandatory == "constraints":
        return require_constraints
    return bool(shape.mandatory)


def enumerate_units(
    data: Graph,
    shapes: Iterable[NodeShape],
    ontology: Graph,
    policy_type: str,
    require_constraints: bool = False,
) -> list:
    """Unit skeletons: present focus nodes start passed, missing mandatory nodes failed."""
    closure = _Closure(ontology)
    units = []
    for shape in applicable_shapes(shapes, policy_type):
        nodes = focus_nodes(data, shape, ontology, closure)
        if nodes:
            for node in nodes:
                units.extend(CheckUnit(node, ps.shape_iri, True, shape.shape_iri) for ps in shape.property_shapes)
        elif _is_mandatory(shape, require_constraints):
            units.extend(CheckUnit(MISSING, ps.shape_iri, False, shape.shape_iri) for ps in shape.property_shapes)
    return units


def score(report: ValidationReport, units: Iterable[CheckUnit]) -> ScoreCard:
    """A unit passes iff it is not a missing-node unit and no result hits its (focus, shape) pair."""
    hits = {(r.focus, r.source_shape) for r in report.results}
    scored = tuple(
        CheckUnit(u.focus, u.property_shape, (not u.missing) and (u.focus, u.property_shape) not in hits, u.node_shape)
        for u in units
    )
    r = sum(1 for u in scored if u.passed)
    return ScoreCard(scored, r, len(scored))


def score_graph(
    data: Graph,
    policy_type: str,
    shapes: Optional[list] = None,
    ontology: Optional[Graph] = None,
    require_constraints: bool = False,
) -> tuple:
    """Validate and score in one call; returns ``(report, scorecard)``."""
    from .resources import odrl_ontology
    from .shacl import load_shapes

    shapes = shapes if shapes is not None else load_shapes()
    ontology = ontology if ontology is not None else odrl_ontology()
    report = validate(data, shapes, ontology)
    units = enumerate_units(data, shapes, ontology, policy_type, require_constraints)
    return report, score(report, units)
