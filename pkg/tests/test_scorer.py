from __future__ import annotations

import random

import pytest
import rdflib
from corpus import gold, mutation_corpus
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import to_rdflib
from rdflib.namespace import RDF as RRDF
from rdflib.namespace import RDFS as RRDFS
from rdflib.namespace import SH as RSH

from odrlkit.namespaces import ODRL, OSH
from odrlkit.rdf import Graph, Iri, Literal, Triple
from odrlkit.resources import odrl_ontology
from odrlkit.scorer import (
    CheckUnit,
    ScoreCard,
    applicable_property_count,
    enumerate_units,
    score,
    score_graph,
)
from odrlkit.shacl import ValidationReport, ValidationResult, load_shapes, load_shapes_graph, validate

SHAPES = load_shapes()
ONTOLOGY = odrl_ontology()
DRK = "https://w3id.org/drk/ontology/"


def brute_force_unit_count(data: Graph, policy_type: str, require_constraints: bool) -> int:
    """Count units straight from the shapes graph with rdflib, independent of the scorer."""
    shapes = to_rdflib(load_shapes_graph())
    onto = to_rdflib(ONTOLOGY)
    g = to_rdflib(data)
    applies = rdflib.URIRef(OSH.appliesTo.value)
    mandatory = rdflib.URIRef(OSH.mandatory.value)
    total = 0
    for shape in shapes.subjects(RRDF.type, RSH.NodeShape):
        scope = {str(v) for v in shapes.objects(shape, applies)}
        if scope and policy_type not in scope:
            continue
        target = shapes.value(shape, RSH.targetClass)
        classes = set(onto.transitive_subjects(RRDFS.subClassOf, target))
        nodes = {s for c in classes for s in g.subjects(RRDF.type, c)}
        props = len(list(shapes.objects(shape, RSH.property)))
        flag = shapes.value(shape, mandatory)
        required = flag == rdflib.Literal(True) or (
            flag == rdflib.URIRef(OSH.whenConstraintsRequired.value) and require_constraints
        )
        total += props * len(nodes) if nodes else (props if required else 0)
    return total


@pytest.mark.parametrize("policy_type, expected", [("Agreement", 22), ("Offer", 20), ("Set", 16)])
def test_applicable_property_shapes(policy_type, expected):
    assert applicable_property_count(SHAPES, policy_type) == expected


def test_small_agreement_unit_count():
    g = gold("UC4")
    extra = Iri(DRK + "constraint_UC4_count")
    g = g.without([t for t in g if t.subject == extra or t.object == extra])
    units = enumerate_units(g, SHAPES, ONTOLOGY, "Agreement")
    # policy 8 + agreement parties 4 + 2 parties x 2 + asset 1 + permission 3 + constraint 4
    assert len(units) == 24 == brute_force_unit_count(g, "Agreement", False)


@pytest.mark.parametrize("fid", ["gold-UC1", "gold-UC2", "gold-UC12", "UC1-untyped-assigner", "UC2-drop-target",
                                 "UC12-untyped-asset", "UC1-undefined-class"])
@pytest.mark.parametrize("require", [False, True])
def test_unit_count_matches_brute_force(fid, require):
    corpus = {f: (ptype, g) for f, ptype, _, g in mutation_corpus()}
    ptype, g = corpus[fid]
    ptype = ptype or {"gold-UC1": "Agreement", "gold-UC2": "Offer", "gold-UC12": "Set"}[fid]
    assert len(enumerate_units(g, SHAPES, ONTOLOGY, ptype, require)) == brute_force_unit_count(g, ptype, require)


def test_empty_agreement_fails_every_unit():
    report, card = score_graph(Graph(), "Agreement")
    assert card.R == 0 and card.T == 18
    assert all(u.missing and not u.passed for u in card.units)
    assert card.accuracy == 0.0


def test_gold_scores_full_marks():
    _, card = score_graph(gold("UC1"), "Agreement", require_constraints=True)
    assert card.R == card.T == 34 and card.accuracy == 100.0


def test_accuracy_arithmetic():
    assert ScoreCard((), 217, 236).accuracy == pytest.approx(91.95, abs=0.01)
    assert ScoreCard((), 7, 10).accuracy == pytest.approx(70.0)
    assert ScoreCard((), 5, 5).accuracy == 100.0
    assert ScoreCard((), 0, 0).accuracy == 0.0


def test_one_result_fails_one_unit():
    g = gold("UC2")
    policy = Iri(DRK + "policy_UC2")
    report, card = score_graph(g.without(g.match(policy, ODRL.uid)), "Offer")
    (failed,) = card.failed()
    assert failed.focus == policy and failed.property_shape == OSH["PolicyShape-uid"]


def test_unscored_results_do_not_fail_units():
    # An undefined predicate is reported against the node shape, which owns no unit.
    g = gold("UC2")
    policy = Iri(DRK + "policy_UC2")
    report, card = score_graph(g.with_triples([Triple(policy, ODRL.location, Literal("DE"))]), "Offer")
    assert not report.conforms
    assert card.R == card.T


def test_record_format():
    _, card = score_graph(Graph(), "Set")
    record = card.to_record(task_id="UC3")
    assert record["task_id"] == "UC3" and record["R"] == 0 and record["T"] == card.T
    assert record["per_unit"][0]["focus"] == "(missing)"
    assert record["per_unit"][0]["shape"].startswith("osh:")


_GRAPHS = [g for _, _, _, g in mutation_corpus()]


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(range(len(_GRAPHS))), st.integers(0, 10**6), st.sampled_from(["Agreement", "Offer", "Set"]))
def test_permuting_results_keeps_scores(index, seed, ptype):
    g = _GRAPHS[index]
    report = validate(g, SHAPES, ONTOLOGY)
    units = enumerate_units(g, SHAPES, ONTOLOGY, ptype)
    shuffled = list(report.results)
    random.Random(seed).shuffle(shuffled)
    a, b = score(report, units), score(ValidationReport(tuple(shuffled)), units)
    assert (a.R, a.T) == (b.R, b.T)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(range(len(_GRAPHS))), st.data())
def test_extra_violation_never_raises_accuracy(index, data):
    g = _GRAPHS[index]
    report = validate(g, SHAPES, ONTOLOGY)
    units = enumerate_units(g, SHAPES, ONTOLOGY, "Agreement")
    if not units:
        return
    unit = data.draw(st.sampled_from(units))
    extra = ValidationResult(unit.focus, None, unit.property_shape, "MinCount", "C1: injected")
    worse = score(ValidationReport(report.results + (extra,)), units)
    assert worse.accuracy <= score(report, units).accuracy


def test_score_is_pure():
    units = [CheckUnit(Iri("http://e/a"), OSH["PolicyShape-uid"])]
    report = ValidationReport()
    assert score(report, units) == score(report, units)
