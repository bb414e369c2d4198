from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odrlkit.lgt import (
    OSES_SECTIONS,
    ClassEntry,
    CuratedBundle,
    EmptyOntology,
    GuidanceTemplate,
    InvalidExamples,
    MissingSection,
    OntologySummary,
    build_template,
    default_bundle,
    default_template,
    extract_summary,
    parse_template_dump,
    render_prompt,
    verbalize,
)
from odrlkit.namespaces import ODRL, RDFS
from odrlkit.rdf import Graph, Iri, parse_turtle
from odrlkit.resources import odrl_ontology, ontology_text
from odrlkit.tasks import METHODOLOGIES, POLICY_TYPES, TaskDescription

UC1 = TaskDescription(
    "UC1",
    "ShowTimesAPI access",
    "DE_Staatstheater_Augsburg offers the ShowTimesAPI to subscribers in Germany until 2025-05-10.",
    "Agreement",
)


@pytest.fixture(scope="module")
def summary():
    return extract_summary(odrl_ontology())


def test_policy_class_with_definition(summary):
    policy = summary.find(ODRL.Policy)
    assert isinstance(policy, ClassEntry)
    assert policy.label == "Policy"
    assert policy.definition.startswith("A non-empty group of Permissions")


def test_core_classes_present(summary):
    iris = {c.iri for c in summary.classes}
    for name in ("Policy", "Permission", "Duty", "Asset", "Party", "Constraint", "Agreement", "Offer", "Set"):
        assert ODRL[name] in iris


def test_empty_graph_is_rejected():
    with pytest.raises(EmptyOntology):
        extract_summary(Graph())


def test_toy_ontology():
    toy = parse_turtle(
        "@prefix ex: <http://e/> . @prefix owl: <http://www.w3.org/2002/07/owl#> ."
        "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> . ex:C a owl:Class ; rdfs:label \"C\" ."
    )
    s = extract_summary(toy)
    assert s.classes == (ClassEntry(Iri("http://e/C"), "C", ""),)
    assert s.properties == () and s.individuals == ()


def test_single_class_paragraph():
    s = OntologySummary((ClassEntry(Iri("http://e/C"), "C", "a thing"),), (), ())
    text = verbalize(s)
    assert "### http://e/C" in text
    assert "Definition: a thing" in text
    assert "# Properties" in text and "# Named individuals" not in text


def test_every_class_heading_once(summary):
    lines = verbalize(summary).splitlines()
    for c in summary.classes:
        assert lines.count(f"### {c.iri.value}") == 1


def test_every_summarized_iri_appears(summary):
    text = verbalize(summary)
    missing = [i.value for i in summary.iris() if i.value not in text]
    assert missing == []


def test_target_line_names_domain_and_range(summary):
    # Domain and range read independently from the ontology graph.
    onto = odrl_ontology()
    ranges = onto.objects(ODRL.target, RDFS.range)
    assert ranges == [ODRL.Asset]
    text = verbalize(summary)
    block = text.split(f"### {ODRL.target.value}\n", 1)[1].split("\n\n", 1)[0]
    line = next(ln for ln in block.splitlines() if ln.startswith("Domain"))
    assert "odrl:Rule" in line and "odrl:Asset" in line


def test_classes_sorted_before_properties(summary):
    text = verbalize(summary)
    assert text.index("# Classes") < text.index("# Properties") < text.index("# Named individuals")
    headings = [ln[4:] for ln in text.split("# Properties")[0].splitlines() if ln.startswith("### ")]
    assert headings == sorted(headings)


def test_char_limit_compacts_individuals(summary):
    full = verbalize(summary)
    short = verbalize(summary, char_limit=len(full) - 1)
    assert len(short) < len(full)
    assert "odrl:Operator: " in short or "odrl:LeftOperand: " in short
    for entry in (*summary.classes, *summary.properties):
        assert entry.iri.value in short


def test_ontology_guided_template_is_raw_ontology():
    text = ontology_text()
    t = build_template("Agreement", "OntologyGuided", odrl_ontology(), CuratedBundle(), ontology_text=text)
    assert t.headings() == ["OntologySerialization"]
    assert t.section("OntologySerialization") == text


def test_oses_offer_template():
    t = build_template("Offer", "OSES", odrl_ontology(), default_bundle("Offer"))
    assert t.headings() == [h for h, _ in OSES_SECTIONS]
    assert "a odrl:Offer" in t.section("Examples")


def test_missing_examples_section():
    files = dict(default_bundle("Set").files)
    del files["examples.ttl"]
    with pytest.raises(MissingSection) as info:
        build_template("Set", "OSES", odrl_ontology(), CuratedBundle(files))
    assert info.value.section == "Examples"


def test_examples_must_match_policy_type():
    with pytest.raises(InvalidExamples):
        build_template("Set", "OSES", odrl_ontology(), default_bundle("Agreement"))


def test_duty_rule_added_when_semantics_silent():
    files = dict(default_bundle("Offer").files)
    files["semantics.txt"] = "Policies group rules.\n"
    t = build_template("Offer", "OSES", odrl_ontology(), CuratedBundle(files))
    assert "odrl:obligation" in t.section("Semantics") and "odrl:duty" in t.section("Semantics")


@pytest.mark.parametrize("policy_type", POLICY_TYPES)
def test_oses_adds_information_categories(policy_type):
    og = default_template(policy_type, "OntologyGuided")
    oses = default_template(policy_type, "OSES")
    assert set(og.headings()) < set(oses.headings())


def test_empty_template_prompt_contains_task():
    t = GuidanceTemplate("Set", "OSES", ())
    system, user = render_prompt(t, TaskDescription("X1", "", "T", "Set"))
    assert "T" in user.split("\n")
    assert system == ""


def test_uc1_prompt_contents():
    system, user = render_prompt(default_template("Agreement", "OSES"), UC1)
    assert "ShowTimesAPI" in user
    assert "## OntologySerialization" in system
    assert "odrl:Agreement" in user


@pytest.mark.parametrize("methodology", METHODOLOGIES)
def test_template_building_is_deterministic(methodology):
    a = render_prompt(default_template("Agreement", methodology), UC1)
    b = render_prompt(default_template("Agreement", methodology), UC1)
    assert a == b


@pytest.mark.parametrize("policy_type", POLICY_TYPES)
def test_dump_round_trip(policy_type):
    t = default_template(policy_type, "OSES")
    assert parse_template_dump(t.dump(), policy_type, "OSES") == t


_body = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=30).map(lambda s: s.strip() + "\n")


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([h for h, _ in OSES_SECTIONS]), _body), max_size=5))
def test_dump_round_trip_property(sections):
    sections = tuple((h, b) for h, b in sections if "## " not in b)
    t = GuidanceTemplate("Set", "OSES", sections)
    assert parse_template_dump(t.dump(), "Set", "OSES") == t
