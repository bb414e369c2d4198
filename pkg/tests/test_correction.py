from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from odrlkit.correction import (
    CorrectionRule,
    DuplicateRuleId,
    EmptyRuleSet,
    MalformedRule,
    applicable,
    load_rules,
    parse_rules,
    refine,
    refine_consolidated,
    refine_iterative,
    render_correction_prompt,
    rule_counts,
    write_session,
)
from odrlkit.llm import CallableBackend
from odrlkit.namespaces import ODRL
from odrlkit.rdf import Graph, Iri, Triple, isomorphic, parse_turtle, serialize_turtle
from odrlkit.tasks import TaskDescription

TASK = TaskDescription("UC2", "Offer", "Offer the archive for display.", "Offer")
POLICY = parse_turtle(
    "@prefix odrl: <http://www.w3.org/ns/odrl/2/> . @prefix ex: <http://e/> .\n"
    "ex:pol a odrl:Offer ; odrl:permission ex:perm .\n"
    "ex:perm a odrl:Permission ; odrl:action odrl:display ; odrl:target ex:archive .\n"
)
UID = Triple(Iri("http://e/pol"), ODRL.uid, Iri("http://e/pol"))


def rule(rid, types=("Agreement", "Offer", "Set")):
    return CorrectionRule(rid, frozenset(types), f"text of {rid}")


def answer(graph: Graph) -> str:
    return "Corrected policy:\n```turtle\n" + serialize_turtle(graph) + "```\n"


def test_shipped_rule_counts():
    assert rule_counts(load_rules()) == {"Agreement": 17, "Offer": 16, "Set": 16}


def test_duplicate_rule_ids():
    with pytest.raises(DuplicateRuleId):
        parse_rules("- {id: a, text: one}\n- {id: a, text: two}\n")


def test_empty_rule_file():
    with pytest.raises(EmptyRuleSet):
        parse_rules("")


@pytest.mark.parametrize("text", ["just a string", "- {id: x}", "- {id: x, text: t, applies_to: [Contract]}"])
def test_malformed_rules(text):
    with pytest.raises(MalformedRule):
        parse_rules(text)


def test_prompt_lists_task_policy_and_rules():
    rules = applicable(load_rules(), "Offer")
    system, user = render_correction_prompt(TASK, POLICY, rules)
    assert "Offer the archive for display." in user
    assert "ex:perm" in user or "http://e/perm" in user
    for r in rules:
        assert f"[{r.rule_id}]" in user
    assert "party-assignee" not in user
    assert system


def test_identity_refinement():
    session = refine_consolidated(TASK, POLICY, [rule("a")], CallableBackend(lambda r: answer(POLICY)), "m")
    assert isomorphic(session.final_graph, POLICY)
    assert len(session.steps) == 1 and not session.failures()


def test_refinement_adds_missing_uid():
    fixed = POLICY.with_triples([UID])
    session = refine_consolidated(TASK, POLICY, [rule("a")], CallableBackend(lambda r: answer(fixed)), "m")
    assert session.final_graph.triples - POLICY.triples == {UID}
    assert len(session.final_graph) == len(POLICY) + 1


def test_prose_answer_keeps_input():
    session = refine_consolidated(TASK, POLICY, [rule("a")], CallableBackend(lambda r: "I cannot help with that."), "m")
    assert isomorphic(session.final_graph, POLICY)
    assert len(session.failures()) == 1 and session.failures()[0].error


def test_prefix_only_answer_keeps_input():
    reply = "@prefix ex: <http://e/> .\n"
    session = refine_consolidated(TASK, POLICY, [rule("a")], CallableBackend(lambda r: reply), "m")
    assert session.final_graph is POLICY
    assert session.steps[0].failed


def test_iterative_no_applicable_rules():
    session = refine_iterative(TASK, POLICY, [rule("only-set", ["Set"])], CallableBackend(lambda r: 1 / 0), "m")
    assert session.steps == [] and session.final_graph is POLICY


def _adder(extra_by_rule, malformed=()):
    def fn(request):
        rid = request.user_text.rsplit("- [", 1)[1].split("]", 1)[0]
        if rid in malformed:
            return "```turtle\n@prefix ex: <http://e/> .\nex:broken ex:p\n```"
        current = parse_turtle(request.user_text.split("Current policy:\n\n", 1)[1].split("\n\nCorrection rules:", 1)[0])
        return answer(current.with_triples([extra_by_rule[rid]]))

    return CallableBackend(fn)


def _extra(n):
    return Triple(Iri("http://e/pol"), Iri(f"http://e/note{n}"), Iri(f"http://e/v{n}"))


def test_iterative_chains_two_rules():
    extra = {"r1": _extra(1), "r2": _extra(2)}
    session = refine_iterative(TASK, POLICY, [rule("r1"), rule("r2")], _adder(extra), "m")
    assert session.final_graph.triples - POLICY.triples == {_extra(1), _extra(2)}
    assert [s.rule_ids for s in session.steps] == [("r1",), ("r2",)]


def test_iterative_middle_step_malformed():
    extra = {"r1": _extra(1), "r2": _extra(2), "r3": _extra(3)}
    session = refine_iterative(TASK, POLICY, [rule("r1"), rule("r2"), rule("r3")], _adder(extra, {"r2"}), "m")
    assert len(session.steps) == 3
    assert [s.failed for s in session.steps] == [False, True, False]
    assert session.final_graph.triples - POLICY.triples == {_extra(1), _extra(3)}


def test_iterative_step_count_equals_applicable_rules():
    rules = load_rules()
    session = refine_iterative(TASK, POLICY, rules, CallableBackend(lambda r: answer(POLICY)), "m")
    assert len(session.steps) == len(applicable(rules, "Offer")) == 16


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        refine_consolidated(TASK, Graph(), [rule("a")], CallableBackend(lambda r: ""), "m")


def test_unknown_mode():
    with pytest.raises(ValueError):
        refine(TASK, POLICY, [rule("a")], CallableBackend(lambda r: ""), "m", mode="parallel")


_replies = st.one_of(
    st.just(""),
    st.text(max_size=40),
    st.just("```turtle\n@prefix ex: <http://e/> .\nex:a ex:b\n```"),
    st.just(answer(POLICY.with_triples([UID]))),
    st.builds(lambda n: answer(POLICY)[:n], st.integers(0, 200)),
)


@settings(max_examples=100, deadline=None)
@given(st.lists(_replies, min_size=16, max_size=16), st.sampled_from(["consolidated", "iterative"]))
def test_final_graph_always_parseable(replies, mode):
    it = iter(replies)
    session = refine(TASK, POLICY, load_rules(), CallableBackend(lambda r: next(it)), "m", mode)
    final = session.final_graph
    assert len(final) > 0
    assert isomorphic(parse_turtle(serialize_turtle(final)), final)
    if all(s.failed for s in session.steps):
        assert final is POLICY


def test_write_session(tmp_path):
    extra = {"r1": _extra(1), "r2": _extra(2)}
    session = refine_iterative(TASK, POLICY, [rule("r1"), rule("r2")], _adder(extra, {"r2"}), "m")
    out = write_session(session, tmp_path)
    names = sorted(p.name for p in out.iterdir())
    assert names == ["step_1.ttl", "step_1_response.txt", "step_2.ttl", "step_2_response.txt"]
    # The failed second step stores the graph that was kept.
    assert parse_turtle((out / "step_2.ttl").read_text()) == parse_turtle((out / "step_1.ttl").read_text())
