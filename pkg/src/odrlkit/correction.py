"""Rule-based self-correction of generated policies.

The LLM sees the task, the current policy graph and human-readable rules and
re-emits the whole policy. Consolidated mode sends every applicable rule in
one prompt; iterative mode sends one rule per step, chaining the outputs. A
step whose answer does not parse (or parses to nothing) keeps the prior graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .generator import parse_response
from .llm import Backend, GenerationRequest
from .rdf import Graph, serialize_turtle
from .tasks import POLICY_TYPES, TaskDescription

MODES = ("consolidated", "iterative")


class DuplicateRuleId(ValueError):
    pass


class EmptyRuleSet(ValueError):
    pass


class MalformedRule(ValueError):
    pass


@dataclass(frozen=True)
class CorrectionRule:
    rule_id: str
    applies_to: frozenset
    text: str

    def __post_init__(self) -> None:
        if not self.rule_id:
            raise MalformedRule("rule id must be non-empty")
        if not self.text or not self.text.strip():
            raise MalformedRule(f"rule {self.rule_id}: text must be non-empty")
        unknown = set(self.applies_to) - set(POLICY_TYPES)
        if unknown:
            raise MalformedRule(f"rule {self.rule_id}: unknown policy types {sorted(unknown)}")


def parse_rules(text: str) -> list:
    records = yaml.safe_load(text)
    if not records:
        raise EmptyRuleSet("rule file contains no rules")
    if not isinstance(records, list):
        raise MalformedRule("rule file must be a list of {id, applies_to, text} records")
    rules = []
    seen = set()
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or "id" not in rec or "text" not in rec:
            raise MalformedRule(f"rule #{i}: expected a mapping with id and text")
        rid = str(rec["id"])
        if rid in seen:
            raise DuplicateRuleId(rid)
        seen.add(rid)
        applies = rec.get("applies_to", list(POLICY_TYPES))
        if isinstance(applies, str):
            applies = [applies]
        rules.append(CorrectionRule(rid, frozenset(applies), str(rec["text"]).strip()))
    return rules


def load_rules(path=None) -> list:
    from .resources import RULES_FILE

    return parse_rules(Path(path or RULES_FILE).read_text(encoding="utf-8"))


def applicable(rules, policy_type: str) -> list:
    return [r for r in rules if policy_type in r.applies_to]


def rule_counts(rules) -> dict:
    return {t: len(applicable(rules, t)) for t in POLICY_TYPES}


SYSTEM_TEXT = (
    "You review ODRL 2.2 policies written in Turtle. Compare the policy with the correction rules. "
    "Where the policy breaks a rule, fix it using only information from the task. Keep every "
    "statement that already complies. Answer with the complete corrected policy as one Turtle "
    "document and nothing else."
)


def render_correction_prompt(task: TaskDescription, graph: Graph, rules) -> tuple:
    lines = [f"Task {task.id} ({task.policy_type}): {task.title}".rstrip(), "", task.text.strip(), "", "Current policy:", ""]
    lines.append(serialize_turtle(graph).rstrip())
    lines += ["", "Correction rules:"]
    for r in rules:
        lines.append(f"- [{r.rule_id}] {r.text}")
    return SYSTEM_TEXT, "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CorrectionStep:
    rule_ids: tuple
    prompt: str
    response: str
    graph: Optional[Graph]
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.graph is None


@dataclass
class CorrectionSession:
    mode: str
    input_graph: Graph
    steps: list = field(default_factory=list)
    final_graph: Optional[Graph] = None

    def failures(self) -> list:
        return [s for s in self.steps if s.failed]


def _step(task, graph, rules, backend, model_id, temperature) -> CorrectionStep:
    system, user = render_correction_prompt(task, graph, rules)
    response = backend.generate(GenerationRequest(system, user, model_id, temperature))
    refined, error = parse_response(response.text)
    if refined is not None and len(refined) == 0:
        refined, error = None, "the answer contains no triples"
    return CorrectionStep(tuple(r.rule_id for r in rules), user, response.text, refined, error)


def _check_input(graph: Graph) -> None:
    if len(graph) == 0:
        raise ValueError("cannot refine an empty graph")


def refine_consolidated(
    task: TaskDescription, graph: Graph, rules, backend: Backend, model_id: str, temperature: float = 0.0
) -> CorrectionSession:
    _check_input(graph)
    session = CorrectionSession("consolidated", graph)
    step = _step(task, graph, applicable(rules, task.policy_type), backend, model_id, temperature)
    session.steps.append(step)
    session.final_graph = graph if step.failed else step.graph
    return session


def refine_iterative(
    task: TaskDescription, graph: Graph, rules, backend: Backend, model_id: str, temperature: float = 0.0
) -> CorrectionSession:
    _check_input(graph)
    session = CorrectionSession("iterative", graph)
    current = graph
    for rule in applicable(rules, task.policy_type):
        step = _step(task, current, [rule], backend, model_id, temperature)
        session.steps.append(step)
        if not step.failed:
            current = step.graph
    session.final_graph = current
    return session


def refine(task, graph, rules, backend, model_id, mode: str = "consolidated", temperature: float = 0.0):
    if mode == "consolidated":
        return refine_consolidated(task, graph, rules, backend, model_id, temperature)
    if mode == "iterative":
        return refine_iterative(task, graph, rules, backend, model_id, temperature)
    raise ValueError(f"unknown correction mode {mode!r}; expected one of {MODES}")


def write_session(session: CorrectionSession, directory) -> Path:
    """Store each step's graph as ``refinement/step_<n>.ttl`` (the kept graph on failure)."""
    out = Path(directory) / "refinement"
    out.mkdir(parents=True, exist_ok=True)
    current = session.input_graph
    for n, step in enumerate(session.steps, start=1):
        if not step.failed:
            current = step.graph
        (out / f"step_{n}.ttl").write_text(serialize_turtle(current), encoding="utf-8")
        (out / f"step_{n}_response.txt").write_text(step.response, encoding="utf-8")
    return out
