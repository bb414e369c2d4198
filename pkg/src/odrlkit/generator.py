"""Task description + guidance template -> LLM -> parsed ODRL graph.

Unparsable output is retried with the parser error appended to the user
prompt. Validation results are never fed back at this stage.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .lgt import GuidanceTemplate, render_prompt
from .llm import Backend, GenerationRequest, NoCandidate, extract_turtle
from .rdf import Graph, TurtleSyntaxError, parse_turtle, serialize_turtle
from .tasks import TaskDescription

DEFAULT_MAX_ATTEMPTS = 3

RETRY_NOTE = (
    "\n\nYour previous answer (attempt {n}) was not valid Turtle. The parser reported:\n"
    "{error}\n"
    "Return the corrected, complete Turtle document only."
)


class PolicyTypeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Attempt:
    prompt_user: str
    raw_text: str
    finish_reason: str
    error: Optional[str] = None

    @property
    def parsed(self) -> bool:
        return self.error is None


@dataclass
class GenerationRun:
    task_id: str
    methodology: str
    model_id: str
    attempts: list = field(default_factory=list)
    final_graph: Optional[Graph] = None
    elapsed_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return self.final_graph is not None


class ExhaustedAttempts(RuntimeError):
    def __init__(self, run: GenerationRun) -> None:
        super().__init__(f"task {run.task_id}: no parseable Turtle after {len(run.attempts)} attempts")
        self.run = run

    @property
    def attempts(self) -> list:
        return self.run.attempts


def parse_response(text: str) -> tuple:
    """``(graph, None)`` or ``(None, error message)`` for one raw answer."""
    try:
        candidate = extract_turtle(text)
    except NoCandidate as exc:
        return None, f"empty response: {exc}"
    try:
        return parse_turtle(candidate), None
    except TurtleSyntaxError as exc:
        return None, str(exc)


def generate_policy(
    task: TaskDescription,
    template: GuidanceTemplate,
    backend: Backend,
    model_id: str,
    *,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    temperature: float = 0.0,
    max_output: int = 4096,
    clock=time.perf_counter,
) -> GenerationRun:
    if template.policy_type != task.policy_type:
        raise PolicyTypeMismatch(
            f"task {task.id} is a {task.policy_type} but the template is for {template.policy_type}"
        )
    if max_attempts < 1:
        raise ValueError("max_attempts must be at least 1")
    system, user = render_prompt(template, task)
    run = GenerationRun(task.id, template.methodology, model_id)
    start = clock()
    prompt = user
    for n in range(1, max_attempts + 1):
        response = backend.generate(GenerationRequest(system, prompt, model_id, temperature, max_output))
        graph, error = parse_response(response.text)
        if graph is not None and len(graph) == 0:
            graph, error = None, "the answer contains no triples"
        run.attempts.append(Attempt(prompt, response.text, response.finish_reason, error))
        if graph is not None:
            run.final_graph = graph
            break
        prompt = prompt + RETRY_NOTE.format(n=n, error=error)
    run.elapsed_ms = (clock() - start) * 1000.0
    if run.final_graph is None:
        raise ExhaustedAttempts(run)
    return run


def write_run(run: GenerationRun, root) -> Path:
    """Store attempts and the final policy under ``runs/<model>/<methodology>/<task>/``."""
    directory = Path(root) / run.model_id / run.methodology / run.task_id
    directory.mkdir(parents=True, exist_ok=True)
    for n, attempt in enumerate(run.attempts, start=1):
        (directory / f"attempt_{n}.txt").write_text(attempt.raw_text, encoding="utf-8")
    if run.final_graph is not None:
        (directory / "policy.ttl").write_text(serialize_turtle(run.final_graph), encoding="utf-8")
    return directory
