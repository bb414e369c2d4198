"""Experiment matrix: models x methodologies x use cases, scored and reported."""

from __future__ import annotations

import csv
import io
import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .correction import load_rules, refine, write_session
from .generator import ExhaustedAttempts, GenerationRun, generate_policy, write_run
from .lgt import default_template
from .llm import BackendConfig, FixtureMissing, ProviderError
from .rdf import Graph, serialize_turtle
from .scorer import enumerate_units, score
from .shacl import load_shapes, validate
from .tasks import POLICY_TYPES, TaskDescription

log = logging.getLogger(__name__)

BENCH_METHODOLOGIES = ("OntologyGuided", "OSES", "Refinement")
CANONICAL_SIZE = 12
CANONICAL_SPLIT = {"Agreement": 4, "Offer": 5, "Set": 3}
CSV_HEADER = ("task_id", "policy_type", "model", "methodology", "R", "T", "accuracy", "attempts", "wall_ms")
FORMATS = ("csv", "json")


class MalformedUseCase(ValueError):
    def __init__(self, index: int, reason: str) -> None:
        super().__init__(index, reason)
        self.index = index
        self.reason = reason

    def __str__(self) -> str:
        return f"use case #{self.index}: {self.reason}"


class UnsupportedFormat(ValueError):
    pass


class ConfigError(ValueError):
    pass


def parse_use_cases(text: str) -> list:
    doc = yaml.safe_load(text) or {}
    entries = doc.get("use_cases") if isinstance(doc, dict) else doc
    if not isinstance(entries, list):
        raise MalformedUseCase(0, "expected a list of use cases")
    tasks = []
    seen = set()
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise MalformedUseCase(i, "entry is not a mapping")
        for key in ("id", "title", "description", "policy_type"):
            if not entry.get(key):
                raise MalformedUseCase(i, f"missing {key}")
        if entry["policy_type"] not in POLICY_TYPES:
            raise MalformedUseCase(i, f"policy_type must be one of {POLICY_TYPES}")
        tid = str(entry["id"])
        if tid in seen:
            raise MalformedUseCase(i, f"duplicate id {tid}")
        seen.add(tid)
        tasks.append(
            TaskDescription(
                tid,
                str(entry["title"]),
                str(entry["description"]).strip(),
                entry["policy_type"],
                bool(entry.get("requires_constraints", False)),
            )
        )
    dataset = doc.get("dataset", {}) if isinstance(doc, dict) else {}
    if dataset.get("canonical"):
        counts = {t: sum(1 for task in tasks if task.policy_type == t) for t in POLICY_TYPES}
        if len(tasks) != CANONICAL_SIZE or counts != CANONICAL_SPLIT:
            raise MalformedUseCase(
                len(tasks), f"canonical dataset must hold {CANONICAL_SIZE} cases split {CANONICAL_SPLIT}, got {counts}"
            )
    return tasks


def load_use_cases(path=None) -> list:
    from .resources import USE_CASES_FILE

    return parse_use_cases(Path(path or USE_CASES_FILE).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class BenchmarkConfig:
    models: tuple
    methodologies: tuple
    use_case_file: Optional[str] = None
    backend: BackendConfig = field(default_factory=lambda: BackendConfig("replay"))
    parallelism: int = 4
    output_dir: str = "bench-out"
    correction_mode: str = "consolidated"
    max_attempts: int = 3

    def __post_init__(self) -> None:
        if not self.models:
            raise ConfigError("models must be non-empty")
        if not self.methodologies:
            raise ConfigError("methodologies must be non-empty")
        bad = set(self.methodologies) - set(BENCH_METHODOLOGIES)
        if bad:
            raise ConfigError(f"unknown methodologies {sorted(bad)}")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be at least 1")


def load_config(path) -> BenchmarkConfig:
    """Read a YAML config.

    Relative input paths (use cases, fixtures) are resolved against the
    config's directory; ``output_dir`` is relative to the working directory.
    """
    path = Path(path)
    doc = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    base = path.parent

    def resolve(value):
        if value is None:
            return None
        p = Path(value)
        return str(p if p.is_absolute() else (base / p).resolve())

    backend = doc.get("backend", {}) or {}
    if "api_key" in backend or "credential" in backend:
        raise ConfigError("credentials are read from the LLM_API_KEY environment variable, not from config files")
    try:
        return BenchmarkConfig(
            models=tuple(doc.get("models") or ()),
            methodologies=tuple(doc.get("methodologies") or BENCH_METHODOLOGIES),
            use_case_file=resolve(doc.get("use_case_file")),
            backend=BackendConfig(
                mode=backend.get("mode", "replay"),
                fixtures=resolve(backend.get("fixtures")),
                endpoint=backend.get("endpoint"),
                max_in_flight=int(backend.get("max_in_flight", 4)),
                rate_per_second=float(backend.get("rate_per_second", 2.0)),
            ),
            parallelism=int(doc.get("parallelism", 4)),
            output_dir=str(doc.get("output_dir", "bench-out")),
            correction_mode=doc.get("correction_mode", "consolidated"),
            max_attempts=int(doc.get("max_attempts", 3)),
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class ReportRow:
    task_id: str
    policy_type: str
    model: str
    methodology: str
    R: int
    T: int
    accuracy: float
    attempts: int
    wall_ms: int
    error: Optional[str] = None

    def csv_values(self) -> list:
        return [self.task_id, self.policy_type, self.model, self.methodology, self.R, self.T,
                f"{self.accuracy:.2f}", self.attempts, self.wall_ms]


class _Matrix:
    def __init__(self, config: BenchmarkConfig, tasks, write_artifacts: bool, backend=None) -> None:
        from .resources import odrl_ontology

        self.config = config
        self.tasks = tasks
        self.backend = backend if backend is not None else config.backend.build()
        self.shapes = load_shapes()
        self.ontology = odrl_ontology()
        self.rules = load_rules()
        self.templates = {}
        self.replay = config.backend.mode == "replay"
        self.runs_dir = Path(config.output_dir) / "runs" if write_artifacts else None
        self._oses: dict = {}
        self._locks: dict = {}
        self._guard = threading.Lock()

    def template(self, policy_type: str, methodology: str):
        key = (policy_type, methodology)
        with self._guard:
            if key not in self.templates:
                self.templates[key] = default_template(policy_type, methodology)
            return self.templates[key]

    def generate(self, task, model, methodology) -> GenerationRun:
        return generate_policy(
            task, self.template(task.policy_type, methodology), self.backend, model, max_attempts=self.config.max_attempts
        )

    def oses_run(self, task, model) -> GenerationRun:
        """OSES generation shared by the OSES and Refinement cells of one (task, model)."""
        key = (task.id, model)
        with self._guard:
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            if key not in self._oses:
                try:
                    self._oses[key] = self.generate(task, model, "OSES")
                except (ExhaustedAttempts, FixtureMissing, ProviderError) as exc:
                    self._oses[key] = exc
            outcome = self._oses[key]
        if isinstance(outcome, Exception):
            raise outcome
        return outcome

    def cell(self, task: TaskDescription, model: str, methodology: str) -> ReportRow:
        graph: Optional[Graph] = None
        attempts = 0
        error = None
        elapsed = 0.0
        out_dir = self.runs_dir / model / methodology / task.id if self.runs_dir else None
        try:
            if methodology == "OntologyGuided":
                run = self.generate(task, model, "OntologyGuided")
            else:
                run = self.oses_run(task, model)
            attempts = len(run.attempts)
            elapsed = run.elapsed_ms
            graph = run.final_graph
            if self.runs_dir:
                write_run(GenerationRun(run.task_id, methodology, model, run.attempts, run.final_graph), self.runs_dir)
            if methodology == "Refinement":
                session = refine(task, graph, self.rules, self.backend, model, self.config.correction_mode)
                graph = session.final_graph
                if out_dir:
                    write_session(session, out_dir)
                    (out_dir / "policy.ttl").write_text(serialize_turtle(graph), encoding="utf-8")
        except ExhaustedAttempts as exc:
            attempts = len(exc.attempts)
            error = str(exc)
            graph = None
        except (FixtureMissing, ProviderError) as exc:
            error = str(exc)
            graph = None
        if error:
            log.warning("%s/%s/%s failed: %s", model, methodology, task.id, error)
        data = graph if graph is not None else Graph()
        report = validate(data, self.shapes, self.ontology)
        units = enumerate_units(data, self.shapes, self.ontology, task.policy_type, task.requires_constraints)
        card = score(report, units)
        if out_dir:
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / "validation.txt").write_text(report.to_text(), encoding="utf-8")
            (out_dir / "score.json").write_text(
                card.to_json(task_id=task.id, model=model, methodology=methodology), encoding="utf-8"
            )
            if error:
                (out_dir / "error.txt").write_text(error + "\n", encoding="utf-8")
        wall = 0 if self.replay else int(round(elapsed))
        return ReportRow(task.id, task.policy_type, model, methodology, card.R, card.T, round(card.accuracy, 2),
                         attempts, wall, error)


def run_matrix(config: BenchmarkConfig, tasks: Optional[list] = None, write_artifacts: bool = True, backend=None) -> list:
    """One row per (task, model, methodology), sorted in that order.

    ``backend`` overrides the one described by ``config.backend``.
    """
    tasks = tasks if tasks is not None else load_use_cases(config.use_case_file)
    matrix = _Matrix(config, tasks, write_artifacts, backend)
    order = {m: i for i, m in enumerate(BENCH_METHODOLOGIES)}
    cells = [
        (task, model, meth)
        for task in tasks
        for model in config.models
        for meth in sorted(config.methodologies, key=order.get)
    ]
    with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
        futures = [pool.submit(matrix.cell, *c) for c in cells]
        rows = [f.result() for f in futures]
    task_pos = {t.id: i for i, t in enumerate(tasks)}
    model_pos = {m: i for i, m in enumerate(config.models)}
    rows.sort(key=lambda r: (task_pos[r.task_id], model_pos[r.model], order[r.methodology]))
    return rows


def report_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(r.csv_values())
    return buf.getvalue()


def report_json(rows) -> str:
    records = [dict(zip(CSV_HEADER, [r.task_id, r.policy_type, r.model, r.methodology, r.R, r.T,
                                      round(r.accuracy, 2), r.attempts, r.wall_ms])) for r in rows]
    return json.dumps(records, indent=2, ensure_ascii=False) + "\n"


def emit_report(rows, fmt: str, path) -> list:
    """Write the report; ``csv`` also writes a ``.json`` mirror next to it. Returns written paths."""
    if fmt not in FORMATS:
        raise UnsupportedFormat(f"unsupported report format {fmt!r}; expected one of {FORMATS}")
    if not rows:
        raise ValueError("no rows to report")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "csv":
        path.write_text(report_csv(rows), encoding="utf-8")
        mirror = path.with_suffix(".json")
        mirror.write_text(report_json(rows), encoding="utf-8")
        written = [path, mirror]
    else:
        path.write_text(report_json(rows), encoding="utf-8")
        written = [path]
    return written


def summarize(rows) -> dict:
    """Aggregate accuracy per (model, methodology): sum R / sum T x 100."""
    acc: dict = {}
    for r in rows:
        k = (r.model, r.methodology)
        got, tot = acc.get(k, (0, 0))
        acc[k] = (got + r.R, tot + r.T)
    return {k: (v[0] / v[1] * 100.0 if v[1] else 0.0) for k, v in acc.items()}

