from __future__ import annotations

import dataclasses
import json

import pytest

from odrlkit.bench import (
    CSV_HEADER,
    BenchmarkConfig,
    ConfigError,
    MalformedUseCase,
    ReportRow,
    UnsupportedFormat,
    emit_report,
    load_config,
    load_use_cases,
    parse_use_cases,
    report_csv,
    run_matrix,
    summarize,
)
from odrlkit.llm import BackendConfig, CallableBackend
from odrlkit.resources import BENCH_DIR, REPLAY_DIR
from odrlkit.tasks import TaskDescription


def test_shipped_use_cases():
    tasks = load_use_cases()
    assert len(tasks) == 12
    counts = {t: sum(1 for x in tasks if x.policy_type == t) for t in ("Agreement", "Offer", "Set")}
    assert counts == {"Agreement": 4, "Offer": 5, "Set": 3}
    uc1 = tasks[0]
    assert uc1.id == "UC1" and uc1.policy_type == "Agreement" and uc1.requires_constraints
    assert "ShowTimesAPI" in uc1.text and "2025-05-10" in uc1.text


def test_missing_policy_type():
    with pytest.raises(MalformedUseCase) as info:
        parse_use_cases("- {id: A, title: t, description: d}\n- {id: B, title: t, description: d}\n")
    assert info.value.index == 0 and "policy_type" in str(info.value)


@pytest.mark.parametrize(
    "text",
    [
        "- {id: A, title: t, description: d, policy_type: Contract}",
        "- {id: A, title: t, description: d, policy_type: Set}\n- {id: A, title: t, description: d, policy_type: Set}",
        "just text",
        "- 7",
    ],
)
def test_malformed_use_cases(text):
    with pytest.raises(MalformedUseCase):
        parse_use_cases(text)


def test_canonical_split_enforced():
    text = "dataset: {canonical: true}\nuse_cases:\n  - {id: A, title: t, description: d, policy_type: Set}\n"
    with pytest.raises(MalformedUseCase):
        parse_use_cases(text)
    assert len(parse_use_cases(text.replace("true", "false"))) == 1


def test_config_paths(tmp_path):
    (tmp_path / "c.yaml").write_text("models: [m]\nuse_case_file: uc.yaml\nbackend: {mode: replay, fixtures: fx}\n")
    config = load_config(tmp_path / "c.yaml")
    assert config.use_case_file == str(tmp_path / "uc.yaml")
    assert config.backend.fixtures == str(tmp_path / "fx")
    assert config.methodologies == ("OntologyGuided", "OSES", "Refinement")


def test_config_rejects_credentials(tmp_path):
    (tmp_path / "c.yaml").write_text("models: [m]\nbackend: {mode: live, endpoint: 'http://x/', api_key: sk-1}\n")
    with pytest.raises(ConfigError) as info:
        load_config(tmp_path / "c.yaml")
    assert "LLM_API_KEY" in str(info.value)


@pytest.mark.parametrize(
    "kwargs",
    [dict(models=()), dict(methodologies=()), dict(methodologies=("Magic",)), dict(parallelism=0)],
)
def test_config_errors(kwargs):
    base = dict(models=("m",), methodologies=("OSES",))
    with pytest.raises(ConfigError):
        BenchmarkConfig(**{**base, **kwargs})


def _config(tmp_path, models=("gpt-4o",), **kw):
    return BenchmarkConfig(models=tuple(models), methodologies=("OntologyGuided", "OSES", "Refinement"),
                           backend=BackendConfig("replay", fixtures=str(REPLAY_DIR)),
                           output_dir=str(tmp_path / "out"), **kw)


def test_one_model_matrix(tmp_path):
    rows = run_matrix(_config(tmp_path), write_artifacts=False)
    assert len(rows) == 36
    assert all(r.error is None for r in rows)
    assert [r.methodology for r in rows[:3]] == ["OntologyGuided", "OSES", "Refinement"]
    assert {r.wall_ms for r in rows} == {0}


def test_three_model_rerun_is_byte_identical(tmp_path):
    config = load_config(BENCH_DIR / "three_models.yaml")
    config = dataclasses.replace(config, output_dir=str(tmp_path / "out"))
    first = report_csv(run_matrix(config, write_artifacts=False))
    second = report_csv(run_matrix(dataclasses.replace(config, parallelism=1), write_artifacts=False))
    assert first == second
    assert len(first.splitlines()) == 109


def test_refinement_beats_oses_on_shipped_fixtures(tmp_path):
    rows = run_matrix(_config(tmp_path, models=("gpt-3.5-turbo", "gpt-4", "gpt-4o")), write_artifacts=False)
    summary = summarize(rows)
    for model in ("gpt-3.5-turbo", "gpt-4", "gpt-4o"):
        assert summary[(model, "Refinement")] > summary[(model, "OSES")]


def test_emit_report(tmp_path):
    row = ReportRow("UC1", "Agreement", "m", "OSES", 7, 10, 70.0, 1, 0)
    written = emit_report([row], "csv", tmp_path / "r" / "report.csv")
    assert [p.name for p in written] == ["report.csv", "report.json"]
    lines = written[0].read_text().splitlines()
    assert lines == [",".join(CSV_HEADER), "UC1,Agreement,m,OSES,7,10,70.00,1,0"]
    assert json.loads(written[1].read_text())[0]["accuracy"] == 70.0
    with pytest.raises(UnsupportedFormat):
        emit_report([row], "xml", tmp_path / "report.xml")
    with pytest.raises(ValueError):
        emit_report([], "csv", tmp_path / "empty.csv")


def test_failing_cell_still_reports(tmp_path):
    (tmp_path / "fx").mkdir()
    config = dataclasses.replace(_config(tmp_path), backend=BackendConfig("replay", fixtures=str(tmp_path / "fx")))
    tasks = [TaskDescription("T1", "t", "Allow reading.", "Set")]
    rows = run_matrix(config, tasks)
    assert len(rows) == 3
    assert all(r.error and r.R == 0 and r.T > 0 and r.accuracy == 0.0 for r in rows)
    assert (tmp_path / "out" / "runs" / "gpt-4o" / "OSES" / "T1" / "error.txt").exists()


def test_run_artifacts(tmp_path):
    tasks = [t for t in load_use_cases() if t.id == "UC2"]
    run_matrix(_config(tmp_path), tasks)
    runs = tmp_path / "out" / "runs" / "gpt-4o"
    assert sorted(p.name for p in runs.iterdir()) == ["OSES", "OntologyGuided", "Refinement"]
    refinement = runs / "Refinement" / "UC2"
    names = {p.name for p in refinement.iterdir()}
    assert {"policy.ttl", "validation.txt", "score.json", "attempt_1.txt", "refinement"} <= names
    assert (refinement / "refinement" / "step_1.ttl").exists()
    assert json.loads((refinement / "score.json").read_text())["task_id"] == "UC2"


def test_backend_override(tmp_path):
    tasks = [TaskDescription("T1", "t", "Allow reading.", "Set")]
    backend = CallableBackend(lambda r: "not turtle")
    rows = run_matrix(dataclasses.replace(_config(tmp_path), methodologies=("OSES",)), tasks, False, backend)
    assert rows[0].attempts == 3 and rows[0].error


def test_summarize_sums_units():
    rows = [ReportRow("a", "Set", "m", "OSES", 1, 4, 25.0, 1, 0), ReportRow("b", "Set", "m", "OSES", 3, 4, 75.0, 1, 0)]
    assert summarize(rows) == {("m", "OSES"): 50.0}
