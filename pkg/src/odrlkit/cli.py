"""Command-line entry point: ``odrlkit <command> ...``.

Exit codes: 0 success, 1 validation nonconformance (``validate`` only),
2 input error, 3 provider error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .bench import BENCH_METHODOLOGIES, FORMATS, ConfigError, MalformedUseCase, UnsupportedFormat
from .correction import MODES, DuplicateRuleId, EmptyRuleSet, MalformedRule
from .generator import ExhaustedAttempts
from .lgt import EmptyOntology, InvalidExamples, MissingSection
from .llm import BackendConfig, FixtureMissing, ProviderError
from .rdf import TurtleSyntaxError, UndefinedPrefix
from .shacl import MalformedShape, UnsupportedFeature
from .tasks import METHODOLOGIES, POLICY_TYPES

EXIT_OK = 0
EXIT_NONCONFORMANT = 1
EXIT_INPUT = 2
EXIT_PROVIDER = 3

log = logging.getLogger("odrlkit")

_INPUT_ERRORS = (
    OSError,
    TurtleSyntaxError,
    UndefinedPrefix,
    MalformedUseCase,
    ConfigError,
    UnsupportedFormat,
    DuplicateRuleId,
    EmptyRuleSet,
    MalformedRule,
    EmptyOntology,
    MissingSection,
    InvalidExamples,
    MalformedShape,
    UnsupportedFeature,
    LookupError,
    ValueError,
)
_PROVIDER_ERRORS = (ProviderError, FixtureMissing, ExhaustedAttempts)


class UsageError(ValueError):
    pass


def _write(text: str, out) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _task(task_id: str, use_cases):
    from .bench import load_use_cases

    for task in load_use_cases(use_cases):
        if task.id == task_id:
            return task
    raise UsageError(f"no use case with id {task_id!r}")


def _backend(args):
    from .resources import REPLAY_DIR

    if args.live:
        if not args.endpoint:
            raise UsageError("--live needs --endpoint")
        mode = "record" if args.record else "live"
        return BackendConfig(mode, fixtures=args.record, endpoint=args.endpoint).build()
    return BackendConfig("replay", fixtures=str(args.replay or REPLAY_DIR)).build()


def _add_backend_options(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--replay", metavar="DIR", help="replay fixture directory (default: shipped fixtures)")
    group.add_argument("--live", action="store_true", help="call the HTTP endpoint; the key is read from LLM_API_KEY")
    p.add_argument("--endpoint", help="chat-completions URL for --live")
    p.add_argument("--record", metavar="DIR", help="with --live, also store responses as replay fixtures")
    p.add_argument("--use-cases", metavar="FILE", help="use-case file (default: shipped dataset)")


def cmd_distill(args) -> int:
    from .lgt import build_template, default_bundle, extract_summary, load_bundle, verbalize
    from .rdf import parse_turtle

    source = Path(args.ontology).read_text(encoding="utf-8")
    ontology = parse_turtle(source)
    summary = extract_summary(ontology)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.txt").write_text(verbalize(summary, args.char_limit), encoding="utf-8")
    for policy_type in POLICY_TYPES:
        for methodology in METHODOLOGIES:
            curated = None
            if methodology == "OSES":
                curated = load_bundle(Path(args.curated) / policy_type) if args.curated else default_bundle(policy_type)
            template = build_template(
                policy_type, methodology, ontology, curated, ontology_text=source, char_limit=args.char_limit
            )
            target = out / policy_type / f"{methodology}.txt"
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(template.dump(), encoding="utf-8")
    print(
        f"{len(summary.classes)} classes, {len(summary.properties)} properties, "
        f"{len(summary.individuals)} individuals -> {out}"
    )
    return EXIT_OK


def cmd_generate(args) -> int:
    from .generator import generate_policy, write_run
    from .lgt import default_template
    from .rdf import serialize_turtle

    task = _task(args.task, args.use_cases)
    template = default_template(task.policy_type, args.methodology)
    run = generate_policy(task, template, _backend(args), args.model, max_attempts=args.max_attempts)
    if args.runs:
        write_run(run, args.runs)
    _write(serialize_turtle(run.final_graph), args.out)
    log.info("%s: %d attempt(s)", task.id, len(run.attempts))
    return EXIT_OK


def cmd_refine(args) -> int:
    from .correction import load_rules, refine, write_session
    from .rdf import parse_turtle_file, serialize_turtle

    task = _task(args.task, args.use_cases)
    graph = parse_turtle_file(args.policy)
    rules = load_rules(args.rules)
    session = refine(task, graph, rules, _backend(args), args.model, args.mode)
    if args.session_dir:
        write_session(session, args.session_dir)
    for step in session.failures():
        log.warning("correction step %s kept the prior graph: %s", ",".join(step.rule_ids), step.error)
    _write(serialize_turtle(session.final_graph), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    from .rdf import parse_turtle_file, serialize_turtle
    from .resources import odrl_ontology
    from .shacl import load_shapes, validate

    data = parse_turtle_file(args.data)
    report = validate(data, load_shapes(args.shapes), odrl_ontology())
    _write(serialize_turtle(report.to_graph()) if args.format == "turtle" else report.to_text(), args.out)
    return EXIT_OK if report.conforms else EXIT_NONCONFORMANT


def cmd_score(args) -> int:
    from .rdf import parse_turtle_file
    from .scorer import score_graph
    from .shacl import load_shapes

    data = parse_turtle_file(args.data)
    shapes = load_shapes(args.shapes) if args.shapes else None
    _, card = score_graph(data, args.policy_type, shapes, require_constraints=args.require_constraints)
    _write(card.to_json(policy_type=args.policy_type), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    from dataclasses import replace

    from .bench import emit_report, load_config, run_matrix, summarize

    config = load_config(args.config)
    if args.out:
        config = replace(config, output_dir=args.out)
    rows = run_matrix(config, write_artifacts=not args.no_artifacts)
    report = Path(config.output_dir) / f"report.{args.format}"
    written = emit_report(rows, args.format, report)
    for (model, methodology), acc in sorted(summarize(rows).items()):
        print(f"{model}\t{methodology}\t{acc:.2f}")
    failed = sum(1 for r in rows if r.error)
    print(f"{len(rows)} rows ({failed} failed cells) -> {', '.join(str(p) for p in written)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="odrlkit", description="Generate, refine, validate and score ODRL policies.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distill", help="verbalize an ontology and write guidance templates")
    p.add_argument("--ontology", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--curated", metavar="DIR", help="directory with one curated bundle per policy type")
    p.add_argument("--char-limit", type=int)
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("generate", help="generate a policy for one use case")
    p.add_argument("--task", required=True)
    p.add_argument("--methodology", required=True, choices=METHODOLOGIES)
    p.add_argument("--model", required=True)
    p.add_argument("--max-attempts", type=int, default=3)
    p.add_argument("--runs", metavar="DIR", help="store attempts under DIR/<model>/<methodology>/<task>/")
    p.add_argument("--out", help="policy output file (default: stdout)")
    _add_backend_options(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("refine", help="apply the self-correction rules to a policy")
    p.add_argument("--policy", required=True)
    p.add_argument("--task", required=True)
    p.add_argument("--mode", choices=MODES, default="consolidated")
    p.add_argument("--model", default="gpt-4o")
    p.add_argument("--rules", help="rule file (default: shipped rules)")
    p.add_argument("--session-dir", metavar="DIR")
    p.add_argument("--out")
    _add_backend_options(p)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("validate", help="validate a policy against the shapes")
    p.add_argument("--data", required=True)
    p.add_argument("--shapes", help="shapes directory (default: shipped shapes)")
    p.add_argument("--format", choices=("text", "turtle"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("score", help="score a policy as passed/total check units")
    p.add_argument("--data", required=True)
    p.add_argument("--policy-type", required=True, choices=POLICY_TYPES)
    p.add_argument("--shapes")
    p.add_argument("--require-constraints", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bench", help=f"run the {'/'.join(BENCH_METHODOLOGIES)} matrix")
    p.add_argument("--config", required=True)
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--out", metavar="DIR", help="override the config's output_dir")
    p.add_argument("--no-artifacts", action="store_true", help="do not write per-run files")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except _PROVIDER_ERRORS as exc:
        print(f"odrlkit: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except _INPUT_ERRORS as exc:
        print(f"odrlkit: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
