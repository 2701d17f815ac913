"""Operator command line.

Subcommands: run, resume, inspect, eval-serve, eval-judge, report.
Exit codes: 0 Completed (with a final proof), 10 BudgetExhausted,
11 TimeExhausted, 12 NoCompliantProof, 1 Failed, 2 usage/config errors.
Diagnostics go to stderr; machine-readable output stays on stdout.
"""

from __future__ import annotations

import argparse
import json
import signal
import sys
import threading
from pathlib import Path

from . import orchestrator as orch
from .backend import ScriptedMockBackend
from .errors import ConfigInvalid, CorruptStream, EmptyStore, ProofloopError, TemporalViolation
from .evalharness.judge import HttpEvalClient, run_llm_judges
from .evalharness.service import EvalService, build_report, load_sealed_map, load_solutions_manifest
from .evalharness.store import EvaluationStore
from .memory import Segment, SharedMemory

EXIT_CODES = {
    orch.RunStatus.COMPLETED: 0,
    orch.RunStatus.FAILED: 1,
    orch.RunStatus.BUDGET_EXHAUSTED: 10,
    orch.RunStatus.TIME_EXHAUSTED: 11,
    orch.RunStatus.NO_COMPLIANT_PROOF: 12,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="proofloop")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one problem-solving run")
    run_p.add_argument("--config", required=True, help="run config JSON file")
    run_p.add_argument("--problem", help="problem file; overrides config problem_path")
    run_p.add_argument("--rounds", type=int, help="rounds N (default: 5)")
    run_p.add_argument("--proposers", type=int, help="proposer count K_p (default: 3)")
    run_p.add_argument("--verifiers", type=int, help="verifier count K_v (default: 3)")
    run_p.add_argument("--token-cap", type=int, help="token budget (default: 200000)")
    run_p.add_argument("--time-cap", help="wall-clock cap, e.g. 6h (default: 6h)")
    run_p.add_argument("--backend", choices=["mock", "api"], help="backend kind")
    run_p.add_argument("--script", help="mock script JSON (required with --backend mock)")
    run_p.add_argument("--seed", type=int, help="run seed")
    run_p.add_argument("--ablate", help="comma-separated ablation flags")
    run_p.add_argument("--out", help="run directory (default: runs/<run-id>)")

    resume_p = sub.add_parser("resume", help="continue a run from its last committed round")
    resume_p.add_argument("run_dir")
    resume_p.add_argument("--script", help="mock script JSON when the run used a mock backend")

    inspect_p = sub.add_parser("inspect", help="list a run's memory records")
    inspect_p.add_argument("run_dir")
    inspect_p.add_argument("--segment", choices=[s.value for s in Segment])
    inspect_p.add_argument("--round", type=int, dest="round_no")

    serve_p = sub.add_parser("eval-serve", help="serve the evaluation API")
    serve_p.add_argument("--store", required=True, help="evaluation store directory")
    serve_p.add_argument("--solutions", required=True, help="solutions manifest JSON")
    serve_p.add_argument("--port", type=int, default=8080)
    serve_p.add_argument("--pairs", help="explicit pairing manifest JSON")
    serve_p.add_argument("--guidance", help="per-problem guidance JSON")
    serve_p.add_argument("--salt", default="proofloop-eval")

    judge_p = sub.add_parser("eval-judge", help="run LLM judges over the pairing plan")
    judge_p.add_argument("--store", required=True)
    judge_p.add_argument("--solutions", required=True)
    judge_p.add_argument("--script", required=True, help="mock script for the judge backend")
    judge_p.add_argument("--judge-models", required=True, help="comma-separated judge names")
    judge_p.add_argument("--pairs", help="explicit pairing manifest JSON")
    judge_p.add_argument("--salt", default="proofloop-eval")

    report_p = sub.add_parser("report", help="aggregate an evaluation store")
    report_p.add_argument("--store", required=True)
    report_p.add_argument("--format", choices=["text", "json"], default="text")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "resume":
            return _cmd_resume(args)
        if args.command == "inspect":
            return _cmd_inspect(args)
        if args.command == "eval-serve":
            return _cmd_eval_serve(args)
        if args.command == "eval-judge":
            return _cmd_eval_judge(args)
        if args.command == "report":
            return _cmd_report(args)
    except (ConfigInvalid, TemporalViolation, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EmptyStore as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CorruptStream as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ProofloopError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


def _cmd_run(args) -> int:
    config = orch.RunConfig.from_file(args.config)
    if args.problem:
        config.problem_path = args.problem
    if args.rounds is not None:
        config.N = args.rounds
    if args.proposers is not None:
        config.K_p = args.proposers
    if args.verifiers is not None:
        config.K_v = args.verifiers
    if args.token_cap is not None:
        config.token_cap = args.token_cap
    if args.time_cap is not None:
        config.time_cap = orch.parse_duration(args.time_cap)
    if args.seed is not None:
        config.seed = args.seed
    if args.backend == "mock":
        if not args.script and not config.backend.get("script"):
            print("error: --backend mock requires --script", file=sys.stderr)
            return 2
        config.backend = {"kind": "mock", "script": args.script or config.backend.get("script")}
    elif args.backend == "api":
        config.backend.setdefault("kind", "api")
    elif args.script:
        config.backend = {"kind": config.backend.get("kind", "mock"), "script": args.script}
    if args.ablate:
        config.ablation_flags = {f.strip() for f in args.ablate.split(",") if f.strip()}
    config.validate()
    run_dir = Path(args.out) if args.out else Path("runs") / f"run-{config.config_hash()[:12]}"
    result = orch.run(config, run_dir)
    print(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    print(f"run directory: {run_dir}", file=sys.stderr)
    return EXIT_CODES[result.status]


def _cmd_resume(args) -> int:
    backend = ScriptedMockBackend.from_file(args.script) if args.script else None
    result = orch.resume(args.run_dir, backend=backend)
    print(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    return EXIT_CODES[result.status]


def _cmd_inspect(args) -> int:
    memory = SharedMemory.replay(args.run_dir)
    segment = Segment(args.segment) if args.segment else None
    records = memory.snapshot(segment=segment)
    if args.round_no is not None:
        records = [r for r in records if r.round == args.round_no]
    for record in records:
        content = record.content.replace("\n", " ")
        if len(content) > 72:
            content = content[:69] + "..."
        print(
            f"{record.sequence:>5}  r{record.round:<2} {record.agent_id:<12} "
            f"{record.segment.value:<18} {record.content_kind:<24} {content}"
        )
    print(f"{len(records)} records", file=sys.stderr)
    return 0


def _make_service(args) -> EvalService:
    store = EvaluationStore(args.store)
    solutions = load_solutions_manifest(args.solutions)
    pairs = None
    if getattr(args, "pairs", None):
        pairs = json.loads(Path(args.pairs).read_text("utf-8"))
    guidance = None
    if getattr(args, "guidance", None):
        guidance = json.loads(Path(args.guidance).read_text("utf-8"))
    return EvalService(store, solutions, salt=args.salt, pairs=pairs, guidance=guidance)


def _cmd_eval_serve(args) -> int:
    service = _make_service(args)
    server = service.make_server(port=args.port)
    host, port = server.server_address[:2]
    print(f"serving evaluation API on http://{host}:{port}", file=sys.stderr)

    def shutdown(signum, frame):
        threading.Thread(target=server.shutdown).start()

    signal.signal(signal.SIGINT, shutdown)
    signal.signal(signal.SIGTERM, shutdown)
    server.serve_forever()
    server.server_close()
    print("store flushed; server stopped", file=sys.stderr)
    return 0


def _cmd_eval_judge(args) -> int:
    service = _make_service(args)
    server = service.make_server(port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        host, port = server.server_address[:2]
        client = HttpEvalClient(f"http://{host}:{port}")
        backend = ScriptedMockBackend.from_file(args.script)
        models = [m.strip() for m in args.judge_models.split(",") if m.strip()]
        outcome = run_llm_judges(client, backend, models, store=service.store)
        print(
            json.dumps(
                {"choices": outcome.choices, "abstentions": outcome.abstentions,
                 "per_model": outcome.per_model},
                indent=2, sort_keys=True,
            )
        )
    finally:
        server.shutdown()
        server.server_close()
    return 0


def _cmd_report(args) -> int:
    store = EvaluationStore(args.store)
    if not store.load_judgments() and not store.load_pairwise():
        raise EmptyStore(f"no records in {args.store}")
    sealed = load_sealed_map(args.store)
    resolve = {blind: meta["method"] for blind, meta in sealed["entries"].items()}
    blind_problems = {blind: meta["problem_id"] for blind, meta in sealed["entries"].items()}
    report = build_report(
        store,
        resolve=resolve,
        blind_problems=blind_problems,
        methods=sealed["methods"],
        no_output=sealed.get("no_output", []),
    )
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
        return 0
    _print_text_report(report)
    return 0


def _print_text_report(report: dict) -> None:
    print("== Correctness (per method) ==")
    for method, entry in report["methods"].items():
        if "totals" not in entry:
            print(f"{method:<16} no judgments")
            continue
        totals = entry["totals"]
        problems = entry["problems_summary"]
        print(
            f"{method:<16} totals correct/inconclusive/incorrect: "
            f"{totals[0]}/{totals[1]}/{totals[2]}   #problems: "
            f"{problems[0]}/{problems[1]}/{problems[2]}"
        )
        for pid, row in entry["per_problem"].items():
            counts = row["counts"]
            rendered = "-" if counts is None else f"{counts[0]}/{counts[1]}/{counts[2]}"
            print(f"    problem {pid}: {rendered} -> {row['verdict']}")
        means = entry.get("fine_grained_means")
        if means:
            print(
                f"    means: accuracy {means['answer_accuracy']:.2f}, "
                f"logic {means['logical_correctness']:.2f}, "
                f"completeness {means['completeness']:.2f}, "
                f"clarity {means['clarity']:.2f}"
            )
    for title, key in (("Expert A-B", "expert_ab"), ("LLM A-B", "llm_ab")):
        section = report.get(key)
        if not section:
            continue
        print(f"== {title} ==")
        for method, stats in sorted(section.items(), key=lambda kv: kv[1]["rank"]):
            print(
                f"{method:<16} win rate {stats['win_rate']:.2f} "
                f"(rank {stats['rank']}, {stats['wins']}/{stats['comparisons']})"
            )
    if report.get("no_output"):
        print("== No released output ==")
        for item in report["no_output"]:
            print(f"{item['method']} problem {item['problem_id']}")


if __name__ == "__main__":
    sys.exit(main())
