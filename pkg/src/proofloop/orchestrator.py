"""Run engine: role workflows, round barriers, budget-gated termination,
and final proof selection.

Round 1 belongs to the initializer; in each later round every proposer
stages exactly one revised draft (mock mode), then every verifier stages one
structured feedback record, and the round commits at the barrier. A round
commits only if every workflow in it finished; a budget or time stop
mid-round discards the round's staging and leaves committed rounds intact.

Ablation flags reshape the schedule or disable individual module behaviors;
the memory presented to agents can be filtered (stateless / last-round-only)
while the full stream is still persisted for audit.
"""

from __future__ import annotations

import enum
import hashlib
import json
import re
from dataclasses import dataclass, field, asdict
from datetime import timedelta
from pathlib import Path
from typing import Optional, Sequence

from .backend import (
    BackendDescriptor,
    BackendKind,
    MeteredBackend,
    ModelCall,
    ScriptedMockBackend,
    LiveApiBackend,
    validate_cutoff,
)
from .budget import BudgetController, TerminalReason
from .clock import SystemClock
from .errors import (
    BackendUnavailable,
    Blocked,
    BudgetStop,
    ConfigInvalid,
    FetchFailed,
    NoCompliantProof,
    ScriptMiss,
)
from .gateway import RetrievalGateway, ScreenVerdict, SourcePolicy
from .memory import MemoryRecord, RecordDraft, Role, Segment, SharedMemory, agent_index
from .reasoning import (
    CommandmentReport,
    CommandmentRule,
    LiteratureSummary,
    analyze_problem,
    check_commandments,
    kb_check_assumptions,
    kb_query,
    load_bank,
    understand_literature,
)

from datetime import date as _date

ABLATION_FLAGS = frozenset(
    {
        "no-kb",
        "no-pa",
        "no-ls-lu",
        "no-irrelevance-filter",
        "no-structured-summary",
        "no-validity",
        "no-completeness",
        "no-rigor",
        "no-assumption-check",
        "stateless-memory",
        "last-round-only",
        "init-only",
        "init-plus-proposer",
    }
)

# proof-constraint ablations map to the judged rules they disable
_RULE_ABLATIONS = {
    "no-validity": CommandmentRule.GROUNDING,
    "no-completeness": CommandmentRule.GAP_FREE,
    "no-rigor": CommandmentRule.FAITHFULNESS,
}

_DURATION = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*(h|hours?|m|min|minutes?|s|sec|seconds?)\s*$")


def parse_duration(value) -> timedelta:
    if isinstance(value, timedelta):
        return value
    if isinstance(value, (int, float)):
        return timedelta(seconds=float(value))
    match = _DURATION.match(str(value))
    if not match:
        raise ConfigInvalid(f"unparseable duration: {value!r}")
    amount, unit = float(match.group(1)), match.group(2)[0]
    return timedelta(seconds=amount * {"h": 3600, "m": 60, "s": 1}[unit])


class RunStatus(enum.Enum):
    COMPLETED = "Completed"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    TIME_EXHAUSTED = "TimeExhausted"
    NO_COMPLIANT_PROOF = "NoCompliantProof"
    FAILED = "Failed"


@dataclass
class RunConfig:
    problem_path: str
    K_p: int = 3
    K_v: int = 3
    N: int = 5
    token_cap: int = 200_000
    time_cap: timedelta = timedelta(hours=6)
    seed: int = 0
    backend: dict = field(default_factory=lambda: {"kind": "mock"})
    policy_path: Optional[str] = None
    knowledge_bank_path: Optional[str] = None
    constructive_required: bool = False
    ablation_flags: set = field(default_factory=set)

    def validate(self) -> None:
        if self.K_p < 1:
            raise ConfigInvalid("K_p must be >= 1")
        if self.K_v < 0:
            raise ConfigInvalid("K_v must be >= 0")
        if self.N < 1:
            raise ConfigInvalid("N must be >= 1")
        if self.token_cap <= 0:
            raise ConfigInvalid("token_cap must be positive")
        if self.time_cap <= timedelta(0):
            raise ConfigInvalid("time_cap must be positive")
        unknown = set(self.ablation_flags) - ABLATION_FLAGS
        if unknown:
            raise ConfigInvalid(f"unknown ablation flags: {sorted(unknown)}")
        if not Path(self.problem_path).is_file():
            raise ConfigInvalid(f"problem file not found: {self.problem_path}")

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["time_cap"] = self.time_cap.total_seconds()
        doc["ablation_flags"] = sorted(self.ablation_flags)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ConfigInvalid(f"unknown config fields: {sorted(unknown)}")
        if "problem_path" not in doc:
            raise ConfigInvalid("config requires problem_path")
        kwargs = dict(doc)
        if "time_cap" in kwargs:
            kwargs["time_cap"] = parse_duration(kwargs["time_cap"])
        if "ablation_flags" in kwargs:
            kwargs["ablation_flags"] = set(kwargs["ablation_flags"])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        config_path = Path(path)
        try:
            doc = json.loads(config_path.read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
        config = cls.from_dict(doc)
        base = config_path.parent
        for attr in ("problem_path", "policy_path", "knowledge_bank_path"):
            value = getattr(config, attr)
            if value and not Path(value).is_absolute():
                setattr(config, attr, str(base / value))
        script = config.backend.get("script")
        if script and not Path(script).is_absolute():
            config.backend["script"] = str(base / script)
        return config

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass
class ProofCandidate:
    proof_text: str
    author_agent_id: str
    round: int
    commandment: CommandmentReport
    open_issue_count: int = 0

    @property
    def candidate_id(self) -> str:
        return f"{self.author_agent_id}@{self.round}"

    def to_dict(self) -> dict:
        return {
            "author_agent_id": self.author_agent_id,
            "round": self.round,
            "open_issue_count": self.open_issue_count,
            "commandment": self.commandment.to_dict(),
        }


@dataclass
class RunResult:
    status: RunStatus
    final_proof: Optional[ProofCandidate]
    rounds_executed: int
    tokens_used: int
    wall_time: timedelta

    def to_dict(self) -> dict:
        terminal = None
        if self.status in (RunStatus.BUDGET_EXHAUSTED, RunStatus.TIME_EXHAUSTED):
            terminal = self.status.value
        return {
            "status": self.status.value,
            "rounds_executed": self.rounds_executed,
            "tokens_used": self.tokens_used,
            "wall_time_seconds": self.wall_time.total_seconds(),
            "terminal_reason": terminal,
            "final_proof": self.final_proof.to_dict() if self.final_proof else None,
        }


def build_backend(descriptor_config: dict):
    kind = descriptor_config.get("kind", "mock")
    if kind in ("mock", BackendKind.SCRIPTED_MOCK.value):
        script = descriptor_config.get("script")
        if not script:
            raise ConfigInvalid("mock backend requires a script path")
        return ScriptedMockBackend.from_file(script)
    if kind in ("api", BackendKind.LIVE_API.value):
        cutoff = descriptor_config.get("training_cutoff")
        descriptor = BackendDescriptor(
            name=descriptor_config.get("name", "live-api"),
            kind=BackendKind.LIVE_API,
            training_cutoff=_date.fromisoformat(cutoff) if cutoff else None,
        )
        endpoint = descriptor_config.get("endpoint")
        if not endpoint:
            raise ConfigInvalid("api backend requires an endpoint")
        return LiveApiBackend(
            descriptor,
            endpoint=endpoint,
            api_key_env=descriptor_config.get("api_key_env"),
            auth_header=descriptor_config.get("auth_header", "Authorization"),
        )
    raise ConfigInvalid(f"unknown backend kind: {kind!r}")


def filter_agent_view(
    records: Sequence[MemoryRecord], flags, current_round: int
) -> list[MemoryRecord]:
    """Memory as presented to an agent; the full stream stays on disk."""
    if "stateless-memory" in flags:
        return [r for r in records if r.segment is Segment.PROBLEM_STATE]
    if "last-round-only" in flags:
        return [r for r in records if r.round == current_round - 1]
    return list(records)


def select_final(
    candidates: Sequence[ProofCandidate], feedback_records: Sequence[MemoryRecord]
) -> ProofCandidate:
    """Rank compliant candidates by verifier feedback and recency.

    An issue stays open while the latest recorded verdict for its rule on
    that candidate is Fail; a later clean re-check resolves it. Ordering:
    fewest open issues, then latest round, then agent id.
    """
    per_candidate: dict[str, list[tuple[int, dict, list[dict]]]] = {}
    for record in feedback_records:
        try:
            doc = json.loads(record.content)
        except json.JSONDecodeError:
            continue
        target = doc.get("target")
        if not target:
            continue
        per_candidate.setdefault(target, []).append(
            (record.sequence, doc.get("verdicts", {}), doc.get("issues", []))
        )

    ranked = []
    for candidate in candidates:
        entries = sorted(per_candidate.get(candidate.candidate_id, []))
        latest_verdict: dict[str, str] = {}
        issues_by_rule: dict[str, int] = {}
        for _, verdicts, issues in entries:
            for rule, verdict in verdicts.items():
                latest_verdict[rule] = verdict
            for issue in issues:
                rule = issue.get("rule", "")
                issues_by_rule[rule] = issues_by_rule.get(rule, 0) + 1
        open_count = sum(
            count
            for rule, count in issues_by_rule.items()
            if latest_verdict.get(rule, "Fail") == "Fail"
        )
        candidate.open_issue_count = open_count
        if candidate.commandment.all_pass():
            ranked.append(candidate)
    if not ranked:
        raise NoCompliantProof("no candidate passes all five commandment rules")
    ranked.sort(key=lambda c: (c.open_issue_count, -c.round, c.author_agent_id))
    return ranked[0]


class Orchestrator:
    """Executes one run against a shared memory store."""

    def __init__(self, config: RunConfig, run_dir, *, clock=None, backend=None,
                 transport=None):
        self.config = config
        self.run_dir = Path(run_dir)
        self.clock = clock or SystemClock()
        self.flags = set(config.ablation_flags)
        self.inner_backend = backend or build_backend(config.backend)
        self.controller = BudgetController(config.token_cap, config.time_cap)
        self.backend = MeteredBackend(self.inner_backend, self.controller, self.clock)
        self.transport = transport
        self.problem_text = ""
        self.policy: Optional[SourcePolicy] = None
        self.memory: Optional[SharedMemory] = None
        self.gateway: Optional[RetrievalGateway] = None
        self.representation = None

    # -- public entry points -------------------------------------------------

    def run(self) -> RunResult:
        self.config.validate()
        self.problem_text = Path(self.config.problem_path).read_text("utf-8")
        if self.config.policy_path:
            self.policy = SourcePolicy.load(self.config.policy_path)
            if self.policy.benchmark_release:
                validate_cutoff(self.backend.descriptor, self.policy.benchmark_release)
        self.memory = SharedMemory.create(
            self.run_dir,
            clock=self.clock,
            run_id=f"run-{self.config.config_hash()[:12]}",
            config_hash=self.config.config_hash(),
            backend_descriptor=self.backend.descriptor.to_dict(),
        )
        self.gateway = self._make_gateway()
        self._write_round_zero()
        return self._drive(first_round=1)

    def resume(self) -> RunResult:
        """Continue a run from its last committed round with the same config."""
        self.memory = SharedMemory.replay(self.run_dir, clock=self.clock)
        self.problem_text = Path(self.config.problem_path).read_text("utf-8")
        if self.config.policy_path:
            self.policy = SourcePolicy.load(self.config.policy_path)
        self.gateway = self._make_gateway()
        self.controller.restore(int(self.memory.manifest.get("tokens_used", 0)))
        rep_records = [
            r
            for r in self.memory.snapshot(Segment.PROBLEM_STATE)
            if r.content_kind == "problem-representation"
        ]
        if rep_records:
            from .reasoning import ProblemRepresentation

            self.representation = ProblemRepresentation.from_dict(
                json.loads(rep_records[-1].content)
            )
        return self._drive(first_round=self.memory.last_committed_round + 1)

    # -- round loop -----------------------------------------------------------

    def _drive(self, first_round: int) -> RunResult:
        status = RunStatus.COMPLETED
        last_round = 1 if "init-only" in self.flags else self.config.N
        try:
            for round_no in range(first_round, last_round + 1):
                interrupted = self._execute_round(round_no)
                if interrupted:
                    self.memory.discard_staged()
                    status = self._terminal_status()
                    break
                self.memory.commit_round(
                    round_no, manifest_updates={"tokens_used": self.controller.tokens_used}
                )
                self.controller.check_time(self.clock.now())
                if self.controller.terminal is not None:
                    status = self._terminal_status()
                    break
        except (BackendUnavailable, ScriptMiss, ValueError) as exc:
            self.memory.discard_staged()
            return self._finalize(RunStatus.FAILED, failure=str(exc))
        return self._finalize(status)

    def _execute_round(self, round_no: int) -> bool:
        """Stage one round's records; True if a budget/time stop interrupted it."""
        try:
            if round_no == 1:
                self._initializer_workflow()
            else:
                fresh: list[tuple[str, str]] = []
                view = filter_agent_view(self.memory.snapshot(), self.flags, round_no)
                for k in range(1, self.config.K_p + 1):
                    record = self._proposer_workflow(f"proposer-{k}", round_no, view)
                    doc = json.loads(record.content)
                    fresh.append((f"proposer-{k}@{round_no}", doc["text"]))
                if "init-plus-proposer" not in self.flags:
                    for k in range(1, self.config.K_v + 1):
                        self._verifier_workflow(f"verifier-{k}", round_no, view, fresh)
            return False
        except BudgetStop:
            return True

    def _terminal_status(self) -> RunStatus:
        if self.controller.terminal is TerminalReason.TIME_EXHAUSTED:
            return RunStatus.TIME_EXHAUSTED
        return RunStatus.BUDGET_EXHAUSTED

    def _finalize(self, status: RunStatus, failure: Optional[str] = None) -> RunResult:
        candidates = self._committed_candidates()
        feedback = [
            r
            for r in self.memory.snapshot(Segment.FEEDBACK_STATE)
            if r.content_kind == "feedback"
        ]
        final: Optional[ProofCandidate] = None
        if status is not RunStatus.FAILED and candidates:
            try:
                final = select_final(candidates, feedback)
            except NoCompliantProof:
                if status is RunStatus.COMPLETED:
                    status = RunStatus.NO_COMPLIANT_PROOF
        elif status is RunStatus.COMPLETED and not candidates:
            status = RunStatus.NO_COMPLIANT_PROOF
        result = RunResult(
            status=status,
            final_proof=final,
            rounds_executed=max(self.memory.last_committed_round, 0),
            tokens_used=self.controller.tokens_used,
            wall_time=self.controller.elapsed(self.clock.now()),
        )
        doc = result.to_dict()
        if failure:
            doc["failure"] = failure
        (self.run_dir / "result.json").write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n", "utf-8"
        )
        if final is not None:
            (self.run_dir / "final_proof.tex").write_text(final.proof_text, "utf-8")
        self.memory.close(status.value)
        return result

    # -- workflows -------------------------------------------------------------

    def _initializer_workflow(self) -> None:
        agent = "initializer"
        rep = analyze_problem(
            self.problem_text,
            self.backend,
            agent_id=agent,
            round_no=1,
            skip_analysis="no-pa" in self.flags,
        )
        self.representation = rep
        self._stage(Segment.PROBLEM_STATE, agent, Role.INITIALIZER, 1,
                    "problem-representation", rep.to_dict())

        if "no-ls-lu" not in self.flags:
            candidates = self.gateway.plan_candidates(rep, self.backend, agent_id=agent,
                                                      round_no=1)
            summary = LiteratureSummary()
            queries: list[str] = []
            kept_count = fetched_count = 0
            if candidates:
                base = rep.subgoals[0] if rep.subgoals else rep.formal_statement
                queries = self.gateway.expand_query(base, rep, self.backend,
                                                    agent_id=agent, round_no=1)
                urls = self.gateway.locate_sources(queries, self.backend,
                                                   agent_id=agent, round_no=1)
                markers = list(self.policy.leakage_markers) if self.policy else []
                docs = []
                for url in urls:
                    try:
                        doc = self.gateway.fetch(
                            url,
                            screener=lambda d: self.gateway.screen(d, markers, self.backend),
                        )
                    except (Blocked, FetchFailed):
                        continue
                    fetched_count += 1
                    if doc.screen_verdict is ScreenVerdict.KEPT:
                        docs.append(doc)
                kept_count = len(docs)
                summary = understand_literature(
                    docs,
                    rep,
                    self.backend,
                    agent_id=agent,
                    round_no=1,
                    filter_enabled="no-irrelevance-filter" not in self.flags,
                    organize_enabled="no-structured-summary" not in self.flags,
                )
            self._stage(
                Segment.LITERATURE_CONTEXT, agent, Role.INITIALIZER, 1, "literature-summary",
                {
                    "candidates": [
                        {"title": c.title_guess, "venue": c.venue_guess, "rationale": c.rationale}
                        for c in candidates
                    ],
                    "queries": queries,
                    "fetched": fetched_count,
                    "kept": kept_count,
                    "summary": summary.to_dict(),
                },
            )

        knowledge_section = ""
        if "no-kb" not in self.flags:
            bank = load_bank(self.config.knowledge_bank_path)
            hits = kb_query(rep, bank)[:5]
            used, excluded = [], []
            check_enabled = "no-assumption-check" not in self.flags
            for entry in hits:
                if not check_enabled:
                    used.append(entry)
                    continue
                result = kb_check_assumptions(entry, rep, self.backend,
                                              agent_id=agent, round_no=1)
                if result.satisfied:
                    used.append(entry)
                else:
                    excluded.append({"id": entry.id, "unmet": result.unmet})
            self._stage(
                Segment.KNOWLEDGE_ENTRIES, agent, Role.INITIALIZER, 1, "knowledge-entry",
                {
                    "used": [e.to_dict() for e in used],
                    "excluded": excluded,
                    "assumption_checked": check_enabled,
                },
            )
            knowledge_section = "\n".join(e.statement for e in used)

        draft = self._ask(agent, 1, "draft-proof", [
            ("problem", rep.formal_statement),
            ("subgoals", "\n".join(rep.subgoals)),
            ("knowledge", knowledge_section),
        ])
        refined = self._ask(agent, 1, "refine-proof", [
            ("problem", rep.formal_statement),
            ("draft", draft),
        ])
        text, report, regenerations = self._self_check(agent, 1, refined or draft)
        self._stage_proof(agent, Role.INITIALIZER, 1, text, report, [], regenerations)

    def _proposer_workflow(self, agent: str, round_no: int,
                           view: Sequence[MemoryRecord]) -> MemoryRecord:
        drafts = [
            r for r in view
            if r.segment is Segment.PROOF_STATE and r.content_kind == "proof-draft"
        ]
        latest_text = self.problem_text
        if drafts:
            latest_text = json.loads(drafts[-1].content)["text"]
        feedback = [
            r for r in view
            if r.segment is Segment.FEEDBACK_STATE and r.content_kind == "feedback"
        ]
        feedback_digest = "\n".join(r.content for r in feedback)

        gaps = self._ask(agent, round_no, "identify-gaps", [
            ("problem", self._problem_statement()),
            ("draft", latest_text),
            ("feedback", feedback_digest),
        ])
        revision = self._ask(agent, round_no, "propose-revision", [
            ("problem", self._problem_statement()),
            ("draft", latest_text),
            ("gaps", gaps),
            ("feedback", feedback_digest),
        ])
        text, report, regenerations = self._self_check(agent, round_no, revision)
        based_on = [{"sequence": r.sequence, "round": r.round} for r in feedback]
        record = self._stage_proof(agent, Role.PROPOSER, round_no, text, report,
                                   based_on, regenerations)
        if not report.all_pass():
            # regeneration budget spent without a compliant draft: system notes it
            self._stage(
                Segment.FEEDBACK_STATE, "system", Role.SYSTEM, round_no,
                "regeneration-failure",
                {
                    "target": f"{agent}@{round_no}",
                    "verdicts": report.to_dict()["verdicts"],
                    "attempts": regenerations,
                },
            )
        return record

    def _verifier_workflow(self, agent: str, round_no: int, view: Sequence[MemoryRecord],
                           fresh: list[tuple[str, str]]) -> MemoryRecord:
        target_id, target_text = fresh[(agent_index(agent) - 1) % len(fresh)]
        report = check_commandments(
            target_text,
            self._problem_statement(),
            self.backend,
            agent_id=agent,
            round_no=round_no,
            constructive_required=self.config.constructive_required,
            disabled_rules=self._disabled_rules(),
        )
        return self._stage(
            Segment.FEEDBACK_STATE, agent, Role.VERIFIER, round_no, "feedback",
            {
                "target": target_id,
                "verdicts": report.to_dict()["verdicts"],
                "issues": [i.to_dict() for i in report.issues],
            },
        )

    # -- helpers ----------------------------------------------------------------

    def _make_gateway(self) -> RetrievalGateway:
        kwargs = dict(
            policy=self.policy,
            audit_path=self.run_dir / "retrieval_audit.log",
            clock=self.clock,
            benchmark_mode=self.policy is not None,
        )
        if self.transport is not None:
            kwargs["transport"] = self.transport
        return RetrievalGateway(**kwargs)

    def _write_round_zero(self) -> None:
        self._stage(Segment.PROBLEM_STATE, "system", Role.SYSTEM, 0, "run-config",
                    self.config.to_dict())
        self._stage(Segment.PROBLEM_STATE, "system", Role.SYSTEM, 0, "backend-descriptor",
                    self.backend.descriptor.to_dict())
        self.memory.commit_round(0)

    def _problem_statement(self) -> str:
        if self.representation is not None:
            return self.representation.formal_statement
        return self.problem_text

    def _disabled_rules(self):
        return {rule for flag, rule in _RULE_ABLATIONS.items() if flag in self.flags}

    def _self_check(self, agent: str, round_no: int, text: str):
        """Commandment check with at most 3 regenerations on failure."""
        report = check_commandments(
            text, self._problem_statement(), self.backend,
            agent_id=agent, round_no=round_no,
            constructive_required=self.config.constructive_required,
            disabled_rules=self._disabled_rules(),
        )
        regenerations = 0
        while not report.all_pass() and regenerations < 3:
            regenerations += 1
            text = self._ask(agent, round_no, "regenerate-proof", [
                ("problem", self._problem_statement()),
                ("draft", text),
                ("issues", json.dumps([i.to_dict() for i in report.issues])),
            ])
            report = check_commandments(
                text, self._problem_statement(), self.backend,
                agent_id=agent, round_no=round_no,
                constructive_required=self.config.constructive_required,
                disabled_rules=self._disabled_rules(),
            )
        return text, report, regenerations

    def _ask(self, agent: str, round_no: int, step: str,
             sections: list[tuple[str, str]]) -> str:
        reply = self.backend.complete(
            ModelCall(
                caller_agent_id=agent,
                round=round_no,
                step_label=step,
                prompt_sections=sections,
            )
        )
        return reply.text

    def _stage(self, segment: Segment, agent: str, role: Role, round_no: int,
               kind: str, content: dict) -> MemoryRecord:
        return self.memory.append(
            RecordDraft(
                segment=segment,
                agent_id=agent,
                role=role,
                round=round_no,
                content_kind=kind,
                content=json.dumps(content, sort_keys=True, separators=(",", ":")),
            ),
            acting_role=role,
        )

    def _stage_proof(self, agent: str, role: Role, round_no: int, text: str,
                     report: CommandmentReport, based_on: list[dict],
                     regenerations: int) -> MemoryRecord:
        return self._stage(
            Segment.PROOF_STATE, agent, role, round_no, "proof-draft",
            {
                "text": text,
                "author": agent,
                "round": round_no,
                "commandment": report.to_dict(),
                "based_on_feedback": based_on,
                "regenerations": regenerations,
            },
        )

    def _committed_candidates(self) -> list[ProofCandidate]:
        candidates = []
        for record in self.memory.snapshot(Segment.PROOF_STATE):
            if record.content_kind != "proof-draft":
                continue
            doc = json.loads(record.content)
            candidates.append(
                ProofCandidate(
                    proof_text=doc["text"],
                    author_agent_id=doc["author"],
                    round=doc["round"],
                    commandment=CommandmentReport.from_dict(doc["commandment"]),
                )
            )
        return candidates


def run(config: RunConfig, run_dir, *, clock=None, backend=None, transport=None) -> RunResult:
    return Orchestrator(config, run_dir, clock=clock, backend=backend,
                        transport=transport).run()


def resume(run_dir, *, backend=None, clock=None, transport=None) -> RunResult:
    """Reload config from the run's round-0 echo and continue the schedule."""
    memory = SharedMemory.replay(run_dir)
    config_records = [
        r for r in memory.snapshot(Segment.PROBLEM_STATE) if r.content_kind == "run-config"
    ]
    if not config_records:
        raise ConfigInvalid(f"{run_dir} has no round-0 config echo; cannot resume")
    config = RunConfig.from_dict(json.loads(config_records[0].content))
    orchestrator = Orchestrator(config, run_dir, clock=clock, backend=backend,
                                transport=transport)
    return orchestrator.resume()
