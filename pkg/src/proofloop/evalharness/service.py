"""Evaluation HTTP API.

Endpoints (the normative UI contract):
    GET  /problems                      problem ids + optional guidance
    GET  /pair?problem=&evaluator=      anonymized pair in randomized order
    POST /judgment                      one correctness + fine-grained record
    POST /choice                        one forced A-B choice
    GET  /report                        aggregate report (admin surface)

Evaluator-facing responses never contain method names: texts are redacted at
load time and the blind-id reverse map is written to a sealed server-side
file only. Task assignment is deterministic per (evaluator, problem): the
next pair is the first one in the plan the evaluator has not answered, so a
re-fetch before answering serves the same pair.
"""

from __future__ import annotations

import hashlib
import json
import threading
import urllib.parse
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional, Sequence

from ..clock import SystemClock
from ..errors import NoComparisons, UnknownSolution
from .aggregate import compute_ab, compute_ab_llm, summarize_method
from .blinding import anonymize, make_pair
from .records import Chosen, CorrectnessLabel, EvaluatorKind, JudgmentRecord, PairwiseRecord
from .store import EvaluationStore


@dataclass(frozen=True)
class SolutionEntry:
    method: str
    problem_id: int
    path: str
    text: str


def load_solutions_manifest(path) -> list[SolutionEntry]:
    """Manifest: JSON array of {method, problem_id, path}; paths are relative
    to the manifest file."""
    manifest_path = Path(path)
    doc = json.loads(manifest_path.read_text("utf-8"))
    entries = []
    for item in doc:
        solution_path = Path(item["path"])
        if not solution_path.is_absolute():
            solution_path = manifest_path.parent / solution_path
        entries.append(
            SolutionEntry(
                method=item["method"],
                problem_id=int(item["problem_id"]),
                path=str(solution_path),
                text=solution_path.read_text("utf-8"),
            )
        )
    return entries


class EvalService:
    """Blinding, task assignment, validation, and aggregation behind the API."""

    def __init__(
        self,
        store: EvaluationStore,
        solutions: Sequence[SolutionEntry],
        *,
        salt: str = "proofloop-eval",
        pairs: Optional[Sequence[dict]] = None,
        guidance: Optional[dict] = None,
        clock=None,
    ):
        self.store = store
        self.salt = salt
        self.clock = clock or SystemClock()
        self.guidance = {int(k): v for k, v in (guidance or {}).items()}
        self.methods: list[str] = []
        for entry in solutions:
            if entry.method not in self.methods:
                self.methods.append(entry.method)
        self.problems = sorted({entry.problem_id for entry in solutions})

        self._texts: dict[int, dict[str, str]] = {}
        for entry in solutions:
            self._texts.setdefault(entry.problem_id, {})[entry.method] = entry.text

        self._presented: dict[str, str] = {}  # blind id -> redacted text
        self._reverse: dict[str, dict] = {}  # blind id -> {method, problem_id}
        for pid, per_method in self._texts.items():
            presented, reverse = anonymize(per_method, salt, pid, redact_names=self.methods)
            self._presented.update(presented)
            for blind, method in reverse.items():
                self._reverse[blind] = {"method": method, "problem_id": pid}
        self._blind_of: dict[tuple[str, int], str] = {
            (meta["method"], meta["problem_id"]): blind
            for blind, meta in self._reverse.items()
        }

        self.no_output: list[dict] = []
        if pairs is not None:
            self._plan = self._explicit_plan(pairs)
        else:
            self._plan = self._default_plan()

        self._pending: dict[str, dict] = {}
        self._lock = threading.Lock()
        self._write_sealed_map()

    # -- pairing plan --------------------------------------------------------

    def _default_plan(self) -> dict[int, list[tuple[str, str]]]:
        """First manifest method versus each other method, per problem.

        Problems where either side released nothing are excluded and noted.
        """
        plan: dict[int, list[tuple[str, str]]] = {}
        primary = self.methods[0] if self.methods else None
        for pid in self.problems:
            available = self._texts.get(pid, {})
            for method in self.methods:
                if method not in available:
                    self.no_output.append({"method": method, "problem_id": pid})
            if primary is None or primary not in available:
                continue
            plan[pid] = [
                (primary, other)
                for other in self.methods
                if other != primary and other in available
            ]
        return plan

    def _explicit_plan(self, pairs: Sequence[dict]) -> dict[int, list[tuple[str, str]]]:
        plan: dict[int, list[tuple[str, str]]] = {}
        for item in pairs:
            pid = int(item["problem_id"])
            pair = (item["method_a"], item["method_b"])
            for method in pair:
                if method not in self._texts.get(pid, {}):
                    raise UnknownSolution(f"method {method!r} has no solution for problem {pid}")
            plan.setdefault(pid, []).append(pair)
        return plan

    # -- endpoints ------------------------------------------------------------

    def problems_payload(self) -> dict:
        return {
            "problems": [
                {"problem_id": pid, "guidance": self.guidance.get(pid)}
                for pid in self.problems
            ]
        }

    def next_pair(self, problem_id: int, evaluator_id: str) -> Optional[dict]:
        plan = self._plan.get(problem_id, [])
        answered = sum(
            1
            for r in self.store.load_pairwise()
            if r.problem_id == problem_id and r.evaluator_id == evaluator_id
        )
        if answered >= len(plan):
            return None
        method_a, method_b = plan[answered]
        blind_a = self._blind_of[(method_a, problem_id)]
        blind_b = self._blind_of[(method_b, problem_id)]
        seed_digest = hashlib.blake2b(
            f"{self.salt}|{evaluator_id}|{problem_id}|{answered}".encode("utf-8"),
            digest_size=4,
        ).digest()
        order = make_pair(problem_id, blind_a, blind_b, int.from_bytes(seed_digest, "big"))
        pair_id = hashlib.blake2b(
            f"{self.salt}|pair|{evaluator_id}|{problem_id}|{answered}".encode("utf-8"),
            digest_size=6,
        ).hexdigest()
        with self._lock:
            self._pending[pair_id] = {
                "problem_id": problem_id,
                "first": order.first,
                "second": order.second,
                "evaluator_id": evaluator_id,
            }
        return {
            "pair_id": pair_id,
            "problem_id": problem_id,
            "first": {"blind_id": order.first, "text": self._presented[order.first]},
            "second": {"blind_id": order.second, "text": self._presented[order.second]},
            "guidance": self.guidance.get(problem_id),
        }

    def submit_judgment(self, doc: dict) -> dict:
        blind = doc.get("blind_solution_id")
        if blind not in self._reverse:
            raise ValueError(f"unknown blind_solution_id {blind!r}")
        try:
            label = CorrectnessLabel(doc.get("label"))
        except ValueError:
            raise ValueError(f"label must be one of {[l.value for l in CorrectnessLabel]}")
        record = JudgmentRecord(
            problem_id=int(doc["problem_id"]),
            blind_solution_id=blind,
            evaluator_id=str(doc["evaluator_id"]),
            label=label,
            answer_accuracy=float(doc["answer_accuracy"]),
            logical_correctness=_int_field(doc, "logical_correctness"),
            completeness=_int_field(doc, "completeness"),
            clarity=_int_field(doc, "clarity"),
            submitted_at=self.clock.now(),
        )
        record.validate()
        if record.problem_id != self._reverse[blind]["problem_id"]:
            raise ValueError("problem_id does not match the judged solution")
        stored = self.store.add_judgment(record, doc.get("idempotency_key"))
        return {"stored": stored, "duplicate": not stored}

    def submit_choice(self, doc: dict) -> dict:
        pair_id = doc.get("pair_id")
        with self._lock:
            context = self._pending.get(pair_id)
        if context is None:
            raise ValueError(f"unknown or expired pair_id {pair_id!r}")
        if doc.get("evaluator_id") != context["evaluator_id"]:
            raise ValueError("evaluator_id does not match the served pair")
        try:
            chosen = Chosen(doc.get("chosen"))
        except ValueError:
            raise ValueError("chosen must be 'First' or 'Second'")
        kind = EvaluatorKind(doc.get("evaluator_kind", "Expert"))
        record = PairwiseRecord(
            problem_id=context["problem_id"],
            blind_id_first=context["first"],
            blind_id_second=context["second"],
            chosen=chosen,
            evaluator_id=context["evaluator_id"],
            evaluator_kind=kind,
            judge_model=doc.get("judge_model"),
        )
        stored = self.store.add_choice(record, doc.get("idempotency_key"))
        return {"stored": stored, "duplicate": not stored}

    def report(self) -> dict:
        return build_report(
            self.store,
            resolve={blind: meta["method"] for blind, meta in self._reverse.items()},
            blind_problems={blind: meta["problem_id"] for blind, meta in self._reverse.items()},
            methods=self.methods,
            no_output=self.no_output,
        )

    # -- sealed map -----------------------------------------------------------

    def _write_sealed_map(self) -> None:
        doc = {
            "methods": self.methods,
            "entries": self._reverse,
            "no_output": self.no_output,
        }
        path = self.store.directory / "blind_map.json"
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", "utf-8")
        path.chmod(0o600)

    # -- HTTP -----------------------------------------------------------------

    def make_server(self, port: int = 0, host: str = "127.0.0.1") -> ThreadingHTTPServer:
        service = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):  # quiet server
                pass

            def _send(self, status: int, payload: dict) -> None:
                body = json.dumps(payload).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                parsed = urllib.parse.urlsplit(self.path)
                query = urllib.parse.parse_qs(parsed.query)
                if parsed.path == "/problems":
                    self._send(200, service.problems_payload())
                elif parsed.path == "/pair":
                    try:
                        problem = int(query.get("problem", [""])[0])
                        evaluator = query.get("evaluator", [""])[0]
                        if not evaluator:
                            raise ValueError("evaluator is required")
                    except ValueError as exc:
                        self._send(422, {"error": str(exc)})
                        return
                    payload = service.next_pair(problem, evaluator)
                    if payload is None:
                        self._send(404, {"error": "no pairs remaining", "exhausted": True})
                    else:
                        self._send(200, payload)
                elif parsed.path == "/report":
                    try:
                        self._send(200, service.report())
                    except Exception as exc:
                        self._send(422, {"error": str(exc)})
                else:
                    self._send(404, {"error": "unknown endpoint"})

            def do_POST(self):
                length = int(self.headers.get("Content-Length", "0"))
                try:
                    doc = json.loads(self.rfile.read(length).decode("utf-8"))
                except json.JSONDecodeError:
                    self._send(400, {"error": "body is not valid JSON"})
                    return
                try:
                    if self.path == "/judgment":
                        self._send(200, service.submit_judgment(doc))
                    elif self.path == "/choice":
                        self._send(200, service.submit_choice(doc))
                    else:
                        self._send(404, {"error": "unknown endpoint"})
                except (ValueError, KeyError, TypeError) as exc:
                    self._send(422, {"error": str(exc)})

        return ThreadingHTTPServer((host, port), Handler)


def _int_field(doc: dict, name: str):
    value = doc[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{name} must be an integer in 0..5")
    return value


def load_sealed_map(store_dir) -> dict:
    path = Path(store_dir) / "blind_map.json"
    if not path.exists():
        raise FileNotFoundError(f"no sealed blind map at {path}")
    return json.loads(path.read_text("utf-8"))


def build_report(store: EvaluationStore, *, resolve: dict, blind_problems: dict,
                 methods: Sequence[str], no_output: Sequence[dict] = ()) -> dict:
    """Aggregate everything in the store into one report document."""
    judgments = store.load_judgments()
    pairwise = store.load_pairwise()
    per_method: dict[str, dict] = {}
    for method in methods:
        mine = [j for j in judgments if resolve.get(j.blind_solution_id) == method]
        entry: dict = {"judgments": len(mine)}
        if mine:
            summary = summarize_method(mine)
            entry.update(summary.to_dict())
        per_method[method] = entry

    expert_records = [p for p in pairwise if p.evaluator_kind is EvaluatorKind.EXPERT]
    llm_records = [p for p in pairwise if p.evaluator_kind is EvaluatorKind.LLM_JUDGE]

    def ab_section(records, compute):
        compared = sorted(
            {resolve[r.blind_id_first] for r in records}
            | {resolve[r.blind_id_second] for r in records}
        )
        if not records or not compared:
            return None
        try:
            stats = compute(records, compared, resolve)
        except NoComparisons:
            return None
        return {m: s.to_dict() for m, s in stats.items()}

    return {
        "methods": per_method,
        "expert_ab": ab_section(expert_records, compute_ab),
        "llm_ab": ab_section(llm_records, compute_ab_llm),
        "no_output": list(no_output),
        "counts": {
            "judgments": len(judgments),
            "pairwise": len(pairwise),
            "abstentions": len(store.load_abstentions()),
        },
    }
