"""Retrieval gateway: the sole network egress for literature work.

Candidate planning and query expansion happen before any retrieval, policy
patterns (block wins over allow) are evaluated before any network contact,
fetched text is screened for solution leakage, and every fetch attempt —
blocked, fetched, or failed — produces exactly one audit line.

Pattern language: shell-style globs over the scheme-stripped host+path,
matched case-insensitively. Leakage markers are case-insensitive substrings;
a marker may contain "*" to require ordered co-occurrence ("benchmark*solution").
"""

from __future__ import annotations

import enum
import fnmatch
import json
import threading
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from datetime import date, datetime
from pathlib import Path
from typing import Callable, Optional, Sequence

from .backend import ModelCall, ModelReply
from .clock import SystemClock, to_rfc3339
from .errors import Blocked, FetchFailed, InvalidQuery, PolicyMissing
from .parsing import parse_string_list, try_json


class ScreenVerdict(enum.Enum):
    KEPT = "Kept"
    DROPPED_LEAKAGE = "DroppedLeakage"
    DROPPED_IRRELEVANT = "DroppedIrrelevant"


@dataclass(frozen=True)
class SourcePolicy:
    allow_patterns: tuple[str, ...] = ()
    block_patterns: tuple[str, ...] = ()
    benchmark_release: Optional[date] = None
    leakage_markers: tuple[str, ...] = ()  # content screening, beyond URL blocking

    @classmethod
    def load(cls, path) -> "SourcePolicy":
        doc = json.loads(Path(path).read_text("utf-8"))
        release = doc.get("benchmark_release")
        return cls(
            allow_patterns=tuple(doc.get("allow", [])),
            block_patterns=tuple(doc.get("block", [])),
            benchmark_release=date.fromisoformat(release) if release else None,
            leakage_markers=tuple(doc.get("leakage_markers", [])),
        )


@dataclass(frozen=True)
class CandidateReference:
    title_guess: str
    venue_guess: Optional[str]
    rationale: str
    generated_before_retrieval: bool = True


@dataclass
class RetrievedDocument:
    url: str
    fetched_at: datetime
    body: str
    screen_verdict: Optional[ScreenVerdict] = None


def strip_scheme(url: str) -> str:
    parts = urllib.parse.urlsplit(url)
    host_path = (parts.netloc + parts.path) if parts.netloc else parts.path
    if parts.query:
        host_path += "?" + parts.query
    return host_path


def match_pattern(patterns: Sequence[str], url: str) -> Optional[str]:
    target = strip_scheme(url).lower()
    for pattern in patterns:
        if fnmatch.fnmatchcase(target, pattern.lower()):
            return pattern
    return None


def marker_hits(body: str, marker: str) -> bool:
    lowered = body.lower()
    marker = marker.lower()
    if "*" in marker:
        return fnmatch.fnmatchcase(lowered, f"*{marker}*")
    return marker in lowered


def urllib_transport(url: str, timeout: float = 30.0) -> str:
    try:
        with urllib.request.urlopen(url, timeout=timeout) as response:
            return response.read().decode("utf-8", errors="replace")
    except (urllib.error.URLError, OSError) as exc:
        raise FetchFailed(f"fetch of {url} failed: {exc}") from exc


class RetrievalGateway:
    """Policy-enforcing retrieval with a complete audit trail.

    In benchmark mode a missing policy refuses all egress (fail closed). The
    gateway holds no cross-run cache; construct one per run.
    """

    def __init__(
        self,
        policy: Optional[SourcePolicy] = None,
        *,
        audit_path=None,
        transport: Optional[Callable[[str], str]] = None,
        clock=None,
        benchmark_mode: bool = False,
    ):
        self.policy = policy
        self.audit_path = Path(audit_path) if audit_path else None
        self.transport = transport or urllib_transport
        self.clock = clock or SystemClock()
        self.benchmark_mode = benchmark_mode
        self._audit_lock = threading.Lock()
        self._audit: list[dict] = []
        self._candidates: list[CandidateReference] = []

    # -- pre-retrieval planning (no network) --------------------------------

    def plan_candidates(self, representation, backend, *, agent_id: str = "initializer",
                        round_no: int = 0) -> list[CandidateReference]:
        """Guess references worth studying before touching the network.

        Repeated calls within a round accumulate, de-duplicated by title.
        Reply format: JSON array of {title, venue, rationale} or plain lines.
        """
        reply = backend.complete(
            ModelCall(
                caller_agent_id=agent_id,
                round=round_no,
                step_label="plan-candidates",
                prompt_sections=self._representation_sections(representation),
            )
        )
        parsed = self._parse_candidates(reply)
        for item in parsed:
            if not any(
                c.title_guess.lower() == item.title_guess.lower() for c in self._candidates
            ):
                self._candidates.append(item)
        self._audit_write_raw({
            "ts": to_rfc3339(self.clock.now()),
            "decision": "planned",
            "titles": [c.title_guess for c in parsed],
        })
        return list(self._candidates)

    def expand_query(self, base: str, representation, backend, *, agent_id: str = "initializer",
                     round_no: int = 0) -> list[str]:
        """Base query plus alternative formulations, distinct and non-empty."""
        if not base or not base.strip():
            raise InvalidQuery("base query is empty")
        reply = backend.complete(
            ModelCall(
                caller_agent_id=agent_id,
                round=round_no,
                step_label="expand-query",
                prompt_sections=[("base-query", base)]
                + list(self._representation_sections(representation)),
            )
        )
        queries = [base.strip()]
        for variant in parse_string_list(reply.text):
            if variant and variant not in queries:
                queries.append(variant)
        self._audit_write_raw({
            "ts": to_rfc3339(self.clock.now()),
            "decision": "expanded",
            "queries": queries,
        })
        return queries

    def locate_sources(self, queries: Sequence[str], backend, *, agent_id="initializer",
                       round_no: int = 0) -> list[str]:
        """Resolve queries to candidate URLs (scripted in mock mode)."""
        reply = backend.complete(
            ModelCall(
                caller_agent_id=agent_id,
                round=round_no,
                step_label="locate-sources",
                prompt_sections=[("queries", "\n".join(queries))],
            )
        )
        urls = []
        for url in parse_string_list(reply.text):
            if url not in urls:
                urls.append(url)
        self._audit_write_raw({
            "ts": to_rfc3339(self.clock.now()),
            "decision": "located",
            "queries": list(queries),
            "urls": urls,
        })
        return urls

    # -- retrieval ----------------------------------------------------------

    def fetch(self, url: str, policy: Optional[SourcePolicy] = None,
              screener: Optional[Callable[["RetrievedDocument"], ScreenVerdict]] = None
              ) -> RetrievedDocument:
        """Fetch one URL through the policy; one audit line per attempt.

        When a screener is supplied, the document is screened inline and the
        audit line carries the verdict.
        """
        policy = policy or self.policy
        if policy is None and self.benchmark_mode:
            self._audit_write(url, "refused", None, None)
            raise PolicyMissing("benchmark mode requires a source policy; refusing open egress")
        parts = urllib.parse.urlsplit(url)
        if not parts.scheme or not (parts.netloc or parts.path):
            raise FetchFailed(f"not a valid URL: {url!r}")
        if policy is not None:
            blocked_by = match_pattern(policy.block_patterns, url)
            if blocked_by is not None:
                self._audit_write(url, "blocked", blocked_by, None)
                raise Blocked(url, blocked_by)
            if policy.allow_patterns:
                allowed_by = match_pattern(policy.allow_patterns, url)
                if allowed_by is None:
                    self._audit_write(url, "blocked", "<not-on-allowlist>", None)
                    raise Blocked(url, "<not-on-allowlist>")
        try:
            body = self.transport(url)
        except FetchFailed:
            self._audit_write(url, "failed", None, None)
            raise
        doc = RetrievedDocument(url=url, fetched_at=self.clock.now(), body=body)
        if screener is not None:
            doc.screen_verdict = screener(doc)
            self._audit_write(url, "fetched", None, doc.screen_verdict.value)
        else:
            self._audit_write(url, "fetched", None, None)
        return doc

    def screen(self, doc: RetrievedDocument, leakage_markers: Sequence[str], backend
               ) -> ScreenVerdict:
        """Leakage marker pre-filter, then backend classification, failing closed."""
        for marker in leakage_markers:
            if marker_hits(doc.body, marker):
                doc.screen_verdict = ScreenVerdict.DROPPED_LEAKAGE
                return doc.screen_verdict
        try:
            reply = backend.complete(
                ModelCall(
                    caller_agent_id="screener",
                    round=0,
                    step_label="screen-document",
                    prompt_sections=[("url", doc.url), ("body", doc.body[:4000])],
                )
            )
            verdict = self._parse_screen_reply(reply)
        except Exception:
            verdict = ScreenVerdict.DROPPED_LEAKAGE
        doc.screen_verdict = verdict
        return verdict

    # -- audit ---------------------------------------------------------------

    FETCH_DECISIONS = frozenset({"blocked", "fetched", "failed", "refused"})

    def audit_entries(self, fetch_only: bool = False) -> list[dict]:
        with self._audit_lock:
            entries = list(self._audit)
        if fetch_only:
            entries = [e for e in entries if e["decision"] in self.FETCH_DECISIONS]
        return entries

    def untraced_fetches(self) -> list[str]:
        """Fetched URLs with no earlier planning trace (located entry).

        Empty for any flow that plans before retrieving, which benchmark mode
        requires.
        """
        located: set[str] = set()
        offenders = []
        for entry in self.audit_entries():
            if entry["decision"] == "located":
                located.update(entry.get("urls", []))
            elif entry["decision"] == "fetched" and entry["url"] not in located:
                offenders.append(entry["url"])
        return offenders

    def _audit_write(self, url, decision, matched_pattern, verdict) -> None:
        self._audit_write_raw({
            "ts": to_rfc3339(self.clock.now()),
            "url": url,
            "decision": decision,
            "matched_pattern": matched_pattern,
            "verdict": verdict,
        })

    def _audit_write_raw(self, entry: dict) -> None:
        with self._audit_lock:
            self._audit.append(entry)
            if self.audit_path is not None:
                self.audit_path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.audit_path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry, sort_keys=True) + "\n")

    # -- parsing -------------------------------------------------------------

    @staticmethod
    def _representation_sections(representation) -> list[tuple[str, str]]:
        sections = []
        statement = getattr(representation, "formal_statement", None)
        if statement:
            sections.append(("problem", statement))
        subgoals = getattr(representation, "subgoals", None)
        if subgoals:
            sections.append(("subgoals", "\n".join(subgoals)))
        return sections

    @staticmethod
    def _parse_candidates(reply: ModelReply) -> list[CandidateReference]:
        doc = try_json(reply.text)
        candidates = []
        if isinstance(doc, list):
            for item in doc:
                if isinstance(item, dict) and item.get("title"):
                    candidates.append(
                        CandidateReference(
                            title_guess=str(item["title"]).strip(),
                            venue_guess=item.get("venue"),
                            rationale=str(item.get("rationale", "")),
                        )
                    )
                elif isinstance(item, str) and item.strip():
                    candidates.append(
                        CandidateReference(title_guess=item.strip(), venue_guess=None, rationale="")
                    )
            return candidates
        for line in parse_string_list(reply.text):
            candidates.append(CandidateReference(title_guess=line, venue_guess=None, rationale=""))
        return candidates

    @staticmethod
    def _parse_screen_reply(reply: ModelReply) -> ScreenVerdict:
        text = reply.text.lower()
        if "leak" in text:
            return ScreenVerdict.DROPPED_LEAKAGE
        if "irrelevant" in text:
            return ScreenVerdict.DROPPED_IRRELEVANT
        if "keep" in text or "kept" in text or "relevant" in text:
            return ScreenVerdict.KEPT
        return ScreenVerdict.DROPPED_LEAKAGE
