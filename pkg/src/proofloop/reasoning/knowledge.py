"""Cheat-sheet knowledge bank: short canonical results with explicit assumptions.

Retrieval is deterministic keyword/tag matching; assumption checking is
backend-judged and fails closed, so an entry whose conditions cannot be
verified is never used.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from ..backend import ModelCall
from ..errors import BackendUnavailable
from ..parsing import try_json

MAX_STATEMENT_CHARS = 2000

STOP_WORDS = frozenset(
    """that this with from have such then there these those what when where which
    while every each some only more than into over under been being will must
    also show prove given find does exist Such suppose assume let denote""".lower().split()
)

_TOKEN = re.compile(r"[a-zA-Z]{4,}")


@dataclass(frozen=True)
class KnowledgeEntry:
    id: str
    statement: str
    assumptions: tuple[str, ...] = ()
    tags: tuple[str, ...] = ()
    source: str = ""

    def __post_init__(self):
        if len(self.statement) > MAX_STATEMENT_CHARS:
            raise ValueError(f"entry {self.id}: statement exceeds {MAX_STATEMENT_CHARS} chars")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "statement": self.statement,
            "assumptions": list(self.assumptions),
            "tags": list(self.tags),
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "KnowledgeEntry":
        return cls(
            id=str(doc["id"]),
            statement=str(doc["statement"]),
            assumptions=tuple(str(a) for a in doc.get("assumptions", [])),
            tags=tuple(str(t) for t in doc.get("tags", [])),
            source=str(doc.get("source", "")),
        )


@dataclass
class AssumptionCheck:
    entry_id: str
    satisfied: bool
    unmet: list[str] = field(default_factory=list)


def default_bank_path() -> Path:
    return Path(str(resources.files("proofloop").joinpath("data/knowledge_bank.json")))


def load_bank(path=None) -> list[KnowledgeEntry]:
    bank_path = Path(path) if path else default_bank_path()
    doc = json.loads(bank_path.read_text("utf-8"))
    return [KnowledgeEntry.from_dict(item) for item in doc]


def tokenize(text: str) -> set[str]:
    return {tok.lower() for tok in _TOKEN.findall(text)} - STOP_WORDS


def representation_keywords(representation) -> set[str]:
    """Keywords from subgoals and constraints; bypassed analyses fall back to
    the statement itself (there is nothing else to tokenize)."""
    keywords: set[str] = set()
    for goal in getattr(representation, "subgoals", []) or []:
        keywords |= tokenize(goal)
    for constraint in getattr(representation, "explicit_constraints", []) or []:
        keywords |= tokenize(constraint)
    for assumption in getattr(representation, "implicit_assumptions", []) or []:
        keywords |= tokenize(assumption)
    if not keywords:
        keywords = tokenize(getattr(representation, "formal_statement", "") or "")
    return keywords


def entry_tokens(entry: KnowledgeEntry) -> set[str]:
    tokens: set[str] = set()
    for tag in entry.tags:
        tokens |= tokenize(tag.replace("-", " ").replace("_", " "))
    return tokens


def kb_query(representation, bank: Sequence[KnowledgeEntry]) -> list[KnowledgeEntry]:
    """Entries whose tag tokens intersect the representation keywords,
    ranked by overlap count descending, ties broken by id ascending."""
    keywords = representation_keywords(representation)
    scored = []
    for entry in bank:
        overlap = len(entry_tokens(entry) & keywords)
        if overlap > 0:
            scored.append((-overlap, entry.id, entry))
    scored.sort(key=lambda item: (item[0], item[1]))
    return [entry for _, _, entry in scored]


def kb_check_assumptions(entry: KnowledgeEntry, representation, backend, *,
                         agent_id: str = "initializer", round_no: int = 1) -> AssumptionCheck:
    """Judge each assumption against the problem representation.

    Reply formats: "satisfied", or JSON {"unmet": [index-or-text, ...]}.
    Backend failure or an unparseable reply counts every assumption unmet.
    """
    if not entry.assumptions:
        return AssumptionCheck(entry_id=entry.id, satisfied=True)
    listing = "\n".join(f"{i}: {a}" for i, a in enumerate(entry.assumptions))
    try:
        reply = backend.complete(
            ModelCall(
                caller_agent_id=agent_id,
                round=round_no,
                step_label="kb-check-assumption",
                prompt_sections=[
                    ("entry", entry.statement),
                    ("assumptions", listing),
                    ("problem", getattr(representation, "formal_statement", "")),
                ],
            )
        )
    except BackendUnavailable:
        return AssumptionCheck(entry_id=entry.id, satisfied=False, unmet=list(entry.assumptions))
    doc = try_json(reply.text)
    if isinstance(doc, dict) and "unmet" in doc:
        unmet = []
        for raw in doc["unmet"]:
            if isinstance(raw, int) and 0 <= raw < len(entry.assumptions):
                unmet.append(entry.assumptions[raw])
            elif isinstance(raw, str) and raw.strip():
                unmet.append(raw.strip())
        return AssumptionCheck(entry_id=entry.id, satisfied=not unmet, unmet=unmet)
    if "satisfied" in reply.text.lower() and "unsatisfied" not in reply.text.lower():
        return AssumptionCheck(entry_id=entry.id, satisfied=True)
    return AssumptionCheck(entry_id=entry.id, satisfied=False, unmet=list(entry.assumptions))
