"""Literature understanding: extraction, relevance filtering, organization.

Operates only on documents the gateway kept. Filtering and organization can
each be disabled independently (ablation switches); retained is always a
subset of extracted, and whenever organization runs every retained item
lands in at least one subgoal group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..backend import ModelCall
from ..gateway import RetrievedDocument, ScreenVerdict
from ..parsing import try_json


@dataclass
class ExtractedItem:
    statement: str
    assumptions: list[str] = field(default_factory=list)
    conclusion: str = ""
    source_url: str = ""
    pattern_tag: str = ""

    def to_dict(self) -> dict:
        return {
            "statement": self.statement,
            "assumptions": self.assumptions,
            "conclusion": self.conclusion,
            "source_url": self.source_url,
            "pattern_tag": self.pattern_tag,
        }


@dataclass
class LiteratureSummary:
    extracted: list[ExtractedItem] = field(default_factory=list)
    retained: list[int] = field(default_factory=list)
    groups: dict[int, list[int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "extracted": [item.to_dict() for item in self.extracted],
            "retained": self.retained,
            "groups": {str(k): v for k, v in self.groups.items()},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LiteratureSummary":
        return cls(
            extracted=[ExtractedItem(**item) for item in doc.get("extracted", [])],
            retained=list(doc.get("retained", [])),
            groups={int(k): list(v) for k, v in doc.get("groups", {}).items()},
        )


def _parse_items(text: str, docs: Sequence[RetrievedDocument]) -> list[ExtractedItem]:
    doc = try_json(text)
    items: list[ExtractedItem] = []
    if isinstance(doc, list):
        for raw in doc:
            if not isinstance(raw, dict) or not raw.get("statement"):
                continue
            items.append(
                ExtractedItem(
                    statement=str(raw["statement"]),
                    assumptions=[str(a) for a in raw.get("assumptions", [])],
                    conclusion=str(raw.get("conclusion", "")),
                    source_url=str(raw.get("source_url", "")) or (docs[0].url if docs else ""),
                    pattern_tag=str(raw.get("pattern_tag", "")),
                )
            )
    return items


def _parse_indices(text: str, upper: int) -> list[int]:
    doc = try_json(text)
    indices: list[int] = []
    if isinstance(doc, list):
        for raw in doc:
            try:
                idx = int(raw)
            except (TypeError, ValueError):
                continue
            if 0 <= idx < upper and idx not in indices:
                indices.append(idx)
    return indices


def understand_literature(
    docs: Sequence[RetrievedDocument],
    representation,
    backend,
    *,
    agent_id: str = "initializer",
    round_no: int = 1,
    filter_enabled: bool = True,
    organize_enabled: bool = True,
) -> LiteratureSummary:
    """Extract candidate results from kept documents, filter, and group them."""
    for doc in docs:
        if doc.screen_verdict is not ScreenVerdict.KEPT:
            raise ValueError(f"document {doc.url} was not kept by screening")
    if not docs:
        return LiteratureSummary()

    def ask(step: str, sections: list[tuple[str, str]]) -> str:
        return backend.complete(
            ModelCall(
                caller_agent_id=agent_id,
                round=round_no,
                step_label=step,
                prompt_sections=sections,
            )
        ).text

    corpus = [(f"doc-{i}:{doc.url}", doc.body) for i, doc in enumerate(docs)]
    extracted = _parse_items(ask("extract-literature", corpus), docs)
    if not extracted:
        return LiteratureSummary()

    if filter_enabled:
        listing = "\n".join(f"{i}: {item.statement}" for i, item in enumerate(extracted))
        sections = [("candidates", listing)]
        statement = getattr(representation, "formal_statement", "")
        if statement:
            sections.append(("problem", statement))
        retained = _parse_indices(ask("filter-literature", sections), len(extracted))
    else:
        retained = list(range(len(extracted)))

    groups: dict[int, list[int]] = {}
    if organize_enabled and retained:
        listing = "\n".join(f"{i}: {extracted[i].statement}" for i in retained)
        subgoals = getattr(representation, "subgoals", []) or []
        sections = [("retained", listing), ("subgoals", "\n".join(subgoals))]
        doc = try_json(ask("organize-literature", sections))
        if isinstance(doc, dict):
            for key, value in doc.items():
                try:
                    subgoal = int(key)
                except (TypeError, ValueError):
                    continue
                members = [i for i in _coerce_ints(value) if i in retained]
                if members:
                    groups[subgoal] = members
        grouped = {i for members in groups.values() for i in members}
        leftovers = [i for i in retained if i not in grouped]
        if leftovers:
            # coverage guarantee: ungrouped survivors attach to the first subgoal
            groups.setdefault(0, [])
            groups[0].extend(leftovers)

    return LiteratureSummary(extracted=extracted, retained=retained, groups=groups)


def _coerce_ints(value) -> list[int]:
    if not isinstance(value, list):
        return []
    out = []
    for raw in value:
        try:
            out.append(int(raw))
        except (TypeError, ValueError):
            continue
    return out
