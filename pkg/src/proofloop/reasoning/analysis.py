"""Problem analysis: formalization, decomposition, constraint extraction.

An adaptive gate decides whether a statement needs analysis at all; simple
statements are passed through with bypassed=True so downstream modules can
still read a uniform representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..backend import ModelCall
from ..errors import EmptyStatement
from ..parsing import parse_string_list, try_json


@dataclass
class ProblemRepresentation:
    formal_statement: str
    subgoals: list[str] = field(default_factory=list)
    explicit_constraints: list[str] = field(default_factory=list)
    implicit_assumptions: list[str] = field(default_factory=list)
    bypassed: bool = False

    def to_dict(self) -> dict:
        return {
            "formal_statement": self.formal_statement,
            "subgoals": self.subgoals,
            "explicit_constraints": self.explicit_constraints,
            "implicit_assumptions": self.implicit_assumptions,
            "bypassed": self.bypassed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ProblemRepresentation":
        return cls(
            formal_statement=doc.get("formal_statement", ""),
            subgoals=list(doc.get("subgoals", [])),
            explicit_constraints=list(doc.get("explicit_constraints", [])),
            implicit_assumptions=list(doc.get("implicit_assumptions", [])),
            bypassed=bool(doc.get("bypassed", False)),
        )


def _parse_constraints(text: str) -> tuple[list[str], list[str]]:
    doc = try_json(text)
    if isinstance(doc, dict):
        return (
            [str(c) for c in doc.get("explicit", [])],
            [str(c) for c in doc.get("implicit", [])],
        )
    explicit, implicit = [], []
    for line in text.splitlines():
        line = line.strip()
        lowered = line.lower()
        if lowered.startswith("explicit:"):
            explicit.append(line.split(":", 1)[1].strip())
        elif lowered.startswith("implicit:"):
            implicit.append(line.split(":", 1)[1].strip())
    return explicit, implicit


def analyze_problem(raw_statement: str, backend, *, agent_id: str = "initializer",
                    round_no: int = 1, skip_analysis: bool = False) -> ProblemRepresentation:
    """Run the gate and, unless it says skip, the three analysis operators.

    skip_analysis disables the module outright (ablation) and returns the
    raw statement as a bypassed representation without any backend call.
    """
    if not raw_statement or not raw_statement.strip():
        raise EmptyStatement("problem statement is empty")
    raw_statement = raw_statement.strip()
    if skip_analysis:
        return ProblemRepresentation(formal_statement=raw_statement, bypassed=True)

    def ask(step: str, sections: list[tuple[str, str]]) -> str:
        reply = backend.complete(
            ModelCall(
                caller_agent_id=agent_id,
                round=round_no,
                step_label=step,
                prompt_sections=sections,
            )
        )
        return reply.text

    gate = ask("analysis-gate", [("statement", raw_statement)]).lower()
    if "skip" in gate or "simple" in gate or "bypass" in gate:
        return ProblemRepresentation(formal_statement=raw_statement, bypassed=True)

    formal = ask("formalize-problem", [("statement", raw_statement)]).strip() or raw_statement
    subgoals = parse_string_list(ask("decompose-problem", [("statement", formal)]))
    if not subgoals:
        # decomposition found nothing to split; the statement is its own goal
        subgoals = [formal]
    explicit, implicit = _parse_constraints(
        ask("extract-constraints", [("statement", formal)])
    )
    return ProblemRepresentation(
        formal_statement=formal,
        subgoals=subgoals,
        explicit_constraints=explicit,
        implicit_assumptions=implicit,
        bypassed=False,
    )
