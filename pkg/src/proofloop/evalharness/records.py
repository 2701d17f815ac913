"""Evaluation datum types: one judgment or one pairwise choice per record.

Field names here are the on-disk JSON-lines contract. Blind solution ids
reveal nothing about the producing method; evaluator ids are pseudonymous.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from datetime import datetime
from typing import Optional

from ..clock import from_rfc3339, to_rfc3339


class CorrectnessLabel(enum.Enum):
    CORRECT = "Correct"
    INCONCLUSIVE = "Inconclusive"
    INCORRECT = "Incorrect"


class EvaluatorKind(enum.Enum):
    EXPERT = "Expert"
    LLM_JUDGE = "LLMJudge"


class Chosen(enum.Enum):
    FIRST = "First"
    SECOND = "Second"


@dataclass(frozen=True)
class JudgmentRecord:
    problem_id: int
    blind_solution_id: str
    evaluator_id: str
    label: CorrectnessLabel
    answer_accuracy: float
    logical_correctness: int
    completeness: int
    clarity: int
    submitted_at: datetime

    def validate(self) -> None:
        if self.problem_id < 1:
            raise ValueError("problem_id must be >= 1")
        if not 0.0 <= self.answer_accuracy <= 1.0:
            raise ValueError("answer_accuracy must lie in [0, 1]")
        for name in ("logical_correctness", "completeness", "clarity"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= 5:
                raise ValueError(f"{name} must be an integer in 0..5")

    def to_dict(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "blind_solution_id": self.blind_solution_id,
            "evaluator_id": self.evaluator_id,
            "label": self.label.value,
            "answer_accuracy": self.answer_accuracy,
            "logical_correctness": self.logical_correctness,
            "completeness": self.completeness,
            "clarity": self.clarity,
            "submitted_at": to_rfc3339(self.submitted_at),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "JudgmentRecord":
        return cls(
            problem_id=int(doc["problem_id"]),
            blind_solution_id=doc["blind_solution_id"],
            evaluator_id=doc["evaluator_id"],
            label=CorrectnessLabel(doc["label"]),
            answer_accuracy=float(doc["answer_accuracy"]),
            logical_correctness=int(doc["logical_correctness"]),
            completeness=int(doc["completeness"]),
            clarity=int(doc["clarity"]),
            submitted_at=from_rfc3339(doc["submitted_at"]),
        )


@dataclass(frozen=True)
class PairwiseRecord:
    problem_id: int
    blind_id_first: str
    blind_id_second: str
    chosen: Chosen
    evaluator_id: str
    evaluator_kind: EvaluatorKind
    judge_model: Optional[str] = None

    def chosen_blind_id(self) -> str:
        return self.blind_id_first if self.chosen is Chosen.FIRST else self.blind_id_second

    def to_dict(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "blind_id_first": self.blind_id_first,
            "blind_id_second": self.blind_id_second,
            "chosen": self.chosen.value,
            "evaluator_id": self.evaluator_id,
            "evaluator_kind": self.evaluator_kind.value,
            "judge_model": self.judge_model,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PairwiseRecord":
        return cls(
            problem_id=int(doc["problem_id"]),
            blind_id_first=doc["blind_id_first"],
            blind_id_second=doc["blind_id_second"],
            chosen=Chosen(doc["chosen"]),
            evaluator_id=doc["evaluator_id"],
            evaluator_kind=EvaluatorKind(doc["evaluator_kind"]),
            judge_model=doc.get("judge_model"),
        )
