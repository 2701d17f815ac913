from .aggregate import (
    ABStats,
    MethodSummary,
    aggregate_counts,
    aggregate_problem,
    compute_ab,
    compute_ab_llm,
    dense_ranks,
    summarize_counts,
    summarize_method,
)
from .blinding import anonymize, blind_id_for, make_pair, redact
from .records import CorrectnessLabel, EvaluatorKind, JudgmentRecord, PairwiseRecord
from .store import EvaluationStore
from .service import EvalService, SolutionEntry, load_solutions_manifest

__all__ = [
    "ABStats",
    "CorrectnessLabel",
    "EvalService",
    "EvaluationStore",
    "EvaluatorKind",
    "JudgmentRecord",
    "MethodSummary",
    "PairwiseRecord",
    "SolutionEntry",
    "aggregate_counts",
    "aggregate_problem",
    "anonymize",
    "blind_id_for",
    "compute_ab",
    "compute_ab_llm",
    "dense_ranks",
    "load_solutions_manifest",
    "make_pair",
    "redact",
    "summarize_counts",
    "summarize_method",
]
