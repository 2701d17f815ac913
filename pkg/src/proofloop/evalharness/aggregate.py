"""Aggregation arithmetic for the three-part evaluation protocol.

Problem verdicts are conservative: correct only under unanimous correct
labels, incorrect only under unanimous incorrect, otherwise inconclusive.
A method with no released solution for a problem counts as incorrect at the
problem level while contributing nothing to the judgment totals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from ..errors import EmptyJudgments, MissingProblem, NoComparisons
from .records import CorrectnessLabel, EvaluatorKind, JudgmentRecord, PairwiseRecord

Counts = tuple[int, int, int]  # (correct, inconclusive, incorrect)


def aggregate_problem(labels: Sequence[CorrectnessLabel]) -> CorrectnessLabel:
    """Unanimity rule over one problem's expert labels."""
    if not labels:
        raise EmptyJudgments("cannot aggregate an empty label list")
    if all(label is CorrectnessLabel.CORRECT for label in labels):
        return CorrectnessLabel.CORRECT
    if all(label is CorrectnessLabel.INCORRECT for label in labels):
        return CorrectnessLabel.INCORRECT
    return CorrectnessLabel.INCONCLUSIVE


def aggregate_counts(counts: Counts) -> CorrectnessLabel:
    correct, inconclusive, incorrect = counts
    if correct < 0 or inconclusive < 0 or incorrect < 0:
        raise ValueError("counts must be nonnegative")
    total = correct + inconclusive + incorrect
    if total == 0:
        raise EmptyJudgments("cannot aggregate zero judgments")
    if correct == total:
        return CorrectnessLabel.CORRECT
    if incorrect == total:
        return CorrectnessLabel.INCORRECT
    return CorrectnessLabel.INCONCLUSIVE


@dataclass
class MethodSummary:
    per_problem: dict[int, dict] = field(default_factory=dict)
    totals: Counts = (0, 0, 0)
    problems_summary: Counts = (0, 0, 0)
    fine_grained_means: Optional[dict[str, float]] = None

    def to_dict(self) -> dict:
        return {
            "per_problem": {
                str(pid): entry for pid, entry in sorted(self.per_problem.items())
            },
            "totals": list(self.totals),
            "problems_summary": list(self.problems_summary),
            "fine_grained_means": self.fine_grained_means,
        }


def _label_counts(labels: Sequence[CorrectnessLabel]) -> Counts:
    return (
        sum(1 for l in labels if l is CorrectnessLabel.CORRECT),
        sum(1 for l in labels if l is CorrectnessLabel.INCONCLUSIVE),
        sum(1 for l in labels if l is CorrectnessLabel.INCORRECT),
    )


def _verdict_counts(verdicts: Sequence[CorrectnessLabel]) -> Counts:
    return _label_counts(verdicts)


def summarize_method(
    judgments: Sequence[JudgmentRecord],
    problem_ids: Optional[Sequence[int]] = None,
) -> MethodSummary:
    """Totals, problem verdicts, and fine-grained means for one method."""
    by_problem: dict[int, list[JudgmentRecord]] = {}
    for record in judgments:
        by_problem.setdefault(record.problem_id, []).append(record)
    expected = sorted(problem_ids) if problem_ids is not None else sorted(by_problem)
    missing = [pid for pid in expected if pid not in by_problem]
    if missing:
        raise MissingProblem(f"no judgments for problems {missing}")
    if not expected:
        raise EmptyJudgments("no judgments at all")

    summary = MethodSummary()
    verdicts = []
    totals = [0, 0, 0]
    for pid in expected:
        labels = [r.label for r in by_problem[pid]]
        counts = _label_counts(labels)
        verdict = aggregate_problem(labels)
        verdicts.append(verdict)
        totals = [t + c for t, c in zip(totals, counts)]
        summary.per_problem[pid] = {"counts": list(counts), "verdict": verdict.value}
    summary.totals = tuple(totals)
    summary.problems_summary = _verdict_counts(verdicts)
    n = sum(len(v) for v in by_problem.values())
    summary.fine_grained_means = {
        "answer_accuracy": sum(r.answer_accuracy for r in judgments) / n,
        "logical_correctness": sum(r.logical_correctness for r in judgments) / n,
        "completeness": sum(r.completeness for r in judgments) / n,
        "clarity": sum(r.clarity for r in judgments) / n,
    }
    return summary


def summarize_counts(per_problem: Mapping[int, Optional[Counts]]) -> MethodSummary:
    """Summary from per-problem judgment counts (published-table form).

    A None row means the method released no output for that problem: the
    problem verdict is Incorrect, and no judgments enter the totals.
    """
    if not per_problem:
        raise EmptyJudgments("no per-problem counts")
    summary = MethodSummary()
    verdicts = []
    totals = [0, 0, 0]
    for pid in sorted(per_problem):
        counts = per_problem[pid]
        if counts is None:
            verdicts.append(CorrectnessLabel.INCORRECT)
            summary.per_problem[pid] = {"counts": None, "verdict": "Incorrect",
                                        "no_output": True}
            continue
        verdict = aggregate_counts(counts)
        verdicts.append(verdict)
        totals = [t + c for t, c in zip(totals, counts)]
        summary.per_problem[pid] = {"counts": list(counts), "verdict": verdict.value}
    summary.totals = tuple(totals)
    summary.problems_summary = _verdict_counts(verdicts)
    return summary


# -- pairwise A-B -------------------------------------------------------------


@dataclass
class ABStats:
    wins: int
    comparisons: int
    win_rate: float
    rank: int = 0

    def to_dict(self) -> dict:
        return {
            "wins": self.wins,
            "comparisons": self.comparisons,
            "win_rate": self.win_rate,
            "rank": self.rank,
        }


def dense_ranks(win_rates: Mapping[str, float]) -> dict[str, int]:
    """Ties share a rank; the next distinct rate gets the next integer."""
    distinct = sorted(set(win_rates.values()), reverse=True)
    position = {rate: i + 1 for i, rate in enumerate(distinct)}
    return {method: position[rate] for method, rate in win_rates.items()}


def _tally(
    records: Sequence[PairwiseRecord],
    methods: Sequence[str],
    resolve: Mapping[str, str],
) -> dict[str, ABStats]:
    wins = {m: 0 for m in methods}
    comparisons = {m: 0 for m in methods}
    for record in records:
        first = resolve[record.blind_id_first]
        second = resolve[record.blind_id_second]
        winner = resolve[record.chosen_blind_id()]
        for method in (first, second):
            if method in comparisons:
                comparisons[method] += 1
        if winner in wins:
            wins[winner] += 1
    for method in methods:
        if comparisons[method] == 0:
            raise NoComparisons(method)
    return {
        m: ABStats(wins=wins[m], comparisons=comparisons[m], win_rate=wins[m] / comparisons[m])
        for m in methods
    }


def compute_ab(
    records: Sequence[PairwiseRecord],
    methods: Sequence[str],
    resolve: Mapping[str, str],
) -> dict[str, ABStats]:
    """Pooled win rates and dense ranks (expert protocol)."""
    stats = _tally(records, methods, resolve)
    ranks = dense_ranks({m: s.win_rate for m, s in stats.items()})
    for method, stat in stats.items():
        stat.rank = ranks[method]
    return stats


def compute_ab_llm(
    records: Sequence[PairwiseRecord],
    methods: Sequence[str],
    resolve: Mapping[str, str],
) -> dict[str, ABStats]:
    """Per-judge win rates averaged across judge models; ranks follow the
    averaged rates so rank order always matches the reported win rates."""
    judges = sorted({r.judge_model or r.evaluator_id for r in records
                     if r.evaluator_kind is EvaluatorKind.LLM_JUDGE})
    if not judges:
        raise NoComparisons("<no LLM-judge records>")
    per_judge: dict[str, dict[str, ABStats]] = {}
    for judge in judges:
        subset = [
            r for r in records
            if r.evaluator_kind is EvaluatorKind.LLM_JUDGE
            and (r.judge_model or r.evaluator_id) == judge
        ]
        per_judge[judge] = _tally(subset, methods, resolve)
    averaged = {}
    for method in methods:
        rates = [per_judge[j][method].win_rate for j in judges]
        wins = sum(per_judge[j][method].wins for j in judges)
        comps = sum(per_judge[j][method].comparisons for j in judges)
        averaged[method] = ABStats(
            wins=wins, comparisons=comps, win_rate=sum(rates) / len(rates)
        )
    ranks = dense_ranks({m: s.win_rate for m, s in averaged.items()})
    for method, stat in averaged.items():
        stat.rank = ranks[method]
    return averaged
