"""LLM-judge driver for the pairwise protocol.

Judges consume the same HTTP surface as human evaluators: they see only
anonymized pair text in the served order. A reply must parse to exactly one
of First/Second; one reprompt is allowed, then the pair is recorded as an
abstention (excluded from every win-rate denominator).
"""

from __future__ import annotations

import json
import re
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..backend import ModelCall

_CHOICE = re.compile(r"\b(first|second)\b", re.IGNORECASE)


def parse_choice(text: str) -> Optional[str]:
    """Exactly one of first/second must be named; anything else is a miss."""
    found = {m.lower() for m in _CHOICE.findall(text)}
    if found == {"first"}:
        return "First"
    if found == {"second"}:
        return "Second"
    return None


@dataclass
class JudgeOutcome:
    choices: int = 0
    abstentions: int = 0
    per_model: dict = field(default_factory=dict)


class HttpEvalClient:
    """Minimal client for the harness API."""

    def __init__(self, base_url: str, timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def get(self, path: str) -> tuple[int, dict]:
        try:
            with urllib.request.urlopen(self.base_url + path, timeout=self.timeout) as resp:
                return resp.status, json.loads(resp.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            return exc.code, json.loads(exc.read().decode("utf-8") or "{}")

    def post(self, path: str, doc: dict) -> tuple[int, dict]:
        body = json.dumps(doc).encode("utf-8")
        request = urllib.request.Request(
            self.base_url + path, data=body, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                return resp.status, json.loads(resp.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            return exc.code, json.loads(exc.read().decode("utf-8") or "{}")


def run_llm_judges(
    client: HttpEvalClient,
    backend,
    judge_models: Sequence[str],
    *,
    store=None,
) -> JudgeOutcome:
    """Walk every problem's pair queue once per judge model."""
    outcome = JudgeOutcome()
    status, problems_doc = client.get("/problems")
    problem_ids = [p["problem_id"] for p in problems_doc.get("problems", [])]
    for model in judge_models:
        evaluator_id = f"judge:{model}"
        model_choices = 0
        model_abstentions = 0
        for pid in problem_ids:
            while True:
                status, pair = client.get(f"/pair?problem={pid}&evaluator={evaluator_id}")
                if status != 200:
                    break
                choice = _judge_pair(backend, model, pair)
                if choice is None:
                    model_abstentions += 1
                    if store is not None:
                        store.add_abstention(
                            {
                                "problem_id": pid,
                                "pair_id": pair["pair_id"],
                                "evaluator_id": evaluator_id,
                                "judge_model": model,
                                "reason": "unparseable-choice",
                            }
                        )
                    break  # same pair would be served again; move on
                client.post(
                    "/choice",
                    {
                        "pair_id": pair["pair_id"],
                        "evaluator_id": evaluator_id,
                        "chosen": choice,
                        "evaluator_kind": "LLMJudge",
                        "judge_model": model,
                        "idempotency_key": f"{evaluator_id}:{pair['pair_id']}",
                    },
                )
                model_choices += 1
        outcome.per_model[model] = {"choices": model_choices, "abstentions": model_abstentions}
        outcome.choices += model_choices
        outcome.abstentions += model_abstentions
    return outcome


def _judge_pair(backend, model: str, pair: dict) -> Optional[str]:
    sections = [
        ("task", "Compare the two proofs and answer with exactly one word: First or Second."),
        ("first", pair["first"]["text"]),
        ("second", pair["second"]["text"]),
    ]
    reply = backend.complete(
        ModelCall(
            caller_agent_id=f"judge:{model}",
            round=0,
            step_label="judge-pair",
            prompt_sections=sections,
        )
    )
    choice = parse_choice(reply.text)
    if choice is not None:
        return choice
    retry = backend.complete(
        ModelCall(
            caller_agent_id=f"judge:{model}",
            round=0,
            step_label="judge-pair-retry",
            prompt_sections=sections
            + [("reminder", "Answer with exactly one word: First or Second.")],
        )
    )
    return parse_choice(retry.text)
