"""The five proof constraints and their enforcement.

Format correctness is a deterministic structural lint (environment balance,
reference integrity, well-formed display math, no placeholders); the other
four rules are judged through the backend. A judged rule with no parseable
verdict fails closed. Constructiveness is enforced only when the run config
demands an explicit construction for the problem.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..backend import ModelCall
from ..parsing import try_json


class CommandmentRule(enum.Enum):
    GROUNDING = "Grounding"
    FAITHFULNESS = "Faithfulness"
    GAP_FREE = "GapFree"
    CONSTRUCTIVENESS = "Constructiveness"
    FORMAT_CORRECTNESS = "FormatCorrectness"


JUDGED_RULES = (
    CommandmentRule.GROUNDING,
    CommandmentRule.FAITHFULNESS,
    CommandmentRule.GAP_FREE,
    CommandmentRule.CONSTRUCTIVENESS,
)

_RULE_KEYS = {
    "grounding": CommandmentRule.GROUNDING,
    "faithfulness": CommandmentRule.FAITHFULNESS,
    "gap_free": CommandmentRule.GAP_FREE,
    "gapfree": CommandmentRule.GAP_FREE,
    "constructiveness": CommandmentRule.CONSTRUCTIVENESS,
    "format_correctness": CommandmentRule.FORMAT_CORRECTNESS,
}

PASS = "Pass"
FAIL = "Fail"


@dataclass(frozen=True)
class Issue:
    rule: CommandmentRule
    location_hint: str
    description: str

    def to_dict(self) -> dict:
        return {
            "rule": self.rule.value,
            "location_hint": self.location_hint,
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Issue":
        return cls(
            rule=CommandmentRule(doc["rule"]),
            location_hint=doc.get("location_hint", ""),
            description=doc.get("description", ""),
        )


@dataclass
class CommandmentReport:
    verdicts: dict[CommandmentRule, str]
    issues: list[Issue] = field(default_factory=list)

    def all_pass(self) -> bool:
        return all(self.verdicts.get(rule) == PASS for rule in CommandmentRule)

    def to_dict(self) -> dict:
        return {
            "verdicts": {rule.value: verdict for rule, verdict in self.verdicts.items()},
            "issues": [issue.to_dict() for issue in self.issues],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CommandmentReport":
        return cls(
            verdicts={CommandmentRule(k): v for k, v in doc.get("verdicts", {}).items()},
            issues=[Issue.from_dict(i) for i in doc.get("issues", [])],
        )


# -- deterministic format lint ----------------------------------------------

_BEGIN_END = re.compile(r"\\(begin|end)\{([A-Za-z*]+)\}")
_LABEL = re.compile(r"\\label\{([^}]*)\}")
_REF = re.compile(r"\\(?:ref|eqref|cref|Cref)\{([^}]*)\}")
_PLACEHOLDERS = ("TODO", "FIXME", "???", "[?]")
_DISPLAY_ENVS = {"equation", "equation*", "align", "align*", "gather", "gather*", "multline"}


def _line_of(text: str, pos: int) -> int:
    return text.count("\n", 0, pos) + 1


def lint_format(proof: str) -> list[Issue]:
    """Pure structural checks; empty list means the format rule passes."""
    issues: list[Issue] = []
    rule = CommandmentRule.FORMAT_CORRECTNESS

    stack: list[tuple[str, int, int]] = []  # (env, match end, line)
    for match in _BEGIN_END.finditer(proof):
        kind, env = match.group(1), match.group(2)
        if kind == "begin":
            stack.append((env, match.end(), _line_of(proof, match.start())))
        else:
            if stack and stack[-1][0] == env:
                opened_env, body_start, _ = stack.pop()
                if opened_env in _DISPLAY_ENVS:
                    body = proof[body_start : match.start()]
                    if not body.strip():
                        issues.append(
                            Issue(rule, f"line {_line_of(proof, match.start())}",
                                  f"empty {opened_env} environment")
                        )
            else:
                issues.append(
                    Issue(rule, f"line {_line_of(proof, match.start())}",
                          f"\\end{{{env}}} without matching \\begin")
                )
    for env, _, line in reversed(stack):
        issues.append(Issue(rule, f"line {line}", f"unclosed environment {env}"))

    labels = set(_LABEL.findall(proof))
    for match in _REF.finditer(proof):
        target = match.group(1)
        if target not in labels:
            issues.append(
                Issue(rule, f"line {_line_of(proof, match.start())}",
                      f"reference to undefined label {target!r}")
            )

    for marker in _PLACEHOLDERS:
        pos = proof.find(marker)
        if pos != -1:
            issues.append(
                Issue(rule, f"line {_line_of(proof, pos)}",
                      f"unresolved placeholder marker {marker!r}")
            )
    return issues


# -- backend-judged rules -----------------------------------------------------

def _parse_verdict_reply(text: str) -> Optional[dict[CommandmentRule, tuple[str, Optional[Issue]]]]:
    """Map judged rules to (verdict, optional issue) from JSON or line form."""
    parsed: dict[CommandmentRule, tuple[str, Optional[Issue]]] = {}
    doc = try_json(text)
    if isinstance(doc, dict):
        for key, value in doc.items():
            rule = _RULE_KEYS.get(str(key).lower().replace("-", "_"))
            if rule is None:
                continue
            if isinstance(value, str):
                verdict = PASS if value.strip().lower() == "pass" else FAIL
                issue = None
                if verdict == FAIL:
                    issue = Issue(rule, "", "flagged by verifier")
                parsed[rule] = (verdict, issue)
            elif isinstance(value, dict):
                verdict = PASS if str(value.get("verdict", "")).strip().lower() == "pass" else FAIL
                issue = None
                if verdict == FAIL:
                    issue = Issue(
                        rule,
                        str(value.get("location", "")),
                        str(value.get("description", "flagged by verifier")),
                    )
                parsed[rule] = (verdict, issue)
        return parsed or None
    matched = False
    for line in text.splitlines():
        if ":" not in line:
            continue
        key, _, rest = line.partition(":")
        rule = _RULE_KEYS.get(key.strip().lower().replace("-", "_").replace(" ", "_"))
        if rule is None:
            continue
        matched = True
        rest = rest.strip()
        if rest.lower().startswith("pass"):
            parsed[rule] = (PASS, None)
        else:
            description = rest.split("-", 1)[1].strip() if "-" in rest else rest
            parsed[rule] = (FAIL, Issue(rule, "", description or "flagged by verifier"))
    return parsed if matched else None


def check_commandments(
    proof: str,
    problem: str,
    backend,
    *,
    agent_id: str = "verifier-1",
    round_no: int = 0,
    constructive_required: bool = False,
    disabled_rules: Iterable[CommandmentRule] = (),
) -> CommandmentReport:
    """Lint the format deterministically and judge the other rules via the backend."""
    if not proof or not proof.strip():
        raise ValueError("proof text is empty")
    disabled = set(disabled_rules)
    verdicts: dict[CommandmentRule, str] = {}
    issues: list[Issue] = []

    format_issues = lint_format(proof)
    issues.extend(format_issues)
    verdicts[CommandmentRule.FORMAT_CORRECTNESS] = FAIL if format_issues else PASS

    to_judge = []
    for rule in JUDGED_RULES:
        if rule in disabled:
            verdicts[rule] = PASS
        elif rule is CommandmentRule.CONSTRUCTIVENESS and not constructive_required:
            verdicts[rule] = PASS
        else:
            to_judge.append(rule)

    if to_judge:
        reply = backend.complete(
            ModelCall(
                caller_agent_id=agent_id,
                round=round_no,
                step_label="verify-commandments",
                prompt_sections=[
                    ("problem", problem),
                    ("proof", proof),
                    ("rules", ", ".join(rule.value for rule in to_judge)),
                ],
            )
        )
        parsed = _parse_verdict_reply(reply.text) or {}
        for rule in to_judge:
            if rule in parsed:
                verdict, issue = parsed[rule]
                verdicts[rule] = verdict
                if issue is not None:
                    issues.append(issue)
            else:
                verdicts[rule] = FAIL
                issues.append(Issue(rule, "", "no parseable verdict from backend"))

    return CommandmentReport(verdicts=verdicts, issues=issues)
