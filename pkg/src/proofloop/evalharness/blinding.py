"""Anonymization and randomized pair presentation.

Blind ids are keyed hashes of (method, problem, salt), so they are stable
within a salt and carry no method information. Presented text has every
configured method name redacted. Pair order is a seeded coin flip; the
position-to-solution mapping lives server-side only.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Mapping, Sequence


def blind_id_for(method: str, problem_id: int, salt: str) -> str:
    digest = hashlib.blake2b(
        f"{method}|{problem_id}".encode("utf-8"),
        key=salt.encode("utf-8")[:64],
        digest_size=8,
    )
    return f"sol-{digest.hexdigest()}"


def redact(text: str, method_names: Sequence[str]) -> str:
    """Strip method/model names from text shown to evaluators."""
    for name in sorted(method_names, key=len, reverse=True):
        if not name:
            continue
        text = re.sub(re.escape(name), "[redacted]", text, flags=re.IGNORECASE)
    return text


def anonymize(
    solutions: Mapping[str, str], salt: str, problem_id: int,
    redact_names: Sequence[str] = (),
) -> tuple[dict[str, str], dict[str, str]]:
    """Returns (blind_id -> presented text, blind_id -> method).

    The second map is the sealed reverse map: persist it server-side, never
    send it to evaluators.
    """
    names = list(redact_names) or list(solutions)
    presented: dict[str, str] = {}
    reverse: dict[str, str] = {}
    for method, text in solutions.items():
        blind = blind_id_for(method, problem_id, salt)
        presented[blind] = redact(text, names)
        reverse[blind] = method
    return presented, reverse


@dataclass(frozen=True)
class PresentedPair:
    problem_id: int
    first: str
    second: str


def make_pair(problem_id: int, solution_a_id: str, solution_b_id: str,
              rng_seed: int) -> PresentedPair:
    """Seeded coin flip over presentation order; deterministic per inputs."""
    digest = hashlib.blake2b(
        f"{problem_id}|{solution_a_id}|{solution_b_id}|{rng_seed}".encode("utf-8"),
        digest_size=2,
    ).digest()
    if digest[0] & 1:
        return PresentedPair(problem_id, solution_b_id, solution_a_id)
    return PresentedPair(problem_id, solution_a_id, solution_b_id)
