"""Pluggable completion backends.

Everything that talks to a model goes through this interface: a live HTTP
client for real runs and a scripted mock keyed by (agent, round, step) for
deterministic tests. The MeteredBackend wrapper is the only place budget
charging happens, so every completed exchange is charged exactly once and no
call reaches a backend after the budget controller goes terminal.
"""

from __future__ import annotations

import enum
import json
import math
import os
import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Optional, Sequence

from .budget import BudgetController
from .clock import SystemClock
from .errors import BackendUnavailable, BudgetStop, ScriptMiss, TemporalViolation


class BackendKind(enum.Enum):
    LIVE_API = "LiveApi"
    SCRIPTED_MOCK = "ScriptedMock"


@dataclass(frozen=True)
class BackendDescriptor:
    name: str
    kind: BackendKind
    training_cutoff: Optional[date] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind.value,
            "training_cutoff": self.training_cutoff.isoformat() if self.training_cutoff else None,
        }


@dataclass(frozen=True)
class ModelCall:
    caller_agent_id: str
    round: int
    step_label: str
    prompt_sections: Sequence[tuple[str, str]] = ()
    tool_results: Sequence[tuple[str, str]] = ()


@dataclass(frozen=True)
class ModelReply:
    text: str
    reported_tokens: Optional[int] = None


def count_tokens(reply: ModelReply, call: ModelCall) -> int:
    """Backend-reported count when present, else ceil(total chars / 4)."""
    if reply.reported_tokens is not None:
        return reply.reported_tokens
    chars = len(reply.text)
    chars += sum(len(text) for _, text in call.prompt_sections)
    chars += sum(len(text) for _, text in call.tool_results)
    return math.ceil(chars / 4)


def validate_cutoff(descriptor: BackendDescriptor, benchmark_release: date) -> None:
    """Refuse benchmark runs whose model could have seen the benchmark."""
    if descriptor.kind is BackendKind.SCRIPTED_MOCK:
        return
    if descriptor.training_cutoff is None:
        raise TemporalViolation(
            f"backend {descriptor.name!r} declares no training cutoff; "
            f"benchmark release is {benchmark_release.isoformat()}"
        )
    if descriptor.training_cutoff >= benchmark_release:
        raise TemporalViolation(
            f"training cutoff {descriptor.training_cutoff.isoformat()} does not predate "
            f"benchmark release {benchmark_release.isoformat()}"
        )


class ScriptedMockBackend:
    """Deterministic replies from a JSON script.

    Script schema:
        {"entries": [{"agent_id": ..., "round": ..., "step": ..., "reply": ...,
                      "tokens": ...}],
         "default_reply": ...}

    agent_id / round / step may each be "*"; the most specific matching entry
    wins, then default_reply, else ScriptMiss. Stateless after load, so
    identical keys always yield identical replies.
    """

    def __init__(self, script: dict, name: str = "scripted-mock"):
        self.descriptor = BackendDescriptor(name=name, kind=BackendKind.SCRIPTED_MOCK)
        self._entries = list(script.get("entries", []))
        self._default = script.get("default_reply")
        self.calls: list[ModelCall] = []  # instrumentation for tests
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path) -> "ScriptedMockBackend":
        script = json.loads(Path(path).read_text("utf-8"))
        return cls(script, name=f"scripted-mock:{Path(path).name}")

    def step_call_count(self, step_label: str) -> int:
        with self._lock:
            return sum(1 for c in self.calls if c.step_label == step_label)

    def complete(self, call: ModelCall) -> ModelReply:
        with self._lock:
            self.calls.append(call)
        best = None
        best_specificity = -1
        for entry in self._entries:
            specificity = 0
            matched = True
            for key, value in (
                ("agent_id", call.caller_agent_id),
                ("round", call.round),
                ("step", call.step_label),
            ):
                want = entry.get(key, "*")
                if want == "*":
                    continue
                if want != value:
                    matched = False
                    break
                specificity += 1
            if matched and specificity > best_specificity:
                best = entry
                best_specificity = specificity
        if best is not None:
            return ModelReply(text=best["reply"], reported_tokens=best.get("tokens"))
        if self._default is not None:
            return ModelReply(text=self._default)
        raise ScriptMiss(
            f"no script entry for ({call.caller_agent_id}, {call.round}, {call.step_label}) "
            "and no default_reply"
        )


class LiveApiBackend:
    """Minimal HTTP completion client.

    Endpoint and API-key env var come from run config; nothing is hardcoded.
    Request: POST JSON {"model", "prompt"}; response JSON {"text", "tokens"?}.
    At most 3 attempts with exponential backoff on transport failure.
    """

    MAX_ATTEMPTS = 3

    def __init__(self, descriptor: BackendDescriptor, endpoint: str,
                 api_key_env: Optional[str] = None, auth_header: str = "Authorization",
                 timeout: float = 60.0, sleeper=time.sleep):
        self.descriptor = descriptor
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.auth_header = auth_header
        self.timeout = timeout
        self._sleep = sleeper

    def complete(self, call: ModelCall) -> ModelReply:
        prompt = "\n\n".join(f"[{name}]\n{text}" for name, text in call.prompt_sections)
        for name, text in call.tool_results:
            prompt += f"\n\n[tool:{name}]\n{text}"
        body = json.dumps({"model": self.descriptor.name, "prompt": prompt}).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env)
            if not key:
                raise BackendUnavailable(f"environment variable {self.api_key_env} is not set")
            value = key if self.auth_header.lower() != "authorization" else f"Bearer {key}"
            headers[self.auth_header] = value
        last_error: Exception = BackendUnavailable("no attempt made")
        for attempt in range(self.MAX_ATTEMPTS):
            try:
                request = urllib.request.Request(self.endpoint, data=body, headers=headers)
                with urllib.request.urlopen(request, timeout=self.timeout) as response:
                    doc = json.loads(response.read().decode("utf-8"))
                return ModelReply(text=doc["text"], reported_tokens=doc.get("tokens"))
            except (urllib.error.URLError, OSError, ValueError, KeyError) as exc:
                last_error = exc
                if attempt + 1 < self.MAX_ATTEMPTS:
                    self._sleep(2**attempt)
        raise BackendUnavailable(f"transport failed after {self.MAX_ATTEMPTS} attempts: {last_error}")


@dataclass
class MeteredBackend:
    """Budget gate around a backend.

    complete() refuses (BudgetStop) before touching the inner backend once
    the controller is terminal, checks the wall clock, and charges exactly
    one token count per completed exchange.
    """

    inner: object
    controller: BudgetController
    clock: object = field(default_factory=SystemClock)

    @property
    def descriptor(self) -> BackendDescriptor:
        return self.inner.descriptor

    def complete(self, call: ModelCall) -> ModelReply:
        if self.controller.terminal is not None:
            raise BudgetStop(f"run terminated: {self.controller.terminal.value}")
        now = self.clock.now()
        self.controller.mark_started(now)
        if self.controller.check_time(now) is not None:
            raise BudgetStop(f"run terminated: {self.controller.terminal.value}")
        reply = self.inner.complete(call)
        self.controller.charge(count_tokens(reply, call))
        return reply
