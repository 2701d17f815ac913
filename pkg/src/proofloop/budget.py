"""Per-run token and wall-clock budget enforcement.

The controller is the single authority on whether another model call may
happen. Overshoot semantics: the charge that crosses the cap completes and
is counted; every later call is refused. Once terminal, the state never
changes and further charges are an orchestrator bug (AlreadyTerminal).
"""

from __future__ import annotations

import enum
import threading
from datetime import datetime, timedelta
from typing import Optional

from .errors import AlreadyTerminal


class TerminalReason(enum.Enum):
    BUDGET_EXHAUSTED = "BudgetExhausted"
    TIME_EXHAUSTED = "TimeExhausted"


class BudgetController:
    """Tracks tokens against a cap and elapsed wall time against a limit.

    The wall clock starts at the first model call (mark_started), matching
    run-time accounting from first API call to final artifact.
    """

    def __init__(self, token_cap: int, time_cap: timedelta):
        if token_cap < 0:
            raise ValueError("token_cap must be >= 0")
        self.token_cap = token_cap
        self.time_cap = time_cap
        self.tokens_used = 0
        self.started_at: Optional[datetime] = None
        self._terminal: Optional[TerminalReason] = None
        self._lock = threading.Lock()

    @property
    def terminal(self) -> Optional[TerminalReason]:
        return self._terminal

    def mark_started(self, now: datetime) -> None:
        with self._lock:
            if self.started_at is None:
                self.started_at = now

    def restore(self, tokens_used: int) -> None:
        """Reload a prior run's spend (resume path)."""
        with self._lock:
            self.tokens_used = tokens_used
            if self.tokens_used >= self.token_cap:
                self._terminal = TerminalReason.BUDGET_EXHAUSTED

    def charge(self, tokens: int) -> int:
        """Add one exchange's tokens; returns the remaining budget (>= 0)."""
        if tokens < 0:
            raise ValueError("tokens must be >= 0")
        with self._lock:
            if self._terminal is not None:
                raise AlreadyTerminal(f"charge({tokens}) after {self._terminal.value}")
            self.tokens_used += tokens
            if self.tokens_used >= self.token_cap:
                self._terminal = TerminalReason.BUDGET_EXHAUSTED
            return max(0, self.token_cap - self.tokens_used)

    def check_time(self, now: datetime) -> Optional[TerminalReason]:
        """Trip the time limit if elapsed >= cap; returns the terminal state."""
        with self._lock:
            if self._terminal is None and self.started_at is not None:
                if now - self.started_at >= self.time_cap:
                    self._terminal = TerminalReason.TIME_EXHAUSTED
            return self._terminal

    def elapsed(self, now: datetime) -> timedelta:
        if self.started_at is None:
            return timedelta(0)
        return now - self.started_at
