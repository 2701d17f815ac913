"""Injectable clocks.

All time reads in the package go through a Clock object so determinism tests
can pin `created_at` values and drive the wall-clock budget without sleeping.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone


def to_rfc3339(dt: datetime) -> str:
    """Canonical RFC 3339 rendering used in every on-disk record."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    dt = dt.astimezone(timezone.utc)
    if dt.microsecond:
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%fZ")
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def from_rfc3339(text: str) -> datetime:
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return datetime.fromisoformat(text)


class SystemClock:
    """Real UTC time."""

    def now(self) -> datetime:
        return datetime.now(timezone.utc)


class FakeClock:
    """Deterministic clock for tests.

    Each now() advances by `step`, so two identical runs observe identical
    timestamp sequences. advance() jumps the clock explicitly (budget tests).
    """

    def __init__(self, start: datetime | None = None, step: timedelta = timedelta(seconds=1)):
        self._now = start or datetime(2026, 2, 1, tzinfo=timezone.utc)
        self._step = step

    def now(self) -> datetime:
        current = self._now
        self._now = current + self._step
        return current

    def advance(self, delta: timedelta) -> None:
        self._now += delta
