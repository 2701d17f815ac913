"""JSON-lines evaluation store.

One line per judgment or pairwise choice, append-serialized so concurrent
evaluators never lose records. Idempotency keys live in a sidecar file so
a retried submission stores exactly one record even across restarts.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from .records import JudgmentRecord, PairwiseRecord


class EvaluationStore:
    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.judgments_path = self.directory / "judgments.jsonl"
        self.pairwise_path = self.directory / "pairwise.jsonl"
        self.abstentions_path = self.directory / "abstentions.jsonl"
        self._keys_path = self.directory / "idempotency.log"
        self._lock = threading.Lock()
        self._seen_keys: set[str] = set()
        if self._keys_path.exists():
            self._seen_keys = {
                line.strip()
                for line in self._keys_path.read_text("utf-8").splitlines()
                if line.strip()
            }

    def seen(self, idempotency_key: str) -> bool:
        with self._lock:
            return idempotency_key in self._seen_keys

    def _remember(self, idempotency_key: str) -> None:
        self._seen_keys.add(idempotency_key)
        with open(self._keys_path, "a", encoding="utf-8") as fh:
            fh.write(idempotency_key + "\n")

    def _append(self, path: Path, doc: dict) -> None:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, sort_keys=True) + "\n")
            fh.flush()

    def add_judgment(self, record: JudgmentRecord, idempotency_key: str | None = None) -> bool:
        """Returns False when the key was already seen (duplicate suppressed)."""
        with self._lock:
            if idempotency_key:
                if idempotency_key in self._seen_keys:
                    return False
                self._remember(idempotency_key)
            self._append(self.judgments_path, record.to_dict())
            return True

    def add_choice(self, record: PairwiseRecord, idempotency_key: str | None = None) -> bool:
        with self._lock:
            if idempotency_key:
                if idempotency_key in self._seen_keys:
                    return False
                self._remember(idempotency_key)
            self._append(self.pairwise_path, record.to_dict())
            return True

    def add_abstention(self, doc: dict) -> None:
        with self._lock:
            self._append(self.abstentions_path, doc)

    def load_judgments(self) -> list[JudgmentRecord]:
        return [JudgmentRecord.from_dict(doc) for doc in self._load(self.judgments_path)]

    def load_pairwise(self) -> list[PairwiseRecord]:
        return [PairwiseRecord.from_dict(doc) for doc in self._load(self.pairwise_path)]

    def load_abstentions(self) -> list[dict]:
        return self._load(self.abstentions_path)

    @staticmethod
    def _load(path: Path) -> list[dict]:
        if not path.exists():
            return []
        return [
            json.loads(line)
            for line in path.read_text("utf-8").splitlines()
            if line.strip()
        ]
