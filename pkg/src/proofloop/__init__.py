"""proofloop: multi-agent mathematical proof construction and evaluation.

Initializer, proposer, and verifier agents coordinate over an append-only,
role-permissioned shared memory across rounds, under hard token and
wall-clock budgets, with contamination-controlled literature retrieval and
a blind expert/LLM evaluation harness.
"""

from .backend import (
    BackendDescriptor,
    BackendKind,
    MeteredBackend,
    ModelCall,
    ModelReply,
    ScriptedMockBackend,
    count_tokens,
    validate_cutoff,
)
from .budget import BudgetController, TerminalReason
from .clock import FakeClock, SystemClock
from .errors import PermissionDenied, ProofloopError
from .gateway import RetrievalGateway, ScreenVerdict, SourcePolicy
from .memory import (
    MemoryRecord,
    RecordDraft,
    Role,
    Segment,
    SharedMemory,
    can_write,
)
from .orchestrator import (
    ProofCandidate,
    RunConfig,
    RunResult,
    RunStatus,
    resume,
    run,
    select_final,
)

__version__ = "0.1.0"

__all__ = [
    "BackendDescriptor",
    "BackendKind",
    "BudgetController",
    "FakeClock",
    "MemoryRecord",
    "MeteredBackend",
    "ModelCall",
    "ModelReply",
    "PermissionDenied",
    "ProofCandidate",
    "RecordDraft",
    "RetrievalGateway",
    "Role",
    "RunConfig",
    "RunResult",
    "RunStatus",
    "ScreenVerdict",
    "ScriptedMockBackend",
    "Segment",
    "SharedMemory",
    "SourcePolicy",
    "SystemClock",
    "TerminalReason",
    "can_write",
    "count_tokens",
    "resume",
    "run",
    "select_final",
    "validate_cutoff",
]
