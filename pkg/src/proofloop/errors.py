"""Exception types shared across the package.

Every refusal that an agent or operator can hit maps to a distinct class so
callers (and the CLI exit-code table) can branch on type rather than message.
"""


class ProofloopError(Exception):
    """Base class for all package errors."""


# -- shared memory ---------------------------------------------------------

class PermissionDenied(ProofloopError):
    """A role attempted to write a segment outside its permitted set."""

    def __init__(self, role, segment, agent_id=""):
        self.role = role
        self.segment = segment
        self.agent_id = agent_id
        super().__init__(f"{role.value} ({agent_id or 'unknown agent'}) may not write {segment.value}")


class RunClosed(ProofloopError):
    """Write attempted on a memory store that has been closed."""


class RoundMismatch(ProofloopError):
    """Staged record's round does not match the currently open round."""


class OutOfOrderRound(ProofloopError):
    """commit_round called with a round other than last committed + 1."""


class CorruptStream(ProofloopError):
    """A segment stream failed framing or checksum validation on replay."""

    def __init__(self, path, byte_offset, reason):
        self.path = str(path)
        self.byte_offset = byte_offset
        self.reason = reason
        super().__init__(f"{self.path}: corrupt frame at byte {byte_offset}: {reason}")


# -- model backend / budget ------------------------------------------------

class BackendUnavailable(ProofloopError):
    """Transport-level failure talking to the completion backend."""


class ScriptMiss(ProofloopError):
    """Scripted backend has no entry and no default for a call key."""


class BudgetStop(ProofloopError):
    """Call refused because the run's budget controller is terminal."""


class AlreadyTerminal(ProofloopError):
    """charge() reached a controller that was already terminal (orchestrator bug)."""


class TemporalViolation(ProofloopError):
    """Backend training cutoff does not predate the benchmark release."""


# -- retrieval gateway -----------------------------------------------------

class Blocked(ProofloopError):
    """URL refused by the source policy before any network contact."""

    def __init__(self, url, pattern):
        self.url = url
        self.pattern = pattern
        super().__init__(f"blocked by policy pattern {pattern!r}: {url}")


class FetchFailed(ProofloopError):
    """Network-level fetch failure for a policy-admitted URL."""


class PolicyMissing(ProofloopError):
    """Benchmark-mode fetch attempted with no source policy configured."""


class InvalidQuery(ProofloopError):
    """Degenerate (empty) query input to expansion."""


# -- reasoning modules -----------------------------------------------------

class EmptyStatement(ProofloopError):
    """Problem analysis needs a non-empty statement."""


# -- orchestrator ----------------------------------------------------------

class ConfigInvalid(ProofloopError):
    """Run configuration failed validation."""


class NoCompliantProof(ProofloopError):
    """No candidate passes all five commandment rules."""


class RunFailed(ProofloopError):
    """Unrecoverable backend or tool error terminated the run."""


# -- evaluation harness ----------------------------------------------------

class EmptyJudgments(ProofloopError):
    """Problem verdict requested over an empty label list."""


class MissingProblem(ProofloopError):
    """A method summary is missing judgments for some problem."""


class UnknownSolution(ProofloopError):
    """Pairing referenced a solution id that does not exist."""


class NoComparisons(ProofloopError):
    """A method in an A-B computation has zero comparisons."""

    def __init__(self, method):
        self.method = method
        super().__init__(f"no pairwise comparisons recorded for method {method!r}")


class EmptyStore(ProofloopError):
    """Report requested over an evaluation store with no records."""
