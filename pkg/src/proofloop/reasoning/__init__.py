from .analysis import ProblemRepresentation, analyze_problem
from .commandments import (
    CommandmentReport,
    CommandmentRule,
    Issue,
    check_commandments,
    lint_format,
)
from .knowledge import (
    AssumptionCheck,
    KnowledgeEntry,
    default_bank_path,
    kb_check_assumptions,
    kb_query,
    load_bank,
)
from .literature import ExtractedItem, LiteratureSummary, understand_literature

__all__ = [
    "AssumptionCheck",
    "CommandmentReport",
    "CommandmentRule",
    "ExtractedItem",
    "Issue",
    "KnowledgeEntry",
    "LiteratureSummary",
    "ProblemRepresentation",
    "analyze_problem",
    "check_commandments",
    "default_bank_path",
    "kb_check_assumptions",
    "kb_query",
    "lint_format",
    "load_bank",
    "understand_literature",
]
