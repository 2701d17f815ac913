"""Parsers for backend reply text.

Scripted and live replies alike are free text; these helpers accept JSON
first and fall back to line-oriented forms so fixtures stay readable.
"""

from __future__ import annotations

import json
from typing import Any, Optional


def try_json(text: str) -> Optional[Any]:
    try:
        return json.loads(text)
    except (json.JSONDecodeError, TypeError):
        return None


def parse_string_list(text: str) -> list[str]:
    """JSON array of strings, or one item per non-empty line."""
    doc = try_json(text)
    if isinstance(doc, list):
        return [str(item).strip() for item in doc if str(item).strip()]
    return [line.strip() for line in text.splitlines() if line.strip()]
