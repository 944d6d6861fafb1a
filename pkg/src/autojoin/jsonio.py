"""Canonical JSON rendering shared by the CLI and the HTTP service.

Both surfaces serialize plan results through this function so their output
is byte-identical for the same input.
"""

from __future__ import annotations

import json
from typing import Any


def canonical_json(value: Any) -> str:
    """Compact, deterministic JSON: no extra whitespace, keys kept in order."""
    return json.dumps(value, ensure_ascii=False, separators=(",", ":"))
