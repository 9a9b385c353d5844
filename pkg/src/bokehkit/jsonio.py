"""Deterministic JSON serialization for machine-readable outputs.

All reports use sorted keys and floats rounded to 6 significant digits so
re-running a command on unchanged inputs produces byte-identical files.
Non-finite floats serialize as strings ("inf", "-inf", "nan").
"""

from __future__ import annotations

import json
import math
from typing import Any


def round_floats(obj: Any) -> Any:
    """Recursively round floats to 6 significant digits; inf/nan to strings."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return float(f"{obj:.6g}")
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def canonical_json(obj: Any) -> str:
    """Serialize with sorted keys, 2-space indent and a trailing newline."""
    return json.dumps(round_floats(obj), sort_keys=True, indent=2) + "\n"


def parse_float(value: Any) -> float:
    """Inverse of the non-finite string encoding used by round_floats."""
    if value == "inf":
        return math.inf
    if value == "-inf":
        return -math.inf
    if value == "nan":
        return math.nan
    return float(value)
