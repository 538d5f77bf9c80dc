"""Small helpers shared by several modules."""

import json
import math


def round_half_up(x: float) -> int:
    """Nearest integer with .5 always rounding up (2.5 -> 3, -0.5 -> 0)."""
    return int(math.floor(x + 0.5))


def clamp_score(value: int, lo: int = 0, hi: int = 25) -> int:
    return max(lo, min(hi, value))


def canonical_json(obj) -> str:
    """Stable serialization used for hashing and byte-identical artifacts."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
