"""Small shared helpers: canonical JSON, digests, combinatorial guards."""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any

import numpy as np


def jsonable(obj: Any) -> Any:
    """Recursively convert numpy scalars/arrays and tuples to JSON-able types."""
    if isinstance(obj, np.ndarray):
        return [jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def canonical_json(obj: Any) -> str:
    """Deterministic JSON encoding (sorted keys, no whitespace)."""
    return json.dumps(jsonable(obj), sort_keys=True, separators=(",", ":"))


def digest(obj: Any, length: int = 16) -> str:
    """Short stable hex digest of an arbitrary JSON-able object."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:length]


def comb_count(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)
