"""Canonical JSON serialization used for deck manifests and determinism tests.

UTF-8, keys sorted, no insignificant whitespace, floats printed with six
decimal digits.
"""

import json
import math
from typing import Any


def _encode(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite float in manifest: {value}")
        text = f"{value:.6f}"
        return "0.000000" if text == "-0.000000" else text
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        items = sorted(value.items(), key=lambda kv: str(kv[0]))
        body = ",".join(
            f"{json.dumps(str(k), ensure_ascii=False)}:{_encode(v)}" for k, v in items
        )
        return "{" + body + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in value) + "]"
    raise TypeError(f"cannot encode {type(value).__name__} in manifest")


def canonical_json(value: Any) -> bytes:
    """Serialize plain JSON data (dicts, lists, scalars) canonically.

    Returns:
        UTF-8 bytes terminated by a newline
    """
    return (_encode(value) + "\n").encode("utf-8")
