"""Stable JSON emission: fixed key order, fixed formatting, trailing newline.

Payload dicts are built with deterministic insertion order, so identical runs
serialize to identical bytes.
"""

from __future__ import annotations

import json


def dumps_stable(payload: dict) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=True) + "\n"
