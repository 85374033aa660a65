"""Replayable run records: every CLI command persists its input, seeds,
and output under a content-hash id so any run can be re-executed and
compared later."""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone

TOOL_VERSION = "0.1.0"


def canonical_json(obj) -> str:
    """Deterministic serialization: sorted keys, no whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def make_record(command: str, input_obj, output_obj, seeds, tolerance: float) -> dict:
    body = {
        "command": command,
        "input": input_obj,
        "output": output_obj,
        "seeds": list(seeds),
        "tolerance": tolerance,
        "tool_version": TOOL_VERSION,
    }
    run_id = hashlib.sha256(canonical_json(body).encode()).hexdigest()
    record = dict(body)
    record["run_id"] = run_id
    record["timestamp"] = datetime.now(timezone.utc).isoformat()
    return record
