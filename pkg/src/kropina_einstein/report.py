"""Deterministic report serialization.

Floats are written with 17 significant digits so that a JSON report is a
lossless, byte-reproducible record of a run.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

REPORT_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "kropina-einstein report",
    "type": "object",
    "required": ["command", "instance", "config", "checks", "verdict"],
    "properties": {
        "command": {"type": "string"},
        "instance": {"type": "object"},
        "config": {"type": "object"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "pass", "value", "tolerance"],
                "properties": {
                    "name": {"type": "string"},
                    "pass": {"type": "boolean"},
                    "value": {"type": ["number", "null"]},
                    "tolerance": {"type": ["number", "null"]},
                },
                "additionalProperties": False,
            },
        },
        "verdict": {"type": "string"},
        "sigma": {"type": ["number", "null"]},
        "details": {"type": "object"},
    },
}


def to_plain(obj: Any) -> Any:
    """Convert numpy scalars/arrays and tuples to JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _number(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    return text if any(ch in text for ch in ".en") else text + ".0"


def _dump(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_dump(v, indent, level) for v in obj) + "]"
        items = [pad + _dump(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    return _dump(to_plain(obj), indent, 0) + "\n"


def check_entry(check) -> dict:
    return {"name": check.name, "pass": bool(check.passed),
            "value": float(check.value), "tolerance": float(check.tolerance)}


def render_text(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    inst = report["instance"]
    lines.append("instance: " + ", ".join(f"{k}={v}" for k, v in inst.items()))
    for c in report["checks"]:
        mark = "PASS" if c["pass"] else "FAIL"
        lines.append(f"  [{mark}] {c['name']}: {c['value']:.6g} (tol {c['tolerance']:.1e})")
    if report.get("sigma") is not None:
        lines.append(f"sigma: {report['sigma']:.12g}")
    details = report.get("details", {})
    for key, val in details.items():
        if key == "table":
            lines.append("table:")
            for row in val:
                lines.append(
                    f"  {row['label']:<24} killing_dim={row['killing_dim']}  sigma={row['sigma']:.6g}  "
                    f"residual={row['einstein_residual']:.2e}  admits={row['admits']}"
                )
        elif isinstance(val, (int, float, str, bool)):
            lines.append(f"{key}: {val}")
    lines.append(f"verdict: {report['verdict']}")
    return "\n".join(lines) + "\n"
