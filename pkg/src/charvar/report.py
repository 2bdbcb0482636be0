"""Canonical JSON for reports: sorted keys, floats as ``%.12e`` numbers.

Floats are rounded to that precision before writing, so reading a report
back gives exactly the values that were written, and rewriting gives the
same bytes.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


def normalize(obj):
    """Plain JSON types with every float rounded to 12 significant decimals."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [normalize(obj.real), normalize(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float("%.12e" % x)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj, indent: int, out: list):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for n, k in enumerate(keys):
            out.append(pad + "  " + json.dumps(k) + ": ")
            _emit(obj[k], indent + 1, out)
            out.append(",\n" if n < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, list):
        if all(not isinstance(v, (dict, list)) for v in obj):
            out.append("[")
            for n, v in enumerate(obj):
                if n:
                    out.append(", ")
                _emit(v, indent, out)
            out.append("]")
            return
        out.append("[\n")
        for n, v in enumerate(obj):
            out.append(pad + "  ")
            _emit(v, indent + 1, out)
            out.append(",\n" if n < len(obj) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, float):
        out.append("%.12e" % obj)
    elif obj is None:
        out.append("null")
    elif isinstance(obj, int):
        out.append(str(obj))
    else:
        out.append(json.dumps(obj))


def canonical_json(report) -> str:
    out = []
    _emit(normalize(report), 0, out)
    return "".join(out) + "\n"


def write_report(report, path) -> None:
    """Write canonical JSON; ``OSError`` propagates for unwritable paths."""
    Path(path).write_text(canonical_json(report), encoding="utf-8")


def read_report(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    if isinstance(v, list):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(v)


def summary_table(report: dict) -> str:
    """Short human-readable view of a report dictionary."""
    lines = []
    diagram = report.get("diagram")
    if isinstance(diagram, dict):
        lines.append(f"diagram: {diagram.get('name') or '(unnamed)'} (genus {diagram.get('genus')})")
    if "rank" in report:
        lines.append(f"rank: {report['rank']}")
    comps = report.get("components")
    if comps is not None:
        lines.append(f"{'dim':>4}  {'classification':<18} {'samples':>7}  trace signature")
        for c in comps:
            lines.append(f"{c['dim']:>4}  {c['classification']:<18} {c['samples']:>7}  {_fmt(c['trace_signature'])}")
    if "h1" in report:
        h = report["h1"]
        lines.append(f"H1: free rank {h['free_rank']}, torsion {h['torsion']}")
    if "euler_prediction" in report:
        lines.append(f"euler prediction: {report['euler_prediction']}")
    for c in report.get("checks", []):
        mark = "PASS" if c["pass"] else "FAIL"
        lines.append(f"[{mark}] {c['name']}" + (f": {c['detail']}" if c.get("detail") else ""))
    for w in report.get("warnings", []):
        lines.append(f"warning: {w}")
    return "\n".join(lines)
