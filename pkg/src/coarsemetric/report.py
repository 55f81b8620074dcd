"""Report emission: JSON with 12 significant digits, plus labelled CSV blocks."""

from __future__ import annotations

import csv
import dataclasses
import datetime as _dt
import io
import json
import math

import numpy as np

from . import __version__

SIG_DIGITS = 12


def _float(x: float):
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.{SIG_DIGITS}g}")


def jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (frozenset, set)):
        return sorted(jsonable(v) for v in obj)
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    return obj


def render(command: str, payload: dict, seed: int | None = None, ok: bool = True) -> str:
    """Full report text; the ``generated_at`` line is the only nondeterministic one."""
    doc = {
        "header": {
            "tool": "coarsemetric",
            "version": __version__,
            "command": command,
            "seed": seed,
            "generated_at": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        },
        "status": "PASS" if ok else "FAIL",
        "result": jsonable(payload),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def strip_timestamp(text: str) -> str:
    return "\n".join(line for line in text.splitlines() if '"generated_at"' not in line)


def csv_blocks(blocks: list[tuple[str, list[str], list]]) -> str:
    """Concatenate ``# label`` headed CSV tables separated by blank lines."""
    buf = io.StringIO()
    for label, header, rows in blocks:
        buf.write(f"# {label}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.{SIG_DIGITS}g}" if isinstance(v, (float, np.floating)) else v for v in row])
        buf.write("\n")
    return buf.getvalue()


def matrix_block(label: str, points, m: np.ndarray) -> tuple[str, list[str], list]:
    return label, ["point", *points], [[p, *map(float, row)] for p, row in zip(points, m)]
