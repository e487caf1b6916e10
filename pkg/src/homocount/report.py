"""Report files: deterministic JSON/CSV bodies, atomic writes, structured diffs.

A JSON report is ``{"body": ..., "body_sha256": ..., "timestamps": ...}``.
Only the body is hashed, and it depends on nothing but the resolved
config and the toolkit version, so reruns give byte-identical bodies.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np

from .cache import atomic_write


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, tuple)):
        return list(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _clean(o):
    """Replace non-finite floats, which JSON cannot carry, by strings."""
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if isinstance(o, dict):
        return {str(k): _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def canonical(obj) -> str:
    return json.dumps(_clean(json.loads(json.dumps(obj, default=_default))), sort_keys=True, indent=1)


def build_body(experiment: str, config: dict, chash: str, version: str, outcome) -> Dict[str, Any]:
    return {
        "experiment": experiment,
        "config_hash": chash,
        "config": config,
        "version": version,
        "rows": outcome.rows,
        "extra": outcome.extra,
        "verdicts": outcome.verdicts,
        "all_passed": all(v["passed"] for v in outcome.verdicts),
    }


def csv_text(rows: List[dict]) -> str:
    if not rows:
        return ""
    cols: List[str] = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([json.dumps(_clean(r.get(c)), default=_default) if isinstance(r.get(c), (list, dict))
                    else ("" if r.get(c) is None else r.get(c)) for c in cols])
    return buf.getvalue()


def write_report(out_dir, body: Dict[str, Any], started: datetime) -> Tuple[Path, Path]:
    out_dir = Path(out_dir)
    stem = f"{body['experiment']}-{body['config_hash']}"
    text = canonical(body)
    doc = {
        "body": json.loads(text),
        "body_sha256": hashlib.sha256(text.encode()).hexdigest(),
        "timestamps": {"started": started.isoformat(), "finished": datetime.now(timezone.utc).isoformat()},
    }
    jpath, cpath = out_dir / f"{stem}.json", out_dir / f"{stem}.csv"
    atomic_write(cpath, csv_text(body["rows"]).encode())
    atomic_write(jpath, (json.dumps(doc, sort_keys=True, indent=1) + "\n").encode())
    return jpath, cpath


def body_text(path) -> str:
    """The hashed region of a report, as written."""
    return canonical(json.loads(Path(path).read_text())["body"])


class ReportMismatch(ValueError):
    """Reports of different experiment types cannot be compared."""


def _close(a, b, rtol: float, atol: float) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return math.isclose(a, b, rel_tol=rtol, abs_tol=atol)
    return a == b


def report_diff(a, b, rtol: float = 1e-9, atol: float = 1e-12) -> List[dict]:
    """Row-level and verdict-level differences between two reports."""
    A = json.loads(Path(a).read_text())["body"]
    B = json.loads(Path(b).read_text())["body"]
    if A["experiment"] != B["experiment"]:
        raise ReportMismatch(f"experiment types differ: {A['experiment']} vs {B['experiment']}")
    diffs = []
    if len(A["rows"]) != len(B["rows"]):
        diffs.append({"kind": "row_count", "a": len(A["rows"]), "b": len(B["rows"])})
    for i, (ra, rb) in enumerate(zip(A["rows"], B["rows"])):
        for k in sorted(set(ra) | set(rb)):
            if not _close(ra.get(k), rb.get(k), rtol, atol):
                diffs.append({"kind": "row", "index": i, "field": k, "a": ra.get(k), "b": rb.get(k)})
    va = {v["name"]: v for v in A["verdicts"]}
    vb = {v["name"]: v for v in B["verdicts"]}
    for name in sorted(set(va) | set(vb)):
        pa, pb = va.get(name, {}).get("passed"), vb.get(name, {}).get("passed")
        if pa != pb:
            diffs.append({"kind": "verdict", "name": name, "a": pa, "b": pb})
    return diffs
