"""JSON documents and CSV tables written by the command line."""

from __future__ import annotations

import csv
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .lab import ExperimentReport
from .timefreq import LatticeCoefficients
from .verdict import ConditionVerdict, plain

SCHEMA = 1


def timestamp() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def document(kind: str, body: dict, generated_at: str | None = None) -> dict:
    """Wrap a payload with the schema version, its kind and a timestamp."""
    return {"schema": SCHEMA, "kind": kind, "generated_at": generated_at or timestamp(), **plain(body)}


def dumps(doc: dict) -> str:
    return json.dumps(plain(doc), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(doc: dict, path: str | Path | None = None) -> None:
    text = dumps(doc)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def strip_timestamp(text: str) -> dict:
    """Parse a document and drop its ``generated_at`` field (for determinism checks)."""
    doc = json.loads(text)
    doc.pop("generated_at", None)
    return doc


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def coefficients_csv(c: LatticeCoefficients, path: str | Path) -> None:
    write_csv(path, ("k", "n", "x", "xi", "re", "im"),
              ((k, n, c.a * k, c.b * n, re, im) for k, n, re, im in c.rows()))


def samples_csv(t, values, path: str | Path) -> None:
    v = np.asarray(values, dtype=complex)
    write_csv(path, ("t", "re", "im"), zip(np.asarray(t, float), v.real, v.imag))


def table_csv(report: ExperimentReport, path: str | Path) -> bool:
    """Write a report's per-point table; returns ``False`` when it has none."""
    if not report.table:
        return False
    cols = list(report.table)
    arrays = [np.asarray(report.table[c]).ravel() for c in cols]
    write_csv(path, cols, zip(*arrays))
    return True


def verdicts_csv(verdicts: Sequence[ConditionVerdict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(("condition", "status"))
    for v in verdicts:
        w.writerow((v.condition, v.status.value))
    return buf.getvalue()


def read_verdicts(doc: dict) -> list[ConditionVerdict]:
    return [ConditionVerdict.from_dict(v) for v in doc.get("verdicts", [])]


def read_experiments(doc: dict) -> list[ExperimentReport]:
    return [ExperimentReport.from_dict(e) for e in doc.get("experiments", [])]
