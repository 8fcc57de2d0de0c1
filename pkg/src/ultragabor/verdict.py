"""Verdict records produced by every condition checker."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np


class Status(str, enum.Enum):
    HOLDS = "HoldsWithWitness"
    FAILS = "FailsWithCounterexample"
    INCONCLUSIVE = "Inconclusive"


def _plain(value: Any) -> Any:
    """Convert numpy scalars and containers into JSON-friendly Python values."""
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        v = float(value)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, enum.Enum):
        return value.value
    return value


@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of a finite-evidence check of one condition.

    ``witness`` holds the constants that make the inequality true on the
    sampled range, ``counterexample`` the inputs where it was seen to fail,
    and ``range`` describes the grids and ladders that were searched.
    """

    condition: str
    status: Status
    witness: dict = field(default_factory=dict)
    counterexample: dict = field(default_factory=dict)
    range: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "status": self.status.value,
            "witness": _plain(self.witness),
            "counterexample": _plain(self.counterexample),
            "range": _plain(self.range),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ConditionVerdict":
        return cls(
            condition=str(data["condition"]),
            status=Status(data["status"]),
            witness=dict(data.get("witness", {})),
            counterexample=dict(data.get("counterexample", {})),
            range=dict(data.get("range", {})),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def holds(condition: str, witness: dict, search: dict) -> ConditionVerdict:
    return ConditionVerdict(condition, Status.HOLDS, witness=witness, range=search)


def fails(condition: str, counterexample: dict, search: dict) -> ConditionVerdict:
    return ConditionVerdict(condition, Status.FAILS, counterexample=counterexample, range=search)


def inconclusive(condition: str, search: dict, note: str = "") -> ConditionVerdict:
    rng = dict(search)
    if note:
        rng["note"] = note
    return ConditionVerdict(condition, Status.INCONCLUSIVE, range=rng)


plain = _plain
