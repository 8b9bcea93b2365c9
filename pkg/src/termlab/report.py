"""Verdicts and the machine-readable report emitted by the command line."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any

from . import __version__

__all__ = ["Verdict", "Report", "EXACT"]

EXACT = "exact"


class Verdict(str, Enum):
    TERMINATES = "terminates"
    UNKNOWN = "unknown"
    NA = "n/a"

    def __str__(self) -> str:
        return self.value


def box_domain(box, input_cap: int | None) -> dict:
    return {"box": [list(r) for r in box.ranges], "input_cap": input_cap}


@dataclass
class Report:
    program: str | None
    method: str
    verdict: Verdict
    certificate: Any = None
    checked_domain: Any = EXACT
    diagnostics: list[str] = field(default_factory=list)
    timing: float = 0.0
    tool_version: str = __version__

    def __post_init__(self):
        if self.verdict == Verdict.TERMINATES and self.certificate is None:
            raise ValueError("a terminates verdict needs a certificate")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        return {
            k: d[k]
            for k in (
                "tool_version",
                "program",
                "method",
                "verdict",
                "certificate",
                "checked_domain",
                "diagnostics",
                "timing",
            )
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False, default=_default)


def _default(obj):
    if isinstance(obj, float) and obj == float("inf"):
        return "inf"
    if isinstance(obj, (set, frozenset, tuple)):
        return list(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")
