"""Verdict containers shared by the checkers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional


def to_hex(n: int) -> str:
    if n < 0:
        return "-0x" + format(-n, "x")
    return "0x" + format(n, "x")


def from_hex(s: str) -> int:
    s = s.strip().lower()
    neg = s.startswith("-")
    if neg:
        s = s[1:]
    if not s.startswith("0x"):
        raise ValueError(f"not a 0x-prefixed hex natural: {s!r}")
    v = int(s, 16)
    return -v if neg else v


@dataclass
class CheckReport:
    check: str
    strategy: str
    range: tuple
    verdict: str = "pass"
    violation: Optional[dict] = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def fail(self, **violation: Any) -> "CheckReport":
        self.verdict = "fail"
        self.violation = violation
        return self

    def to_dict(self) -> dict:
        out = {
            "check": self.check,
            "strategy": self.strategy,
            "range": list(self.range),
            "verdict": self.verdict,
            "violation": self.violation,
        }
        out.update(self.details)
        return out
