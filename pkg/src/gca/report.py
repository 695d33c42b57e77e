"""Machine-checkable verdicts."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Certificate:
    """Named boolean checks plus the first failure and its witness."""

    kind: str
    checks: dict = field(default_factory=dict)
    failure: str | None = None
    witness: object = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failure is None and all(self.checks.values())

    def record(self, name: str, passed: bool, witness=None) -> bool:
        self.checks[name] = bool(passed)
        if not passed and self.failure is None:
            self.failure = name
            self.witness = witness
        return bool(passed)

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        out = {"kind": self.kind, "ok": self.ok, "checks": dict(self.checks)}
        if self.failure is not None:
            out["failure"] = self.failure
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out
