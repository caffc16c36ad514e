"""Named-check reports returned by every verifier."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    residual: float = 0.0
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed),
                "residual": float(self.residual), "detail": self.detail}


@dataclass
class Report:
    """Ordered collection of checks; passes iff every check passes."""

    title: str = ""
    checks: list[Check] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, residual: float = 0.0, detail: str = "") -> Check:
        chk = Check(name, bool(passed), float(residual), detail)
        self.checks.append(chk)
        return chk

    def add_residual(self, name: str, residual: float, bound: float, detail: str = "") -> Check:
        """Record ``residual`` and pass iff it is at most ``bound``."""
        return self.add(name, residual <= bound, residual, detail or f"bound {bound:.1e}")

    def extend(self, other: Report, prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.residual, c.detail))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(c.name == name for c in self.checks)

    def to_dict(self) -> dict:
        out = {"title": self.title, "passed": self.passed,
               "checks": [c.to_dict() for c in self.checks]}
        if self.info:
            out["info"] = self.info
        return out

    def __str__(self):
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name} residual={c.residual:.3e}"
                         + (f" ({c.detail})" if c.detail else ""))
        return "\n".join(lines)
