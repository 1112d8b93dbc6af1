"""Outcome records shared by every checker."""

from __future__ import annotations

from dataclasses import dataclass, field


def _text(value) -> str | None:
    if value is None:
        return None
    if hasattr(value, "to_text"):
        return value.to_text()
    return str(value)


@dataclass
class CheckReport:
    """Result of an exact check.  ``witness`` names the first failing input."""

    name: str
    passed: bool
    checked: int = 0
    witness: object = None
    order: int | None = None
    residual: object = None
    detail: str = ""

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        witness = self.witness
        if isinstance(witness, tuple):
            witness = [_text(w) for w in witness]
        else:
            witness = _text(witness)
        return {
            "check": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "witness": witness,
            "order": self.order,
            "residual": _text(self.residual),
            "detail": self.detail,
        }

    def summary(self) -> str:
        if self.passed:
            return f"{self.name}: pass ({self.checked} checked)"
        parts = [f"{self.name}: FAIL"]
        if self.order is not None:
            parts.append(f"at nu^{self.order}")
        if self.witness is not None:
            w = self.witness
            if isinstance(w, tuple):
                w = "(" + ", ".join(_text(x) for x in w) + ")"
            parts.append(f"on {_text(w)}")
        if self.residual is not None:
            parts.append(f"residual {_text(self.residual)}")
        if self.detail:
            parts.append(f"[{self.detail}]")
        return " ".join(parts)


@dataclass
class CovarianceReport:
    passed: bool
    witnesses: list = field(default_factory=list)  # (i, j, order, residual), 0-based i, j

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return {
            "check": "covariance",
            "passed": self.passed,
            "witnesses": [
                {"i": i + 1, "j": j + 1, "order": r, "residual": res.to_text()}
                for i, j, r, res in self.witnesses
            ],
        }

    def summary(self) -> str:
        if self.passed:
            return "covariance: pass"
        i, j, r, res = self.witnesses[0]
        return f"covariance: FAIL on (x{i + 1}, x{j + 1}) at nu^{r} residual {res.to_text()}"


def combine(name: str, reports) -> CheckReport:
    """Fold a sequence of reports into one; keeps the first failure."""
    total = 0
    for rep in reports:
        total += getattr(rep, "checked", 1)
        if not rep:
            if isinstance(rep, CheckReport):
                return CheckReport(name, False, total, rep.witness, rep.order, rep.residual, rep.detail)
            return CheckReport(name, False, total, detail=rep.summary())
    return CheckReport(name, True, total)
