"""Check reports shared by the verifier, the proof replay and the CLI."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional


class CheckStatus(str, enum.Enum):
    PASS_SYMBOLIC = "PassSymbolic"
    PASS_NUMERIC = "PassNumeric"
    INCONCLUSIVE = "Inconclusive"
    FAIL = "Fail"
    NOT_APPLICABLE = "NotApplicable"

    @property
    def ok(self) -> bool:
        return self is not CheckStatus.FAIL


@dataclass
class CheckEntry:
    name: str
    status: CheckStatus
    residual: Optional[float] = None
    context: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"name": self.name, "status": self.status.value}
        out["residual"] = _json_float(self.residual)
        out["context"] = {k: _jsonable(v) for k, v in sorted(self.context.items())}
        return out


@dataclass
class CheckReport:
    title: str = ""
    entries: List[CheckEntry] = field(default_factory=list)

    # building ------------------------------------------------------------
    def add(self, name, status, residual=None, **context) -> CheckEntry:
        entry = CheckEntry(name, CheckStatus(status), residual, dict(context))
        self.entries.append(entry)
        return entry

    def numeric(self, name: str, residual: float, tol: float, **context) -> CheckEntry:
        """Record a numeric comparison: pass iff ``residual < tol``."""
        ok = residual is not None and math.isfinite(residual) and residual < tol
        status = CheckStatus.PASS_NUMERIC if ok else CheckStatus.FAIL
        return self.add(name, status, residual, tol=tol, **context)

    def extend(self, other: "CheckReport", prefix: str = "") -> "CheckReport":
        for e in other.entries:
            self.entries.append(CheckEntry(prefix + e.name, e.status, e.residual, dict(e.context)))
        return self

    # queries -------------------------------------------------------------
    @property
    def passed(self) -> bool:
        return all(e.status.ok for e in self.entries)

    @property
    def failures(self) -> List[CheckEntry]:
        return [e for e in self.entries if e.status is CheckStatus.FAIL]

    def __getitem__(self, name: str) -> CheckEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(e.name == name for e in self.entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def names(self) -> List[str]:
        return [e.name for e in self.entries]

    def max_residual(self, names: Iterable[str] | None = None) -> float:
        pool = self.entries if names is None else [self[n] for n in names]
        vals = [e.residual for e in pool if e.residual is not None]
        return max(vals, default=0.0)

    # output --------------------------------------------------------------
    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "passed": self.passed,
            "entries": [e.to_dict() for e in self.entries],
        }

    def to_text(self) -> str:
        rows = [("check", "status", "residual")]
        for e in self.entries:
            res = "" if e.residual is None else f"{e.residual:.3e}"
            rows.append((e.name, e.status.value, res))
        widths = [max(len(r[i]) for r in rows) for i in range(3)]
        lines = [f"# {self.title}"] if self.title else []
        for r in rows:
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return x


def _jsonable(v):
    if isinstance(v, (str, bool, int)) or v is None:
        return v
    if isinstance(v, float):
        return _json_float(v)
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in sorted(v.items(), key=lambda kv: str(kv[0]))}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "tolist"):
        return _jsonable(v.tolist())
    if isinstance(v, complex):
        return [_json_float(v.real), _json_float(v.imag)]
    return str(v)
