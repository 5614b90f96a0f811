"""Check results and their deterministic JSON serialization."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable

ASSERT = "assert"      # pass iff residual < tolerance
CONTROL = "control"    # negative control: pass iff residual > tolerance (a floor)
REPORT = "report"      # informational, never fails

CHECK_FIELDS = ("name", "geometry", "residual", "tolerance", "samples", "pass", "witness", "kind")


@dataclass(frozen=True)
class Check:
    name: str
    geometry: str
    residual: float
    tolerance: float | None
    samples: int
    kind: str = ASSERT
    witness: float | None = None

    @property
    def passed(self) -> bool:
        if self.kind == REPORT:
            return True
        if not math.isfinite(self.residual):
            return False
        if self.kind == CONTROL:
            return self.residual > self.tolerance
        return self.residual < self.tolerance

    def scaled(self, factor: float) -> "Check":
        """Loosen (factor > 1) or tighten asserted tolerances; floors scale inversely."""
        if self.tolerance is None or self.kind == REPORT:
            return self
        tol = self.tolerance * factor if self.kind == ASSERT else self.tolerance / factor
        return replace(self, tolerance=tol)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "geometry": self.geometry,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "pass": self.passed,
            "witness": self.witness,
            "kind": self.kind,
        }


def check(name, geometry, residual, tolerance, samples, kind=ASSERT, witness=None) -> Check:
    return Check(name, geometry, float(residual), None if tolerance is None else float(tolerance),
                 int(samples), kind, None if witness is None else float(witness))


@dataclass
class CheckReport:
    suite: str
    checks: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def residual(self) -> float:
        asserted = [c.residual for c in self.checks if c.kind == ASSERT]
        return max(asserted) if asserted else 0.0

    def extend(self, checks: Iterable[Check]) -> "CheckReport":
        self.checks.extend(checks)
        return self

    def by_name(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> str:
        return dumps({
            "suite": self.suite,
            "checks": [c.as_dict() for c in self.checks],
            "meta": self.meta,
        })


# ---------------------------------------------------------------------------
# serialization: fixed key order, 17 significant digits
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _emit(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):
        return _emit(obj.item(), indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with insertion-ordered keys and 17-digit floats."""
    return _emit(obj, indent, 0) + "\n"
