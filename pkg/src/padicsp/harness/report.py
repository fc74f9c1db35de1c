"""Machine-readable campaign reports.

Reports are deterministic given the seed: byte-identical apart from the
per-check wall times.  Rationals serialize as "num/den" strings and
roots as coefficient vectors so payloads can be replayed.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction as Q

from ..rootsys import Root, WeylElem

PASS = "pass"
FAIL = "fail"
FLAGGED = "flagged"
SKIPPED = "skipped"

_STATUSES = (PASS, FAIL, FLAGGED, SKIPPED)


def encode_value(v):
    """JSON-safe view of the values that show up in payloads."""
    if isinstance(v, Q):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, Root):
        return {"root": list(v.coeffs)}
    if isinstance(v, WeylElem):
        return {"weyl": list(v.imgs)}
    if isinstance(v, dict):
        return {str(k): encode_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode_value(x) for x in v]
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if hasattr(v, "rows"):
        return {"rows": encode_value(v.rows)}
    if hasattr(v, "value"):
        return encode_value(v.value)
    return repr(v)


@dataclass
class CheckRecord:
    name: str
    status: str
    cases: int = 0
    parameters: dict = field(default_factory=dict)
    counterexample: dict = None
    seconds: float = 0.0

    def __post_init__(self):
        if self.status not in _STATUSES:
            raise ValueError(f"bad status {self.status!r}")
        if self.status == FAIL and not self.counterexample:
            raise ValueError("a failed check must carry a counterexample")

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "cases": self.cases,
            "parameters": encode_value(self.parameters),
            "counterexample": encode_value(self.counterexample),
            "seconds": round(self.seconds, 3),
        }


@dataclass
class Report:
    version: str
    config: dict
    checks: list = field(default_factory=list)

    def add(self, record: CheckRecord):
        self.checks.append(record)

    @property
    def failed(self) -> list:
        return [r for r in self.checks if r.status == FAIL]

    @property
    def ok(self) -> bool:
        return not self.failed

    def as_dict(self) -> dict:
        return {
            "tool": "padicsp",
            "version": self.version,
            "config": encode_value(self.config),
            "checks": [r.as_dict() for r in sorted(self.checks, key=lambda r: r.name)],
            "summary": {
                "pass": sum(1 for r in self.checks if r.status == PASS),
                "fail": sum(1 for r in self.checks if r.status == FAIL),
                "flagged": sum(1 for r in self.checks if r.status == FLAGGED),
                "skipped": sum(1 for r in self.checks if r.status == SKIPPED),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def write(self, path: str):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
