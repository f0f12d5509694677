"""Audit records: one inequality instance with its slack and verdict."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

VIOLATION_TOL = 1e-9


@dataclass(frozen=True)
class AuditRecord:
    """lhs <= rhs instance; passed is None for informational probes."""

    theorem_tag: str
    instance: str
    lhs: float
    rhs: float
    slack: float
    passed: bool | None
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "theorem_tag": self.theorem_tag,
            "instance": self.instance,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "pass": self.passed,
            "witness": self.witness,
        }


def make_record(tag: str, instance: str, lhs: float, rhs: float,
                witness: dict | None = None, tol: float = VIOLATION_TOL,
                informational: bool = False) -> AuditRecord:
    """Build a record for the claim lhs <= rhs.

    An infinite rhs passes by definition.  Near-zero sides are compared with
    a mixed absolute/relative threshold so that round-off on O(1) quantities
    does not read as a violation.
    """
    if math.isinf(rhs) and rhs > 0:
        slack = math.inf
        passed = True
    else:
        slack = rhs - lhs
        passed = slack >= -max(tol, tol * max(abs(lhs), abs(rhs)))
    return AuditRecord(
        theorem_tag=tag,
        instance=instance,
        lhs=float(lhs),
        rhs=float(rhs),
        slack=float(slack) if not math.isinf(slack) else math.inf,
        passed=None if informational else passed,
        witness=witness or {},
    )


def violations(records) -> list[AuditRecord]:
    return [r for r in records if r.passed is False]


def worst_slack(records) -> float:
    finite = [r.slack for r in records if not math.isinf(r.slack)]
    return min(finite) if finite else math.inf
