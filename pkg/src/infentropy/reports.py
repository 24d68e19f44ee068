"""Result records shared by the estimators and their JSON form."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    DIVERGED = "diverged"


def finite_or_none(x):
    """JSON has no infinities; infinite markers serialize as null."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class SeminormReport:
    functional: str          # holder | sobolev | zygmund | modulus_ratio
    parameter: float | None  # alpha, p, or None
    empirical: float
    bound: float | None = None
    verdict: Verdict = Verdict.PASS
    grid: dict = field(default_factory=dict)
    tol: float = 1e-9

    def __post_init__(self):
        if self.empirical < 0:
            raise ValueError("empirical seminorm must be nonnegative")

    @classmethod
    def judged(cls, functional, parameter, empirical, bound=None, grid=None,
               tol=1e-9, diverged=False):
        if diverged:
            verdict = Verdict.DIVERGED
        elif bound is None or math.isinf(bound):
            verdict = Verdict.PASS if math.isfinite(empirical) else Verdict.DIVERGED
        else:
            verdict = Verdict.PASS if empirical <= bound * (1 + tol) else Verdict.FAIL
        return cls(functional, parameter, empirical, bound, verdict, dict(grid or {}), tol)

    def to_dict(self) -> dict:
        return {
            "kind": "seminorm",
            "functional": self.functional,
            "parameter": finite_or_none(self.parameter),
            "empirical": finite_or_none(self.empirical),
            "bound": finite_or_none(self.bound),
            "verdict": self.verdict.value,
            "grid": _plain(self.grid),
        }


@dataclass
class EntropyReport:
    region: tuple[float, float]
    method: str              # BranchCount | LapGrowth | BowenSpanning
    horizon: int
    lower_bound_nats: float
    raw_counts: list[int] = field(default_factory=list)
    delta: float | None = None
    partial: bool = False

    def __post_init__(self):
        if self.lower_bound_nats < 0:
            raise ValueError("entropy lower bound must be nonnegative")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = "entropy"
        d["region"] = [float(v) for v in self.region]
        d["lower_bound_nats"] = finite_or_none(self.lower_bound_nats)
        d["raw_counts"] = [int(c) for c in self.raw_counts]
        return d


@dataclass
class CheckReport:
    """A named scalar check: observed value against a tolerance or expectation."""

    name: str
    value: float
    threshold: float | None
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": "check",
            "name": self.name,
            "value": finite_or_none(self.value),
            "threshold": finite_or_none(self.threshold),
            "verdict": Verdict.PASS.value if self.passed else Verdict.FAIL.value,
            "detail": _plain(self.detail),
        }


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, float):
        return finite_or_none(obj)
    if hasattr(obj, "item"):
        return _plain(obj.item())
    return obj


REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["family", "params", "reports", "overall"],
    "properties": {
        "family": {"enum": ["tent", "gab", "fa", "zygmund"]},
        "params": {"type": "object"},
        "overall": {"enum": ["pass", "fail"]},
        "reports": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "suite", "expected", "ok"],
                "properties": {
                    "kind": {"enum": ["seminorm", "entropy", "check"]},
                    "suite": {"enum": ["regularity", "entropy", "measure"]},
                    "expected": {"enum": ["pass", "fail", "diverged"]},
                    "ok": {"type": "boolean"},
                    "verdict": {"enum": ["pass", "fail", "diverged"]},
                    "functional": {"type": "string"},
                    "empirical": {"type": ["number", "null"]},
                    "bound": {"type": ["number", "null"]},
                    "lower_bound_nats": {"type": ["number", "null"]},
                    "raw_counts": {"type": "array", "items": {"type": "integer"}},
                },
            },
        },
    },
}
