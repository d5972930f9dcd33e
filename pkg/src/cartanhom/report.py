"""Check reports shared by the solver, the suites and the command line."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"
STATUSES = (PASS, FAIL, INCONCLUSIVE)
SCHEMA_VERSION = 1

EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}


def worst(*statuses: str) -> str:
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    if FAIL in statuses:
        return FAIL
    return PASS


def jsonable(obj):
    """Exact values become strings ("a/b"); containers are converted recursively."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}" if obj.denominator != 1 else obj.numerator
    if isinstance(obj, (int, float, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "as_dict"):
        return jsonable(obj.as_dict())
    return str(obj)


@dataclass
class CheckReport:
    suite: str
    config: Optional[Dict[str, Any]]
    status: str
    details: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    counterexample: Optional[Dict[str, Any]] = None
    dims: Optional[Dict[str, Any]] = None
    nullspace_dim: Optional[int] = None
    seconds: Optional[float] = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")

    @property
    def ok(self) -> bool:
        return self.status == PASS

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def as_dict(self) -> Dict[str, Any]:
        from . import __version__

        return jsonable({
            "suite": self.suite,
            "config": self.config,
            "status": self.status,
            "dims": self.dims,
            "nullspace_dim": self.nullspace_dim,
            "counterexample": self.counterexample,
            "seed": self.seed,
            "seconds": None if self.seconds is None else round(self.seconds, 3),
            "details": self.details,
            "version": __version__,
            "schema": SCHEMA_VERSION,
        })

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.as_dict(), indent=indent, sort_keys=False)

    def summary(self) -> str:
        cfg = self.config or {}
        label = cfg.get("family", "")
        if label:
            label += f"({cfg.get('m')},{cfg.get('n')}" + (f";{cfg['lambda']}" if "lambda" in cfg else "") + ")"
        return f"{self.status:<12} {self.suite:<16} {label}"
