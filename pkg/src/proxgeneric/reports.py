"""Report containers shared by the probes and their JSON encoding."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class CheckReport:
    """Outcome of a randomized or enumerative property check.

    `worst_margin` >= 0 (or >= the stated slack) means pass; `witness` holds
    the inputs that achieved the worst margin, so a rerun with the same seed
    reproduces it.
    """

    property: str
    samples: int
    worst_margin: float
    passed: bool
    witness: dict = field(default_factory=dict)
    seed: int | None = None
    details: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "property": self.property, "samples": self.samples,
            "worst_margin": self.worst_margin, "passed": self.passed,
            "witness": self.witness, "seed": self.seed, "details": self.details,
        }


def plain(obj):
    """Convert numpy containers and scalars into JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if hasattr(obj, "to_record"):
        return plain(obj.to_record())
    return obj


def dumps(obj) -> str:
    """Canonical single-line JSON: sorted keys, no whitespace, repr floats."""
    return json.dumps(plain(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)
