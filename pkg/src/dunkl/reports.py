"""Uniform result records for experiments and the command-line front end.

Every experiment returns an OperatorReport: an identifier, the resolved
parameters, measured values, the tolerances they were held to, and a verdict.
Serialization is deterministic (sorted keys, default float repr) so that equal
inputs produce byte-identical documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

REPORT_SCHEMA_VERSION = 1

__all__ = ["OperatorReport", "REPORT_SCHEMA_VERSION"]


def _plain(obj):
    """Coerce numpy scalars / arrays / tuples to JSON-friendly values."""
    if hasattr(obj, "item") and getattr(obj, "ndim", None) in (None, 0):
        return _plain(obj.item())
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)) or getattr(obj, "ndim", 0) >= 1:
        return [_plain(v) for v in obj]
    return obj


@dataclass
class OperatorReport:
    """Outcome of one named experiment."""

    id: str
    params: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    passed: bool | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "id": self.id,
            "params": _plain(self.params),
            "values": _plain(self.values),
            "tolerances": _plain(self.tolerances),
            "passed": self.passed,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"
