"""Counterexample records and the machine-readable report."""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional


def fmt(x):
    """Render rationals as reduced ``p/q`` strings (integers stay ``p``)."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


def jsonable(obj):
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return [jsonable(v) for v in sorted(obj)]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return obj.item()
    return obj


@dataclass
class Violation:
    """One failed assertion: which check, on which tree and subtree, and the values seen."""

    check: str
    tree: Any
    subtree: Optional[tuple] = None
    expected: Any = None
    actual: Any = None
    detail: str = ""

    def to_dict(self):
        return {
            "check": self.check,
            "tree": self.tree.serialize() if hasattr(self.tree, "serialize") else self.tree,
            "subtree": list(self.subtree) if self.subtree is not None else None,
            "expected": jsonable(self.expected),
            "actual": jsonable(self.actual),
            "detail": self.detail,
        }


@dataclass
class Report:
    tree_digest: Optional[str]
    command: dict
    results: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def to_dict(self):
        return {
            "tree": self.tree_digest,
            "command": jsonable(self.command),
            "results": jsonable(self.results),
            "violations": [jsonable(v) for v in self.violations],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)
