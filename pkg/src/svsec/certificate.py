"""Justification trees and their JSON form (schema ``svsec-cert/1``)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

SCHEMA_VERSION = "svsec-cert/1"

NONDEFECTIVE = "nondefective"
DEFECTIVE = "defective"
UNKNOWN = "unknown"
VERDICTS = (NONDEFECTIVE, DEFECTIVE, UNKNOWN)

# justification types
TERRACINI = "terracini"
HORACE = "horace_step"
BC_WINDOW = "bc_window"
BASE = "base"
MONOTONE = "monotone"
SPLITTING = "splitting"
KNOWN_DEFECTIVE = "known_defective"
CRITICAL = "critical_values"
UNRESOLVED = "unresolved"

LEAF_TYPES = (TERRACINI, BC_WINDOW, BASE, KNOWN_DEFECTIVE, UNRESOLVED)


def condition(name: str, lhs: int, op: str, rhs: int) -> dict:
    """A recorded numeric side condition ``lhs op rhs``."""
    holds = {">=": lhs >= rhs, "<=": lhs <= rhs, ">": lhs > rhs, "<": lhs < rhs, "==": lhs == rhs}[op]
    return {"name": name, "lhs": lhs, "op": op, "rhs": rhs, "holds": holds}


@dataclass
class Certificate:
    n: tuple[int, ...]
    d: tuple[int, ...]
    m: Optional[int]
    verdict: str
    kind: str
    data: dict = field(default_factory=dict)
    side_conditions: list = field(default_factory=list)
    children: list["Certificate"] = field(default_factory=list)
    # extra V (x) w' blocks; only set on property-T nodes
    t: Optional[int] = None

    @property
    def nondefective(self) -> bool:
        return self.verdict == NONDEFECTIVE

    def problem_json(self) -> dict:
        out: dict[str, Any] = {"n": list(self.n), "d": list(self.d), "m": self.m}
        if self.t is not None:
            out["t"] = self.t
        return out

    def to_json(self, root: bool = True) -> dict:
        body: dict[str, Any] = {}
        if root:
            body["version"] = SCHEMA_VERSION
        body["problem"] = self.problem_json()
        body["verdict"] = self.verdict
        body["justification"] = {
            "type": self.kind,
            "data": self.data,
            "side_conditions": self.side_conditions,
            "children": [c.to_json(root=False) for c in self.children],
        }
        return body

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        prob = obj["problem"]
        just = obj["justification"]
        return cls(
            n=tuple(prob["n"]),
            d=tuple(prob["d"]),
            m=prob["m"],
            verdict=obj["verdict"],
            kind=just["type"],
            data=just.get("data", {}),
            side_conditions=just.get("side_conditions", []),
            children=[cls.from_json(c) for c in just.get("children", [])],
            t=prob.get("t"),
        )

    @classmethod
    def loads(cls, text: str) -> "Certificate":
        obj = json.loads(text)
        if obj.get("version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported certificate version {obj.get('version')!r}")
        return cls.from_json(obj)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def size(self) -> int:
        return sum(1 for _ in self.walk())

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)
