from __future__ import annotations

from dataclasses import dataclass, replace

DEFAULT_PRIME = 2**31 - 1
# Primes used to re-run a rank deficit before reporting it.  All stay below
# 2**31 so that products of residues fit in int64.
EVIDENCE_PRIMES = (2**31 - 1, 2**31 - 19, 65521)


@dataclass(frozen=True)
class Config:
    prime: int = DEFAULT_PRIME
    seed: int = 0
    trials: int = 3
    cap: int = 10**7
    max_depth: int = 64
    max_nodes: int = 10**5
    format: str = "text"

    def with_(self, **changes) -> "Config":
        return replace(self, **changes)
