"""Multidegree arithmetic for Segre-Veronese secant problems.

A problem is a triple ``(n, d, m)``: ``n`` lists the dimensions of the
projective factors, ``d`` the embedding degrees and ``m`` the secant index.
Everything here is exact integer arithmetic on Python ints.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import comb, prod
from typing import Iterable, Sequence


class InputError(ValueError):
    """Malformed problem data (length mismatch, non-positive entries...)."""


class HoraceInapplicable(ValueError):
    """The differential Horace split numbers are undefined for this input."""


def _as_tuple(entries: Iterable[int], name: str, minimum: int = 1) -> tuple[int, ...]:
    out = tuple(int(e) for e in entries)
    if not out:
        raise InputError(f"{name} must have at least one entry")
    if any(e < minimum for e in out):
        raise InputError(f"{name} entries must be >= {minimum}, got {out}")
    return out


def _check_pair(n: Sequence[int], d: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    n = _as_tuple(n, "n")
    d = _as_tuple(d, "d")
    if len(n) != len(d):
        raise InputError(f"n and d have different lengths: {len(n)} != {len(d)}")
    return n, d


@dataclass(frozen=True)
class MultiIndex:
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_tuple(self.entries, "MultiIndex"))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def total(self) -> int:
        return sum(self.entries)

    def reduce(self, j: int) -> tuple[int, ...]:
        """Return ``(a1 - j, a2, ..., ak)``; the first entry may become 0."""
        if self.entries[0] - j < 0:
            raise InputError(f"cannot reduce first entry {self.entries[0]} by {j}")
        return (self.entries[0] - j,) + self.entries[1:]

    def dominates(self, other: "MultiIndex") -> bool:
        return len(self) == len(other) and all(a >= b for a, b in zip(self, other))


@dataclass(frozen=True)
class SecantProblem:
    n: tuple[int, ...]
    d: tuple[int, ...]
    m: int

    def __post_init__(self):
        n, d = _check_pair(self.n, self.d)
        if int(self.m) < 1:
            raise InputError(f"secant index must be >= 1, got {self.m}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "m", int(self.m))

    @property
    def k(self) -> int:
        return len(self.n)

    @property
    def dim(self) -> int:
        return sum(self.n)

    def normalized(self) -> "SecantProblem":
        n, d = normalize(self.n, self.d)
        return SecantProblem(n, d, self.m)

    def key(self) -> str:
        return f"n={','.join(map(str, self.n))};d={','.join(map(str, self.d))};m={self.m}"

    def to_json(self) -> dict:
        return {"n": list(self.n), "d": list(self.d), "m": self.m}


class AbundanceClass(str, enum.Enum):
    SUBABUNDANT = "subabundant"
    SUPERABUNDANT = "superabundant"
    EQUIABUNDANT = "equiabundant"

    @property
    def is_sub(self) -> bool:
        return self is not AbundanceClass.SUPERABUNDANT

    @property
    def is_super(self) -> bool:
        return self is not AbundanceClass.SUBABUNDANT


def classify(count: int, ambient: int) -> AbundanceClass:
    """Compare a parameter count against an ambient dimension."""
    if count == ambient:
        return AbundanceClass.EQUIABUNDANT
    return AbundanceClass.SUBABUNDANT if count < ambient else AbundanceClass.SUPERABUNDANT


@dataclass(frozen=True)
class HoraceNumbers:
    s_r: int
    eps_r: int


def ambient_count(n: Sequence[int], d: Sequence[int]) -> int:
    """Number of monomials ``N_{n,d} = prod C(n_i + d_i, d_i)``.

    The projective ambient space of the embedding is ``P^(N-1)``.
    """
    n, d = _check_pair(n, d)
    return prod(comb(a + b, b) for a, b in zip(n, d))


def expected_rank(n: Sequence[int], d: Sequence[int], m: int) -> int:
    """Affine expected dimension of the m-th secant cone: ``min(N, m(|n|+1))``."""
    p = SecantProblem(n, d, m)
    return min(ambient_count(p.n, p.d), p.m * (p.dim + 1))


def expected_dimension(n: Sequence[int], d: Sequence[int], m: int) -> int:
    """Projective expected dimension, ``expected_rank - 1``."""
    return expected_rank(n, d, m) - 1


def critical_values(n: Sequence[int], d: Sequence[int]) -> tuple[int, int]:
    """Return ``(r_lower, r_upper)``, floor and ceiling of ``N / (|n|+1)``."""
    n, d = _check_pair(n, d)
    N = ambient_count(n, d)
    q, rem = divmod(N, sum(n) + 1)
    return q, q + (1 if rem else 0)


def abundance(n: Sequence[int], d: Sequence[int], m: int) -> AbundanceClass:
    p = SecantProblem(n, d, m)
    return classify(p.m * (p.dim + 1), ambient_count(p.n, p.d))


def horace_numbers(n: Sequence[int], d: Sequence[int], r: int) -> HoraceNumbers:
    """Split numbers ``(s_r, eps_r)`` of the differential Horace lemma.

    ``(|n|+1) r = N_{n,d(1)} + |n| s_r + eps_r`` with ``0 <= eps_r < |n|``.
    """
    n, d = _check_pair(n, d)
    if d[0] < 1:
        raise HoraceInapplicable("first degree must be >= 1")
    dim = sum(n)
    reduced = ambient_count_relaxed(n, (d[0] - 1,) + d[1:])
    num = (dim + 1) * int(r) - reduced
    if num < 0:
        raise HoraceInapplicable(
            f"Horace step inapplicable: (|n|+1)r = {(dim + 1) * r} < N_(n,d(1)) = {reduced}"
        )
    s, eps = divmod(num, dim)
    return HoraceNumbers(s, eps)


def ambient_count_relaxed(n: Sequence[int], d: Sequence[int]) -> int:
    """``ambient_count`` allowing zero entries (``P^0`` factors, degree-0 reductions)."""
    n = _as_tuple(n, "n", minimum=0)
    d = _as_tuple(d, "d", minimum=0)
    if len(n) != len(d):
        raise InputError(f"n and d have different lengths: {len(n)} != {len(d)}")
    return prod(comb(a + b, b) for a, b in zip(n, d))


def bc_window(n: Sequence[int], d: Sequence[int], m: int) -> bool:
    """True iff ``m <= r_lower - |n| - 1`` or ``m >= r_upper + |n| + 1``."""
    p = SecantProblem(n, d, m)
    lo, hi = critical_values(p.n, p.d)
    return p.m <= lo - p.dim - 1 or p.m >= hi + p.dim + 1


def normalize(n: Sequence[int], d: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Sort factors by ``(n_i, d_i)`` ascending."""
    n, d = _check_pair(n, d)
    pairs = sorted(zip(n, d))
    return tuple(a for a, _ in pairs), tuple(b for _, b in pairs)


def drop_trivial_factors(n: Sequence[int], d: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Remove ``P^0`` factors; they are trivial tensor factors."""
    kept = [(a, b) for a, b in zip(n, d) if a > 0]
    return tuple(a for a, _ in kept), tuple(b for _, b in kept)


def parse_tuple(text: str) -> tuple[int, ...]:
    """Parse a comma-separated list such as ``"2,2,2"``."""
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError as exc:
        raise InputError(f"cannot parse integer tuple from {text!r}") from exc
