"""Terracini rank oracle over a prime field.

The span of the affine tangent cones at ``m`` sampled points of a
Segre-Veronese variety is written as a dense matrix over ``F_p`` whose columns
are indexed by the multigraded monomial basis.  Its rank at *any* choice of
points, reduced mod *any* prime, is a lower bound for the dimension of the
secant variety over a field of characteristic zero, so reaching the expected
rank proves non-defectivity.  A smaller rank is only evidence.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial, prod
from typing import Sequence

import numpy as np
import sympy

from .config import DEFAULT_PRIME, EVIDENCE_PRIMES
from .core import InputError, SecantProblem, ambient_count

__all__ = [
    "PrimeField",
    "PointSample",
    "TerraciniMatrix",
    "RankOutcome",
    "Verdict",
    "ResourceLimitError",
    "monomial_basis",
    "factor_basis",
    "sample_points",
    "tangent_block",
    "point_row",
    "assemble",
    "terracini_matrix",
    "rank",
    "check_nondefective",
    "check_T_property",
]

_WORD_LIMIT = 2**31


class ResourceLimitError(RuntimeError):
    """Matrix would exceed the configured entry cap."""


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not (2 <= self.p < _WORD_LIMIT) or not sympy.isprime(self.p):
            raise InputError(f"modulus must be a prime below 2**31, got {self.p}")

    def check_degrees(self, d: Sequence[int]) -> None:
        if max(d) >= self.p:
            raise InputError(f"prime {self.p} must exceed every degree, got d={tuple(d)}")


class Verdict(str, enum.Enum):
    CERTIFIED = "certified_nondefective"
    DEFICIT = "rank_deficit_observed"


@dataclass(frozen=True)
class RankOutcome:
    observed_rank: int
    expected: int
    verdict: Verdict
    trials: int
    prime: int
    seed: int
    rows: int = 0
    cols: int = 0
    primes: tuple[int, ...] = ()

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED

    def to_json(self) -> dict:
        return {
            "observed_rank": self.observed_rank,
            "expected": self.expected,
            "verdict": self.verdict.value,
            "trials": self.trials,
            "prime": self.prime,
            "seed": self.seed,
            "rows": self.rows,
            "cols": self.cols,
            "primes": list(self.primes),
        }


# --------------------------------------------------------------------------
# monomial bases


@lru_cache(maxsize=None)
def factor_basis(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of degree-``d`` monomials in ``n+1`` variables.

    Ordered by decreasing reverse-lexicographic order, so ``x0^d`` comes first
    and ``x_n^d`` last.
    """

    def compositions(total, parts):
        if parts == 1:
            yield (total,)
            return
        for first in range(total, -1, -1):
            for rest in compositions(total - first, parts - 1):
                yield (first,) + rest

    basis = list(compositions(d, n + 1))
    basis.sort(key=lambda a: a[::-1])
    return tuple(basis)


def monomial_basis(n: Sequence[int], d: Sequence[int]) -> list[tuple[tuple[int, ...], ...]]:
    """Column labels: factor-major product of the per-factor bases."""
    import itertools

    return list(itertools.product(*(factor_basis(a, b) for a, b in zip(n, d))))


@lru_cache(maxsize=None)
def _multinomials(n: int, d: int) -> tuple[int, ...]:
    return tuple(factorial(d) // prod(factorial(e) for e in a) for a in factor_basis(n, d))


@lru_cache(maxsize=None)
def _derivative_layout(n: int, d: int, j: int) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    # For each degree-d monomial with alpha_j >= 1: its position, the position
    # of alpha - e_j in the degree d-1 basis, and that lower multinomial.
    lower = factor_basis(n, d - 1)
    where = {a: i for i, a in enumerate(lower)}
    mult = _multinomials(n, d - 1)
    pos, src, coef = [], [], []
    for i, a in enumerate(factor_basis(n, d)):
        if a[j] >= 1:
            b = a[:j] + (a[j] - 1,) + a[j + 1 :]
            pos.append(i)
            src.append(where[b])
            coef.append(mult[where[b]])
    return tuple(pos), tuple(src), tuple(coef)


def _monomial_values(u: Sequence[int], n: int, d: int, p: int) -> list[int]:
    out = []
    for a in factor_basis(n, d):
        v = 1
        for x, e in zip(u, a):
            if e:
                v = v * pow(int(x), e, p) % p
        out.append(v)
    return out


def _power_vector(u: Sequence[int], n: int, d: int, p: int) -> np.ndarray:
    """Coefficients of ``(u . x)^d`` in the factor basis."""
    vals = _monomial_values(u, n, d, p)
    return np.array([c % p * v % p for c, v in zip(_multinomials(n, d), vals)], dtype=np.int64)


def _derivative_vector(u: Sequence[int], n: int, d: int, j: int, p: int) -> np.ndarray:
    """Coefficients of ``(u . x)^(d-1) * x_j`` in the degree-``d`` basis."""
    out = np.zeros(len(factor_basis(n, d)), dtype=np.int64)
    vals = _monomial_values(u, n, d - 1, p)
    pos, src, coef = _derivative_layout(n, d, j)
    for i, s, c in zip(pos, src, coef):
        out[i] = c % p * vals[s] % p
    return out


def _kron(vectors: Sequence[np.ndarray], p: int) -> np.ndarray:
    out = vectors[0]
    for v in vectors[1:]:
        out = np.kron(out, v) % p
    return out


# --------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class PointSample:
    """``m`` points (one representative vector per factor) plus extra points.

    ``extra`` holds the points ``w'`` on the cone over the factors after the
    first, used for the ``V (x) w'`` rows of property T.
    """

    points: tuple[tuple[tuple[int, ...], ...], ...]
    seed: int
    extra: tuple[tuple[tuple[int, ...], ...], ...] = ()


def _validate_shape(n: Sequence[int], d: Sequence[int], allow_p0: bool = False) -> tuple[tuple[int, ...], tuple[int, ...]]:
    n = tuple(int(a) for a in n)
    d = tuple(int(b) for b in d)
    if len(n) != len(d) or not n:
        raise InputError(f"n and d must be non-empty and of equal length, got {n}, {d}")
    if any(b < 1 for b in d):
        raise InputError(f"degrees must be >= 1, got {d}")
    if any(a < 0 for a in n) or any(a == 0 for a in n[1:]) or (n[0] == 0 and not allow_p0):
        raise InputError(f"invalid factor dimensions {n}")
    return n, d


def _random_vector(rng: np.random.Generator, size: int, p: int) -> tuple[int, ...]:
    while True:
        v = rng.integers(0, p, size=size, dtype=np.int64)
        if v.any():
            return tuple(int(x) for x in v)


def sample_points(
    n: Sequence[int], d: Sequence[int], m: int, t: int, p: int, seed: int, trial: int = 0
) -> PointSample:
    """Uniform points over ``F_p``; a pure function of every argument."""
    n, d = _validate_shape(n, d, allow_p0=True)
    entropy = [int(seed) & (2**64 - 1), int(trial), int(p), len(n), *n, *d, int(m), int(t)]
    rng = np.random.default_rng(np.random.SeedSequence(entropy))
    points = tuple(tuple(_random_vector(rng, a + 1, p) for a in n) for _ in range(m))
    extra = tuple(tuple(_random_vector(rng, a + 1, p) for a in n[1:]) for _ in range(t))
    return PointSample(points, int(seed), extra)


# --------------------------------------------------------------------------
# matrices


def _complement(u: Sequence[int]) -> list[int]:
    # drop the coordinate of largest residue; it is nonzero since u != 0
    drop = max(range(len(u)), key=lambda j: (u[j], -j))
    return [j for j in range(len(u)) if j != drop]


def point_row(point: Sequence[Sequence[int]], n: Sequence[int], d: Sequence[int], p: int) -> np.ndarray:
    """Coordinates of ``v1^d1 (x) ... (x) vk^dk`` in the monomial basis."""
    return _kron([_power_vector(u, a, b, p) for u, a, b in zip(point, n, d)], p)


def tangent_block(point: Sequence[Sequence[int]], n: Sequence[int], d: Sequence[int], p: int) -> np.ndarray:
    """``|n|+1`` rows spanning the affine tangent cone at ``point``.

    Row 0 is the point itself; then, for each factor ``i`` and each ``j`` in a
    complement of the largest coordinate of ``v_i``, the row with ``v_i^d_i``
    replaced by ``v_i^(d_i - 1) x_j``.
    """
    n, d = _validate_shape(n, d, allow_p0=True)
    if len(point) != len(n):
        raise InputError("point has the wrong number of factors")
    point = [tuple(int(x) % p for x in u) for u in point]
    for u, a in zip(point, n):
        if len(u) != a + 1:
            raise InputError(f"representative {u} has wrong length for P^{a}")
        if not any(u):
            raise InputError("zero representative vector")
    powers = [_power_vector(u, a, b, p) for u, a, b in zip(point, n, d)]
    rows = [_kron(powers, p)]
    for i, (u, a, b) in enumerate(zip(point, n, d)):
        for j in _complement(u):
            parts = list(powers)
            parts[i] = _derivative_vector(u, a, b, j, p)
            rows.append(_kron(parts, p))
    return np.vstack(rows)


def assemble(sample: PointSample, n: Sequence[int], d: Sequence[int], p: int) -> np.ndarray:
    """Stack tangent blocks, then the rows ``e_j (x) w'`` for every extra point."""
    n, d = _validate_shape(n, d, allow_p0=True)
    blocks = [tangent_block(pt, n, d, p) for pt in sample.points]
    if sample.extra:
        if d[0] != 1:
            raise InputError("extra V (x) w' rows need a degree-1 first factor")
        if len(n) < 2:
            raise InputError("extra rows need at least one factor besides V")
        eye = np.eye(n[0] + 1, dtype=np.int64)
        for w in sample.extra:
            blocks.append(np.kron(eye, point_row(w, n[1:], d[1:], p)[None, :]) % p)
    if not blocks:
        return np.zeros((0, ambient_count_any(n, d)), dtype=np.int64)
    return np.vstack(blocks)


def ambient_count_any(n: Sequence[int], d: Sequence[int]) -> int:
    return prod(comb(a + b, b) for a, b in zip(n, d))


@dataclass
class TerraciniMatrix:
    data: np.ndarray
    p: int
    n: tuple[int, ...]
    d: tuple[int, ...]
    m: int
    t: int = 0
    seed: int = 0
    columns: list = field(default_factory=list, repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def to_sms(self) -> str:
        """SMS-style sparse text: header, 1-based ``i j value`` triples, ``0 0 0``."""
        rows, cols = self.data.shape
        lines = [f"{rows} {cols} {self.p}"]
        for i, j in zip(*np.nonzero(self.data)):
            lines.append(f"{i + 1} {j + 1} {int(self.data[i, j])}")
        lines.append("0 0 0")
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse_sms(text: str) -> tuple[np.ndarray, int]:
        lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        rows, cols, p = (int(x) for x in lines[0])
        out = np.zeros((rows, cols), dtype=np.int64)
        for parts in lines[1:]:
            i, j, v = (int(x) for x in parts)
            if (i, j, v) == (0, 0, 0):
                break
            out[i - 1, j - 1] = v % p
        return out, p


def terracini_matrix(
    n: Sequence[int],
    d: Sequence[int],
    m: int,
    t: int = 0,
    p: int = DEFAULT_PRIME,
    seed: int = 0,
    trial: int = 0,
    cap: int | None = None,
) -> TerraciniMatrix:
    """Terracini matrix of ``m`` random points, plus ``t`` blocks ``V (x) w'``.

    With ``t > 0`` the first factor plays the role of ``V`` and must have
    degree 1; its dimension may then be 0.
    """
    if m < 0 or t < 0:
        raise InputError("m and t must be non-negative")
    if t > 0 and int(d[0]) != 1:
        raise InputError("t > 0 requires the first factor to have degree 1")
    n, d = _validate_shape(n, d, allow_p0=(int(d[0]) == 1))
    PrimeField(p).check_degrees(d)
    cols = ambient_count_any(n, d)
    rows = m * (sum(n) + 1) + t * (n[0] + 1)
    if cap is not None and rows * cols > cap:
        raise ResourceLimitError(f"{rows}x{cols} matrix exceeds cap of {cap} entries")
    sample = sample_points(n, d, m, t, p, seed, trial)
    data = assemble(sample, n, d, p)
    return TerraciniMatrix(data, p, n, d, m, t, seed)


try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None


def _rank_numpy(A: np.ndarray, p: int) -> int:
    nrows, ncols = A.shape
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), -1, p)
        pivot = A[r, c:] * inv % p
        A[r, c:] = pivot
        sub = A[r + 1 :, c:]
        tmp = np.multiply(sub[:, :1], pivot)
        tmp %= p
        sub -= tmp
        sub %= p
        r += 1
    return r


def _rank_loops(A, p):
    nrows, ncols = A.shape
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if A[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, ncols):
                tmp = A[r, j]
                A[r, j] = A[piv, j]
                A[piv, j] = tmp
        # Fermat inverse; p is prime
        base = A[r, c] % p
        e = p - 2
        inv = 1
        while e > 0:
            if e & 1:
                inv = inv * base % p
            base = base * base % p
            e >>= 1
        for j in range(c, ncols):
            A[r, j] = A[r, j] * inv % p
        for i in range(r + 1, nrows):
            f = A[i, c]
            if f != 0:
                for j in range(c, ncols):
                    v = A[i, j] - f * A[r, j] % p
                    if v < 0:
                        v += p
                    A[i, j] = v
        r += 1
    return r


_rank_compiled = numba.njit(cache=True)(_rank_loops) if numba is not None else None


def rank(matrix, p: int = DEFAULT_PRIME, backend: str = "auto") -> int:
    """Exact rank over ``F_p`` by row reduction on int64 residues.

    ``backend`` is ``"auto"`` (compiled loops when numba is importable),
    ``"numba"`` or ``"numpy"``; all give the same integer.
    """
    if isinstance(matrix, TerraciniMatrix):
        p = matrix.p
        matrix = matrix.data
    if p >= _WORD_LIMIT:
        raise InputError("modulus must be below 2**31")
    A = np.array(matrix, dtype=np.int64) % p
    if A.ndim != 2 or A.size == 0:
        return 0
    if A.shape[0] > A.shape[1]:
        A = A.T
    A = np.ascontiguousarray(A)
    if backend == "numpy" or (backend == "auto" and _rank_compiled is None):
        return _rank_numpy(A, p)
    if _rank_compiled is None:
        raise RuntimeError("numba backend requested but numba is not installed")
    return int(_rank_compiled(A, p))


def _run_trials(build, expected: int, primes: Sequence[int], trials: int, seed: int):
    best = -1
    used = 0
    shape = (0, 0)
    for q in primes:
        for trial in range(trials):
            M = build(q, trial)
            shape = M.shape
            r = rank(M.data, q)
            used += 1
            best = max(best, r)
            if r == expected:
                return RankOutcome(r, expected, Verdict.CERTIFIED, used, q, seed, *shape, (q,))
    return RankOutcome(best, expected, Verdict.DEFICIT, used, primes[0], seed, *shape, tuple(primes))


def _primes_for(p: int) -> list[int]:
    return [p] + [q for q in EVIDENCE_PRIMES if q != p]


def check_nondefective(
    n: Sequence[int],
    d: Sequence[int],
    m: int,
    p: int = DEFAULT_PRIME,
    seed: int = 0,
    trials: int = 3,
    cap: int = 10**7,
) -> RankOutcome:
    """Certify ``sigma_m`` non-defective if some trial reaches the expected rank.

    A deficit after ``trials`` attempts at ``p`` is re-run at the evidence
    primes before being reported with the best rank seen.
    """
    prob = SecantProblem(n, d, m)
    N = ambient_count(prob.n, prob.d)
    expected = min(N, prob.m * (prob.dim + 1))
    rows = prob.m * (prob.dim + 1)
    if rows * N > cap:
        raise ResourceLimitError(f"{rows}x{N} matrix exceeds cap of {cap} entries")
    build = lambda q, trial: terracini_matrix(prob.n, prob.d, prob.m, 0, q, seed, trial)
    return _run_trials(build, expected, _primes_for(p), trials, seed)


def check_T_property(
    n0: int,
    n: Sequence[int],
    d: Sequence[int],
    m: int,
    t: int,
    p: int = DEFAULT_PRIME,
    seed: int = 0,
    trials: int = 3,
    cap: int = 10**7,
) -> RankOutcome:
    """Rank check of ``T(n0, m, t)`` for ``Y = P^n0 x SV_n^d``.

    Target rank is ``min((n0+1) N, m (n0+|n|+1) + t (n0+1))``.
    """
    if n0 < 0 or m < 0 or t < 0:
        raise InputError("n0, m, t must be non-negative")
    if n0 == 0 and t == 0 and m >= 1:
        return check_nondefective(n, d, m, p, seed, trials, cap)
    n = tuple(int(a) for a in n)
    d = tuple(int(b) for b in d)
    N = ambient_count(n, d)
    x = sum(n)
    expected = min((n0 + 1) * N, m * (n0 + x + 1) + t * (n0 + 1))
    rows = m * (n0 + x + 1) + t * (n0 + 1)
    if rows * (n0 + 1) * N > cap:
        raise ResourceLimitError(f"{rows}x{(n0 + 1) * N} matrix exceeds cap of {cap} entries")
    yn, yd = (n0,) + n, (1,) + d
    build = lambda q, trial: terracini_matrix(yn, yd, m, t, q, seed, trial)
    return _run_trials(build, expected, _primes_for(p), trials, seed)
