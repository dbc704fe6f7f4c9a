"""Segre induction for ``Y = P^n0 x X`` with ``X = SV_n^d`` and degree 1 on ``P^n0``.

Property ``T(n0, m, t)`` says that ``m`` tangent spaces of ``Y`` plus ``t``
spaces ``V (x) w'`` span the expected dimension
``min((n0+1)(alpha+1), m(n0+x+1) + t(n0+1))`` where ``x = dim X`` and
``alpha+1 = N_{n,d}``.  ``T(n0, m, 0)`` is exactly "``Y`` is not
``m``-defective".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import certificate as C
from .certificate import Certificate, condition
from .config import Config
from .core import AbundanceClass, InputError, ambient_count, classify, critical_values
from .terracini import ResourceLimitError, check_T_property


@dataclass(frozen=True)
class TTriple:
    n0: int
    m: int
    t: int
    x: int
    alpha_plus_1: int

    def __post_init__(self):
        if min(self.n0, self.m, self.t) < 0:
            raise InputError(f"triple entries must be non-negative: {(self.n0, self.m, self.t)}")
        if self.x < 1 or self.alpha_plus_1 < 1:
            raise InputError("context needs dim X >= 1 and alpha+1 >= 1")

    @property
    def count(self) -> int:
        return self.m * (self.n0 + self.x + 1) + self.t * (self.n0 + 1)

    @property
    def ambient(self) -> int:
        return (self.n0 + 1) * self.alpha_plus_1

    @property
    def expected(self) -> int:
        return min(self.ambient, self.count)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n0, self.m, self.t)


@dataclass(frozen=True)
class Thresholds:
    a_lower: int
    a_upper: int


def thresholds(n0: int, x: int, alpha_plus_1: int) -> Thresholds:
    """``(a_lower, a_upper)``: floor and ceiling of ``(alpha+1)/(n0+x+1)``."""
    if n0 < 0 or x < 1 or alpha_plus_1 < 1:
        raise InputError("need n0 >= 0, x >= 1, alpha+1 >= 1")
    q, rem = divmod(alpha_plus_1, n0 + x + 1)
    return Thresholds(q, q + (1 if rem else 0))


def triple_abundance(triple: TTriple) -> AbundanceClass:
    return classify(triple.count, triple.ambient)


def split_reduce(triple: TTriple, n_prime: int, m_prime: int) -> tuple[TTriple, TTriple]:
    """Children ``(n', m', t+m-m')`` and ``(n0-n'-1, m-m', t+m')`` of the splitting lemma."""
    if not 0 <= m_prime <= triple.m:
        raise InputError(f"m' must lie in [0, {triple.m}], got {m_prime}")
    if not 0 <= n_prime <= triple.n0 - 1:
        raise InputError(f"n' must lie in [0, {triple.n0 - 1}], got {n_prime}")
    ctx = dict(x=triple.x, alpha_plus_1=triple.alpha_plus_1)
    first = TTriple(n_prime, m_prime, triple.t + triple.m - m_prime, **ctx)
    second = TTriple(triple.n0 - n_prime - 1, triple.m - m_prime, triple.t + m_prime, **ctx)
    return first, second


def theorem12_range(n0: int, n: Sequence[int], d: Sequence[int]) -> tuple[int, int]:
    """``((n0+1) floor(N/(n0+|n|+1)), (n0+1) ceil(N/(n0+|n|+1)))``.

    Every ``m`` outside the open gap between the two values is non-defective
    for ``SV_{(n0, n)}^{(1, d)}`` once ``SV_n^d`` is non-defective.
    """
    if min(d) < 3:
        raise InputError(f"every degree must be >= 3, got {tuple(d)}")
    th = thresholds(n0, sum(n), ambient_count(n, d))
    return (n0 + 1) * th.a_lower, (n0 + 1) * th.a_upper


def identifiability_thresholds(n: Sequence[int], d: Sequence[int], n0: Optional[int] = None) -> int:
    """Largest ``m`` covered by the identifiability corollary.

    Without ``n0``: the largest ``m`` with ``m(|n|+1) <= N``, i.e. the lower
    critical value.  With ``n0``: ``(n0+1) floor(N/(n0+|n|+1))`` for
    ``SV_{(n0,n)}^{(1,d)}``.  ``SV`` is then ``(m-1)``-identifiable; that
    implication is cited, not checked.
    """
    if min(d) < 3:
        raise InputError(f"every degree must be >= 3, got {tuple(d)}")
    if n0 is None:
        return critical_values(n, d)[0]
    return theorem12_range(n0, n, d)[0]


# --------------------------------------------------------------------------
# certificates


class _TEngine:
    def __init__(self, n, d, config: Config):
        self.n = tuple(n)
        self.d = tuple(d)
        self.config = config
        self.x = sum(self.n)
        self.N = ambient_count(self.n, self.d)
        self.memo: dict = {}

    def triple(self, n0, m, t) -> TTriple:
        return TTriple(n0, m, t, self.x, self.N)

    def node(self, tr: TTriple, verdict, kind, data=None, sides=None, children=None) -> Certificate:
        body = {"triple": list(tr.as_tuple()), "x": self.x, "alpha_plus_1": self.N}
        body.update(data or {})
        return Certificate(
            (tr.n0,) + self.n, (1,) + self.d, tr.m, verdict, kind, body, list(sides or []), list(children or []), t=tr.t
        )

    def leaf(self, tr: TTriple) -> Certificate:
        key = tr.as_tuple()
        if key not in self.memo:
            cfg = self.config
            try:
                out = check_T_property(tr.n0, self.n, self.d, tr.m, tr.t, cfg.prime, cfg.seed, cfg.trials, cfg.cap)
            except ResourceLimitError as exc:
                self.memo[key] = self.node(tr, C.UNKNOWN, C.UNRESOLVED, {"reason": str(exc)})
            else:
                verdict = C.NONDEFECTIVE if out.certified else C.UNKNOWN
                self.memo[key] = self.node(tr, verdict, C.TERRACINI, {"outcome": out.to_json()})
        return self.memo[key]

    def chain(self, n0: int, a: int, t: int, note: str) -> Certificate:
        """Prove ``T(n0, (n0+1)a, t)`` by peeling off ``(0, a, t + n0 a)`` pieces."""
        tr = self.triple(n0, (n0 + 1) * a, t)
        if n0 == 0:
            return self.leaf(tr)
        left, right = split_reduce(tr, 0, a)
        kids = [self.leaf(left), self.chain(right.n0, a, right.t, note)]
        verdict = C.NONDEFECTIVE if all(k.nondefective for k in kids) else C.UNKNOWN
        data = {
            "n_prime": 0,
            "m_prime": a,
            "children": [list(left.as_tuple()), list(right.as_tuple())],
            "abundance": triple_abundance(tr).value,
            "note": note,
        }
        return self.node(tr, verdict, C.SPLITTING, data, children=kids)


def certify_T(
    n0: int, n: Sequence[int], d: Sequence[int], m: int, t: int = 0, config: Config | None = None
) -> Certificate:
    """Certificate for ``T(n0, m, t)`` on ``P^n0 x SV_n^d``.

    For ``t = 0`` and ``m`` outside the open gap ``((n0+1)a_lower,
    (n0+1)a_upper)`` the splitting schedule ``n' = 0, m' = a`` reduces the
    problem to copies of ``T(0, a, n0 a)``, each checked by rank.  Smaller
    (resp. larger) ``m`` follow by monotonicity.  Anything else is a direct
    rank check.
    """
    config = config or Config()
    eng = _TEngine(n, d, config)
    if n0 < 0 or m < 0 or t < 0:
        raise InputError("n0, m, t must be non-negative")
    if n0 == 0 or t > 0:
        return eng.leaf(eng.triple(n0, m, t))

    th = thresholds(n0, eng.x, eng.N)
    low, high = (n0 + 1) * th.a_lower, (n0 + 1) * th.a_upper
    if m <= low and th.a_lower >= 1:
        a, target, branch, note = th.a_lower, low, "subabundant", "printed schedule"
    elif m >= high:
        a, target, branch, note = th.a_upper, high, "superabundant", "symmetric to printed proof"
    else:
        return eng.leaf(eng.triple(n0, m, 0))

    chain = eng.chain(n0, a, 0, note)
    if m == target or not chain.nondefective:
        return chain
    tr = eng.triple(n0, m, 0)
    top = eng.triple(n0, target, 0)
    cls = triple_abundance(top)
    ok = cls.is_sub if branch == "subabundant" else cls.is_super
    sides = [
        condition("m vs threshold", m, "<" if branch == "subabundant" else ">", target),
        condition(f"threshold triple is {branch}", int(ok), "==", 1),
    ]
    data = {"from": list(top.as_tuple()), "direction": branch}
    verdict = C.NONDEFECTIVE if ok else C.UNKNOWN
    return eng.node(tr, verdict, C.MONOTONE, data, sides, [chain])
