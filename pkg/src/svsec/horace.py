"""Certificate engine: base registry, differential Horace steps, induction.

``certify`` builds a justification tree for "``SV_n^d`` is not ``m``-defective"
by trying, in order: the base registry, the BC window, reduction to a critical
value, a differential Horace step, the splitting route for a degree-1 factor
and finally a direct Terracini rank check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Optional, Sequence

from . import certificate as C
from .certificate import Certificate, condition
from .config import Config
from .core import (
    HoraceInapplicable,
    HoraceNumbers,
    InputError,
    SecantProblem,
    ambient_count,
    critical_values,
    drop_trivial_factors,
    horace_numbers,
    normalize,
)
from .terracini import check_nondefective

log = logging.getLogger(__name__)

CITE_AH = "J. Alexander, A. Hirschowitz, Polynomial interpolation in several variables, J. Algebraic Geom. 4 (1995)"
CITE_TWO_FACTOR = "two-factor classification: P^a x P^b in bidegree (d1, d2) with d1, d2 >= 3 is never defective"
CITE_LP = "A. Laface, E. Postinghel, Secant varieties of Segre-Veronese embeddings of (P^1)^r, Theorem 3.1"
CITE_BALLICO = "E. Ballico, Theorem 2 (adding a P^1 factor in degree d >= 2)"
CITE_BC = "A. Taveira Blomenhofer, A. Casarotti, Nondefectivity of invariant secant varieties, Theorem 4.8"
CITE_SEGRE = "classical: rank <= m matrices of size (a+1)x(b+1) have dimension m(a+b+2-m)"
CITE_HORACE = "differential Horace lemma for Segre-Veronese varieties"

SPORADIC_VERONESE = {(2, 4, 5), (3, 4, 9), (4, 3, 7), (4, 4, 14)}


# --------------------------------------------------------------------------
# base registry


@dataclass(frozen=True)
class RuleHit:
    name: str
    citation: str
    verdict: str
    checks: dict = field(default_factory=dict)
    children: tuple = ()


def veronese_exceptional(n: int, d: int, m: int) -> bool:
    """Alexander-Hirschowitz defective cases of ``sigma_m(v_d(P^n))``."""
    return (d == 2 and 2 <= m <= n) or (n, d, m) in SPORADIC_VERONESE


def p1_product_exceptional(d: Sequence[int], m: int) -> bool:
    """Defective cases of ``(P^1)^k`` embedded in multidegree ``d``."""
    ds = tuple(sorted(d))
    if len(ds) == 2 and ds[0] == 2 and ds[1] % 2 == 0:
        return m == ds[1] + 1
    if len(ds) == 3 and ds[:2] == (1, 1) and ds[2] % 2 == 0:
        return m == ds[2] + 1
    if ds == (2, 2, 2):
        return m == 7
    if ds == (1, 1, 1, 1):
        return m == 3
    return False


def _rule_single_point(p: SecantProblem, engine, depth: int) -> Optional[RuleHit]:
    if p.m == 1:
        return RuleHit("secant-index-one", "sigma_1(X) = X", C.NONDEFECTIVE, {"m": 1})
    return None


def _rule_veronese(p: SecantProblem, engine, depth: int) -> Optional[RuleHit]:
    if p.k != 1:
        return None
    n, d = p.n[0], p.d[0]
    checks = {"k": 1, "n": n, "d": d, "m": p.m}
    if d == 1:
        return RuleHit("linear-space", "a linearly embedded P^n is its own secant variety", C.NONDEFECTIVE, checks)
    if veronese_exceptional(n, d, p.m):
        return RuleHit("alexander-hirschowitz-exception", CITE_AH, C.DEFECTIVE, checks)
    return RuleHit("alexander-hirschowitz", CITE_AH, C.NONDEFECTIVE, checks)


def _rule_segre_matrices(p: SecantProblem, engine, depth: int) -> Optional[RuleHit]:
    if p.k != 2 or p.d != (1, 1):
        return None
    low = min(p.n)
    checks = {"min_n": low, "m": p.m, "defective_range": [2, low]}
    if 2 <= p.m <= low:
        return RuleHit("segre-matrices-exception", CITE_SEGRE, C.DEFECTIVE, checks)
    return RuleHit("segre-matrices", CITE_SEGRE, C.NONDEFECTIVE, checks)


def _rule_p1_products(p: SecantProblem, engine, depth: int) -> Optional[RuleHit]:
    if any(a != 1 for a in p.n):
        return None
    checks = {"all_n_one": True, "d": list(p.d), "m": p.m}
    if p1_product_exceptional(p.d, p.m):
        return RuleHit("p1-products-exception", CITE_LP, C.DEFECTIVE, checks)
    return RuleHit("p1-products", CITE_LP, C.NONDEFECTIVE, checks)


def _rule_two_factor(p: SecantProblem, engine, depth: int) -> Optional[RuleHit]:
    if p.k == 2 and min(p.d) >= 3:
        return RuleHit("two-factor", CITE_TWO_FACTOR, C.NONDEFECTIVE, {"k": 2, "min_d": min(p.d)})
    return None


def _rule_ballico(p: SecantProblem, engine, depth: int) -> Optional[RuleHit]:
    if p.k < 2:
        return None
    for i, (a, b) in enumerate(zip(p.n, p.d)):
        if a != 1 or b < 2:
            continue
        nX = p.n[:i] + p.n[i + 1 :]
        dX = p.d[:i] + p.d[i + 1 :]
        if min(dX) < 3:
            continue
        ok, trace, child = _ballico(nX, dX, b, engine, depth)
        if ok:
            children = (child,) if child is not None else ()
            return RuleHit("ballico-factor-addition", CITE_BALLICO, C.NONDEFECTIVE, trace, children)
    return None


REGISTRY: list[tuple[str, Callable]] = [
    ("secant-index-one", _rule_single_point),
    ("veronese", _rule_veronese),
    ("segre-matrices", _rule_segre_matrices),
    ("p1-products", _rule_p1_products),
    ("two-factor", _rule_two_factor),
    ("ballico-factor-addition", _rule_ballico),
]


# --------------------------------------------------------------------------
# Horace step


@dataclass(frozen=True)
class HoraceStep:
    n: tuple[int, ...]
    d: tuple[int, ...]
    r: int
    numbers: HoraceNumbers
    children: tuple[tuple[tuple[int, ...], tuple[int, ...], int], ...]
    side_conditions: tuple[dict, ...]


def horace_step(n: Sequence[int], d: Sequence[int], r: int) -> HoraceStep:
    """Differential Horace split on the first factor.

    Children are ``(n(1), d, s)``, ``(n, d(1), r - s)`` and
    ``(n, d(2), r - s - eps)``; a ``P^0`` factor in the first child is dropped.
    Raises ``HoraceInapplicable`` if ``d1 < 3``, a child index is not
    positive, or a side condition fails.
    """
    p = SecantProblem(n, d, r)
    n, d = p.n, p.d
    if d[0] < 3:
        raise HoraceInapplicable(f"pivot degree {d[0]} < 3")
    hn = horace_numbers(n, d, r)
    s, eps = hn.s_r, hn.eps_r
    dim = p.dim
    n1 = drop_trivial_factors((n[0] - 1,) + n[1:], d)
    if not n1[0]:
        raise HoraceInapplicable("first child has no factors left")
    d1 = (d[0] - 1,) + d[1:]
    d2 = (d[0] - 2,) + d[1:]
    kids = ((n1[0], n1[1], s), (n, d1, r - s), (n, d2, r - s - eps))
    if any(m < 1 for _, _, m in kids):
        raise HoraceInapplicable(f"non-positive child secant index in {[m for *_, m in kids]}")
    sides = (
        condition("s_r >= eps_r", s, ">=", eps),
        condition("(r-s_r-eps_r)(|n|+1) >= N_(n,d(2))", (r - s - eps) * (dim + 1), ">=", ambient_count(n, d2)),
    )
    failed = [c["name"] for c in sides if not c["holds"]]
    if failed:
        raise HoraceInapplicable(f"side condition violated: {', '.join(failed)}")
    return HoraceStep(n, d, r, hn, kids, sides)


def choose_pivot(n: Sequence[int], d: Sequence[int]) -> Optional[int]:
    """Index of the factor with minimal ``(n_i, d_i)`` among those with ``d_i >= 3``."""
    cands = [(a, b, i) for i, (a, b) in enumerate(zip(n, d)) if b >= 3]
    return min(cands)[2] if cands else None


def appendix_regime(n: Sequence[int], d: Sequence[int], r: int) -> bool:
    """Whether the appendix numerical lemmas cover this Horace step."""
    lo, hi = critical_values(n, d)
    return (
        len(n) >= 3
        and min(d) >= 3
        and list(n) == sorted(n)
        and n[0] >= 2
        and r in (lo, hi)
    )


def appendix_checks(n: Sequence[int], d: Sequence[int], r: int) -> list[dict]:
    """The three numerical lemma inequalities for a Horace step at ``r``."""
    hn = horace_numbers(n, d, r)
    s, eps = hn.s_r, hn.eps_r
    dim = sum(n)
    lo1, _ = critical_values(n, (d[0] - 1,) + tuple(d[1:]))
    _, hi2 = critical_values(n, (d[0] - 2,) + tuple(d[1:]))
    return [
        condition("A1: r-s_r <= r_lower(n,d(1))-|n|-1", r - s, "<=", lo1 - dim - 1),
        condition("A2: s_r >= eps_r", s, ">=", eps),
        condition("A3: r_upper(n,d(2))+|n|+1 <= r-s_r-eps_r", hi2 + dim + 1, "<=", r - s - eps),
    ]


# --------------------------------------------------------------------------
# engine


class _Engine:
    def __init__(self, config: Config):
        self.config = config
        self.memo: dict[str, Certificate] = {}
        self.nodes = 0
        self.oracle_memo: dict = {}

    def oracle(self, n, d, m):
        key = (n, d, m)
        if key not in self.oracle_memo:
            cfg = self.config
            self.oracle_memo[key] = check_nondefective(n, d, m, cfg.prime, cfg.seed, cfg.trials, cfg.cap)
        return self.oracle_memo[key]

    def within_cap(self, n, d, m) -> bool:
        return m * (sum(n) + 1) * ambient_count(n, d) <= self.config.cap

    def _node(self, p: SecantProblem, verdict, kind, data=None, sides=None, children=None) -> Certificate:
        self.nodes += 1
        return Certificate(p.n, p.d, p.m, verdict, kind, data or {}, list(sides or []), list(children or []))

    def certify(self, n, d, m, depth: int = 0) -> Certificate:
        p = SecantProblem(n, d, m).normalized()
        key = p.key()
        if key in self.memo:
            return self.memo[key]
        if depth > self.config.max_depth:
            return self._node(p, C.UNKNOWN, C.UNRESOLVED, {"reason": f"depth cap {self.config.max_depth} reached"})
        if self.nodes >= self.config.max_nodes:
            return self._node(p, C.UNKNOWN, C.UNRESOLVED, {"reason": f"node cap {self.config.max_nodes} reached"})
        cert = self._certify(p, depth)
        self.memo[key] = cert
        return cert

    def _certify(self, p: SecantProblem, depth: int) -> Certificate:
        # 1. registry
        for _, rule in REGISTRY:
            hit = rule(p, self, depth)
            if hit is None:
                continue
            if hit.verdict == C.DEFECTIVE:
                data = {"name": hit.name, "citation": hit.citation, "checks": hit.checks}
                if self.within_cap(p.n, p.d, p.m):
                    data["oracle"] = self.oracle(p.n, p.d, p.m).to_json()
                return self._node(p, C.DEFECTIVE, C.KNOWN_DEFECTIVE, data)
            return self._node(
                p,
                C.NONDEFECTIVE,
                C.BASE,
                {"name": hit.name, "citation": hit.citation, "checks": hit.checks},
                children=hit.children,
            )

        lo, hi = critical_values(p.n, p.d)
        # 2. BC window
        below, above = lo - p.dim - 1, hi + p.dim + 1
        if p.m <= below or p.m >= above:
            sides = [condition("m <= r_lower-|n|-1", p.m, "<=", below)] if p.m <= below else [
                condition("m >= r_upper+|n|+1", p.m, ">=", above)
            ]
            data = {"r_lower": lo, "r_upper": hi, "dim": p.dim, "citation": CITE_BC}
            return self._node(p, C.NONDEFECTIVE, C.BC_WINDOW, data, sides)

        # 3. reduce to a critical value
        if p.m < lo or p.m > hi:
            r = lo if p.m < lo else hi
            child = self.certify(p.n, p.d, r, depth + 1)
            if child.nondefective:
                direction = "subabundant" if p.m < lo else "superabundant"
                op = "<" if p.m < lo else ">"
                data = {"from": {"n": list(p.n), "d": list(p.d), "m": r}, "direction": direction}
                return self._node(p, C.NONDEFECTIVE, C.MONOTONE, data, [condition("m vs critical value", p.m, op, r)], [child])

        # 4. differential Horace step
        cert = self._try_horace(p, depth)
        if cert is not None:
            return cert

        # 5. splitting route for a degree-1 factor
        cert = self._try_splitting(p, depth)
        if cert is not None:
            return cert

        # 6. direct rank check
        if self.within_cap(p.n, p.d, p.m):
            out = self.oracle(p.n, p.d, p.m)
            verdict = C.NONDEFECTIVE if out.certified else C.UNKNOWN
            return self._node(p, verdict, C.TERRACINI, {"outcome": out.to_json()})
        return self._node(p, C.UNKNOWN, C.UNRESOLVED, {"reason": "no strategy applies within the size cap"})

    def _try_horace(self, p: SecantProblem, depth: int) -> Optional[Certificate]:
        i = choose_pivot(p.n, p.d)
        if i is None:
            return None
        n = (p.n[i],) + p.n[:i] + p.n[i + 1 :]
        d = (p.d[i],) + p.d[:i] + p.d[i + 1 :]
        try:
            step = horace_step(n, d, p.m)
        except HoraceInapplicable as exc:
            log.debug("Horace step on %s inapplicable: %s", p.key(), exc)
            return None
        data = {
            "pivot": i,
            "n": list(n),
            "d": list(d),
            "r": p.m,
            "s_r": step.numbers.s_r,
            "eps_r": step.numbers.eps_r,
            "children": [{"n": list(a), "d": list(b), "m": c} for a, b, c in step.children],
            "citation": CITE_HORACE,
        }
        if appendix_regime(n, d, p.m):
            lemmas = appendix_checks(n, d, p.m)
            bad = [c["name"] for c in lemmas if not c["holds"]]
            if bad:
                raise AssertionError(f"appendix lemma violated at {p.key()}: {bad}")
            data["appendix_lemmas"] = lemmas
        kids = [self.certify(a, b, c, depth + 1) for a, b, c in step.children]
        if not all(k.nondefective for k in kids):
            return None
        return self._node(p, C.NONDEFECTIVE, C.HORACE, data, step.side_conditions, kids)

    def _try_splitting(self, p: SecantProblem, depth: int) -> Optional[Certificate]:
        if p.k < 2:
            return None
        ones = [(a, i) for i, (a, b) in enumerate(zip(p.n, p.d)) if b == 1]
        if not ones:
            return None
        from .splitting import certify_T

        n0, i = max(ones)
        nX = p.n[:i] + p.n[i + 1 :]
        dX = p.d[:i] + p.d[i + 1 :]
        child = certify_T(n0, nX, dX, p.m, 0, self.config)
        self.nodes += child.size()
        if not child.nondefective:
            return None
        data = {"factor": i, "n0": n0, "x": {"n": list(nX), "d": list(dX)}}
        return self._node(p, C.NONDEFECTIVE, C.SPLITTING, data, children=[child])


def _ballico(nX, dX, d1, engine: _Engine, depth: int) -> tuple[bool, dict, Optional[Certificate]]:
    nX, dX = tuple(nX), tuple(dX)
    dim = sum(nX)
    NX = ambient_count(nX, dX)
    trace: dict = {"x": {"n": list(nX), "d": list(dX)}, "d1": d1, "dim_x": dim}
    if d1 < 2 or min(dX) < 3:
        trace["route"] = None
        trace["reason"] = "needs d1 >= 2 and every degree of X >= 3"
        return False, trace, None
    if len(nX) >= 2 and all(a == 1 for a in nX):
        trace["route"] = "p1-products"
        trace["citation"] = CITE_LP
        return True, trace, None
    ineq = condition("prod C(n_i+d_i,n_i) > (|n_X|)^2", NX, ">", dim * dim)
    trace["ineq31"] = ineq
    trace["dim_ok"] = condition("dim X >= 3", dim, ">=", 3)
    if dim < 3 or not ineq["holds"]:
        trace["route"] = None
        return False, trace, None
    r = NX // dim
    trace["r"] = r
    child = engine.certify(nX, dX, r, depth + 1)
    trace["route"] = "ballico"
    trace["discharged"] = child.nondefective
    return child.nondefective, trace, child


def ballico_applicable(nX: Sequence[int], dX: Sequence[int], d1: int, config: Config | None = None) -> tuple[bool, dict]:
    """Whether ``P^1 x X`` (degree ``d1`` on the line) is never defective by the
    factor-addition corollary.  The trace records which route closed it."""
    engine = _Engine(config or Config())
    ok, trace, child = _ballico(nX, dX, d1, engine, 0)
    if child is not None:
        trace["certificate"] = child.to_json(root=False)
    return ok, trace


def certify(n: Sequence[int], d: Sequence[int], m: Optional[int] = None, config: Config | None = None) -> Certificate:
    """Certificate tree for ``SV_n^d`` at secant index ``m``.

    With ``m=None`` both critical values are certified, which settles every
    ``m`` at once.
    """
    config = config or Config()
    engine = _Engine(config)
    if m is not None:
        return engine.certify(n, d, m)
    nn, dd = normalize(n, d)
    lo, hi = critical_values(nn, dd)
    kids = [engine.certify(nn, dd, r) for r in sorted({lo, hi})]
    if all(k.nondefective for k in kids):
        verdict = C.NONDEFECTIVE
    elif any(k.verdict == C.DEFECTIVE for k in kids):
        verdict = C.DEFECTIVE
    else:
        verdict = C.UNKNOWN
    return Certificate(nn, dd, None, verdict, C.CRITICAL, {"r_lower": lo, "r_upper": hi}, [], kids)


def theorem11_schedule(n: Sequence[int], d: Sequence[int], config: Config | None = None) -> Certificate:
    """Certify both critical values of a problem with every degree >= 3."""
    if min(d) < 3:
        raise InputError(f"every degree must be >= 3, got {tuple(d)}")
    return certify(n, d, None, config)


# --------------------------------------------------------------------------
# registry self-audit


@dataclass(frozen=True)
class AuditRecord:
    rule: str
    n: tuple[int, ...]
    d: tuple[int, ...]
    m: int
    claims_defective: bool
    observed_rank: int
    expected: int
    certified: bool

    @property
    def ok(self) -> bool:
        return self.certified != self.claims_defective


def registry_rule(n: Sequence[int], d: Sequence[int], m: int) -> Optional[RuleHit]:
    """First registry rule matching the normalized problem (Ballico excluded)."""
    p = SecantProblem(n, d, m).normalized()
    for name, rule in REGISTRY:
        if name != "ballico-factor-addition":
            hit = rule(p, None, 0)
            if hit is not None:
                return hit
    return None


def exceptional_cases(cap: int) -> list[tuple[tuple[int, ...], tuple[int, ...], int]]:
    """Every hardcoded defective registry case whose Terracini matrix fits in ``cap`` entries."""
    out = []
    n = 2
    while 2 * (n + 1) * comb(n + 2, 2) <= cap:
        out += [((n,), (2,), m) for m in range(2, n + 1) if m * (n + 1) * comb(n + 2, 2) <= cap]
        n += 1
    out += [((n,), (d,), m) for n, d, m in sorted(SPORADIC_VERONESE)]
    a = 1
    while (2 * a + 1) * 3 * 3 * (2 * a + 1) <= cap:
        out.append(((1, 1), (2, 2 * a), 2 * a + 1))
        out.append(((1, 1, 1), (1, 1, 2 * a), 2 * a + 1))
        a += 1
    out += [((1, 1, 1), (2, 2, 2), 7), ((1, 1, 1, 1), (1, 1, 1, 1), 3)]
    out += [((a, b), (1, 1), m) for a in range(2, 6) for b in range(a, 6) for m in range(2, a + 1)]
    return [c for c in out if c[2] * (sum(c[0]) + 1) * ambient_count(*c[:2]) <= cap]


def nondefective_samples(max_N: int) -> list[tuple[tuple[int, ...], tuple[int, ...], int]]:
    """Two-factor and ``P^1``-product registry instances at both critical values."""
    import itertools

    shapes = []
    for n in itertools.combinations_with_replacement(range(1, 5), 2):
        for d in itertools.product(range(3, 6), repeat=2):
            if n[0] != n[1] or d[0] <= d[1]:
                shapes.append((n, d))
    for k in (2, 3, 4):
        for d in itertools.combinations_with_replacement(range(1, 5), k):
            shapes.append(((1,) * k, d))
    out = []
    for n, d in shapes:
        if ambient_count(n, d) > max_N:
            continue
        for r in sorted(set(critical_values(n, d))):
            hit = registry_rule(n, d, r)
            if hit is not None and hit.verdict == C.NONDEFECTIVE and hit.name in ("two-factor", "p1-products"):
                out.append((n, d, r))
    return out


def registry_audit(config: Config | None = None, cap: int = 10**4, max_N: int = 300) -> list[AuditRecord]:
    """Re-derive registry claims with the rank oracle.

    Defective entries must show a deficit at every evidence prime; sampled
    non-defective entries must reach full rank.
    """
    cfg = config or Config()
    records = []
    cases = [(c, True) for c in exceptional_cases(cap)] + [(c, False) for c in nondefective_samples(max_N)]
    for (n, d, m), claims in cases:
        hit = registry_rule(n, d, m)
        out = check_nondefective(n, d, m, cfg.prime, cfg.seed, cfg.trials, cfg.cap)
        records.append(
            AuditRecord(hit.name if hit else "none", tuple(n), tuple(d), m, claims, out.observed_rank, out.expected, out.certified)
        )
    return records
