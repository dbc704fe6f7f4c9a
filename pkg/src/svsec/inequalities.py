"""Exact checks of the numerical lemmas behind the Horace induction.

Three kinds of evidence are produced:

* the displayed polynomial expansions are recomputed from their defining
  binomial expressions and diffed against transcribed tables (``data/*.tsv``);
* coefficient sign claims are proved on rays ``x >= a`` by shifting
  ``x = a + t`` and inspecting the coefficients in ``t``;
* the lemma inequalities themselves are scanned over finite parameter boxes.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import comb, prod
from typing import Iterator, Mapping, Optional, Sequence

from .core import InputError, ambient_count, critical_values, horace_numbers
from .polynomial import RationalPoly, binomial_poly, parse_monomial, shift

__all__ = [
    "binomial_poly",
    "Expansion",
    "NAMED_IDS",
    "expand_named",
    "load_expected",
    "diff_terms",
    "prove_sign_on_ray",
    "sign_on_ray",
    "descartes_bound",
    "Box",
    "ScanReport",
    "scan_lemma",
    "verify_appendix",
]


# --------------------------------------------------------------------------
# named expansions


def _binom_shifted(var: str, upper_shift: int, c: int) -> RationalPoly:
    """``C(var + upper_shift, c)`` as a polynomial in ``var``."""
    # C(x + s, c) = C(y + c, c) with y = x + s - c
    return binomial_poly(c, var).substitute(var, RationalPoly.var(var) + (upper_shift - c))


def _cubic_tail(s: RationalPoly) -> RationalPoly:
    return s**3 + 4 * s**2 + 2 * s - 1


def _a1_base() -> RationalPoly:
    n1, n3 = RationalPoly.var("n1", ("n1", "n3")), RationalPoly.var("n3", ("n1", "n3"))
    head = _binom_shifted("n1", 2, 3) * _binom_shifted("n1", 3, 3) * _binom_shifted("n3", 3, 3)
    return (-head + _cubic_tail(n1 + 2 * n3)).with_variables(("n1", "n3"))


def _a1_n1eq2() -> RationalPoly:
    n2, n3 = RationalPoly.var("n2", ("n2", "n3")), RationalPoly.var("n3", ("n2", "n3"))
    head = 4 * _binom_shifted("n2", 3, 3) * _binom_shifted("n3", 3, 3)
    return (-head + _cubic_tail(2 + n2 + n3)).with_variables(("n2", "n3"))


def _a1_step() -> RationalPoly:
    np_, nk = RationalPoly.var("np", ("np", "nk")), RationalPoly.var("nk", ("np", "nk"))
    return (-_binom_shifted("nk", 3, 3) * _cubic_tail(np_) + _cubic_tail(np_ + nk)).with_variables(("np", "nk"))


def _a3_base() -> RationalPoly:
    n1, n3 = RationalPoly.var("n1", ("n1", "n3")), RationalPoly.var("n3", ("n1", "n3"))
    s = n1 + 2 * n3
    head = _binom_shifted("n1", 1, 2) * _binom_shifted("n1", 3, 3) * _binom_shifted("n3", 3, 3) * (5 * n1 + 3 * n3 - 2)
    return (head / 3 - s * (s + 1) * (2 * s + 1)).with_variables(("n1", "n3"))


def _a3_step() -> RationalPoly:
    np_, nk = RationalPoly.var("np", ("np", "nk")), RationalPoly.var("nk", ("np", "nk"))
    s = np_ + nk
    sq = lambda v: v * (v + 1) * (2 * v + 1)
    return (_binom_shifted("nk", 3, 3) * sq(np_) - sq(s)).with_variables(("np", "nk"))


# id -> (builder, main variable, coefficient variable)
_NAMED = {
    "A1-base": (_a1_base, "n3", "n1"),
    "A1-n1eq2": (_a1_n1eq2, "n3", "n2"),
    "A1-step": (_a1_step, "nk", "np"),
    "A3-base": (_a3_base, "n3", "n1"),
    "A3-step": (_a3_step, "nk", "np"),
}
NAMED_IDS = tuple(_NAMED)


@dataclass(frozen=True)
class Expansion:
    id: str
    poly: RationalPoly
    main: str
    coeff_var: str

    def coefficients(self) -> dict[int, RationalPoly]:
        """``{k: coefficient of main**k}``, each univariate in ``coeff_var``."""
        return {k: c.with_variables((self.coeff_var,)) for k, c in self.poly.coefficients_in(self.main).items()}

    def coefficient(self, k: int) -> RationalPoly:
        return self.coefficients().get(k, RationalPoly.constant(0, (self.coeff_var,)))

    def at(self, value) -> RationalPoly:
        """Substitute a value for the main variable."""
        return self.poly.substitute(self.main, value).with_variables((self.coeff_var,))


def expand_named(id: str) -> Expansion:
    try:
        build, main, coeff = _NAMED[id]
    except KeyError:
        raise InputError(f"unknown expansion id {id!r}; known: {', '.join(NAMED_IDS)}") from None
    return Expansion(id, build(), main, coeff)


def defining_value(id: str, values: Mapping[str, int]) -> Fraction:
    """Evaluate the defining binomial expression with integer arithmetic."""
    C3 = lambda x: comb(x + 3, 3)
    sq = lambda v: v * (v + 1) * (2 * v + 1)
    tail = lambda s: s**3 + 4 * s**2 + 2 * s - 1
    if id == "A1-base":
        n1, n3 = values["n1"], values["n3"]
        return Fraction(-comb(n1 + 2, 3) * comb(n1 + 3, 3) * C3(n3) + tail(n1 + 2 * n3))
    if id == "A1-n1eq2":
        n2, n3 = values["n2"], values["n3"]
        return Fraction(-4 * C3(n2) * C3(n3) + tail(2 + n2 + n3))
    if id == "A1-step":
        np_, nk = values["np"], values["nk"]
        return Fraction(-C3(nk) * tail(np_) + tail(np_ + nk))
    if id == "A3-base":
        n1, n3 = values["n1"], values["n3"]
        s = n1 + 2 * n3
        return Fraction(comb(n1 + 1, 2) * comb(n1 + 3, 3) * C3(n3) * (5 * n1 + 3 * n3 - 2), 3) - sq(s)
    if id == "A3-step":
        np_, nk = values["np"], values["nk"]
        return Fraction(C3(nk) * sq(np_) - sq(np_ + nk))
    raise InputError(f"unknown expansion id {id!r}")


# --------------------------------------------------------------------------
# expected tables


def parse_table(text: str) -> RationalPoly:
    """Parse ``monomial<TAB>num/den`` lines; ``# variables:`` names the variables."""
    variables: Optional[tuple[str, ...]] = None
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*variables:\s*(.*)", line)
            if m:
                variables = tuple(m.group(1).split())
            continue
        mono, _, coeff = line.partition("\t")
        rows.append((mono, Fraction(coeff.strip())))
    if variables is None:
        raise InputError("table lacks a '# variables:' header")
    terms: dict = {}
    for mono, c in rows:
        e = parse_monomial(mono, variables)
        if e in terms:
            raise InputError(f"duplicate monomial {mono}")
        terms[e] = c
    return RationalPoly(variables, terms)


def format_table(poly: RationalPoly, main: str | None = None) -> str:
    lines = [f"# variables: {' '.join(poly.variables)}"]
    if main:
        lines.append(f"# main: {main}")
    for e, c in poly.sorted_terms():
        lines.append(f"{poly.monomial_str(e)}\t{c.numerator}/{c.denominator}")
    return "\n".join(lines) + "\n"


def load_expected(id: str) -> RationalPoly:
    if id not in _NAMED:
        raise InputError(f"unknown expansion id {id!r}")
    text = resources.files("svsec").joinpath("data").joinpath(f"{id}.tsv").read_text(encoding="utf-8")
    return parse_table(text)


@dataclass(frozen=True)
class TermDiff:
    id: str
    monomial: str
    computed: Fraction
    expected: Fraction


def diff_terms(id: str, computed: RationalPoly, expected: RationalPoly) -> list[TermDiff]:
    """Every monomial whose coefficient differs; exact comparison."""
    a, b = computed._align(expected)
    out = []
    for e in sorted(set(a.terms) | set(b.terms), key=lambda e: a.monomial_str(e)):
        x, y = a.terms.get(e, Fraction(0)), b.terms.get(e, Fraction(0))
        if x != y:
            out.append(TermDiff(id, a.monomial_str(e), x, y))
    return out


# --------------------------------------------------------------------------
# signs


def _sign_ok(c: Fraction, sign: str) -> bool:
    if sign == ">=0":
        return c >= 0
    if sign == "<=0":
        return c <= 0
    raise InputError(f"sign must be '>=0' or '<=0', got {sign!r}")


def _univariate(poly: RationalPoly) -> tuple[RationalPoly, str]:
    live = [v for v in poly.variables if poly.degree(v) > 0]
    if len(live) > 1:
        raise InputError(f"polynomial is not univariate: {poly}")
    name = live[0] if live else (poly.variables[0] if poly.variables else "x")
    return poly.with_variables((name,)) if poly.variables else RationalPoly(("x",), {(0,): c for c in poly.terms.values()}), name


def prove_sign_on_ray(poly: RationalPoly, a: int, sign: str) -> bool:
    """Sufficient test that ``poly(x)`` has ``sign`` for every real ``x >= a``.

    Substitutes ``x = a + t`` and returns True iff every coefficient in ``t``
    has the requested sign.  False means "not proved".
    """
    p, name = _univariate(poly)
    shifted = p.substitute(name, RationalPoly.var("t") + a).with_variables(("t",))
    return all(_sign_ok(c, sign) for c in shifted.univariate_coeffs())


def sign_on_ray(poly: RationalPoly, a: int, sign: str, bound: int = 200) -> str:
    """``"proved"``, ``"verified on range only"`` (integers ``a..a+bound``) or ``"fails"``."""
    if prove_sign_on_ray(poly, a, sign):
        return "proved"
    p, name = _univariate(poly)
    if all(_sign_ok(p.evaluate({name: x}), sign) for x in range(a, a + bound + 1)):
        return "verified on range only"
    return "fails"


def sign_threshold(poly: RationalPoly, sign: str, limit: int = 1000) -> dict:
    """Smallest integer ``a >= 0`` where the shift proof succeeds, and the
    smallest integer from which the sign holds on ``[a, limit]``."""
    proof_at = next((a for a in range(limit + 1) if prove_sign_on_ray(poly, a, sign)), None)
    p, name = _univariate(poly)
    values = [_sign_ok(p.evaluate({name: x}), sign) for x in range(limit + 1)]
    holds_from = None
    for a in range(limit, -1, -1):
        if not values[a]:
            break
        holds_from = a
    return {"shift_proof_from": proof_at, "holds_from": holds_from}


def descartes_bound(coeffs: Sequence) -> int:
    """Sign changes in the nonzero coefficient sequence."""
    signs = [c > 0 for c in (Fraction(x) for x in coeffs) if c != 0]
    if not signs:
        raise InputError("all coefficients are zero")
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


# --------------------------------------------------------------------------
# scans


@dataclass(frozen=True)
class Box:
    k: tuple[int, int] = (3, 5)
    n: tuple[int, int] = (2, 6)
    d: tuple[int, int] = (3, 5)

    @classmethod
    def parse(cls, text: str) -> "Box":
        """Parse ``"k=3..5,n=2..6,d=3..5"``; a single value ``k=3`` is allowed."""
        fields = {}
        for part in text.replace(" ", "").split(","):
            if not part:
                continue
            m = re.fullmatch(r"([knd])=(\d+)(?:\.\.(\d+))?", part)
            if not m:
                raise InputError(f"malformed box component {part!r}")
            lo = int(m.group(2))
            hi = int(m.group(3)) if m.group(3) else lo
            if hi < lo:
                raise InputError(f"empty range in {part!r}")
            fields[m.group(1)] = (lo, hi)
        return cls(**fields)

    def __str__(self):
        return ",".join(f"{name}={lo}..{hi}" for name, (lo, hi) in (("k", self.k), ("n", self.n), ("d", self.d)))

    def sorted_ns(self, k: int) -> Iterator[tuple[int, ...]]:
        return itertools.combinations_with_replacement(range(self.n[0], self.n[1] + 1), k)

    def ds(self, k: int) -> Iterator[tuple[int, ...]]:
        return itertools.product(range(self.d[0], self.d[1] + 1), repeat=k)


@dataclass
class ScanReport:
    lemma: str
    box: str
    instances: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def _lemma_quantities(n, d, r):
    dim = sum(n)
    hn = horace_numbers(n, d, r)
    lo1, _ = critical_values(n, (d[0] - 1,) + d[1:])
    _, hi2 = critical_values(n, (d[0] - 2,) + d[1:])
    return dim, hn.s_r, hn.eps_r, lo1, hi2


def scan_lemma(lemma: str, box: Box | str = Box()) -> ScanReport:
    """Check one lemma inequality on every instance in ``box``.

    ``A1``/``A2``/``A3`` run over sorted ``n`` with entries in the ``n``
    range, every ``d`` in the ``d`` range, and ``r`` in both critical
    values.  ``ineq31`` runs over sorted ``n'`` of length ``k``.
    """
    if isinstance(box, str):
        box = Box.parse(box)
    lemma = lemma.upper() if lemma.lower() != "ineq31" else "ineq31"
    if lemma not in ("A1", "A2", "A3", "ineq31"):
        raise InputError(f"unknown lemma {lemma!r}")
    if lemma != "ineq31" and (box.n[0] < 2 or box.d[0] < 3 or box.k[0] < 3):
        raise InputError("A1-A3 need n1 >= 2, degrees >= 3 and k >= 3")
    if box.n[0] < 1 or box.d[0] < 1 or box.k[0] < 1:
        raise InputError("box entries must be positive")
    report = ScanReport(lemma, str(box))
    for k in range(box.k[0], box.k[1] + 1):
        for n in box.sorted_ns(k):
            for d in box.ds(k):
                if lemma == "ineq31":
                    lhs = prod(comb(a + b, a) for a, b in zip(n, d))
                    rhs = sum(n) ** 2
                    report.instances += 1
                    if not lhs > rhs:
                        report.counterexamples.append({"n": n, "d": d, "lhs": lhs, "rhs": rhs})
                    continue
                for r in sorted(set(critical_values(n, d))):
                    dim, s, eps, lo1, hi2 = _lemma_quantities(n, d, r)
                    if lemma == "A1":
                        lhs, rhs, ok = r - s, lo1 - dim - 1, r - s <= lo1 - dim - 1
                    elif lemma == "A2":
                        lhs, rhs, ok = s, eps, s >= eps
                    else:
                        lhs, rhs, ok = hi2 + dim + 1, r - s - eps, hi2 + dim + 1 <= r - s - eps
                    report.instances += 1
                    if not ok:
                        report.counterexamples.append({"n": n, "d": d, "r": r, "lhs": lhs, "rhs": rhs})
    return report


def a3_identity_holds(n: Sequence[int], d: Sequence[int]) -> bool:
    """``-N_d + (|n|+1)N_{d(1)} - |n|N_{d(2)}`` equals its closed product form."""
    dim = sum(n)
    d1 = (d[0] - 1,) + tuple(d[1:])
    d2 = (d[0] - 2,) + tuple(d[1:])
    lhs = -ambient_count(n, d) + (dim + 1) * ambient_count(n, d1) - dim * ambient_count(n, d2)
    n1, e1 = n[0], d[0]
    head = Fraction(prod(range(1, n1 + e1 - 1)), prod(range(1, n1)) * prod(range(1, e1 + 1)))
    rest = prod(comb(a + b, a) for a, b in zip(n[1:], d[1:]))
    return lhs == head * rest * (dim * e1 - n1 - e1 + 1)


# --------------------------------------------------------------------------
# full appendix run


@dataclass
class Check:
    name: str
    ok: bool
    detail: dict = field(default_factory=dict)


@dataclass
class AppendixReport:
    checks: list[Check] = field(default_factory=list)
    findings: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail} for c in self.checks],
            "findings": self.findings,
        }


# (expansion id, ray start, required sign) for every coefficient sign claim
SIGN_CLAIMS = (
    ("A1-base", 3, "<=0"),
    ("A1-step", 6, "<=0"),
    ("A3-base", 2, ">=0"),
    # printed as "negative"; the surrounding inequality needs them non-negative
    ("A3-step", 6, ">=0"),
)


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def verify_appendix(
    box: Box | str = Box(),
    expected: Mapping[str, RationalPoly] | None = None,
    scans: bool = True,
) -> AppendixReport:
    """Recompute every expansion, sign claim, Descartes step and lemma scan.

    ``expected`` overrides the transcribed tables (used for negative controls).
    """
    report = AppendixReport()
    expansions = {i: expand_named(i) for i in NAMED_IDS}

    for i, ex in expansions.items():
        table = expected[i] if expected is not None and i in expected else load_expected(i)
        diffs = diff_terms(i, ex.poly, table)
        report.checks.append(
            Check(
                f"expansion {i}",
                not diffs,
                {"terms": len(ex.poly.terms), "diffs": [
                    {"id": t.id, "term": t.monomial, "computed": _fmt(t.computed), "expected": _fmt(t.expected)}
                    for t in diffs
                ]},
            )
        )

    thresholds = {}
    for i, a, sign in SIGN_CLAIMS:
        ex = expansions[i]
        statuses = {}
        for k, coeff in ex.coefficients().items():
            statuses[f"{ex.main}^{k}"] = sign_on_ray(coeff, a, sign)
            if i == "A3-base":
                thresholds[f"{ex.main}^{k}"] = sign_threshold(coeff, sign)
        ok = all(s != "fails" for s in statuses.values())
        report.checks.append(Check(f"signs {i} ({ex.coeff_var} >= {a}, {sign})", ok, statuses))
    report.findings["A3-base coefficient thresholds"] = thresholds

    # n1 = 2 case: sign pattern (-, -, ?, +) in n3 and a negative value at n3 = 2
    ex = expansions["A1-n1eq2"]
    co = ex.coefficients()
    pattern = {
        "n3^3 <= 0": sign_on_ray(co[3], 2, "<=0"),
        "n3^2 <= 0": sign_on_ray(co[2], 2, "<=0"),
        "n3^0 >= 0": sign_on_ray(co[0], 2, ">=0"),
    }
    at2 = ex.at(2)
    cubic = [at2.univariate_coeffs()[j] for j in range(3, -1, -1)]
    changes = descartes_bound(cubic)
    value_at_2 = at2.evaluate({"n2": 2})
    ok = (
        all(s != "fails" for s in pattern.values())
        and changes == 1
        and cubic[-1] > 0
        and value_at_2 < 0
    )
    report.checks.append(
        Check(
            "descartes A1-n1eq2",
            ok,
            {
                "coefficient signs": pattern,
                "cubic at n3=2 (highest first)": [_fmt(c) for c in cubic],
                "sign changes": changes,
                "value at n2=2": _fmt(value_at_2),
            },
        )
    )
    per_n2 = [descartes_bound([co[j].evaluate({"n2": v}) for j in (3, 2, 1, 0)]) for v in range(2, 51)]
    report.checks.append(Check("descartes A1-n1eq2 per n2 in 2..50", set(per_n2) == {1}, {"changes": sorted(set(per_n2))}))

    if isinstance(box, str):
        box = Box.parse(box)
    ident_bad = [
        (n, d) for k in range(box.k[0], box.k[1] + 1) for n in box.sorted_ns(k) for d in box.ds(k)
        if not a3_identity_holds(n, d)
    ] if scans else []
    if scans:
        report.checks.append(Check("A3 closed-form identity", not ident_bad, {"counterexamples": ident_bad[:10]}))
        for lemma in ("A1", "A2", "A3"):
            rep = scan_lemma(lemma, box)
            report.checks.append(
                Check(f"scan {lemma}", rep.ok, {"box": rep.box, "instances": rep.instances, "counterexamples": rep.counterexamples[:10]})
            )
        rep = scan_lemma("ineq31", Box(k=(1, box.k[1] - 1), n=(1, box.n[1]), d=box.d))
        report.checks.append(
            Check("scan ineq31", rep.ok, {"box": rep.box, "instances": rep.instances, "counterexamples": rep.counterexamples[:10]})
        )
    return report
