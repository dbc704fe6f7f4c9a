"""Sparse multivariate polynomials with ``Fraction`` coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Scalar = Union[int, Fraction]


def grevlex_key(exps: Sequence[int]):
    """Sort key; larger key = larger monomial in graded reverse-lex order."""
    return (sum(exps), tuple(-e for e in reversed(exps)))


class RationalPoly:
    """Polynomial over Q in an ordered list of named variables.

    Zero coefficients are never stored.  Binary operations align the two
    variable lists (union, in order of first appearance).
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple[int, ...], Scalar] | None = None):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"repeated variable names in {self.variables}")
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(self.variables) or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for variables {self.variables}")
            c = Fraction(c)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
        self.terms = {e: c for e, c in clean.items() if c}

    # construction ---------------------------------------------------------

    @classmethod
    def constant(cls, c: Scalar, variables: Sequence[str] = ()) -> "RationalPoly":
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def var(cls, name: str, variables: Sequence[str] | None = None) -> "RationalPoly":
        variables = tuple(variables) if variables is not None else (name,)
        exps = tuple(1 if v == name else 0 for v in variables)
        if name not in variables:
            raise ValueError(f"{name} not among {variables}")
        return cls(variables, {exps: 1})

    @classmethod
    def from_univariate(cls, name: str, coeffs: Sequence[Scalar]) -> "RationalPoly":
        """``coeffs[i]`` is the coefficient of ``name**i``."""
        return cls((name,), {(i,): c for i, c in enumerate(coeffs)})

    # alignment ------------------------------------------------------------

    def with_variables(self, variables: Sequence[str]) -> "RationalPoly":
        variables = tuple(variables)
        missing = set(self.variables) - set(variables)
        if missing:
            raise ValueError(f"cannot drop variables {sorted(missing)}")
        idx = [self.variables.index(v) if v in self.variables else None for v in variables]
        terms = {tuple(e[i] if i is not None else 0 for i in idx): c for e, c in self.terms.items()}
        return RationalPoly(variables, terms)

    def _align(self, other) -> tuple["RationalPoly", "RationalPoly"]:
        if not isinstance(other, RationalPoly):
            other = RationalPoly.constant(other, self.variables)
        if other.variables == self.variables:
            return self, other
        names = list(self.variables) + [v for v in other.variables if v not in self.variables]
        return self.with_variables(names), other.with_variables(names)

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        a, b = self._align(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return RationalPoly(a.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, RationalPoly) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._align(other)
        terms: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return RationalPoly(a.variables, terms)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar):
        c = Fraction(other)
        return RationalPoly(self.variables, {e: v / c for e, v in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = RationalPoly.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, RationalPoly):
            other = RationalPoly.constant(other, self.variables)
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash(frozenset(self.with_variables(sorted(self.variables)).terms.items()))

    def __bool__(self):
        return bool(self.terms)

    # evaluation and substitution -----------------------------------------

    def evaluate(self, values: Mapping[str, Scalar] | Sequence[Scalar]) -> Fraction:
        if isinstance(values, Mapping):
            point = [Fraction(values[v]) for v in self.variables]
        else:
            point = [Fraction(v) for v in values]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term *= x**k
            total += term
        return total

    def substitute(self, name: str, value: Union["RationalPoly", Scalar]) -> "RationalPoly":
        """Replace ``name`` by ``value``; ``name`` disappears from the variables."""
        if name not in self.variables:
            return self
        i = self.variables.index(name)
        rest = self.variables[:i] + self.variables[i + 1 :]
        if not isinstance(value, RationalPoly):
            value = RationalPoly.constant(value, rest)
        out = RationalPoly.constant(0, rest)
        powers: dict[int, RationalPoly] = {}
        for e, c in self.terms.items():
            k = e[i]
            if k not in powers:
                powers[k] = value**k
            mono = RationalPoly(rest, {e[:i] + e[i + 1 :]: c})
            out = out + mono * powers[k]
        return out

    # views ----------------------------------------------------------------

    def degree(self, name: str | None = None) -> int:
        if not self.terms:
            return -1
        if name is None:
            return max(sum(e) for e in self.terms)
        i = self.variables.index(name)
        return max(e[i] for e in self.terms)

    def coefficients_in(self, name: str) -> dict[int, "RationalPoly"]:
        """``{k: coefficient of name**k}`` as polynomials in the other variables."""
        i = self.variables.index(name)
        rest = self.variables[:i] + self.variables[i + 1 :]
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            out.setdefault(e[i], {})[e[:i] + e[i + 1 :]] = c
        return {k: RationalPoly(rest, t) for k, t in sorted(out.items())}

    def univariate_coeffs(self) -> list[Fraction]:
        """Dense coefficient list (constant first) of a univariate polynomial."""
        live = [v for v in self.variables if self.terms and self.degree(v) > 0]
        if len(live) > 1:
            raise ValueError(f"not univariate: {self.variables}")
        if not live:
            return [self.terms.get((0,) * len(self.variables), Fraction(0))]
        i = self.variables.index(live[0])
        out = [Fraction(0)] * (self.degree(live[0]) + 1)
        for e, c in self.terms.items():
            out[e[i]] = c
        return out

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in decreasing graded reverse-lex order."""
        return sorted(self.terms.items(), key=lambda ec: grevlex_key(ec[0]), reverse=True)

    def monomial_str(self, exps: Sequence[int]) -> str:
        parts = [v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, exps) if k]
        return "*".join(parts) if parts else "1"

    def __repr__(self):
        return f"RationalPoly({self.variables}, {str(self)!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for e, c in self.sorted_terms():
            mono = self.monomial_str(e)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if mono == "1":
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            out.append((sign, body))
        first_sign, first = out[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text


def binomial_poly(c: int, var: str) -> RationalPoly:
    """``(x+1)(x+2)...(x+c)/c!`` in the variable ``var``, i.e. ``C(x+c, c)``."""
    if c < 0:
        raise ValueError("c must be non-negative")
    x = RationalPoly.var(var)
    out = RationalPoly.constant(1, (var,))
    denom = 1
    for i in range(1, c + 1):
        out = out * (x + i)
        denom *= i
    return out / denom


def shift(poly: RationalPoly, name: str, a: Scalar, new_name: str = "t") -> RationalPoly:
    """Substitute ``name = a + new_name``."""
    rest = [v for v in poly.variables if v != name]
    t = RationalPoly.var(new_name, rest + [new_name]) if new_name not in rest else RationalPoly.var(new_name, rest)
    return poly.substitute(name, t + a)


def parse_monomial(text: str, variables: Iterable[str]) -> tuple[int, ...]:
    variables = tuple(variables)
    exps = [0] * len(variables)
    text = text.strip()
    if text == "1":
        return tuple(exps)
    for factor in text.split("*"):
        name, _, power = factor.partition("^")
        exps[variables.index(name)] += int(power) if power else 1
    return tuple(exps)
