"""Independent re-verification of certificate trees.

Only ``math.comb`` and the recorded JSON are used: nothing here calls the
engine, so a bug in ``core`` or ``horace`` arithmetic shows up as a
disagreement.  ``check`` returns a list of error strings; empty means sound.
"""

from __future__ import annotations

from math import comb, prod
from typing import Optional, Union

from . import certificate as C
from .certificate import Certificate

_OPS = {">=": lambda a, b: a >= b, "<=": lambda a, b: a <= b, ">": lambda a, b: a > b, "<": lambda a, b: a < b, "==": lambda a, b: a == b}

_AH_SPORADIC = {(2, 4, 5), (3, 4, 9), (4, 3, 7), (4, 4, 14)}


def _N(n, d) -> int:
    return prod(comb(a + b, b) for a, b in zip(n, d))


def _crit(n, d) -> tuple[int, int]:
    N, q = _N(n, d), sum(n) + 1
    return N // q, -(-N // q)


def _canon(n, d, m) -> tuple:
    pairs = sorted((a, b) for a, b in zip(n, d) if a > 0)
    return tuple(a for a, _ in pairs), tuple(b for _, b in pairs), m


def _ah_defective(n: int, d: int, m: int) -> bool:
    return (d == 2 and 2 <= m <= n) or (n, d, m) in _AH_SPORADIC


def _p1_defective(d, m) -> bool:
    ds = tuple(sorted(d))
    return (
        (len(ds) == 2 and ds[0] == 2 and ds[1] % 2 == 0 and m == ds[1] + 1)
        or (len(ds) == 3 and ds[:2] == (1, 1) and ds[2] % 2 == 0 and m == ds[2] + 1)
        or (ds == (2, 2, 2) and m == 7)
        or (ds == (1, 1, 1, 1) and m == 3)
    )


class _Checker:
    def __init__(self):
        self.errors: list[str] = []

    def err(self, path: str, msg: str) -> None:
        self.errors.append(f"{path}: {msg}")

    def need(self, ok: bool, path: str, msg: str) -> bool:
        if not ok:
            self.err(path, msg)
        return ok

    # ------------------------------------------------------------------

    def node(self, c: Certificate, path: str) -> None:
        if not self.need(c.verdict in C.VERDICTS, path, f"bad verdict {c.verdict!r}"):
            return
        if not self.need(len(c.n) == len(c.d) and len(c.n) >= 1, path, "n and d lengths differ"):
            return
        if not self.need(all(a >= 0 for a in c.n) and all(b >= 1 for b in c.d), path, "bad entries in n or d"):
            return
        if c.m is not None and not self.need(c.m >= 0, path, "negative m"):
            return
        for sc in c.side_conditions:
            try:
                holds = _OPS[sc["op"]](sc["lhs"], sc["rhs"])
            except (KeyError, TypeError):
                self.err(path, f"malformed side condition {sc!r}")
                continue
            self.need(holds == sc.get("holds"), path, f"side condition {sc.get('name')} misreports holds")
            if c.verdict == C.NONDEFECTIVE:
                self.need(holds, path, f"side condition {sc.get('name')} fails")
        if c.kind in C.LEAF_TYPES and c.kind != C.BASE:
            self.need(not c.children, path, f"{c.kind} node has children")
        if c.verdict == C.DEFECTIVE:
            self.need(c.kind in (C.KNOWN_DEFECTIVE, C.CRITICAL), path, f"defective verdict from {c.kind}")
        if c.kind == C.UNRESOLVED:
            self.need(c.verdict == C.UNKNOWN, path, "unresolved node must be unknown")

        handler = getattr(self, "_" + c.kind, None)
        if handler is None:
            self.err(path, f"unknown justification type {c.kind!r}")
        else:
            handler(c, path)
        for i, ch in enumerate(c.children):
            self.node(ch, f"{path}/{i}")

    def _kids_nondefective(self, c: Certificate, path: str) -> None:
        if c.verdict == C.NONDEFECTIVE:
            self.need(all(k.verdict == C.NONDEFECTIVE for k in c.children), path, "nondefective parent with non-nondefective child")

    # leaves -----------------------------------------------------------

    def _unresolved(self, c, path):
        pass

    def _terracini(self, c, path):
        out = c.data.get("outcome", {})
        if c.t is not None:
            n0, nX, dX = c.n[0], c.n[1:], c.d[1:]
            self.need(c.d[0] == 1, path, "T-node first degree must be 1")
            x = sum(nX)
            expected = min((n0 + 1) * _N(nX, dX), c.m * (n0 + x + 1) + c.t * (n0 + 1))
        else:
            expected = min(_N(c.n, c.d), c.m * (sum(c.n) + 1))
        self.need(out.get("expected") == expected, path, f"recorded expected {out.get('expected')} != {expected}")
        rk = out.get("observed_rank", -1)
        self.need(0 <= rk <= expected, path, f"observed rank {rk} outside [0, {expected}]")
        if c.verdict == C.NONDEFECTIVE:
            self.need(rk == expected and out.get("verdict") == "certified_nondefective", path, "nondefective without full rank")

    def _bc_window(self, c, path):
        lo, hi = _crit(c.n, c.d)
        dim = sum(c.n)
        self.need((c.data.get("r_lower"), c.data.get("r_upper")) == (lo, hi), path, "critical values misrecorded")
        self.need(c.m <= lo - dim - 1 or c.m >= hi + dim + 1, path, f"m={c.m} not in window ({lo - dim - 1}, {hi + dim + 1})")

    def _known_defective(self, c, path):
        name = c.data.get("name")
        k, m = len(c.n), c.m
        if name == "alexander-hirschowitz-exception":
            ok = k == 1 and _ah_defective(c.n[0], c.d[0], m)
        elif name == "segre-matrices-exception":
            ok = k == 2 and tuple(c.d) == (1, 1) and 2 <= m <= min(c.n)
        elif name == "p1-products-exception":
            ok = all(a == 1 for a in c.n) and _p1_defective(c.d, m)
        else:
            ok = False
        self.need(ok, path, f"known_defective rule {name!r} does not match {c.n},{c.d},{m}")
        oracle = c.data.get("oracle")
        if oracle is not None:
            self.need(oracle["observed_rank"] < oracle["expected"], path, "oracle contradicts known defect")

    def _base(self, c, path):
        name = c.data.get("name")
        n, d, m, k = tuple(c.n), tuple(c.d), c.m, len(c.n)
        if name == "secant-index-one":
            ok = m == 1
        elif name == "linear-space":
            ok = k == 1 and d[0] == 1
        elif name == "alexander-hirschowitz":
            ok = k == 1 and d[0] >= 2 and not _ah_defective(n[0], d[0], m)
        elif name == "segre-matrices":
            ok = k == 2 and d == (1, 1) and not (2 <= m <= min(n))
        elif name == "p1-products":
            ok = all(a == 1 for a in n) and not _p1_defective(d, m)
        elif name == "two-factor":
            ok = k == 2 and min(d) >= 3
        elif name == "ballico-factor-addition":
            ok = self._ballico(c, path)
        else:
            ok = False
        self.need(ok, path, f"base rule {name!r} preconditions fail for {n},{d},{m}")
        self._kids_nondefective(c, path)

    def _ballico(self, c, path) -> bool:
        tr = c.data.get("checks", {})
        nX, dX = tuple(tr.get("x", {}).get("n", ())), tuple(tr.get("x", {}).get("d", ()))
        d1 = tr.get("d1")
        if not nX or d1 is None or d1 < 2 or min(dX) < 3:
            return False
        # X plus a (P^1, d1) factor must be the node's variety
        if _canon(nX + (1,), dX + (d1,), c.m) != _canon(c.n, c.d, c.m):
            return False
        route = tr.get("route")
        if route == "p1-products":
            return len(nX) >= 2 and all(a == 1 for a in nX) and not c.children
        if route != "ballico":
            return False
        dim = sum(nX)
        NX = _N(nX, dX)
        if dim < 3 or not NX > dim * dim or len(c.children) != 1:
            return False
        ch = c.children[0]
        return _canon(ch.n, ch.d, ch.m) == _canon(nX, dX, NX // dim) and ch.verdict == C.NONDEFECTIVE

    # inner nodes ------------------------------------------------------

    def _monotone(self, c, path):
        if not self.need(len(c.children) == 1, path, "monotone needs one child"):
            return
        ch = c.children[0]
        direction = c.data.get("direction")
        if c.t is not None:
            # property-T closure: from a threshold triple with the same n0, t
            frm = c.data.get("from", [])
            x, N = sum(c.n[1:]), _N(c.n[1:], c.d[1:])
            n0 = c.n[0]
            self.need(ch.t is not None and [ch.n[0], ch.m, ch.t] == list(frm), path, "monotone child is not the recorded triple")
            self.need(tuple(ch.n) == tuple(c.n) and tuple(ch.d) == tuple(c.d), path, "monotone child changes the variety")
            count = frm[1] * (n0 + x + 1) + frm[2] * (n0 + 1) if len(frm) == 3 else None
            amb = (n0 + 1) * N
            if direction == "subabundant":
                ok = count is not None and count <= amb and c.m < frm[1] and c.t == frm[2]
            elif direction == "superabundant":
                ok = count is not None and count >= amb and c.m > frm[1] and c.t == frm[2]
            else:
                ok = False
            self.need(ok, path, "monotone T step is not justified by abundance")
        else:
            self.need(_canon(ch.n, ch.d, 0)[:2] == _canon(c.n, c.d, 0)[:2], path, "monotone child changes the variety")
            N, q = _N(c.n, c.d), sum(c.n) + 1
            r = ch.m
            if direction == "subabundant":
                ok = c.m < r and r * q <= N
            elif direction == "superabundant":
                ok = c.m > r and r * q >= N
            else:
                ok = False
            self.need(ok, path, f"monotone step from {r} to {c.m} not justified")
        self._kids_nondefective(c, path)

    def _horace_step(self, c, path):
        data = c.data
        n, d, r = tuple(data.get("n", ())), tuple(data.get("d", ())), data.get("r")
        if not self.need(r == c.m and sorted(zip(n, d)) == sorted(zip(c.n, c.d)), path, "pivot data is not a permutation of the problem"):
            return
        if not self.need(d[0] >= 3, path, "pivot degree < 3"):
            return
        dim = sum(n)
        d1 = (d[0] - 1,) + d[1:]
        d2 = (d[0] - 2,) + d[1:]
        num = (dim + 1) * r - _N(n, d1)
        if not self.need(num >= 0, path, "Horace numbers undefined (negative numerator)"):
            return
        s, eps = divmod(num, dim)
        self.need((data.get("s_r"), data.get("eps_r")) == (s, eps), path, f"s_r, eps_r misrecorded; expected {(s, eps)}")
        self.need((dim + 1) * r == _N(n, d1) + dim * s + eps and 0 <= eps < dim, path, "reconstruction identity fails")
        expected = [
            _canon((n[0] - 1,) + n[1:], d, s),
            _canon(n, d1, r - s),
            _canon(n, d2, r - s - eps),
        ]
        got = [_canon(ch.n, ch.d, ch.m) for ch in c.children]
        self.need(got == expected, path, f"children {got} != {expected}")
        self.need(len(c.side_conditions) >= 2, path, "side conditions not recorded")
        if c.verdict == C.NONDEFECTIVE:
            self.need(s >= eps, path, "s_r < eps_r")
            self.need((r - s - eps) * (dim + 1) >= _N(n, d2), path, "third child not superabundant")
        for lem in data.get("appendix_lemmas", []):
            self.need(_OPS[lem["op"]](lem["lhs"], lem["rhs"]), path, f"{lem['name']} fails")
        self._kids_nondefective(c, path)

    def _splitting(self, c, path):
        data = c.data
        if "triple" in data:
            self._splitting_T(c, path)
            return
        i, n0 = data.get("factor"), data.get("n0")
        if not self.need(len(c.children) == 1 and i is not None and 0 <= i < len(c.n), path, "malformed splitting node"):
            return
        self.need(c.n[i] == n0 and c.d[i] == 1, path, "split factor is not P^n0 in degree 1")
        nX, dX = c.n[:i] + c.n[i + 1 :], c.d[:i] + c.d[i + 1 :]
        ch = c.children[0]
        self.need(
            ch.t in (0, None) and ch.m == c.m and tuple(ch.n) == (n0,) + tuple(nX) and tuple(ch.d) == (1,) + tuple(dX),
            path,
            "splitting child is not T(n0, m, 0) on the remaining factors",
        )
        self._kids_nondefective(c, path)

    def _splitting_T(self, c, path):
        data = c.data
        n0, m, t = data["triple"]
        x, N = sum(c.n[1:]), _N(c.n[1:], c.d[1:])
        self.need([c.n[0], c.m, c.t] == [n0, m, t] and c.d[0] == 1, path, "triple does not match the problem")
        self.need((data.get("x"), data.get("alpha_plus_1")) == (x, N), path, "context (x, alpha+1) misrecorded")
        n1, m1 = data.get("n_prime"), data.get("m_prime")
        if not self.need(n1 is not None and 0 <= n1 <= n0 - 1 and 0 <= m1 <= m, path, "split parameters out of range"):
            return
        want = [[n1, m1, t + m - m1], [n0 - n1 - 1, m - m1, t + m1]]
        self.need(data.get("children") == want, path, f"split children {data.get('children')} != {want}")
        got = [[ch.n[0], ch.m, ch.t] for ch in c.children]
        self.need(got == want, path, f"child nodes {got} != {want}")
        for ch in c.children:
            self.need(tuple(ch.n[1:]) == tuple(c.n[1:]) and tuple(ch.d) == tuple(c.d), path, "split child changes X")
        self._kids_nondefective(c, path)

    def _critical_values(self, c, path):
        lo, hi = _crit(c.n, c.d)
        self.need(c.m is None, path, "critical-values root must have m = null")
        self.need((c.data.get("r_lower"), c.data.get("r_upper")) == (lo, hi), path, "critical values misrecorded")
        got = sorted(ch.m for ch in c.children)
        self.need(got == sorted({lo, hi}), path, f"children at {got}, expected {sorted({lo, hi})}")
        for ch in c.children:
            self.need(_canon(ch.n, ch.d, 0) == _canon(c.n, c.d, 0), path, "child changes the variety")
        verdicts = [ch.verdict for ch in c.children]
        if c.verdict == C.NONDEFECTIVE:
            self.need(all(v == C.NONDEFECTIVE for v in verdicts), path, "nondefective root with open child")
        elif c.verdict == C.DEFECTIVE:
            self.need(C.DEFECTIVE in verdicts, path, "defective root without a defective child")


def check(cert: Union[Certificate, dict, str]) -> list[str]:
    """All soundness errors found in ``cert`` (JSON text, dict or object)."""
    if isinstance(cert, str):
        cert = Certificate.loads(cert)
    elif isinstance(cert, dict):
        cert = Certificate.from_json(cert)
    ch = _Checker()
    ch.node(cert, "root")
    return ch.errors


def check_or_raise(cert, what: Optional[str] = None) -> None:
    errors = check(cert)
    if errors:
        raise AssertionError(f"certificate {what or ''} failed checks:\n" + "\n".join(errors))
