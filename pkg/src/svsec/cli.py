"""``svsec`` command line.

Exit codes: 0 when a verdict or report is produced, 2 when the answer is
unknown (or a scan finds a counterexample), 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import certificate as C
from .certificate import Certificate
from .config import DEFAULT_PRIME, Config
from .core import (
    InputError,
    abundance,
    ambient_count,
    critical_values,
    expected_dimension,
    expected_rank,
    normalize,
    parse_tuple,
)

EXIT_OK, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _tuple_arg(text: str) -> tuple[int, ...]:
    try:
        out = parse_tuple(text)
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not out:
        raise argparse.ArgumentTypeError("empty tuple")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=3)
    common.add_argument("--cap", type=int, default=10**7, help="matrix-size cap in entries")
    common.add_argument("--max-depth", type=int, default=64)
    common.add_argument("--max-nodes", type=int, default=10**5)
    common.add_argument("--format", choices=("text", "json"), default="text")

    problem = _Parser(add_help=False)
    problem.add_argument("-n", type=_tuple_arg, required=True, help="factor dimensions, e.g. 2,2,2")
    problem.add_argument("-d", type=_tuple_arg, required=True, help="degrees, e.g. 3,3,3")

    parser = _Parser(prog="svsec", description="Secant non-defectivity of Segre-Veronese varieties.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expected", parents=[common, problem], help="ambient count, expected rank, abundance")
    p.add_argument("-m", type=int, required=True)
    sub.add_parser("critical", parents=[common, problem], help="critical values r_lower, r_upper")
    p = sub.add_parser("terracini", parents=[common, problem], help="rank oracle over F_p")
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--t", type=int, default=0, help="extra V (x) w' blocks (needs --n0)")
    p.add_argument("--n0", type=int, default=None, help="check property T on P^n0 x SV_n^d")
    p = sub.add_parser("certify", parents=[common, problem], help="certificate tree")
    p.add_argument("-m", type=int, default=None, help="omit to certify both critical values")
    p = sub.add_parser("split", parents=[common, problem], help="property-T certificate on P^n0 x SV_n^d")
    p.add_argument("--n0", type=int, required=True)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--t", type=int, default=0)
    p = sub.add_parser("thresholds", parents=[common, problem], help="secant ranges and identifiability bounds")
    p.add_argument("--n0", type=int, default=None)
    p = sub.add_parser("scan", parents=[common], help="scan a numerical lemma over a box")
    p.add_argument("lemma", choices=("A1", "A2", "A3", "ineq31"))
    p.add_argument("--box", default="k=3..5,n=2..6,d=3..5")
    p = sub.add_parser("verify-appendix", parents=[common], help="recompute every appendix expansion and claim")
    p.add_argument("--box", default="k=3..5,n=2..6,d=3..5")
    return parser


def _config(args) -> Config:
    return Config(
        prime=args.prime,
        seed=args.seed,
        trials=args.trials,
        cap=args.cap,
        max_depth=args.max_depth,
        max_nodes=args.max_nodes,
        format=args.format,
    )


# --------------------------------------------------------------------------
# output


def _emit(out: TextIO, args, obj: dict, text_lines: Optional[list[str]] = None) -> None:
    if args.format == "json":
        out.write(json.dumps(obj, indent=2) + "\n")
    else:
        lines = text_lines if text_lines is not None else [f"{k}: {_plain(v)}" for k, v in obj.items()]
        out.write("\n".join(lines) + "\n")


def _plain(v) -> str:
    if isinstance(v, (list, tuple)):
        return "(" + ",".join(str(x) for x in v) + ")"
    return str(v)


def render_tree(cert: Certificate) -> list[str]:
    lines = []

    def go(c: Certificate, depth: int) -> None:
        prob = f"n={_plain(c.n)} d={_plain(c.d)} m={c.m if c.m is not None else '*'}"
        if c.t is not None:
            prob += f" t={c.t}"
        info = c.kind
        data = c.data
        if c.kind in (C.BASE, C.KNOWN_DEFECTIVE):
            info += f" [{data.get('name')}]"
        elif c.kind == C.HORACE:
            info += f" s_r={data.get('s_r')} eps_r={data.get('eps_r')}"
        elif c.kind == C.TERRACINI:
            o = data.get("outcome", {})
            info += f" rank {o.get('observed_rank')}/{o.get('expected')}"
        elif c.kind == C.CRITICAL:
            info += f" r_lower={data.get('r_lower')} r_upper={data.get('r_upper')}"
        elif c.kind == C.UNRESOLVED:
            info += f" ({data.get('reason')})"
        sides = "".join(
            f"; {s['lhs']} {s['op']} {s['rhs']}" for s in c.side_conditions
        )
        lines.append(f"{'  ' * depth}{c.verdict:<12} {prob}  {info}{sides}")
        for ch in c.children:
            go(ch, depth + 1)

    go(cert, 0)
    return lines


def _verdict_code(verdict: str) -> int:
    return EXIT_UNKNOWN if verdict == C.UNKNOWN else EXIT_OK


# --------------------------------------------------------------------------
# certificate cache


def _cache_path(kind: str, problem: dict, config: Config) -> Optional[Path]:
    root = os.environ.get("SVSEC_CACHE_DIR")
    if not root:
        return None
    key = {
        "kind": kind,
        "problem": problem,
        "config": [config.prime, config.seed, config.trials, config.cap, config.max_depth, config.max_nodes],
        "version": C.SCHEMA_VERSION,
    }
    digest = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()[:32]
    return Path(root) / f"{kind}-{digest}.json"


def _cached_certificate(kind: str, problem: dict, config: Config, build) -> Certificate:
    path = _cache_path(kind, problem, config)
    if path is not None and path.exists():
        try:
            return Certificate.loads(path.read_text(encoding="utf-8"))
        except (ValueError, KeyError):
            pass
    cert = build()
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(cert.dumps(), encoding="utf-8")
        tmp.replace(path)
    return cert


# --------------------------------------------------------------------------
# commands


def _check_lengths(args) -> None:
    if len(args.n) != len(args.d):
        raise InputError(f"-n has {len(args.n)} entries but -d has {len(args.d)}")


def cmd_expected(args, out) -> int:
    _check_lengths(args)
    n, d, m = args.n, args.d, args.m
    obj = {
        "n": list(n),
        "d": list(d),
        "m": m,
        "N": ambient_count(n, d),
        "expected_rank": expected_rank(n, d, m),
        "expected_dimension": expected_dimension(n, d, m),
        "abundance": abundance(n, d, m).value,
    }
    _emit(out, args, obj)
    return EXIT_OK


def cmd_critical(args, out) -> int:
    _check_lengths(args)
    lo, hi = critical_values(args.n, args.d)
    obj = {"n": list(args.n), "d": list(args.d), "N": ambient_count(args.n, args.d), "r_lower": lo, "r_upper": hi}
    _emit(out, args, obj)
    return EXIT_OK


def cmd_terracini(args, out) -> int:
    from .terracini import ResourceLimitError, check_nondefective, check_T_property

    _check_lengths(args)
    cfg = _config(args)
    if args.t and args.n0 is None:
        raise InputError("--t needs --n0 (the extra rows live on the P^n0 factor)")
    try:
        if args.n0 is None:
            res = check_nondefective(args.n, args.d, args.m, cfg.prime, cfg.seed, cfg.trials, cfg.cap)
        else:
            res = check_T_property(args.n0, args.n, args.d, args.m, args.t, cfg.prime, cfg.seed, cfg.trials, cfg.cap)
    except ResourceLimitError as exc:
        print(f"svsec: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    obj = {"problem": {"n": list(args.n), "d": list(args.d), "m": args.m}}
    if args.n0 is not None:
        obj["problem"].update(n0=args.n0, t=args.t)
    obj.update(res.to_json())
    lines = [
        f"verdict: {res.verdict.value}",
        f"rank: {res.observed_rank}/{res.expected}",
        f"matrix: {res.rows}x{res.cols}",
        f"trials: {res.trials}",
        f"primes: {_plain(res.primes)}",
        f"seed: {res.seed}",
    ]
    _emit(out, args, obj, lines)
    return EXIT_OK


def cmd_certify(args, out) -> int:
    from .horace import certify

    _check_lengths(args)
    cfg = _config(args)
    n, d = normalize(args.n, args.d)
    problem = {"n": list(n), "d": list(d), "m": args.m}
    cert = _cached_certificate("certify", problem, cfg, lambda: certify(n, d, args.m, cfg))
    if args.format == "json":
        out.write(cert.dumps())
    else:
        out.write("\n".join(render_tree(cert)) + "\n")
    return _verdict_code(cert.verdict)


def cmd_split(args, out) -> int:
    from .splitting import certify_T

    _check_lengths(args)
    cfg = _config(args)
    problem = {"n0": args.n0, "n": list(args.n), "d": list(args.d), "m": args.m, "t": args.t}
    cert = _cached_certificate("split", problem, cfg, lambda: certify_T(args.n0, args.n, args.d, args.m, args.t, cfg))
    if args.format == "json":
        out.write(cert.dumps())
    else:
        out.write("\n".join(render_tree(cert)) + "\n")
    return _verdict_code(cert.verdict)


def cmd_thresholds(args, out) -> int:
    from .splitting import identifiability_thresholds, theorem12_range, thresholds

    _check_lengths(args)
    n, d = args.n, args.d
    obj: dict = {"n": list(n), "d": list(d), "N": ambient_count(n, d)}
    lo, hi = critical_values(n, d)
    obj.update(r_lower=lo, r_upper=hi)
    if args.n0 is not None:
        th = thresholds(args.n0, sum(n), ambient_count(n, d))
        m_low, m_high = theorem12_range(args.n0, n, d)
        obj.update(n0=args.n0, a_lower=th.a_lower, a_upper=th.a_upper, m_low=m_low, m_high=m_high)
    if min(d) >= 3:
        bound = identifiability_thresholds(n, d, args.n0)
        obj.update(identifiability_m=bound, identifiable_up_to=bound - 1)
    _emit(out, args, obj)
    return EXIT_OK


def cmd_scan(args, out) -> int:
    from .inequalities import Box, scan_lemma

    rep = scan_lemma(args.lemma, Box.parse(args.box))
    obj = {
        "lemma": rep.lemma,
        "box": rep.box,
        "instances": rep.instances,
        "counterexamples": [{k: list(v) if isinstance(v, tuple) else v for k, v in c.items()} for c in rep.counterexamples],
    }
    lines = [f"lemma: {rep.lemma}", f"box: {rep.box}", f"instances: {rep.instances}", f"counterexamples: {len(rep.counterexamples)}"]
    lines += [f"  {c}" for c in rep.counterexamples[:20]]
    _emit(out, args, obj, lines)
    return EXIT_OK if rep.ok else EXIT_UNKNOWN


def cmd_verify_appendix(args, out) -> int:
    from .inequalities import Box, verify_appendix

    rep = verify_appendix(Box.parse(args.box))
    obj = rep.to_json()
    lines = [f"{'ok  ' if c.ok else 'FAIL'} {c.name}" for c in rep.checks]
    for c in rep.failures:
        lines.append(f"  {c.name}: {json.dumps(c.detail, default=list)}")
    for name, value in rep.findings.items():
        lines.append(f"finding: {name}: {json.dumps(value)}")
    if args.format == "json":
        out.write(json.dumps(obj, indent=2, default=list) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return EXIT_OK if rep.ok else EXIT_UNKNOWN


COMMANDS = {
    "expected": cmd_expected,
    "critical": cmd_critical,
    "terracini": cmd_terracini,
    "certify": cmd_certify,
    "split": cmd_split,
    "thresholds": cmd_thresholds,
    "scan": cmd_scan,
    "verify-appendix": cmd_verify_appendix,
}


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (InputError, ValueError) as exc:
        print(f"svsec: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
