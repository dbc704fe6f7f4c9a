"""Re-verify every registry claim within the size bounds with the rank oracle.

    python3 scripts/registry_audit.py --cap 100000 --max-n 500
"""
import argparse
import collections
import time

from svsec.config import Config
from svsec.horace import registry_audit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cap", type=int, default=10**4, help="matrix size bound for defective cases")
    ap.add_argument("--max-n", type=int, default=300, help="N bound for non-defective samples")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()

    t = time.perf_counter()
    records = registry_audit(Config(seed=args.seed), cap=args.cap, max_N=args.max_n)
    by_rule = collections.defaultdict(lambda: [0, 0])
    for r in records:
        by_rule[r.rule][0] += 1
        by_rule[r.rule][1] += not r.ok
        if args.verbose or not r.ok:
            flag = "ok " if r.ok else "BAD"
            print(f"{flag} {r.rule:32s} n={r.n} d={r.d} m={r.m} rank {r.observed_rank}/{r.expected}")
    for rule, (count, bad) in sorted(by_rule.items()):
        print(f"{rule:32s} {count:5d} checked {bad:3d} disagreements")
    print(f"total {len(records)} in {time.perf_counter() - t:.1f}s")
    raise SystemExit(1 if any(not r.ok for r in records) else 0)


if __name__ == "__main__":
    main()
