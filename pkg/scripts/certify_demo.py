"""Certify a handful of problems, check each certificate, and write them to disk.

    python3 scripts/certify_demo.py --out certs/
"""
import argparse
import json
import time
from pathlib import Path

from svsec.checker import check
from svsec.config import Config
from svsec.horace import certify
from svsec.splitting import certify_T

PROBLEMS = [
    ((2, 2, 2), (3, 3, 3), None),
    ((1, 1, 1), (3, 3, 3), 16),
    ((1, 2, 2), (3, 3, 3), None),
    ((2,), (4,), 5),
    ((1, 1), (3, 4), 7),
]
T_PROBLEMS = [(1, (1, 1), (3, 3), 8), (2, (1, 1), (3, 3), 9)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=None)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = Config(seed=args.seed)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)

    jobs = [(f"sv-{n}-{d}-{m}", lambda n=n, d=d, m=m: certify(n, d, m, cfg)) for n, d, m in PROBLEMS]
    jobs += [(f"T-{a[0]}-{a[1]}-{a[2]}-{a[3]}", lambda a=a: certify_T(*a, config=cfg)) for a in T_PROBLEMS]
    failed = 0
    for name, build in jobs:
        t = time.perf_counter()
        cert = build()
        errors = check(cert)
        failed += bool(errors)
        nodes = sum(1 for _ in cert.walk())
        print(f"{name:40s} {cert.verdict:13s} {cert.kind:16s} nodes={nodes:3d} errors={len(errors)} {time.perf_counter() - t:6.2f}s")
        if args.out:
            fname = "".join(c if c.isalnum() or c in "-_" else "_" for c in name) + ".json"
            (args.out / fname).write_text(json.dumps(cert.to_json(), indent=2, sort_keys=True) + "\n")
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
