"""Scan the Horace-step inequalities over a box of parameters.

    python3 scripts/scan_lemmas.py --box k=3..5,n=2..6,d=3..5 --json scans.json
"""
import argparse
import json
import time

from svsec.inequalities import Box, scan_lemma

LEMMAS = ("A1", "A2", "A3", "ineq31")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--box", default="k=3..5,n=2..6,d=3..5")
    ap.add_argument("--lemma", action="append", choices=LEMMAS)
    ap.add_argument("--json", default=None, help="write the reports here")
    args = ap.parse_args()

    box = Box.parse(args.box)
    results = {}
    for lemma in args.lemma or LEMMAS:
        if lemma == "ineq31":
            # the Ballico inequality is stated for two or more factors of any size
            lemma_box = Box((max(2, box.k[0] - 1), box.k[1]), (1, box.n[1]), box.d)
        else:
            lemma_box = box
        t = time.perf_counter()
        rep = scan_lemma(lemma, lemma_box)
        dt = time.perf_counter() - t
        print(f"{lemma:7s} {rep.instances:7d} instances {len(rep.counterexamples):4d} counterexamples {dt:6.1f}s")
        for bad in rep.counterexamples[:10]:
            print("   ", bad)
        results[lemma] = {"box": str(lemma_box), "instances": rep.instances, "counterexamples": rep.counterexamples}
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2, default=str)
    raise SystemExit(1 if any(r["counterexamples"] for r in results.values()) else 0)


if __name__ == "__main__":
    main()
