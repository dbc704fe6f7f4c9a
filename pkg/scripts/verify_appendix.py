"""Re-derive every coefficient table and sign claim, then print the report.

    python3 scripts/verify_appendix.py --json appendix.json
"""
import argparse
import json

from svsec.inequalities import NAMED_IDS, Box, expand_named, format_table, verify_appendix


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--box", default=None)
    ap.add_argument("--no-scans", action="store_true")
    ap.add_argument("--json", default=None)
    ap.add_argument("--tables", action="store_true", help="print the computed tables")
    args = ap.parse_args()

    if args.tables:
        for id in NAMED_IDS:
            print(f"# {id}")
            print(format_table(expand_named(id).poly))
    rep = verify_appendix(Box.parse(args.box) if args.box else Box(), scans=not args.no_scans)
    for c in rep.checks:
        print(f"{'PASS' if c.ok else 'FAIL'} {c.name}")
    for name, value in rep.findings.items():
        print(f"finding: {name}: {json.dumps(value, default=str)}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rep.to_json(), fh, indent=2, default=str)
    raise SystemExit(0 if rep.ok else 1)


if __name__ == "__main__":
    main()
