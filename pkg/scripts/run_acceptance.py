"""Run the acceptance criteria, print one line each and write a JSON summary.

Usage: python3 scripts/run_acceptance.py [--only 1 4 7] [--output results/acceptance.json]
"""

import argparse
import pathlib

from semiwf.acceptance import run_all
from semiwf.wavefront import dumps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--only", type=int, nargs="*", help="criterion numbers to run (default: all)")
    ap.add_argument("--output", default="results/acceptance.json")
    args = ap.parse_args()
    results = run_all(args.only)
    out = pathlib.Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    payload = [{"number": r.number, "title": r.title, "passed": r.passed, "seconds": r.seconds, "detail": r.detail}
               for r in results]
    out.write_text(dumps(payload))
    print(f"{sum(r.passed for r in results)}/{len(results)} passed; summary in {out}")


if __name__ == "__main__":
    main()
