"""Run the norm-equivalence suites and write CSV rows plus a JSON summary.

    python3 scripts/theorem_suites.py --out results/theorem_suites.csv

Exact BMO^s at symbol depths 3 and 4; pass --heuristic-depth to add a deeper
heuristic run of the paraproduct suite.
"""

import argparse
import json
import time
from pathlib import Path

from dyadic_sobolev.suites import SuiteOptions, rows_to_csv, run_suite, summarize, theorem_suites


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--s", type=float, nargs="+", default=[0.25, 0.75])
    ap.add_argument("--depths", type=int, nargs="+", default=[3, 4])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--jobs", type=int, default=None)
    ap.add_argument("--heuristic-depth", type=int, default=None)
    ap.add_argument("--out", type=Path, required=True)
    args = ap.parse_args()

    t0 = time.perf_counter()
    rows = theorem_suites(args.seed, args.s, args.depths, args.trials, jobs=args.jobs)
    if args.heuristic_depth:
        rows += run_suite("paraproduct", args.s, [args.heuristic_depth], args.seed, args.trials,
                          SuiteOptions(mode="heuristic"), args.jobs)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(rows_to_csv(rows))
    summary = summarize(rows)
    args.out.with_suffix(".summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    for e in summary:
        print(f"{e['suite']:20s} s={e['s']:<5} depth={e['depth']} {e['statistic']:22s} "
              f"min={e['min']:.4g} median={e['median']:.4g} max={e['max']:.4g}")
    print(f"{len(rows)} rows in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
