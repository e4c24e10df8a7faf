"""Measured constants for the auxiliary inequalities.

    python3 scripts/inequality_scans.py --out results/inequality_scans.csv

Covers maximal/fractional-integral commutation (mixed and rough samples),
the sup embedding, the Maz'ya capacitary integral and the Carleson embedding.
"""

import argparse
import json
import time
from pathlib import Path

from dyadic_sobolev.suites import SuiteOptions, rows_to_csv, run_suite, summarize

PLAN = [
    ("maximal_commutation", (6, 8), 1000, SuiteOptions()),
    ("sup_embedding", (4, 6, 8), 1000, SuiteOptions()),
    ("mazya", (4, 6), 200, SuiteOptions()),
    ("embedding", (2, 3), 200, SuiteOptions()),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--s", type=float, nargs="+", default=[0.25, 0.75])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--jobs", type=int, default=None)
    ap.add_argument("--out", type=Path, required=True)
    args = ap.parse_args()

    rows = []
    for suite, depths, trials, opts in PLAN:
        t0 = time.perf_counter()
        part = run_suite(suite, args.s, depths, args.seed, trials, opts, args.jobs)
        rows += part
        print(f"{suite}: {len(part)} rows in {time.perf_counter() - t0:.1f}s")
    rough = run_suite("maximal_commutation", args.s, (6, 8), args.seed, 1000, SuiteOptions(mixture=(0.0,)), args.jobs)
    rows += [{**r, "suite": "maximal_commutation_rough"} for r in rough]

    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(rows_to_csv(rows))
    summary = summarize(rows)
    args.out.with_suffix(".summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    for e in summary:
        if e["statistic"] != "alpha":
            print(f"{e['suite']:26s} s={e['s']:<5} depth={e['depth']} {e['statistic']:12s} max={e['max']:.4g}")


if __name__ == "__main__":
    main()
