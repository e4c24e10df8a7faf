"""Scan Cap_s(I) over interval levels and record the bands.

    python3 scripts/capacity_scan.py --out results/capacity_scan.csv
    python3 scripts/capacity_scan.py --write-golden tests/golden/capacity_bands.json
"""

import argparse
import json
import time
from pathlib import Path

from dyadic_sobolev.suites import capacity_scan, rows_to_csv

LEVELS = range(1, 7)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--s", type=float, nargs="+", default=[0.25, 0.75])
    ap.add_argument("--solve-depths", type=int, nargs="+", default=[10, 12])
    ap.add_argument("--out", type=Path)
    ap.add_argument("--write-golden", type=Path)
    args = ap.parse_args()

    rows, golden = [], {"levels": list(LEVELS), "solve_depths": args.solve_depths, "tol": 1e-9, "bands": {}}
    for s in args.s:
        t0 = time.perf_counter()
        part = capacity_scan(s, LEVELS, args.solve_depths)
        rows += part
        for M in args.solve_depths:
            pick = lambda prefix: [r["value"] for r in part if r["depth"] == M and r["statistic"].startswith(prefix)]
            cap, ratio, res = pick("cap_"), pick("ratio_"), pick("residual_")
            golden["bands"][f"s={s},M={M}"] = {
                "s": s,
                "solve_depth": M,
                "cap": cap,
                "ratio": ratio,
                "max_residual": max(res),
                "ratio_max_over_min": max(ratio) / min(ratio),
                "cap_min": min(cap),
            }
            print(f"s={s} M={M} ratio=[{min(ratio):.4f}, {max(ratio):.4f}] cap=[{min(cap):.4f}, {max(cap):.4f}]")
        print(f"s={s} done in {time.perf_counter() - t0:.1f}s")

    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(rows_to_csv(rows))
    if args.write_golden:
        args.write_golden.parent.mkdir(parents=True, exist_ok=True)
        args.write_golden.write_text(json.dumps(golden, indent=2) + "\n")


if __name__ == "__main__":
    main()
