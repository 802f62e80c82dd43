"""Error-rate tables for the Mahalanobis variants and the competing distances.

Runs every dataset found under --ucr-root and prints two markdown tables
with a "# of best errors" row. Missing datasets are listed and skipped.

Usage:
    python scripts/reproduce_tables.py [--ucr-root data/ucr] [--workers N] [--no-dtw]
"""

import argparse
import sys
from pathlib import Path

from tsmetric.cli import BenchSpec, best_counts, default_workers, run_bench

DATASETS = ["FiftyWords", "Adiac", "CBF", "ECG200", "Fish", "FaceAll", "FaceFour", "GunPoint", "Lightning2",
            "Lightning7", "OSULeaf", "OliveOil", "SwedishLeaf", "Trace", "TwoPatterns", "SyntheticControl", "Yoga"]

MAHALANOBIS = ["mahalanobis:shrinkage:global", "mahalanobis:shrinkage:class",
               "mahalanobis:diagonal:global", "mahalanobis:diagonal:class"]
COMPETING = ["euclidean", "dtw", "mahalanobis:diagonal:class"]


def table(root, names, distances, workers):
    spec = BenchSpec(datasets=[(n, None, root) for n in names], distances=distances, workers=workers)
    results, failures = run_bench(spec)
    keys = [str(r["distance"]) for r in results[: len(distances)]]
    err = {(r["dataset"], r["distance"]): r["error_rate"] for r in results}
    lines = ["| dataset | " + " | ".join(keys) + " |", "|---" * (len(keys) + 1) + "|"]
    for n in names:
        if (n, keys[0]) in err:
            lines.append(f"| {n} | " + " | ".join(f"{err[(n, k)]:.2f}" for k in keys) + " |")
    counts = best_counts(results, keys)
    lines.append("| # of best errors | " + " | ".join(str(counts[k]) for k in keys) + " |")
    return "\n".join(lines), failures


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ucr-root", default="data/ucr")
    ap.add_argument("--workers", type=int, default=default_workers())
    ap.add_argument("--no-dtw", action="store_true", help="skip the DTW column")
    args = ap.parse_args()
    root = args.ucr_root

    present = [n for n in DATASETS if (Path(root) / n).is_dir()]
    missing = [n for n in DATASETS if n not in present]
    if not present:
        sys.exit(f"no datasets under {root}; run scripts/fetch_ucr.py first")
    if missing:
        print(f"missing: {', '.join(missing)}\n", file=sys.stderr)

    out, fail1 = table(root, present, MAHALANOBIS, args.workers)
    print("Mahalanobis variants\n")
    print(out)
    competing = [d for d in COMPETING if not (args.no_dtw and d == "dtw")]
    out, fail2 = table(root, present, competing, args.workers)
    print("\nCompeting distances\n")
    print(out)
    sys.exit(1 if fail1 or fail2 else 0)
