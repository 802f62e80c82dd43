"""Accuracy ratio of class-based diagonal Mahalanobis over Euclidean versus
training size on the synthetic families, as a plot-ready CSV.

Usage:
    python scripts/learning_curve.py [--repeats 10] [--sizes 10,20,50,100,200,500,1000] [--out curve.csv]
"""

import argparse

from tsmetric.cli import format_curve
from tsmetric.classifier import learning_curve

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--families", default="cbf,cc,waveform")
    ap.add_argument("--sizes", default="10,20,50,100,200,500,1000")
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--test-per-class", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rows = []
    for family in args.families.split(","):
        rows += learning_curve(family, sizes, args.test_per_class, args.repeats, args.seed)
    text = format_curve(rows, sizes)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
