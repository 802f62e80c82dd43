"""Command-line front end.

    tsmetric bench --train A_TRAIN.tsv --test A_TEST.tsv -d euclidean -d dtw
    tsmetric bench --ucr-root data/ucr --dataset CBF --dataset Trace -d mahalanobis:diagonal:class
    tsmetric learning-curve --family cbf --sizes 10,100,1000 --repeats 10
    tsmetric synth --family cbf --per-class 10 --seed 1 --out cbf.tsv
    tsmetric covmat --train CBF_TRAIN.tsv --label 3 --estimator shrinkage --out funnel.pgm --format pgm

Exit codes: 0 on success, 1 if any dataset failed, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .classifier import CURVE_SPECS, DistanceSpec, InvalidSpec, evaluate, learning_curve
from .core import LabeledDataset, TsMetricError
from .covariance import estimate
from .io import export_matrix, load_ucr_pair, read_ucr, write_ucr, z_normalize_dataset
from .synth import FAMILIES, GeneratorSpec, derive_seed, generate

log = logging.getLogger("tsmetric")


class UnknownLabel(TsMetricError):
    pass


def default_workers() -> int:
    env = os.environ.get("TSMETRIC_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer TSMETRIC_WORKERS=%r", env)
    return os.cpu_count() or 1


@dataclass
class BenchSpec:
    datasets: list = field(default_factory=list)  # (name, train_path, test_path)
    generator: Optional[GeneratorSpec] = None
    test_per_class: int = 1000
    distances: list = field(default_factory=list)
    znorm: bool = False
    workers: int = 1
    format: str = "csv"
    seed: int = 0
    timing: bool = True
    summary: bool = False

    def __post_init__(self):
        if not self.distances:
            raise InvalidSpec("at least one --distance is required")
        if not self.datasets and self.generator is None:
            raise InvalidSpec("give --train/--test pairs, --dataset names or --generate")


def _dataset_name(train_path: str) -> str:
    stem = Path(train_path).name
    for ext in (".tsv", ".txt", ".csv"):
        if stem.endswith(ext):
            stem = stem[: -len(ext)]
    for suffix in ("_TRAIN", "_train"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    return stem


def _load(spec: BenchSpec, entry):
    name, train_path, test_path = entry
    if train_path is None:
        train, test = load_ucr_pair(test_path, name)
    else:
        train, test = read_ucr(train_path), read_ucr(test_path)
    return train, test


def best_counts(results: list[dict], distances: list[str]) -> dict:
    """Per distance, the number of datasets on which its error (at two
    decimals) is the lowest; ties all count."""
    counts = {d: 0 for d in distances}
    by_dataset: dict[str, dict] = {}
    for r in results:
        by_dataset.setdefault(r["dataset"], {})[r["distance"]] = round(r["error_rate"], 2)
    for errs in by_dataset.values():
        best = min(errs.values())
        for d, e in errs.items():
            if e == best:
                counts[d] += 1
    return counts


def run_bench(spec: BenchSpec) -> tuple[list[dict], list[str]]:
    results: list[dict] = []
    failures: list[str] = []
    jobs = list(spec.datasets)
    if spec.generator is not None:
        jobs.append((f"{spec.generator.family}-synthetic", None, None))
    for entry in jobs:
        name = entry[0]
        try:
            if spec.generator is not None and entry[1] is None and entry[2] is None:
                g = spec.generator
                train = generate(g)
                test = generate(GeneratorSpec(g.family, spec.test_per_class, derive_seed(g.seed, 1)))
            else:
                train, test = _load(spec, entry)
            if spec.znorm:
                train, test = z_normalize_dataset(train), z_normalize_dataset(test)
            for d in spec.distances:
                log.info("%s: %s", name, d)
                rep = evaluate(d, train, test, spec.workers)
                for fb in rep.fallback_log:
                    log.warning("%s %s: class %s fell back to identity (%s)", name, d, fb.label, fb.reason)
                results.append({
                    "dataset": name,
                    "distance": str(d),
                    "error_rate": rep.error_rate,
                    "n_errors": rep.n_errors,
                    "n_test": rep.n_test,
                    "wall_time": rep.wall_time,
                })
        except (TsMetricError, OSError, ValueError) as exc:
            msg = f"{name}: {type(exc).__name__}: {exc}"
            print(f"error: {msg}", file=sys.stderr)
            failures.append(msg)
    return results, failures


def format_results(results: list[dict], spec: BenchSpec) -> str:
    cols = ["dataset", "distance", "error_rate", "n_errors", "n_test"]
    if spec.timing:
        cols.append("wall_time")

    def cell(r, c):
        v = r[c]
        if c == "error_rate":
            return f"{v:.4f}"
        if c == "wall_time":
            return f"{v:.3f}"
        return str(v)

    rows = [[cell(r, c) for c in cols] for r in results]
    distances = [str(d) for d in spec.distances]
    summary = best_counts(results, distances) if spec.summary else None

    buf = io.StringIO()
    if spec.format == "markdown":
        buf.write("| " + " | ".join(cols) + " |\n")
        buf.write("|" + "|".join("---" for _ in cols) + "|\n")
        for row in rows:
            buf.write("| " + " | ".join(row) + " |\n")
        if summary is not None:
            buf.write("\n| distance | # of best errors |\n|---|---|\n")
            for d, n in summary.items():
                buf.write(f"| {d} | {n} |\n")
    else:
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        w.writerows(rows)
        if summary is not None:
            buf.write("\n")
            w.writerow(["distance", "best_count"])
            for d, n in summary.items():
                w.writerow([d, n])
    return buf.getvalue()


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_bench(args) -> int:
    datasets = []
    if len(args.train) != len(args.test):
        raise InvalidSpec("--train and --test must be given the same number of times")
    for tr, te in zip(args.train, args.test):
        datasets.append((_dataset_name(tr), tr, te))
    for name in args.dataset:
        datasets.append((name, None, args.ucr_root))
    generator = None
    if args.generate:
        generator = GeneratorSpec(args.generate, args.per_class, args.seed)
    spec = BenchSpec(
        datasets=datasets,
        generator=generator,
        test_per_class=args.test_per_class,
        distances=[DistanceSpec.parse(d) for d in args.distance],
        znorm=args.znorm,
        workers=args.workers,
        format=args.format,
        seed=args.seed,
        timing=not args.no_timing,
        summary=args.summary,
    )
    results, failures = run_bench(spec)
    _emit(format_results(results, spec), args.out)
    return 1 if failures else 0


def format_curve(rows, sizes) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["family", "train_size", "repeat", "accuracy_euclidean",
                "accuracy_mahalanobis_diag_cb", "ratio"])
    acc: dict = {}
    for r in rows:
        acc.setdefault((r.family, r.train_size, r.repeat), {})[r.spec] = r.accuracy
    eu, mh = (str(DistanceSpec.parse(s)) for s in CURVE_SPECS)
    ratios: dict = {}
    for (family, size, rep), a in acc.items():
        ratio = a[mh] / a[eu] if a[eu] > 0 else float("nan")
        ratios.setdefault((family, size), []).append(ratio)
        w.writerow([family, size, rep, f"{a[eu]:.6f}", f"{a[mh]:.6f}", f"{ratio:.6f}"])
    buf.write("\n")
    w.writerow(["family", "train_size", "mean_ratio"])
    for (family, size), rs in ratios.items():
        w.writerow([family, size, f"{float(np.mean(rs)):.6f}"])
    return buf.getvalue()


def cmd_learning_curve(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    families = args.family or ["cbf"]
    rows = []
    for family in families:
        log.info("learning curve: %s", family)
        rows.extend(learning_curve(family, sizes, args.test_per_class, args.repeats,
                                   args.seed, workers=args.workers, znorm=not args.no_znorm))
    _emit(format_curve(rows, sizes), args.out)
    return 0


def cmd_synth(args) -> int:
    d = generate(GeneratorSpec(args.family, args.per_class, args.seed))
    write_ucr(d, args.out)
    print(f"wrote {len(d)} instances of length {d.series_length} to {args.out}")
    return 0


def covariance_matrix(train: LabeledDataset, label: str, estimator: str) -> np.ndarray:
    if label == "global":
        d = train
    else:
        try:
            key = int(label)
        except ValueError:
            raise UnknownLabel(f"label must be an integer or 'global', got {label!r}") from None
        if key not in train.class_counts:
            raise UnknownLabel(f"label {key} not in training set (labels: {train.labels})")
        d = train.subset(np.flatnonzero(train.y == key))
    return estimate(d, estimator).dense()


def cmd_covmat(args) -> int:
    train = read_ucr(args.train)
    if args.znorm:
        train = z_normalize_dataset(train)
    m = covariance_matrix(train, args.label, args.estimator)
    export_matrix(m, args.out, args.format)
    print(f"wrote {m.shape[0]}x{m.shape[1]} {args.estimator} covariance to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tsmetric", description="1-NN time-series classification benchmarks")
    p.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="1-NN error rates per dataset and distance")
    b.add_argument("--train", action="append", default=[], help="UCR train file (repeatable)")
    b.add_argument("--test", action="append", default=[], help="UCR test file, paired with --train")
    b.add_argument("--ucr-root", default="data/ucr", help="directory holding <Name>/<Name>_TRAIN.tsv")
    b.add_argument("--dataset", action="append", default=[], help="dataset name under --ucr-root")
    b.add_argument("--generate", choices=FAMILIES, help="benchmark a synthetic family instead")
    b.add_argument("--per-class", type=int, default=10, help="training instances per class (--generate)")
    b.add_argument("--test-per-class", type=int, default=1000)
    b.add_argument("-d", "--distance", action="append", default=[],
                   help="euclidean | dtw[:band=R] | mahalanobis:<shrinkage|diagonal|pseudoinverse>:<global|class>[:<unit|raw>]")
    b.add_argument("--znorm", action="store_true", help="z-normalize every series first")
    b.add_argument("--workers", type=int, default=default_workers())
    b.add_argument("--format", choices=("csv", "markdown"), default="csv")
    b.add_argument("--out")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--summary", action="store_true", help="append per-distance best-error counts")
    b.add_argument("--no-timing", action="store_true", help="omit the wall_time column")
    b.set_defaults(func=cmd_bench)

    lc = sub.add_parser("learning-curve", help="accuracy ratio vs training size on synthetic data")
    lc.add_argument("--family", action="append", choices=FAMILIES)
    lc.add_argument("--sizes", default="10,20,50,100,200,500,1000")
    lc.add_argument("--repeats", type=int, default=10)
    lc.add_argument("--test-per-class", type=int, default=1000)
    lc.add_argument("--seed", type=int, default=0)
    lc.add_argument("--no-znorm", action="store_true", help="keep generated series unnormalized")
    lc.add_argument("--workers", type=int, default=default_workers())
    lc.add_argument("--out")
    lc.set_defaults(func=cmd_learning_curve)

    s = sub.add_parser("synth", help="write a synthetic dataset in UCR format")
    s.add_argument("--family", required=True, choices=FAMILIES)
    s.add_argument("--per-class", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    c = sub.add_parser("covmat", help="export a covariance estimate as CSV or PGM")
    c.add_argument("--train", required=True)
    c.add_argument("--label", default="global", help="class label or 'global'")
    c.add_argument("--estimator", choices=("sample", "shrinkage", "diagonal"), default="sample")
    c.add_argument("--znorm", action="store_true")
    c.add_argument("--out", required=True)
    c.add_argument("--format", choices=("csv", "pgm"), default="csv")
    c.set_defaults(func=cmd_covmat)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except InvalidSpec as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (TsMetricError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
