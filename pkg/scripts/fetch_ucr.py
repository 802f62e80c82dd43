"""Assemble the UCR splits used by the benchmarks into data/ucr/.

The UCR archive website is not always reachable, but several PyPI wheels
bundle copies of individual datasets. This script downloads those wheels
with ``pip download`` and lays the splits out as

    data/ucr/<Name>/<Name>_TRAIN.tsv
    data/ucr/<Name>/<Name>_TEST.tsv

Usage:
    python scripts/fetch_ucr.py [--out data/ucr] [--wheels DIR]
"""

import argparse
import io
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

import numpy as np

# display names -> archive names
TABLE_NAMES = {
    "50 words": "FiftyWords",
    "Adiac": "Adiac",
    "CBF": "CBF",
    "ECG": "ECG200",
    "Fish": "Fish",
    "Face (all)": "FaceAll",
    "Face (four)": "FaceFour",
    "Gun-Point": "GunPoint",
    "Lighting-2": "Lightning2",
    "Lighting-7": "Lightning7",
    "OSU Leaf": "OSULeaf",
    "OliveOil": "OliveOil",
    "Swedish Leaf": "SwedishLeaf",
    "Trace": "Trace",
    "Two Patterns": "TwoPatterns",
    "Synthetic Control": "SyntheticControl",
    "Yoga": "Yoga",
}

WHEELS = {
    "ucr-datasets==0.0.6": "ucr_datasets",
    "pyts==0.13.0": "pyts",
    "tslearn==0.9.0": "tslearn",
    "sktime==0.13.4": "sktime",
}


def _write_tsv(path: Path, X, y):
    with open(path, "w") as fh:
        for label, row in zip(y, X):
            fh.write("\t".join([str(int(label))] + [repr(float(v)) for v in row]) + "\n")


def _parse_ts(text: str):
    """Minimal reader for univariate, equal-length sktime .ts files."""
    X, y = [], []
    data = False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("@data"):
            data = True
            continue
        if not data or line.startswith("@"):
            continue
        values, _, label = line.rpartition(":")
        X.append([float(v) for v in values.split(",")])
        y.append(int(float(label)))
    return np.array(X), np.array(y)


def extract(wheel_dir: Path, out: Path) -> list[str]:
    got = []
    wanted = set(TABLE_NAMES.values())

    def put(name, split, payload=None, X=None, y=None, ext=".tsv"):
        d = out / name
        d.mkdir(parents=True, exist_ok=True)
        p = d / f"{name}_{split}{ext}"
        if payload is not None:
            p.write_bytes(payload)
        else:
            _write_tsv(p, X, y)
        got.append(f"{name}_{split}")

    for whl in sorted(wheel_dir.glob("*.whl")):
        z = zipfile.ZipFile(whl)
        names = z.namelist()
        if whl.name.startswith("ucr_datasets"):
            for n in names:
                stem = n.rsplit("/", 1)[-1]
                if stem.endswith(".tsv"):
                    name, split = stem[:-4].rsplit("_", 1)
                    if name in wanted:
                        put(name, split, z.read(n))
        elif whl.name.startswith("pyts"):
            for split in ("TRAIN", "TEST"):
                n = f"pyts/datasets/cached_datasets/UCR/GunPoint/GunPoint_{split}.txt"
                put("GunPoint", split, z.read(n), ext=".txt")
        elif whl.name.startswith("tslearn"):
            d = np.load(io.BytesIO(z.read("tslearn/.cached_datasets/Trace.npz")))
            put("Trace", "TRAIN", X=d["X_train"][:, :, 0], y=d["y_train"])
            put("Trace", "TEST", X=d["X_test"][:, :, 0], y=d["y_test"])
        elif whl.name.startswith("sktime"):
            for split in ("TRAIN", "TEST"):
                n = f"sktime/datasets/data/OSULeaf/OSULeaf_{split}.ts"
                X, y = _parse_ts(z.read(n).decode())
                put("OSULeaf", split, X=X, y=y)
    return got


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "data" / "ucr"))
    ap.add_argument("--wheels", help="directory with already-downloaded wheels")
    args = ap.parse_args(argv)

    out = Path(args.out)
    with tempfile.TemporaryDirectory() as tmp:
        wheel_dir = Path(args.wheels) if args.wheels else Path(tmp)
        if not args.wheels:
            cmd = [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", tmp, *WHEELS]
            subprocess.run(cmd, check=True)
        got = extract(wheel_dir, out)

    present = {g.rsplit("_", 1)[0] for g in got}
    for table_name, name in TABLE_NAMES.items():
        status = "ok" if name in present else "MISSING"
        print(f"{table_name:>18}  {name:<18} {status}")


if __name__ == "__main__":
    main()
