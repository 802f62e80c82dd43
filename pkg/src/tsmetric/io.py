"""UCR-format text datasets, z-normalization and matrix export (CSV / PGM)."""

from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

from .core import LabeledDataset, TsMetricError

LABEL_TOL = 1e-9


class UcrParseError(TsMetricError):
    def __init__(self, line_no: int, field_no: int, message: str):
        super().__init__(f"line {line_no}, field {field_no}: {message}")
        self.line_no = line_no
        self.field_no = field_no


class RaggedRows(TsMetricError):
    pass


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _split(line: str, comma: bool) -> list[str]:
    if comma:
        return [f.strip() for f in line.split(",")]
    return line.split()


def read_ucr(path) -> LabeledDataset:
    """Read a label-first UCR file.

    The delimiter is taken from the first non-blank line: comma if it has
    one, otherwise any run of whitespace. Blank lines are skipped. Float
    labels are accepted only when integral (within 1e-9).
    """
    rows: list[list[float]] = []
    labels: list[int] = []
    comma = None
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            if comma is None:
                comma = "," in line
            fields = _split(line, comma)
            if width is None:
                width = len(fields)
                if width < 2:
                    raise UcrParseError(line_no, 1, "need a label and at least one value")
            elif len(fields) != width:
                raise RaggedRows(
                    f"line {line_no} has {len(fields)} fields, expected {width}"
                )
            try:
                raw_label = float(fields[0])
            except ValueError:
                raise UcrParseError(line_no, 1, f"label {fields[0]!r} is not numeric") from None
            label = round(raw_label) if np.isfinite(raw_label) else None
            if label is None or abs(raw_label - label) > LABEL_TOL:
                raise UcrParseError(line_no, 1, f"label {fields[0]!r} is not an integer")
            values = []
            for k, f in enumerate(fields[1:], start=2):
                try:
                    v = float(f)
                except ValueError:
                    raise UcrParseError(line_no, k, f"value {f!r} is not numeric") from None
                if not np.isfinite(v):
                    raise UcrParseError(line_no, k, f"value {f!r} is not finite")
                values.append(v)
            rows.append(values)
            labels.append(int(label))
    if not rows:
        raise UcrParseError(0, 0, f"{os.fspath(path)} contains no instances")
    return LabeledDataset.from_arrays(np.array(rows), np.array(labels, dtype=np.int64))


def write_ucr(d: LabeledDataset, path) -> None:
    """Comma-delimited, label first, 17 significant digits per value."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row, label in d:
            fh.write(str(int(label)))
            for v in row:
                fh.write(",")
                fh.write(_fmt(v))
            fh.write("\n")


def z_normalize(x) -> np.ndarray:
    """(x - mean) / population std; a near-constant series maps to zeros."""
    x = np.asarray(x, dtype=np.float64)
    # shifting by the first sample keeps near-constant series free of
    # cancellation error in the mean
    d = x - x[0]
    if not d.any():
        return np.zeros_like(x)
    c = d - d.mean()
    sigma = np.sqrt(np.mean(c**2))
    if sigma < 1e-12:
        return np.zeros_like(x)
    return c / sigma


def z_normalize_dataset(d: LabeledDataset) -> LabeledDataset:
    X = np.apply_along_axis(z_normalize, 1, d.X) if len(d) else d.X
    return LabeledDataset.from_arrays(X, d.y)


def export_matrix(m, path, format: str = "csv") -> None:
    """Write a matrix as CSV or as a binary PGM heatmap.

    In the PGM, larger |value| is darker: pixel = 255 - round(255 |v| / max|v|);
    an all-zero matrix is all white.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("export_matrix expects a 2-D array")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            for row in m:
                w.writerow([_fmt(v) for v in row])
    elif format == "pgm":
        a = np.abs(m)
        top = a.max() if a.size else 0.0
        if top == 0.0:
            pix = np.full(m.shape, 255, dtype=np.uint8)
        else:
            pix = (255 - np.rint(255.0 * a / top)).astype(np.uint8)
        h, w_ = m.shape
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w_} {h}\n255\n".encode("ascii"))
            fh.write(pix.tobytes())
    else:
        raise ValueError(f"unknown matrix format {format!r}")


def read_pgm(path) -> np.ndarray:
    """Read back a binary P5 graymap written by :func:`export_matrix`."""
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    pos += 1
    if tokens[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError("only 8-bit PGM supported")
    pixels = np.frombuffer(data[pos : pos + w * h], dtype=np.uint8)
    return pixels.reshape(h, w)


def find_ucr_split(root, name: str, split: str) -> Path:
    """Locate ``<root>/<name>/<name>_<SPLIT>[.tsv|.txt|.csv]`` (or directly in root)."""
    root = Path(root)
    split = split.upper()
    for base in (root / name, root):
        for ext in (".tsv", ".txt", ".csv", ""):
            p = base / f"{name}_{split}{ext}"
            if p.is_file():
                return p
    raise FileNotFoundError(f"no {split} split for {name!r} under {root}")


def load_ucr_pair(root, name: str) -> tuple[LabeledDataset, LabeledDataset]:
    return (
        read_ucr(find_ucr_split(root, name, "TRAIN")),
        read_ucr(find_ucr_split(root, name, "TEST")),
    )
