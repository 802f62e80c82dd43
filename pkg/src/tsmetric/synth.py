"""Seeded generators for Cylinder-Bell-Funnel, Control Charts and Waveform.

Randomness comes from numpy's Philox counter-based generator. Every
instance draws from its own substream keyed by (seed, class index,
instance index), so asking for more instances per class never changes the
ones generated before.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset, TsMetricError

FAMILIES = ("cbf", "cc", "waveform")
LENGTHS = {"cbf": 128, "cc": 60, "waveform": 21}
N_CLASSES = {"cbf": 3, "cc": 6, "waveform": 3}


class UnknownGenerator(TsMetricError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    per_class_count: int
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnknownGenerator(f"unknown generator {self.family!r}; choose from {FAMILIES}")
        if self.per_class_count < 1:
            raise ValueError("per_class_count must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def instance_rng(seed: int, class_index: int, instance_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(class_index, instance_index))
    return np.random.Generator(np.random.Philox(ss))


# Cylinder-Bell-Funnel, t = 1..128

def cbf_instance(kind: int, rng: np.random.Generator) -> np.ndarray:
    """kind 0 = cylinder, 1 = bell, 2 = funnel."""
    t = np.arange(1, 129, dtype=np.float64)
    a = int(np.floor(rng.uniform(16, 32)))
    b = min(a + int(np.floor(rng.uniform(32, 96))), 128)
    eta = rng.standard_normal()
    eps = rng.standard_normal(128)
    on = ((t >= a) & (t <= b)).astype(np.float64)
    if kind == 0:
        shape = on
    elif kind == 1:
        shape = on * (t - a) / (b - a)
    else:
        shape = on * (b - t) / (b - a)
    return (6.0 + eta) * shape + eps


# Control charts, t = 1..60: normal, cyclic, increasing trend,
# decreasing trend, upward shift, downward shift

def cc_instance(kind: int, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(1, 61, dtype=np.float64)
    m, s = 30.0, 2.0
    y = m + rng.uniform(-3.0, 3.0, 60) * s
    if kind == 1:
        a = rng.uniform(10.0, 15.0)
        period = rng.uniform(10.0, 15.0)
        y += a * np.sin(2.0 * np.pi * t / period)
    elif kind in (2, 3):
        g = rng.uniform(0.2, 0.5)
        y += g * t if kind == 2 else -g * t
    elif kind in (4, 5):
        x = rng.uniform(7.5, 20.0)
        t3 = rng.uniform(20.0, 40.0)
        k = (t >= t3).astype(np.float64)
        y += k * x if kind == 4 else -k * x
    return y


# Waveform, t = 1..21: triangles of height 6 and half-width 6

_WAVE_T = np.arange(1, 22, dtype=np.float64)
_WAVE_BASES = np.array(
    [np.maximum(6.0 - np.abs(_WAVE_T - c), 0.0) for c in (7.0, 15.0, 11.0)]
)
_WAVE_PAIRS = ((0, 1), (0, 2), (1, 2))


def waveform_instance(kind: int, rng: np.random.Generator) -> np.ndarray:
    i, j = _WAVE_PAIRS[kind]
    u = rng.uniform(0.0, 1.0)
    return u * _WAVE_BASES[i] + (1.0 - u) * _WAVE_BASES[j] + rng.standard_normal(21)


_MAKERS = {"cbf": cbf_instance, "cc": cc_instance, "waveform": waveform_instance}


def generate(spec: GeneratorSpec) -> LabeledDataset:
    """Instances grouped by class, labels 1..k."""
    make = _MAKERS[spec.family]
    k = N_CLASSES[spec.family]
    rows = []
    labels = []
    for c in range(k):
        for i in range(spec.per_class_count):
            rows.append(make(c, instance_rng(spec.seed, c, i)))
            labels.append(c + 1)
    return LabeledDataset.from_arrays(np.vstack(rows), np.array(labels, dtype=np.int64))


def derive_seed(*parts: int) -> int:
    """Stable 64-bit seed derived from a tuple of nonnegative integers."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1, dtype=np.uint64)[0])
