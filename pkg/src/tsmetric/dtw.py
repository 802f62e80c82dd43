"""Dynamic Time Warping with squared-difference cost.

The DP uses steps (i-1, j), (i, j-1), (i-1, j-1), anchors both endpoints,
keeps two rows of the cost table and takes a single square root at the end.
An optional Sakoe-Chiba radius excludes cells with |i - j| > band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numba as nb
import numpy as np

from .core import TsMetricError


class EmptySeries(TsMetricError):
    pass


class InfeasibleBand(TsMetricError):
    pass


@dataclass(frozen=True)
class DtwConfig:
    band: Optional[int] = None

    def __post_init__(self):
        if self.band is not None and self.band < 0:
            raise InfeasibleBand(f"band radius must be >= 0, got {self.band}")


@nb.njit(cache=True, nogil=True)
def _dtw_sq(x, y, band, cutoff_sq):
    # Returns the squared DTW cost, or inf once a whole row exceeds cutoff_sq.
    n = x.shape[0]
    m = y.shape[0]
    inf = np.inf
    prev = np.full(m, inf)
    curr = np.full(m, inf)
    for i in range(n):
        if band < 0:
            lo = 0
            hi = m - 1
        else:
            lo = max(0, i - band)
            hi = min(m - 1, i + band)
        for j in range(m):
            curr[j] = inf
        xi = x[i]
        row_min = inf
        for j in range(lo, hi + 1):
            d = xi - y[j]
            c = d * d
            if i == 0 and j == 0:
                best = 0.0
            else:
                best = inf
                if i > 0:
                    if prev[j] < best:
                        best = prev[j]
                    if j > 0 and prev[j - 1] < best:
                        best = prev[j - 1]
                if j > 0 and curr[j - 1] < best:
                    best = curr[j - 1]
            v = c + best
            curr[j] = v
            if v < row_min:
                row_min = v
        if row_min > cutoff_sq:
            return inf
        prev, curr = curr, prev
    return prev[m - 1]


def _prepare(x, y, cfg: Optional[DtwConfig]):
    x = np.ascontiguousarray(x, dtype=np.float64).reshape(-1)
    y = np.ascontiguousarray(y, dtype=np.float64).reshape(-1)
    if x.size == 0 or y.size == 0:
        raise EmptySeries("DTW needs two nonempty series")
    band = -1
    if cfg is not None and cfg.band is not None:
        band = int(cfg.band)
        if band < abs(x.size - y.size):
            raise InfeasibleBand(
                f"band {band} cannot align series of lengths {x.size} and {y.size}"
            )
    # keep the shorter series along the DP row
    if y.size > x.size:
        x, y = y, x
    return x, y, band


def dtw_distance(x, y, cfg: Optional[DtwConfig] = None) -> float:
    x, y, band = _prepare(x, y, cfg)
    return math.sqrt(_dtw_sq(x, y, band, np.inf))


def dtw_distance_early_abandon(x, y, cfg: Optional[DtwConfig], cutoff: float) -> Optional[float]:
    """Exact DTW when it is <= ``cutoff``; None (exceeded) when every cell
    of some DP row is already above ``cutoff**2``."""
    if not cutoff >= 0.0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    x, y, band = _prepare(x, y, cfg)
    # a few ulps of slack so cutoff == the true distance is never abandoned
    v = _dtw_sq(x, y, band, cutoff * cutoff * (1.0 + 8 * np.finfo(float).eps))
    if v == np.inf:
        return None
    r = math.sqrt(v)
    return r if r <= cutoff else None


@nb.njit(cache=True, nogil=True)
def nn_dtw(Q, T, band):
    """Index of the DTW nearest neighbour in T for each row of Q; ties go
    to the lowest index. Returns (indices, squared costs)."""
    nq = Q.shape[0]
    nt = T.shape[0]
    idx = np.empty(nq, dtype=np.int64)
    cost = np.empty(nq)
    for a in range(nq):
        best = np.inf
        bi = -1
        for b in range(nt):
            v = _dtw_sq(Q[a], T[b], band, best)
            if v < best:
                best = v
                bi = b
        if bi < 0:
            # all candidates infinite cannot happen with finite data
            bi = 0
        idx[a] = bi
        cost[a] = best
    return idx, cost
