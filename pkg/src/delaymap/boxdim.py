"""Box-partition entropy and the information dimension.

A point cloud is covered by axis-aligned boxes of edge length r anchored
at the per-axis minima; each point lands in the lattice cell
floor((p_k - anchor_k)/r).  The Shannon entropy of the occupancy
distribution, S(r) = -sum p_i log2 p_i, grows as r shrinks, and the
information dimension is the slope of S against log2(1/r) over the
scaling region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embedding import PointCloud
from .errors import ScalingFitError

__all__ = [
    "BoxHistogram",
    "EntropyScaling",
    "DimensionEstimate",
    "partition_boxes",
    "shannon_entropy",
    "entropy_scaling",
    "information_dimension",
    "default_r_ladder",
    "reference_r",
]

DEFAULT_LADDER_STEPS = 16
#: coarsest and finest default box edges, as fractions of the data range
DEFAULT_R_COARSE_DIV = 4.0
DEFAULT_R_FINE_DIV = 512.0
REFERENCE_R_DIV = 256.0


@dataclass(frozen=True)
class BoxHistogram:
    """Occupancy counts of the r-box partition of one cloud.

    occupied maps integer lattice coordinates (one per axis) to point
    counts; boxes that caught no point are never stored, so every stored
    count is >= 1.
    """

    r: float
    occupied: dict[tuple[int, ...], int]
    total: int
    anchor: tuple[float, ...]

    def __post_init__(self):
        if sum(self.occupied.values()) != self.total:
            raise ValueError("box counts do not add up to the cloud size")
        if any(c < 1 for c in self.occupied.values()):
            raise ValueError("empty boxes must not be stored")

    def probabilities(self) -> np.ndarray:
        counts = np.fromiter(self.occupied.values(), dtype=np.float64, count=len(self.occupied))
        return counts / self.total


@dataclass(frozen=True)
class EntropyScaling:
    """S(r) sampled on a ladder of box sizes, coarse to fine.

    entries holds (r, S_bits) pairs with r strictly decreasing; total is
    the cloud size the curve was measured on (kept for the entropy upper
    bound S <= log2(total)).
    """

    entries: tuple[tuple[float, float], ...]
    total: int | None = None

    def __post_init__(self):
        if not self.entries:
            raise ValueError("scaling curve needs at least one entry")
        rs = [r for r, _ in self.entries]
        if any(r <= 0 for r in rs):
            raise ValueError("box sizes must be positive")
        if any(b >= a for a, b in zip(rs, rs[1:])):
            raise ValueError("box sizes must be strictly decreasing")
        for _, s in self.entries:
            if s < 0.0:
                raise ValueError(f"entropy {s} cannot be negative")
            if self.total is not None and s > math.log2(self.total) + 1e-9:
                raise ValueError(f"entropy {s} exceeds log2(total)")

    def r_values(self) -> np.ndarray:
        return np.array([r for r, _ in self.entries])

    def bits(self) -> np.ndarray:
        return np.array([s for _, s in self.entries])

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class DimensionEstimate:
    """Slope fit of the scaling curve: D_I with its fit diagnostics."""

    d_i: float
    intercept: float
    fit_range: tuple[float, float]
    r_squared: float
    points_used: int

    def __post_init__(self):
        if self.points_used < 3:
            raise ValueError("dimension fit needs at least 3 scaling points")
        if self.d_i < -1e-9:
            raise ValueError(f"negative dimension {self.d_i}")
        if not 0.0 <= self.r_squared <= 1.0:
            raise ValueError(f"r_squared {self.r_squared} outside [0,1]")
        if self.fit_range[0] > self.fit_range[1]:
            raise ValueError("fit_range must be (r_lo, r_hi) with r_lo <= r_hi")


def partition_boxes(cloud: PointCloud, r: float) -> BoxHistogram:
    """Count cloud points per r-box.

    Boxes are closed on the low edge: a point exactly on the high boundary
    of a cell belongs to the next cell (so the per-axis maximum may open a
    box of its own).  Axes with zero spread collapse to lattice index 0.
    """
    if r <= 0:
        raise ValueError(f"box edge must be positive, got {r}")
    pts = cloud.points
    anchor = pts.min(axis=0)
    lattice = np.floor((pts - anchor) / r).astype(np.int64)
    cells, counts = np.unique(lattice, axis=0, return_counts=True)
    occupied = {
        tuple(int(v) for v in cell): int(c) for cell, c in zip(cells, counts)
    }
    return BoxHistogram(
        r=float(r),
        occupied=occupied,
        total=len(pts),
        anchor=tuple(float(a) for a in anchor),
    )


def shannon_entropy(hist: BoxHistogram) -> float:
    """-sum p_i log2 p_i over occupied boxes, in bits.

    Empty boxes are never stored, so the 0*log(0) case cannot arise.
    """
    p = hist.probabilities()
    return float(-(p * np.log2(p)).sum()) + 0.0  # normalize -0.0 away


def entropy_scaling(cloud: PointCloud, r_values) -> EntropyScaling:
    """Evaluate S(r) for each box size, preserving the given (coarse
    to fine) order."""
    rs = [float(r) for r in r_values]
    entries = tuple(
        (r, shannon_entropy(partition_boxes(cloud, r))) for r in rs
    )
    return EntropyScaling(entries=entries, total=len(cloud))


def _fit_window(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line through (x, y): (slope, intercept, r_squared).

    A flat window (zero spread in y) reports r_squared = 0 so that exact
    entropy plateaus never win the scaling-window selection.
    """
    xm = x.mean()
    ym = y.mean()
    sxx = float(((x - xm) ** 2).sum())
    if sxx == 0.0:
        raise ScalingFitError("zero variance in log2(1/r) — duplicate box sizes?")
    slope = float(((x - xm) * (y - ym)).sum()) / sxx
    intercept = ym - slope * xm
    ss_tot = float(((y - ym) ** 2).sum())
    if ss_tot == 0.0:
        r2 = 0.0
    else:
        ss_res = float(((y - (slope * x + intercept)) ** 2).sum())
        r2 = 1.0 - ss_res / ss_tot
    return slope, float(intercept), min(max(r2, 0.0), 1.0)


def information_dimension(
    scaling: EntropyScaling, fit_range: tuple[float, float] | None = None
) -> DimensionEstimate:
    """Slope of S against log2(1/r), i.e. the information dimension.

    With an explicit fit_range, all entries with r_lo <= r <= r_hi are
    used.  Otherwise the window is auto-selected: among all runs of >= 3
    consecutive entries, take the best linear fit (highest r_squared;
    ties go to the wider window, then to the one reaching finer scales).
    """
    rs = scaling.r_values()
    x = -np.log2(rs)
    y = scaling.bits()

    if fit_range is not None:
        r_lo, r_hi = fit_range
        mask = (rs >= r_lo) & (rs <= r_hi)
        if int(mask.sum()) < 3:
            raise ScalingFitError(
                f"need >= 3 scaling points in [{r_lo}, {r_hi}], have {int(mask.sum())}"
            )
        idx = np.flatnonzero(mask)
        start, stop = int(idx[0]), int(idx[-1]) + 1
    else:
        if len(scaling) < 3:
            raise ScalingFitError(
                f"need >= 3 scaling points to fit, have {len(scaling)}"
            )
        best_key = None
        start = stop = 0
        for width in range(3, len(scaling) + 1):
            for s in range(0, len(scaling) - width + 1):
                slope, _, r2 = _fit_window(x[s : s + width], y[s : s + width])
                key = (r2, width, -rs[s + width - 1])
                if best_key is None or key > best_key:
                    best_key = key
                    start, stop = s, s + width

    slope, intercept, r2 = _fit_window(x[start:stop], y[start:stop])
    return DimensionEstimate(
        d_i=slope,
        intercept=intercept,
        fit_range=(float(rs[stop - 1]), float(rs[start])),
        r_squared=r2,
        points_used=stop - start,
    )


def default_r_ladder(value_range: float, steps: int = DEFAULT_LADDER_STEPS) -> np.ndarray:
    """Geometric ladder of box edges from range/4 down to range/512."""
    if value_range <= 0:
        raise ValueError("value range must be positive")
    if steps < 2:
        raise ValueError("ladder needs at least 2 steps")
    return np.geomspace(
        value_range / DEFAULT_R_COARSE_DIV, value_range / DEFAULT_R_FINE_DIV, steps
    )


def reference_r(value_range: float) -> float:
    """The reporting resolution for the headline entropy number."""
    if value_range <= 0:
        raise ValueError("value range must be positive")
    return value_range / REFERENCE_R_DIV
