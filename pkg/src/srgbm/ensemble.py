"""Finite-sample estimators over collections of trajectories."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError

__all__ = [
    "EnsembleSnapshot",
    "ShareReport",
    "sample_average",
    "growth_rate_estimate",
    "single_growth_rates",
    "empirical_relative_variance",
    "top_share",
    "top_share_series",
    "median_over_realizations",
]


@dataclass(frozen=True)
class EnsembleSnapshot:
    """Positions of ``N`` walkers observed at a common time ``t``.

    Order matters only for tie-breaking in :func:`top_share` (index = stream id).
    """

    t: float
    positions: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 1 or pos.size < 1:
            raise ParameterError("positions must be a non-empty 1-D sequence")
        if not np.all(pos > 0):
            raise ParameterError("all positions must be > 0")
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ParameterError(f"t must be finite and >= 0, got {self.t}")
        object.__setattr__(self, "positions", pos)

    @property
    def N(self) -> int:
        return self.positions.size


@dataclass(frozen=True)
class ShareReport:
    p_top: float
    cohort_size: int


def sample_average(snapshot: EnsembleSnapshot) -> float:
    """Arithmetic mean of the positions."""
    return float(np.mean(snapshot.positions))


def growth_rate_estimate(snapshot: EnsembleSnapshot, x0: float = 1.0) -> float:
    """``(1/t) * log(<x>_N / x0)``."""
    if snapshot.t <= 0:
        raise ParameterError("growth rate needs t > 0")
    return math.log(sample_average(snapshot) / x0) / snapshot.t


def single_growth_rates(snapshot: EnsembleSnapshot, x0: float = 1.0) -> np.ndarray:
    """Per-walker growth rates ``(1/t) log(x_i/x0)``; min/max bracket the sample estimate."""
    if snapshot.t <= 0:
        raise ParameterError("growth rate needs t > 0")
    return np.log(snapshot.positions / x0) / snapshot.t


def empirical_relative_variance(realizations) -> float:
    """Variance over squared mean of independent sample-average realizations.

    Uses the unbiased (``ddof=1``) variance.
    """
    vals = np.asarray(realizations, dtype=float)
    if vals.size < 2:
        raise ParameterError("need at least 2 realizations")
    mean = vals.mean()
    if mean == 0.0:
        raise ParameterError("realizations have zero mean")
    return float(vals.var(ddof=1) / mean**2)


def _cohort_size(n: int, fraction: float) -> int:
    if not 0 < fraction <= 1:
        raise ParameterError(f"fraction must be in (0, 1], got {fraction}")
    # guard floor() against n*fraction landing a hair below an integer
    return max(1, math.floor(n * fraction + 1e-9))


def top_share(snapshot: EnsembleSnapshot, fraction: float = 0.01) -> ShareReport:
    """Share of the total held by the largest ``max(1, floor(N*fraction))`` walkers."""
    k = _cohort_size(snapshot.N, fraction)
    pos = snapshot.positions
    if k == pos.size:
        # whole ensemble; avoids sum-order rounding
        return ShareReport(p_top=1.0, cohort_size=k)
    # descending, stable in stream index for ties
    order = np.argsort(-pos, kind="stable")
    top = pos[order[:k]].sum()
    return ShareReport(p_top=float(top / pos.sum()), cohort_size=k)


def top_share_series(positions: np.ndarray, fraction: float = 0.01) -> np.ndarray:
    """Top share at every column of an ``(N, T)`` position matrix."""
    positions = np.asarray(positions, dtype=float)
    k = _cohort_size(positions.shape[0], fraction)
    if k == positions.shape[0]:
        return np.ones(positions.shape[1])
    top = -np.partition(-positions, k - 1, axis=0)[:k]
    return top.sum(axis=0) / positions.sum(axis=0)


def median_over_realizations(values) -> float:
    vals = np.asarray(values, dtype=float)
    if vals.size < 1:
        raise ParameterError("need at least one value")
    return float(np.median(vals))
