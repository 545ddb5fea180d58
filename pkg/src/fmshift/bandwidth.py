"""Bandwidth selection by stability of the non-atomic cluster count.

Sweep a range of bandwidths expressed as fractions of the largest observed
pairwise distance, cluster at each one, and look for plateaus of the number of
non-atomic clusters. The midpoints of the plateau bandwidth ranges are the
candidate bandwidths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import MeanShiftConfig, cluster
from .function_space import DistanceSpec, FunctionalSample
from .kernels import KernelPair
from .surrogate import DensityModel

__all__ = ["ScanSpec", "ScanResult", "scan"]


@dataclass(frozen=True)
class ScanSpec:
    """Sweep layout. Defaults: 100 values between 5% and 50% of the largest
    pairwise distance, plateaus of at least 5 consecutive equal counts."""

    n_values: int = 100
    lo_frac: float = 0.05
    hi_frac: float = 0.50
    min_plateau_len: int = 5

    def __post_init__(self):
        if not (0.0 < self.lo_frac < self.hi_frac <= 1.0):
            raise ValueError("need 0 < lo_frac < hi_frac <= 1")
        if self.n_values < 2:
            raise ValueError("n_values must be at least 2")
        if self.min_plateau_len < 2:
            raise ValueError("min_plateau_len must be at least 2")


@dataclass(frozen=True)
class ScanResult:
    bandwidths: np.ndarray
    nonatomic_counts: np.ndarray
    clustered_counts: np.ndarray  # curves living in non-atomic clusters
    plateaus: tuple  # (start_index, end_index) inclusive
    candidates: tuple  # plateau midpoint bandwidths
    max_distance: float

    def rows(self):
        """(bandwidth, non-atomic count, clustered count) triples."""
        return list(zip(self.bandwidths.tolist(),
                        self.nonatomic_counts.tolist(),
                        self.clustered_counts.tolist()))


def _find_plateaus(counts: np.ndarray, min_len: int):
    plateaus = []
    start = 0
    for i in range(1, counts.size + 1):
        if i == counts.size or counts[i] != counts[start]:
            if i - start >= min_len:
                plateaus.append((start, i - 1))
            start = i
    return plateaus


def scan(sample: FunctionalSample, pair: KernelPair,
         distance: DistanceSpec | None = None,
         spec: ScanSpec | None = None,
         cfg: MeanShiftConfig | None = None) -> ScanResult:
    """Cluster at each bandwidth of the sweep and locate stability plateaus."""
    if len(sample) < 2:
        raise ValueError("the bandwidth scan needs at least 2 curves")
    spec = spec or ScanSpec()
    cfg = cfg or MeanShiftConfig()
    distance = distance or DistanceSpec()

    ref = DensityModel(sample, pair, distance, bandwidth=1.0, normalized=False)
    dmax = ref.max_pairwise_distance
    hs = np.linspace(spec.lo_frac, spec.hi_frac, spec.n_values) * dmax

    nonatomic = np.empty(spec.n_values, dtype=int)
    clustered = np.empty(spec.n_values, dtype=int)
    for i, h in enumerate(hs):
        model = DensityModel(sample, pair, distance, bandwidth=h,
                             normalized=False)
        modes = cluster(model, cfg)
        sizes = modes.cluster_sizes()
        nonatomic[i] = sum(1 for s in sizes if s > 1)
        clustered[i] = sum(s for s in sizes if s > 1)

    plateaus = _find_plateaus(nonatomic, spec.min_plateau_len)
    candidates = tuple(float((hs[a] + hs[b]) / 2.0) for a, b in plateaus)
    return ScanResult(hs, nonatomic, clustered, tuple(plateaus), candidates,
                      dmax)
