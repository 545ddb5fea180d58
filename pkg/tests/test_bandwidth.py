"""Plateau detection and the bandwidth stability sweep."""

import numpy as np
import pytest

from fmshift import FunctionalSample, Grid, ScanSpec, builtin_pair, scan
from fmshift.bandwidth import _find_plateaus

GRID = Grid(np.linspace(0.0, 1.0, 21))


class TestFindPlateaus:
    def test_basic(self):
        counts = np.array([5, 4, 4, 3, 3, 3, 3, 2, 2])
        assert _find_plateaus(counts, 3) == [(3, 6)]
        assert _find_plateaus(counts, 2) == [(1, 2), (3, 6), (7, 8)]

    def test_whole_array_one_plateau(self):
        counts = np.full(10, 7)
        assert _find_plateaus(counts, 5) == [(0, 9)]

    def test_no_plateau(self):
        counts = np.arange(10)
        assert _find_plateaus(counts, 2) == []

    def test_plateau_at_tail(self):
        counts = np.array([3, 2, 1, 1, 1])
        assert _find_plateaus(counts, 3) == [(2, 4)]


class TestScanSpec:
    def test_defaults_match_convention(self):
        spec = ScanSpec()
        assert spec.n_values == 100
        assert spec.lo_frac == 0.05
        assert spec.hi_frac == 0.50
        assert spec.min_plateau_len == 5

    def test_validation(self):
        with pytest.raises(ValueError):
            ScanSpec(lo_frac=0.5, hi_frac=0.2)
        with pytest.raises(ValueError):
            ScanSpec(n_values=1)
        with pytest.raises(ValueError):
            ScanSpec(min_plateau_len=1)


def blob_sample(seed=0):
    rng = np.random.default_rng(seed)
    rows = []
    for c in (0.0, 6.0, 12.0):
        rows.append(c + 0.3 * rng.standard_normal((8, len(GRID))))
    return FunctionalSample.from_matrix(GRID, np.vstack(rows))


class TestScan:
    def test_grid_of_bandwidths(self):
        sample = blob_sample()
        spec = ScanSpec(n_values=12, lo_frac=0.1, hi_frac=0.6,
                        min_plateau_len=3)
        res = scan(sample, builtin_pair("gaussian_gaussian"), spec=spec)
        assert res.bandwidths.size == 12
        assert np.isclose(res.bandwidths[0], 0.1 * res.max_distance)
        assert np.isclose(res.bandwidths[-1], 0.6 * res.max_distance)

    def test_three_blob_plateau(self):
        sample = blob_sample()
        spec = ScanSpec(n_values=25, lo_frac=0.05, hi_frac=0.45,
                        min_plateau_len=4)
        res = scan(sample, builtin_pair("gaussian_gaussian"), spec=spec)
        assert 3 in res.nonatomic_counts
        # at least one plateau sits at the true cluster count
        plateau_counts = {int(res.nonatomic_counts[a]) for a, b in res.plateaus}
        assert 3 in plateau_counts
        assert len(res.candidates) == len(res.plateaus)
        for (a, b), c in zip(res.plateaus, res.candidates):
            assert c == pytest.approx((res.bandwidths[a] + res.bandwidths[b]) / 2)

    def test_large_bandwidth_fuses_everything(self):
        sample = blob_sample()
        spec = ScanSpec(n_values=4, lo_frac=0.9, hi_frac=1.0,
                        min_plateau_len=2)
        res = scan(sample, builtin_pair("gaussian_gaussian"), spec=spec)
        assert res.nonatomic_counts[-1] == 1
        assert res.clustered_counts[-1] == len(sample)

    def test_rows_shape(self):
        sample = blob_sample()
        spec = ScanSpec(n_values=5, min_plateau_len=2)
        res = scan(sample, builtin_pair("gaussian_gaussian"), spec=spec)
        rows = res.rows()
        assert len(rows) == 5
        assert all(len(r) == 3 for r in rows)

    def test_needs_two_curves(self):
        sample = FunctionalSample.from_matrix(GRID, np.zeros((1, len(GRID))))
        with pytest.raises(ValueError):
            scan(sample, builtin_pair("gaussian_gaussian"))
