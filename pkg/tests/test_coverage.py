import math

import numpy as np
import pytest

from amronet.coverage import (CoverageError, CoverageGrid, CoverageSampler, coverage_fraction,
                              lens_area, union_disk_area)
from amronet.geometry import Rect, WorldMap


def test_lens_formula_limits():
    assert lens_area(1.0, 0.0) == pytest.approx(math.pi)
    assert lens_area(1.0, 2.0) == 0.0
    # equal disks through each other's centres: 2pi/3 - sqrt(3)/2 per unit r^2
    assert lens_area(1.0, 1.0) == pytest.approx(2 * math.pi / 3 - math.sqrt(3) / 2)


def test_two_disk_union_value():
    # r=1, d=1: 2pi - (2pi/3 - sqrt3/2)
    assert union_disk_area([(0, 0), (1, 0)], 1.0) == pytest.approx(5.0548, abs=1e-4)


def test_grid_union_matches_analytic():
    rng = np.random.default_rng(3)
    for _ in range(10):
        pts = rng.uniform(0, 3, size=(2, 2))
        grid = union_disk_area(np.r_[pts, pts[:1]], 1.0)  # three disks, one duplicated
        exact = union_disk_area(pts, 1.0)
        assert grid == pytest.approx(exact, rel=2e-3)


def test_single_disk_in_box_fraction():
    w = WorldMap.empty(20, 20)
    frac = coverage_fraction(w, [(10, 10)], 4.0)
    assert frac == pytest.approx(math.pi * 16 / 400, rel=2e-3)


def test_free_denominator_ignores_obstacles():
    w = WorldMap(Rect(0, 0, 10, 10), (Rect(0, 0, 5, 10),))
    s_free = CoverageSampler(w, 0.1, "free")
    s_all = CoverageSampler(w, 0.1, "bounds")
    assert s_free.n_samples == 5000 and s_all.n_samples == 10000
    pos = [(7.5, 5)]
    assert s_free.fraction(pos, 100) == 1.0
    assert s_all.fraction(pos, 100) == 1.0
    assert s_free.fraction([(7.5, 5)], 1.0) == pytest.approx(2 * s_all.fraction([(7.5, 5)], 1.0))


def test_vectorised_matches_loop_and_incremental():
    w = WorldMap(Rect(0, 0, 12, 9), (Rect(3, 3, 5, 6),))
    s = CoverageSampler(w, 0.05)
    pts = np.random.default_rng(0).uniform(-1, 13, size=(25, 2))
    g = CoverageGrid(s, 1.5)
    for p in pts:
        g.add(p)
    assert s.fraction_many(pts, 1.5) == s.fraction(pts, 1.5) == g.fraction


def test_errors():
    with pytest.raises(CoverageError):
        CoverageSampler(WorldMap.empty(1, 1), 0.0)
    with pytest.raises(CoverageError):
        CoverageSampler(WorldMap.empty(1, 1), 0.1, "everything")
    assert coverage_fraction(WorldMap.empty(1, 1), [], 1.0) == 0.0
