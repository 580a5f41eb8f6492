"""Communication-area coverage on a deterministic sample grid.

Coverage is the fraction of free-space sample points (cell centres) that lie
within r_c of at least one node, i.e. the union of communication disks, not
the sum of per-node areas.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .geometry import Rect, WorldMap, free_area

DENOMINATORS = ("free", "bounds")


class CoverageError(ValueError):
    pass


class CoverageSampler:
    """Cell-centre sample grid over a map.

    With ``denominator="free"`` only centres in free space count; with
    ``"bounds"`` every centre inside the bounds counts, obstacles included.
    """

    def __init__(self, world: WorldMap, cell_size: float, denominator: str = "free"):
        if cell_size <= 0:
            raise CoverageError("cell_size must be positive")
        if denominator not in DENOMINATORS:
            raise CoverageError(f"unknown denominator {denominator!r}")
        b = world.bounds
        self.world = world
        self.cell_size = cell_size
        self.x0, self.y0 = b.x0, b.y0
        nx = max(1, int(math.ceil(b.width / cell_size - 1e-9)))
        ny = max(1, int(math.ceil(b.height / cell_size - 1e-9)))
        self.xs = b.x0 + (np.arange(nx) + 0.5) * cell_size
        self.ys = b.y0 + (np.arange(ny) + 0.5) * cell_size
        # last column/row centre may fall past the bound when width % cell != 0
        keep_x = self.xs <= b.x1
        keep_y = self.ys <= b.y1
        mask = np.outer(keep_y, keep_x)
        if denominator == "free":
            X, Y = np.meshgrid(self.xs, self.ys)
            for ob in world.obstacles:
                mask &= ~((X > ob.x0) & (X < ob.x1) & (Y > ob.y0) & (Y < ob.y1))
        self.mask = mask
        self.n_samples = int(mask.sum())
        if self.n_samples == 0:
            raise CoverageError("map has no free sample points")

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    def _box(self, px: float, py: float, r: float):
        cs = self.cell_size
        ny, nx = self.mask.shape
        i0 = max(0, int(math.ceil((px - r - self.x0) / cs - 0.5)))
        i1 = min(nx, int(math.floor((px + r - self.x0) / cs - 0.5)) + 1)
        j0 = max(0, int(math.ceil((py - r - self.y0) / cs - 0.5)))
        j1 = min(ny, int(math.floor((py + r - self.y0) / cs - 0.5)) + 1)
        return i0, i1, j0, j1

    def paint(self, covered: np.ndarray, p, r: float) -> None:
        """Mark sample points within r of p in a boolean grid, in place."""
        i0, i1, j0, j1 = self._box(p[0], p[1], r)
        if i0 >= i1 or j0 >= j1:
            return
        dx = self.xs[i0:i1] - p[0]
        dy = self.ys[j0:j1] - p[1]
        covered[j0:j1, i0:i1] |= (dy[:, None] ** 2 + dx[None, :] ** 2) <= r * r

    def covered_grid(self, positions: Sequence, r: float) -> np.ndarray:
        covered = np.zeros(self.mask.shape, dtype=bool)
        for p in positions:
            self.paint(covered, p, r)
        return covered

    def fraction(self, positions: Sequence, r: float) -> float:
        if r <= 0:
            raise CoverageError("r_c must be positive")
        if len(positions) == 0:
            return 0.0
        covered = self.covered_grid(positions, r)
        return int((covered & self.mask).sum()) / self.n_samples

    def fraction_many(self, positions: np.ndarray, r: float) -> float:
        """Vectorised variant for large node arrays (one pass, no Python loop)."""
        positions = np.asarray(positions, dtype=float).reshape(-1, 2)
        if len(positions) == 0:
            return 0.0
        cs = self.cell_size
        ny, nx = self.mask.shape
        k = int(math.ceil(r / cs)) + 1
        offs = np.arange(-k, k + 1)
        ci = np.floor((positions[:, 0] - self.x0) / cs).astype(int)
        cj = np.floor((positions[:, 1] - self.y0) / cs).astype(int)
        ii = ci[:, None] + offs[None, :]
        jj = cj[:, None] + offs[None, :]
        vi = (ii >= 0) & (ii < nx)
        vj = (jj >= 0) & (jj < ny)
        dx = self.xs[np.clip(ii, 0, nx - 1)] - positions[:, :1]
        dy = self.ys[np.clip(jj, 0, ny - 1)] - positions[:, 1:]
        hit = (dy[:, :, None] ** 2 + dx[:, None, :] ** 2) <= r * r
        hit &= vj[:, :, None] & vi[:, None, :]
        flat = (np.clip(jj, 0, ny - 1)[:, :, None] * nx + np.clip(ii, 0, nx - 1)[:, None, :])[hit]
        covered = np.zeros(ny * nx, dtype=bool)
        covered[flat] = True
        return int((covered & self.mask.ravel()).sum()) / self.n_samples


class CoverageGrid:
    """Incremental coverage for nodes that never move once added."""

    def __init__(self, sampler: CoverageSampler, r: float):
        self.sampler = sampler
        self.r = r
        self.covered = np.zeros(sampler.shape, dtype=bool)

    def add(self, p) -> None:
        self.sampler.paint(self.covered, p, self.r)

    @property
    def fraction(self) -> float:
        return int((self.covered & self.sampler.mask).sum()) / self.sampler.n_samples


def default_cell_size(r_c: float) -> float:
    return r_c / 50.0


def coverage_fraction(world: WorldMap, positions: Sequence, r_c: float,
                      cell_size: float | None = None, denominator: str = "free") -> float:
    if r_c <= 0:
        raise CoverageError("r_c must be positive")
    if cell_size is None:
        cell_size = default_cell_size(r_c)
    return CoverageSampler(world, cell_size, denominator).fraction(positions, r_c)


def lens_area(r: float, d: float) -> float:
    """Intersection area of two radius-r disks whose centres are d apart."""
    if d >= 2 * r:
        return 0.0
    return 2 * r * r * math.acos(d / (2 * r)) - 0.5 * d * math.sqrt(4 * r * r - d * d)


def union_disk_area(positions: Sequence, r_c: float, cell_size: float | None = None) -> float:
    """Area of the union of radius-r_c disks; analytic up to two disks."""
    pts = [tuple(map(float, p)) for p in positions]
    if not pts:
        return 0.0
    if len(pts) == 1:
        return math.pi * r_c * r_c
    if len(pts) == 2:
        return 2 * math.pi * r_c * r_c - lens_area(r_c, math.dist(pts[0], pts[1]))
    arr = np.array(pts)
    cs = cell_size or r_c / 200.0
    lo = arr.min(axis=0) - r_c
    # whole number of cells per side keeps samples and box area consistent
    side = cs * math.ceil(float((arr.max(axis=0) + r_c - lo).max()) / cs)
    box = WorldMap(Rect(lo[0], lo[1], lo[0] + side, lo[1] + side))
    sampler = CoverageSampler(box, cs, "bounds")
    return sampler.fraction_many(arr, r_c) * box.bounds.area


__all__ = [
    "CoverageSampler", "CoverageGrid", "CoverageError", "coverage_fraction",
    "union_disk_area", "lens_area", "default_cell_size", "free_area",
]
