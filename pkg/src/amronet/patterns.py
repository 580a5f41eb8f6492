"""Regular static placements: r-strip tile, honeycomb, square and triangular grids.

All lattices use spacing (edge length) r_c so that lattice neighbours are
linked.  Patterns are clipped to a rectangle with half-open bounds
``[x0, x1) x [y0, y1)`` by default, so that abutting regions never share a
node; pass ``closed=True`` to keep nodes on the upper/right edges too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .coverage import CoverageSampler
from .geometry import Point2, Rect, WorldMap

SQRT3 = math.sqrt(3.0)


class PatternKind(str, Enum):
    RSTRIP = "rstrip"
    HEXAGONAL = "hexagonal"
    SQUARE = "square"
    TRIANGULAR = "triangular"


# nodes * r^2 / area for each infinite pattern
DENSITY = {
    PatternKind.RSTRIP: 0.536,
    PatternKind.HEXAGONAL: 0.77,
    PatternKind.SQUARE: 1.0,
    PatternKind.TRIANGULAR: 1.155,
}
# lower bound on node density for coverage with 1-connectivity
OPTIMAL_DENSITY_BOUND = 0.522


@dataclass(frozen=True)
class PatternDensity:
    kind: PatternKind
    density_coefficient: float


def density(kind: PatternKind) -> PatternDensity:
    kind = PatternKind(kind)
    return PatternDensity(kind, DENSITY[kind])


def strip_pitch(r_c: float) -> float:
    """Vertical distance between consecutive r-strip rows."""
    return (SQRT3 / 2 + 1) * r_c


def period(kind: PatternKind, r_c: float) -> tuple[float, float]:
    """Translation period (x, y) of the infinite pattern."""
    kind = PatternKind(kind)
    if kind is PatternKind.RSTRIP:
        # connectors sit on one vertical line, so x shifts up to r_c are distinct
        return r_c, 2 * strip_pitch(r_c)
    if kind is PatternKind.HEXAGONAL:
        return SQRT3 * r_c, 3 * r_c
    if kind is PatternKind.TRIANGULAR:
        return r_c, SQRT3 * r_c
    return r_c, r_c


def _raw_lattice(kind: PatternKind, bounds: Rect, r: float, ox: float, oy: float) -> np.ndarray:
    """Lattice points generously covering bounds, anchored at (x0+ox, y0+oy)."""
    ax, ay = bounds.x0 + ox, bounds.y0 + oy
    w, h = bounds.width, bounds.height
    px, py = period(kind, r)
    i_lo = int(math.floor(-ox / px)) - 1
    i_hi = int(math.ceil((w - ox) / px)) + 1
    j_lo = int(math.floor(-oy / py)) - 1
    j_hi = int(math.ceil((h - oy) / py)) + 1
    ii, jj = np.meshgrid(np.arange(i_lo, i_hi + 1), np.arange(j_lo, j_hi + 1))
    ii, jj = ii.ravel().astype(float), jj.ravel().astype(float)

    if kind is PatternKind.SQUARE:
        pts = np.c_[ax + ii * r, ay + jj * r]
    elif kind is PatternKind.TRIANGULAR:
        # two rows per period, the second shifted by half a spacing
        base = np.array([(0.0, 0.0), (r / 2, SQRT3 / 2 * r)])
        pts = np.concatenate([np.c_[ax + ii * px + bx, ay + jj * py + by] for bx, by in base])
    elif kind is PatternKind.HEXAGONAL:
        # four honeycomb vertices per rectangular cell (sqrt3 r x 3r)
        a = SQRT3 * r
        base = np.array([(0.0, 0.0), (a / 2, r / 2), (a / 2, 1.5 * r), (0.0, 2 * r)])
        pts = np.concatenate([np.c_[ax + ii * px + bx, ay + jj * py + by] for bx, by in base])
    else:
        s = strip_pitch(r)
        k_lo = int(math.floor(-oy / s)) - 1
        k_hi = int(math.ceil((h - oy) / s)) + 1
        m = np.arange(int(math.floor(-ox / r)) - 2, int(math.ceil((w - ox) / r)) + 2)
        rows = []
        for k in range(k_lo, k_hi + 1):
            y = ay + k * s
            shift = 0.0 if k % 2 == 0 else r / 2
            rows.append(np.c_[ax + shift + m * r, np.full(len(m), y)])
            if k % 2:
                rows.append(np.array([(ax, y + SQRT3 / 2 * r), (ax, y - SQRT3 / 2 * r)]))
        pts = np.concatenate(rows)
    return pts


def _clip(pts: np.ndarray, bounds: Rect, closed: bool) -> np.ndarray:
    tol = 1e-9 * max(1.0, bounds.width, bounds.height)
    x, y = pts[:, 0], pts[:, 1]
    keep = (x >= bounds.x0 - tol) & (y >= bounds.y0 - tol)
    if closed:
        keep &= (x <= bounds.x1 + tol) & (y <= bounds.y1 + tol)
    else:
        keep &= (x < bounds.x1 - tol) & (y < bounds.y1 - tol)
    out = pts[keep]
    # snap boundary round-off back inside
    out[:, 0] = np.clip(out[:, 0], bounds.x0, bounds.x1)
    out[:, 1] = np.clip(out[:, 1], bounds.y0, bounds.y1)
    # deterministic order: by y then x
    return out[np.lexsort((out[:, 0], out[:, 1]))]


def generate_array(kind, bounds: Rect, r_c: float, offset=(0.0, 0.0),
                   closed: bool = False) -> np.ndarray:
    kind = PatternKind(kind)
    if r_c <= 0:
        raise ValueError("r_c must be positive")
    if bounds.width <= 0 or bounds.height <= 0:
        raise ValueError("bounds must be nonempty")
    return _clip(_raw_lattice(kind, bounds, r_c, float(offset[0]), float(offset[1])), bounds, closed)


def generate(kind, bounds: Rect, r_c: float, offset=(0.0, 0.0),
             closed: bool = False) -> list[Point2]:
    """Pattern nodes inside bounds, anchored at the lower-left corner plus offset."""
    return [Point2(float(x), float(y)) for x, y in generate_array(kind, bounds, r_c, offset, closed)]


def estimated_count(kind, area: float, r_c: float) -> int:
    if area <= 0 or r_c <= 0:
        raise ValueError("area and r_c must be positive")
    # round before ceil so 0.77*64 style products do not pick up float noise
    return int(math.ceil(round(DENSITY[PatternKind(kind)] * area / r_c ** 2, 9)))


@dataclass(frozen=True)
class Placement:
    kind: PatternKind
    offset: tuple[float, float]
    count: int
    coverage: float
    points: tuple[Point2, ...]


def _ring_samples(sampler: CoverageSampler) -> np.ndarray:
    """Sample points on the outermost row and column of the grid."""
    X, Y = np.meshgrid(sampler.xs, sampler.ys)
    edge = np.zeros(X.shape, dtype=bool)
    edge[0, :] = edge[-1, :] = edge[:, 0] = edge[:, -1] = True
    edge &= sampler.mask
    return np.c_[X[edge], Y[edge]]


def _covers(samples: np.ndarray, pts: np.ndarray, r: float) -> bool:
    if len(pts) == 0:
        return len(samples) == 0
    d2 = ((samples ** 2).sum(axis=1)[:, None] + (pts ** 2).sum(axis=1)[None, :]
          - 2.0 * samples @ pts.T)
    # small slack: this is only a prefilter, the full grid decides
    return bool((d2.min(axis=1) <= r * r * (1 + 1e-9) + 1e-9).all())


def best_placement(kind, bounds: Rect, r_c: float, step: float | None = None,
                   cell_size: float | None = None, closed: bool = False) -> Placement:
    """Search translation offsets over one period.

    The chosen offset maximises coverage first and uses the fewest nodes
    second; ties keep the first offset in scan order (x-major).  Coverage is
    scored on a coarse grid (``cell_size`` defaults to r_c/10).
    """
    kind = PatternKind(kind)
    step = step or r_c / 20
    cell_size = cell_size or r_c / 10
    sampler = CoverageSampler(WorldMap(bounds), cell_size, "bounds")
    px, py = period(kind, r_c)
    nx = max(1, int(round(px / step)))
    ny = max(1, int(round(py / step)))
    # one raw lattice reaches a full period past every edge, so shifted copies
    # clipped to bounds equal freshly generated patterns
    raw = _raw_lattice(kind, bounds, r_c, 0.0, 0.0)
    cands = []
    for i in range(nx):
        for j in range(ny):
            off = (i * px / nx, j * py / ny)
            cands.append((off, _clip(raw + off, bounds, closed)))
    # full coverage cannot be beaten, so scanning by ascending count and
    # stopping at the first full cover equals the exhaustive (coverage, count) order
    order = sorted(range(len(cands)), key=lambda t: (len(cands[t][1]), t))
    ring = _ring_samples(sampler)
    best_key, best = None, None
    for t in order:
        off, pts = cands[t]
        if best is not None and not _covers(ring, pts, r_c):
            # an uncovered edge sample rules out full coverage; skip the full grid
            continue
        cov = round(sampler.fraction_many(pts, r_c), 12)
        key = (-cov, len(pts), t)
        if best_key is None or key < best_key:
            best_key, best = key, (off, pts, cov)
        if cov >= 1.0:
            break
    if best[2] < 1.0:
        # no full cover exists: fall back to scoring every candidate
        for t in order:
            off, pts = cands[t]
            cov = round(sampler.fraction_many(pts, r_c), 12)
            key = (-cov, len(pts), t)
            if key < best_key:
                best_key, best = key, (off, pts, cov)
    off, pts, cov = best
    return Placement(kind, off, len(pts), cov, tuple(Point2(float(x), float(y)) for x, y in pts))


def min_count(kind, bounds: Rect, r_c: float, **kwargs) -> int:
    return best_placement(kind, bounds, r_c, **kwargs).count
