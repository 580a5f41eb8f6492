"""Bounded 2-D world with axis-aligned rectangular obstacles.

Free space is closed: obstacle boundaries are free, only the open interior of
an obstacle is forbidden.  Obstacles block motion and range sensing but never
radio links.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple


class Point2(NamedTuple):
    x: float
    y: float


class GeometryError(ValueError):
    """Raised for malformed rectangles or maps."""


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self) -> None:
        vals = (self.x0, self.y0, self.x1, self.y1)
        if not all(math.isfinite(v) for v in vals):
            raise GeometryError(f"non-finite rectangle {vals}")
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise GeometryError(f"inverted rectangle {vals}")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Point2:
        return Point2(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def contains(self, p) -> bool:
        """Closed containment."""
        return self.x0 <= p[0] <= self.x1 and self.y0 <= p[1] <= self.y1

    def interior_contains(self, p) -> bool:
        return self.x0 < p[0] < self.x1 and self.y0 < p[1] < self.y1

    def inside(self, other: "Rect") -> bool:
        return (other.x0 <= self.x0 and self.x1 <= other.x1
                and other.y0 <= self.y0 and self.y1 <= other.y1)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x1, self.y1)


@dataclass(frozen=True)
class WorldMap:
    bounds: Rect
    obstacles: tuple[Rect, ...] = ()

    def __post_init__(self) -> None:
        if self.bounds.width <= 0 or self.bounds.height <= 0:
            raise GeometryError("bounds must have positive width and height")
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        for ob in self.obstacles:
            if not ob.inside(self.bounds):
                raise GeometryError(f"obstacle {ob.as_tuple()} not inside bounds")

    @classmethod
    def empty(cls, width: float, height: float, x0: float = 0.0, y0: float = 0.0) -> "WorldMap":
        return cls(Rect(x0, y0, x0 + width, y0 + height))


def in_free_space(world: WorldMap, p) -> bool:
    if not world.bounds.contains(p):
        return False
    return not any(ob.interior_contains(p) for ob in world.obstacles)


def union_area(rects: Iterable[Rect]) -> float:
    """Exact area of a union of rectangles by coordinate compression."""
    rects = [r for r in rects if r.area > 0]
    if not rects:
        return 0.0
    xs = sorted({v for r in rects for v in (r.x0, r.x1)})
    ys = sorted({v for r in rects for v in (r.y0, r.y1)})
    total = 0.0
    for i in range(len(xs) - 1):
        cx = 0.5 * (xs[i] + xs[i + 1])
        for j in range(len(ys) - 1):
            cy = 0.5 * (ys[j] + ys[j + 1])
            if any(r.x0 < cx < r.x1 and r.y0 < cy < r.y1 for r in rects):
                total += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j])
    return total


def free_area(world: WorldMap) -> float:
    return world.bounds.area - union_area(world.obstacles)


def _clip_segment(rect: Rect, a, b) -> tuple[float, float] | None:
    """Liang-Barsky: parameter interval of segment a->b inside the closed rect."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, a[0] - rect.x0), (dx, rect.x1 - a[0]),
                 (-dy, a[1] - rect.y0), (dy, rect.y1 - a[1])):
        if p == 0.0:
            if q < 0.0:
                return None
            continue
        t = q / p
        if p < 0.0:
            if t > t1:
                return None
            t0 = max(t0, t)
        else:
            if t < t0:
                return None
            t1 = min(t1, t)
    return t0, t1


def segment_hits_interior(rect: Rect, a, b) -> bool:
    clip = _clip_segment(rect, a, b)
    if clip is None:
        return False
    # the clipped piece is convex: it touches the open interior iff its midpoint does
    tm = 0.5 * (clip[0] + clip[1])
    mid = (a[0] + tm * (b[0] - a[0]), a[1] + tm * (b[1] - a[1]))
    return rect.interior_contains(mid)


def motion_blocked(world: WorldMap, a, b) -> bool:
    if not (world.bounds.contains(a) and world.bounds.contains(b)):
        return True
    return any(segment_hits_interior(ob, a, b) for ob in world.obstacles)


def _ray_enter(rect: Rect, px: float, py: float, dx: float, dy: float) -> float | None:
    """Distance at which the ray enters the open interior of rect, if ever."""
    tmin, tmax = -math.inf, math.inf
    for o, d, lo, hi in ((px, dx, rect.x0, rect.x1), (py, dy, rect.y0, rect.y1)):
        if d == 0.0:
            if not lo < o < hi:
                return None
            continue
        ta, tb = (lo - o) / d, (hi - o) / d
        if ta > tb:
            ta, tb = tb, ta
        tmin, tmax = max(tmin, ta), min(tmax, tb)
    if tmin >= tmax or tmax <= 0.0:
        return None
    return max(tmin, 0.0)


def sense_range(world: WorldMap, p, heading: float, max_range: float) -> float:
    """Range reading along heading to the first wall or obstacle, clamped."""
    px, py = p[0], p[1]
    dx, dy = math.cos(heading), math.sin(heading)
    b = world.bounds
    best = max_range
    if dx > 0.0:
        best = min(best, (b.x1 - px) / dx)
    elif dx < 0.0:
        best = min(best, (b.x0 - px) / dx)
    if dy > 0.0:
        best = min(best, (b.y1 - py) / dy)
    elif dy < 0.0:
        best = min(best, (b.y0 - py) / dy)
    for ob in world.obstacles:
        t = _ray_enter(ob, px, py, dx, dy)
        if t is not None and t < best:
            best = t
    return max(best, 0.0)


def nearest_point_on_rect(rect: Rect, p) -> Point2:
    """Closest point of the closed rectangle to p (p itself when inside)."""
    return Point2(min(max(p[0], rect.x0), rect.x1), min(max(p[1], rect.y0), rect.y1))


def distance(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])
