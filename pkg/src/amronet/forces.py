"""Force-driven spreading baselines: potential field and DSSA.

Every router feels forces from nodes within r_c (routers and base stations)
plus inverse-square repulsion from walls and obstacles closer than r_s.
Velocities are damped, displacements scaled by a safety factor and capped at
router speed.  A router that has barely moved for a while freezes for good.
"""

from __future__ import annotations

import math
import random

import numpy as np

from .comm_graph import NodeKind, NodeRecord, build, n_components
from .coverage import CoverageSampler
from .engine import EventLog
from .geometry import Point2, free_area, motion_blocked, nearest_point_on_rect
from .scenario import ForceParams, ScenarioSpec
from .self_spreading import init_scenario


def _unit_away(p_i, p_j, rng: random.Random | None):
    dx, dy = p_i[0] - p_j[0], p_i[1] - p_j[1]
    d = math.hypot(dx, dy)
    if d == 0.0:
        rng = rng or random.Random(0)
        t = rng.uniform(-math.pi, math.pi)
        return (math.cos(t), math.sin(t)), 0.0
    return (dx / d, dy / d), d


def _inverse_square(k: float, d: float, max_force: float) -> float:
    """min(k/d^2, max_force) without dividing by an underflowed d^2."""
    d2 = d * d
    return max_force if d2 * max_force <= k else k / d2


def _inverse_square_arr(k: float, d: np.ndarray, max_force: float) -> np.ndarray:
    d2 = d * d
    capped = d2 * max_force <= k
    return np.where(capped, max_force, k / np.where(capped, 1.0, d2))


def force_cover(p_i, p_j, k_cover: float = 1.0, max_force: float = 100.0,
                literal_signs: bool = False, rng: random.Random | None = None) -> np.ndarray:
    """Inverse-square repulsion of i from j."""
    u, d = _unit_away(p_i, p_j, rng)
    mag = _inverse_square(k_cover, d, max_force)
    sign = -1.0 if literal_signs else 1.0
    return sign * mag * np.array(u)


def force_connect(p_i, p_j, degree_i: int, r_c: float, k_degree: float = 1.0,
                  critical_degree: int = 1, max_force: float = 100.0,
                  rng: random.Random | None = None) -> np.ndarray:
    """Attraction of i toward j, active only while i has at most critical_degree links."""
    if degree_i > critical_degree:
        return np.zeros(2)
    u, d = _unit_away(p_i, p_j, rng)
    gap = d - r_c
    mag = _inverse_square(k_degree, gap, max_force)
    return -mag * np.array(u)


def expected_density(n_nodes: int, r_s: float, area: float) -> float:
    return n_nodes * math.pi * r_s * r_s / area


def force_dssa(p_i, p_j, local_density: float, mu2: float, r_c: float,
               max_force: float = 100.0, literal_signs: bool = False,
               rng: random.Random | None = None) -> np.ndarray:
    """Drives the pair toward spacing r_c: repels below it, attracts above it."""
    u, d = _unit_away(p_i, p_j, rng)
    mag = min(local_density / mu2 * abs(r_c - d), max_force)
    sign = 1.0 if d < r_c else -1.0
    if literal_signs:
        sign = -sign
    return sign * mag * np.array(u)


def boundary_force(world, p, r_s: float, k_obstacle: float = 1.0,
                   max_force: float = 100.0) -> np.ndarray:
    """Repulsion from the nearest point of every wall and obstacle within r_s."""
    f = np.zeros(2)
    b = world.bounds
    walls = ((p[0] - b.x0, (1.0, 0.0)), (b.x1 - p[0], (-1.0, 0.0)),
             (p[1] - b.y0, (0.0, 1.0)), (b.y1 - p[1], (0.0, -1.0)))
    for d, n in walls:
        if d < r_s:
            mag = max_force if d <= 0 else _inverse_square(k_obstacle, d, max_force)
            f += mag * np.array(n)
    for ob in world.obstacles:
        q = nearest_point_on_rect(ob, p)
        dx, dy = p[0] - q[0], p[1] - q[1]
        d = math.hypot(dx, dy)
        if 0 < d < r_s:
            f += _inverse_square(k_obstacle, d, max_force) * np.array((dx / d, dy / d))
    return f


def boundary_forces(world, pts: np.ndarray, r_s: float, k_obstacle: float = 1.0,
                    max_force: float = 100.0) -> np.ndarray:
    """Vectorised boundary_force over an (n, 2) array."""
    b = world.bounds
    # walls: distances to x0, x1, y0, y1 and their inward normals
    d = np.stack([pts[:, 0] - b.x0, b.x1 - pts[:, 0], pts[:, 1] - b.y0, b.y1 - pts[:, 1]], axis=1)
    mag = _inverse_square_arr(k_obstacle, np.maximum(d, 0.0), max_force)
    mag = np.where(d < r_s, mag, 0.0)
    f = np.stack([mag[:, 0] - mag[:, 1], mag[:, 2] - mag[:, 3]], axis=1)
    if world.obstacles:
        ob = np.array([o.as_tuple() for o in world.obstacles])
        qx = np.clip(pts[:, :1], ob[None, :, 0], ob[None, :, 2])
        qy = np.clip(pts[:, 1:], ob[None, :, 1], ob[None, :, 3])
        dx, dy = pts[:, :1] - qx, pts[:, 1:] - qy
        do = np.hypot(dx, dy)
        hit = (do > 0) & (do < r_s)
        safe = np.where(hit, do, 1.0)
        scale = np.where(hit, _inverse_square_arr(k_obstacle, do, max_force) / safe, 0.0)
        f += np.stack([(scale * dx).sum(axis=1), (scale * dy).sum(axis=1)], axis=1)
    return f


def integrate(velocity: np.ndarray, force: np.ndarray, dt: float, params: ForceParams,
              max_step: float) -> tuple[np.ndarray, np.ndarray]:
    """Damped velocity update; returns (new velocity, displacement)."""
    v = params.damping * (velocity + force * dt)
    disp = params.safety * v * dt
    n = np.hypot(disp[..., 0], disp[..., 1])
    scale = np.where(n > max_step, max_step / np.maximum(n, 1e-300), 1.0)
    return v, disp * scale[..., None]


class ForceWorld:
    def __init__(self, spec: ScenarioSpec, log: EventLog):
        cfg = spec.config
        self.spec, self.cfg, self.log = spec, cfg, log
        self.params: ForceParams = spec.force
        self.dssa = spec.algorithm == "dssa"
        self.map = spec.world
        self.r_c = cfg.r_c
        self.bases = np.array([tuple(b) for b in spec.base_stations], dtype=float).reshape(-1, 2)
        routers, self.rngs, warnings = init_scenario(
            self.map, spec.base_stations, spec.n_routers or 0, spec.base_region, cfg.r_c, cfg.seed)
        for _ in warnings:
            log.append(0, "BaseRegionWarning", (), ())
        self.ids = [r.id for r in routers]
        self.pos = np.array([tuple(r.pose.position) for r in routers], dtype=float).reshape(-1, 2)
        self.vel = np.zeros_like(self.pos)
        self.still = np.zeros(len(self.ids), dtype=int)
        self.frozen = np.zeros(len(self.ids), dtype=bool)
        self.sampler = CoverageSampler(self.map, cfg.coverage_cell, cfg.coverage_denominator)
        self.mu2 = (expected_density(len(self.ids), self.params.r_s, free_area(self.map))
                    if self.ids else 1.0)
        n, nb = len(self.ids), len(self.bases)
        self._not_self = np.ones((n, n + nb), dtype=bool)
        self._not_self[np.arange(n), nb + np.arange(n)] = False
        self._coverage = self.sampler.fraction_many(self.all_positions(), self.r_c)

    def all_positions(self) -> np.ndarray:
        return np.concatenate([self.bases, self.pos])

    def net_forces(self) -> np.ndarray:
        """Total force on every router from the previous-step snapshot."""
        p = self.params
        n = len(self.ids)
        if n == 0:
            return np.zeros((0, 2))
        allp = self.all_positions()
        diff = self.pos[:, None, :] - allp[None, :, :]
        d = np.hypot(diff[..., 0], diff[..., 1])
        near = (d <= self.r_c * (1 + 1e-12)) & self._not_self
        coincident = near & (d == 0.0)
        safe = np.where(d > 0, d, 1.0)
        unit = diff / safe[..., None]
        if coincident.any():
            for i, j in zip(*np.nonzero(coincident)):
                t = self.rngs[self.ids[i]].uniform(-math.pi, math.pi)
                unit[i, j] = (math.cos(t), math.sin(t))
        degree = near.sum(axis=1)
        if self.dssa:
            dens = degree + 1.0
            mag = np.minimum(dens[:, None] / self.mu2 * np.abs(self.r_c - d), p.max_force)
            sign = np.where(d < self.r_c, 1.0, -1.0)
            if p.literal_signs:
                sign = -sign
            f = (np.where(near, sign * mag, 0.0)[..., None] * unit).sum(axis=1)
        else:
            cover = _inverse_square_arr(p.k_cover, d, p.max_force)
            if p.literal_signs:
                cover = -cover
            gap = d - self.r_c
            conn = _inverse_square_arr(p.k_degree, gap, p.max_force)
            critical = (degree <= p.critical_degree)[:, None]
            mag = np.where(near, cover - np.where(critical, conn, 0.0), 0.0)
            f = (mag[..., None] * unit).sum(axis=1)
        return f + boundary_forces(self.map, self.pos, p.r_s, p.k_obstacle, p.max_force)

    def step(self, step: int) -> None:
        cfg, p = self.cfg, self.params
        if len(self.ids) == 0:
            return
        f = self.net_forces()
        vel, disp = integrate(self.vel, f, cfg.dt, p, cfg.router_speed * cfg.dt)
        moving = ~self.frozen
        # only moves ending near a wall or obstacle need the exact segment test
        margin = cfg.router_speed * cfg.dt + 1e-9
        b = self.map.bounds
        near = ((self.pos[:, 0] < b.x0 + margin) | (self.pos[:, 0] > b.x1 - margin)
                | (self.pos[:, 1] < b.y0 + margin) | (self.pos[:, 1] > b.y1 - margin))
        for ob in self.map.obstacles:
            near |= ((self.pos[:, 0] > ob.x0 - margin) & (self.pos[:, 0] < ob.x1 + margin)
                     & (self.pos[:, 1] > ob.y0 - margin) & (self.pos[:, 1] < ob.y1 + margin))
        free = moving & ~near
        self.pos[free] += disp[free]
        for i in np.nonzero(moving & near)[0]:
            a = self.pos[i]
            b = a + disp[i]
            if motion_blocked(self.map, a, b):
                vel[i] = 0.0
                disp[i] = 0.0
            else:
                self.pos[i] = b
        self.vel = np.where(moving[:, None], vel, 0.0)
        moved = np.hypot(disp[:, 0], disp[:, 1])
        slow = moved < p.freeze_tolerance * self.r_c
        self.still = np.where(slow & moving, self.still + 1, 0)
        newly = moving & (self.still >= p.freeze_steps)
        for i in np.nonzero(newly)[0]:
            self.log.append(step, "Frozen", (self.ids[i],), (tuple(self.pos[i]),))
        self.frozen |= newly
        if step % cfg.sample_interval == 0 or self.done():
            self._coverage = self.sampler.fraction_many(self.all_positions(), self.r_c)

    def coverage(self) -> float:
        """Coverage of all nodes, refreshed at sampling steps."""
        return self._coverage

    def done(self) -> bool:
        return bool(self.frozen.all())

    def records(self) -> list[NodeRecord]:
        out = [NodeRecord(i, NodeKind.BASE_STATION, Point2(*map(float, b)), i, True)
               for i, b in enumerate(self.bases)]
        out += [NodeRecord(rid, NodeKind.ROUTER, Point2(*map(float, q)), -1, bool(fr))
                for rid, q, fr in zip(self.ids, self.pos, self.frozen)]
        return out

    snapshot = records

    def sample(self) -> tuple[float, int, int, int]:
        self._coverage = self.sampler.fraction_many(self.all_positions(), self.r_c)
        comps = n_components(build(self.records(), self.r_c))
        return self._coverage, int(self.frozen.sum()), len(self.ids), comps


__all__ = ["force_cover", "force_connect", "force_dssa", "expected_density", "boundary_force",
           "integrate", "ForceWorld"]
