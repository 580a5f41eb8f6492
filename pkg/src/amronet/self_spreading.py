"""Self-spreading router deployment.

Routers start clustered around their base station and random-walk outward.
Only frozen routers (references) and base stations anchor the spread: an
exploring router freezes where it is about to lose its last reference, and
walks to a triangular bridging point when it meets a reference grown from a
different base station.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .agent_assisted import on_new_reference, triangle_allowed
from .comm_graph import NodeKind, NodeRecord, StationaryNetwork
from .coverage import CoverageGrid, CoverageSampler
from .engine import (AvoidState, EntityPose, EventLog, GotoStatus, entity_rng, random_free_point,
                     step_goto, step_random_walk)
from .geometry import Point2, WorldMap
from .scenario import ScenarioSpec, TriangularStrategy


class SpreadMode:
    EXPLORE = "explore"
    REFERENCE = "reference"
    TRIANGLE = "triangle"


@dataclass
class SpreadRouter:
    id: int
    pose: EntityPose
    status: int = -1
    mode: str = SpreadMode.EXPLORE
    goal: Point2 | None = None
    avoid: AvoidState = field(default_factory=AvoidState)
    bridge: tuple[int, int] | None = None
    triangle_disabled: bool = False
    blocked: bool = False


def split_counts(total: int, parts: int) -> list[int]:
    q, rem = divmod(total, max(parts, 1))
    return [q + (1 if k < rem else 0) for k in range(parts)]


def init_scenario(world: WorldMap, base_stations, n_routers: int, base_region: float,
                  r_c: float, seed: int) -> tuple[list[SpreadRouter], dict, list[str]]:
    """Routers placed uniformly in a square of side base_region around each base.

    Routers are split evenly over base stations and get ids after the base
    stations.  Returns (routers, per-router rng streams, warnings).
    """
    routers, rngs, warnings = [], {}, []
    half = 0.5 * base_region
    if half * math.sqrt(2.0) > r_c:
        warnings.append(f"base region corner {half * math.sqrt(2.0):.3g} m from the base "
                        f"exceeds r_c = {r_c:g} m; some routers may start disconnected")
    rid = len(base_stations)
    for bs, count in zip(base_stations, split_counts(n_routers, len(base_stations))):
        for _ in range(count):
            rng = entity_rng(seed, rid)
            start = random_free_point(world, rng, bs, half)
            routers.append(SpreadRouter(rid, EntityPose(start, rng.uniform(-math.pi, math.pi))))
            rngs[rid] = rng
            rid += 1
    return routers, rngs, warnings


class SelfSpreadingWorld:
    def __init__(self, spec: ScenarioSpec, log: EventLog):
        cfg = spec.config
        self.spec, self.cfg, self.log = spec, cfg, log
        self.map = spec.world
        self.r_c = cfg.r_c
        self.strategy = TriangularStrategy(spec.strategy)
        self.network = StationaryNetwork(cfg.r_c)
        self.sampler = CoverageSampler(self.map, cfg.coverage_cell, cfg.coverage_denominator)
        self.grid = CoverageGrid(self.sampler, cfg.r_c)
        for i, bs in enumerate(spec.base_stations):
            self.network.add(i, bs, i)
            self.grid.add(bs)
        routers, self.rngs, warnings = init_scenario(
            self.map, spec.base_stations, spec.n_routers or 0, spec.base_region, cfg.r_c, cfg.seed)
        for w in warnings:
            log.append(0, "BaseRegionWarning", (), ())
        self.routers = {r.id: r for r in routers}
        self.active = [r.id for r in routers]
        self._coverage = self.grid.fraction

    def _pending(self) -> frozenset:
        out = set()
        for rid in self.active:
            r = self.routers[rid]
            if r.mode == SpreadMode.TRIANGLE and r.bridge is not None:
                out.add(frozenset((self.network.root(r.bridge[0]), self.network.root(r.bridge[1]))))
        return frozenset(out)

    def tick_router(self, r: SpreadRouter, step: int, commits: list) -> bool:
        """Advance one router; True once it has become a reference."""
        cfg, net = self.cfg, self.network
        if r.mode == SpreadMode.TRIANGLE:
            res = step_goto(r.pose, r.goal, self.map, cfg.router_speed, cfg.dt, r.avoid,
                            cfg.ir_range, cfg.max_avoid_steps)
            r.pose, r.avoid = res.pose, res.avoid
            if res.status == GotoStatus.MOVED:
                return False
            r.blocked = res.status == GotoStatus.BLOCKED
            outcome = "Blocked" if r.blocked else "Reached"
            self.log.append(step, "TriangleResolved" + outcome, (r.id,), (r.pose.position,))
            commits.append(r)
            return True

        pos = r.pose.position
        refs = net.in_range(pos)
        if refs:
            nearest = refs[0][1]
            r.status = net.status[nearest]
            other = next((i for _, i in refs if net.status[i] != r.status), None)
            if other is not None:
                decision = on_new_reference(pos, nearest, other, self.strategy, net, self._pending())
                if decision.deploy:
                    r.mode = SpreadMode.TRIANGLE
                    r.goal = decision.goal
                    r.bridge = (nearest, other)
                    if self.strategy is TriangularStrategy.LOCAL:
                        net.disabled[nearest] = net.disabled[other] = True
                        r.triangle_disabled = True
                    self.log.append(step, "TriangleDeployed", (r.id, nearest, other), (pos, r.goal))
                    return False
            if all(d >= cfg.release_threshold * self.r_c for d, _ in refs):
                self.log.append(step, "Frozen", (r.id, nearest), (pos,))
                commits.append(r)
                return True
        r.pose = step_random_walk(r.pose, self.map, self.rngs[r.id], cfg.router_speed, cfg.dt,
                                  cfg.turn_probability, cfg.ir_range)
        return False

    def step(self, step: int) -> None:
        commits: list[SpreadRouter] = []
        still = []
        for rid in self.active:
            if not self.tick_router(self.routers[rid], step, commits):
                still.append(rid)
        self.active = still
        for r in commits:
            r.mode = SpreadMode.REFERENCE
            before = self.network.n_components
            self.network.add(r.id, r.pose.position, r.status)
            self.network.disabled[r.id] = r.triangle_disabled
            self.grid.add(r.pose.position)
            if self.network.n_components < before:
                self.log.append(step, "ComponentsMerged", (r.id,), (r.pose.position,))
        if commits:
            self._coverage = self.grid.fraction

    def coverage(self) -> float:
        return self._coverage

    reference_coverage = coverage

    def total_coverage(self) -> float:
        """Coverage of every node, exploring routers included."""
        return self.sampler.fraction(self.all_positions(), self.r_c)

    def all_positions(self) -> list[Point2]:
        return ([self.network.positions[i] for i in range(self.spec.n_base_stations)]
                + [r.pose.position for r in self.routers.values()])

    def done(self) -> bool:
        return not self.active

    def settling(self) -> bool:
        return any(self.routers[rid].mode == SpreadMode.TRIANGLE for rid in self.active)

    def sample(self) -> tuple[float, int, int, int]:
        n_ref = len(self.network) - self.spec.n_base_stations
        return self._coverage, n_ref, len(self.routers), self.network.n_components

    def stationary_records(self, include_blocked: bool = True) -> list[NodeRecord]:
        out = []
        for nid in sorted(self.network.positions):
            r = self.routers.get(nid)
            if r is not None and r.blocked and not include_blocked:
                continue
            kind = NodeKind.BASE_STATION if r is None else NodeKind.ROUTER
            out.append(NodeRecord(nid, kind, self.network.positions[nid], self.network.status[nid], True))
        return out

    def snapshot(self) -> list[NodeRecord]:
        nodes = self.stationary_records()
        for rid in self.active:
            r = self.routers[rid]
            nodes.append(NodeRecord(rid, NodeKind.ROUTER, r.pose.position, r.status, False))
        return sorted(nodes, key=lambda n: n.id)


__all__ = ["SpreadMode", "SpreadRouter", "init_scenario", "split_counts", "SelfSpreadingWorld",
           "triangle_allowed"]
