"""Agent-assisted router deployment.

Agents explore at will and drop routers behind them: a router is released
right next to the agent, on the side of its current reference, only when
every reference in range is about to be lost (greedy deployment).  When an
agent walks from one base station's component into another's, a bridging
router is sent to the point at distance r_c from both references
(triangular deployment), gated by the global or local strategy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .comm_graph import NodeKind, NodeRecord, StationaryNetwork
from .coverage import CoverageGrid, CoverageSampler
from .engine import (AvoidState, ConfigError, EntityPose, EventLog, GotoStatus, entity_rng,
                     random_free_point, step_goto, step_random_walk)
from .geometry import Point2, distance
from .scenario import ScenarioSpec, TriangularStrategy


class TriangleError(ValueError):
    """No valid triangular goal for the given references."""


# ---------------------------------------------------------------- pure rules

def should_release(refs, threshold: float, r_c: float) -> bool:
    """True iff every in-range reference, given as (id, distance), is at least
    threshold*r_c away.  With nothing in range there is nothing left to lose."""
    if not refs:
        return False
    limit = threshold * r_c
    return all(d >= limit for _, d in refs)


def greedy_place(agent_pos, ref_pos, offset: float) -> Point2:
    """Agent position moved `offset` towards the reference."""
    dx, dy = ref_pos[0] - agent_pos[0], ref_pos[1] - agent_pos[1]
    d = math.hypot(dx, dy)
    if d == 0.0:
        return Point2(float(agent_pos[0]), float(agent_pos[1]))
    s = min(offset, d) / d
    return Point2(agent_pos[0] + s * dx, agent_pos[1] + s * dy)


def triangular_goal(p_a, p_b, side, r_c: float) -> Point2:
    """Point at distance r_c from both references, on the half-plane of `side`."""
    # canonical endpoint order keeps the result symmetric in (p_a, p_b)
    (ax, ay), (bx, by) = sorted([(float(p_a[0]), float(p_a[1])), (float(p_b[0]), float(p_b[1]))])
    a = math.hypot(bx - ax, by - ay)
    if a == 0.0:
        raise TriangleError("references coincide")
    if a > 2 * r_c * (1 + 1e-12):
        raise TriangleError(f"references {a:.6g} apart exceed 2*r_c")
    d = math.sqrt(max(r_c * r_c - 0.25 * a * a, 0.0))
    mx, my = 0.5 * (ax + bx), 0.5 * (ay + by)
    nx, ny = -(by - ay) / a, (bx - ax) / a
    if nx * (side[0] - mx) + ny * (side[1] - my) < 0:
        nx, ny = -nx, -ny
    return Point2(mx + d * nx, my + d * ny)


class Decision(NamedTuple):
    deploy: bool
    goal: Point2 | None = None


NO_ACTION = Decision(False)


def triangle_allowed(strategy: TriangularStrategy, old_ref: int, new_ref: int,
                     network: StationaryNetwork, pending=frozenset()) -> bool:
    """Global: components not yet joined (nor being joined by a router in transit).
    Local: not both references already disabled."""
    if TriangularStrategy(strategy) is TriangularStrategy.GLOBAL:
        if network.same_component(old_ref, new_ref):
            return False
        return frozenset((network.root(old_ref), network.root(new_ref))) not in pending
    return not (network.disabled[old_ref] and network.disabled[new_ref])


def on_new_reference(side, old_ref: int, new_ref: int, strategy: TriangularStrategy,
                     network: StationaryNetwork, pending=frozenset()) -> Decision:
    if not triangle_allowed(strategy, old_ref, new_ref, network, pending):
        return NO_ACTION
    try:
        goal = triangular_goal(network.positions[old_ref], network.positions[new_ref],
                               side, network.r_c)
    except TriangleError:
        return NO_ACTION
    return Decision(True, goal)


# ---------------------------------------------------------------- state

@dataclass
class AgentState:
    id: int
    status: int
    current_reference: int | None
    routers_remaining: float
    pose: EntityPose
    seen: frozenset = frozenset()
    depleted_logged: bool = False


class RouterMode:
    STATIONARY = "stationary"
    TRIANGLE = "triangle"


@dataclass
class DeployedRouter:
    id: int
    status: int
    mode: str
    pose: EntityPose
    goal: Point2 | None = None
    triangle_disabled: bool = False
    avoid: AvoidState = field(default_factory=AvoidState)
    bridge: tuple[int, int] | None = None
    blocked: bool = False


def pending_bridges(routers, network: StationaryNetwork) -> frozenset:
    """Component-root pairs that a triangle router in transit is about to join."""
    out = set()
    for r in routers:
        if r.mode == RouterMode.TRIANGLE and r.bridge is not None:
            out.add(frozenset((network.root(r.bridge[0]), network.root(r.bridge[1]))))
    return frozenset(out)


# ---------------------------------------------------------------- world

class AgentAssistedWorld:
    """All base stations, agents and released routers of one run."""

    def __init__(self, spec: ScenarioSpec, log: EventLog):
        cfg = spec.config
        self.spec = spec
        self.cfg = cfg
        self.map = spec.world
        self.r_c = cfg.r_c
        self.log = log
        self.strategy = TriangularStrategy(spec.strategy)
        self.network = StationaryNetwork(cfg.r_c)
        self.sampler = CoverageSampler(self.map, cfg.coverage_cell, cfg.coverage_denominator)
        self.grid = CoverageGrid(self.sampler, cfg.r_c)
        self.kinds: dict[int, NodeKind] = {}
        self.routers: dict[int, DeployedRouter] = {}
        self.transit: list[int] = []
        self._coverage = 0.0

        n = spec.n_base_stations
        for i, bs in enumerate(spec.base_stations):
            self.kinds[i] = NodeKind.BASE_STATION
            self.network.add(i, bs, i)
            self.grid.add(bs)
        self._coverage = self.grid.fraction

        n_agents = n * spec.agents_per_base_station
        if spec.n_routers is None:
            budgets = [math.inf] * n_agents
        else:
            q, rem = divmod(spec.n_routers, max(n_agents, 1))
            budgets = [q + (1 if k < rem else 0) for k in range(n_agents)]

        # ids: base stations, then agents, then routers in release order
        self.agents: list[AgentState] = []
        self.rngs = {}
        next_id = n
        spread = min(spec.agent_start_spread, 0.5 * cfg.r_c)
        for b, bs in enumerate(spec.base_stations):
            for _ in range(spec.agents_per_base_station):
                aid = next_id
                next_id += 1
                rng = entity_rng(cfg.seed, aid)
                start = random_free_point(self.map, rng, bs, spread) if spread > 0 else Point2(*bs)
                pose = EntityPose(start, rng.uniform(-math.pi, math.pi))
                seen = frozenset(i for _, i in self.network.in_range(start))
                self.agents.append(AgentState(aid, b, b, budgets[len(self.agents)], pose, seen))
                self.kinds[aid] = NodeKind.AGENT
                self.rngs[aid] = rng
        self.next_id = next_id

    # -- helpers
    def _new_router(self, status: int, pose: EntityPose, mode: str, **kw) -> DeployedRouter:
        rid = self.next_id
        self.next_id += 1
        r = DeployedRouter(rid, status, mode, pose, **kw)
        self.routers[rid] = r
        self.kinds[rid] = NodeKind.ROUTER
        return r

    def _commit(self, step: int, router: DeployedRouter) -> None:
        before = self.network.n_components
        self.network.add(router.id, router.pose.position, router.status)
        self.network.disabled[router.id] = router.triangle_disabled
        self.grid.add(router.pose.position)
        if self.network.n_components < before:
            self.log.append(step, "ComponentsMerged", (router.id,), (router.pose.position,))

    # -- agent procedure
    def tick_agent(self, agent: AgentState, step: int, commits: list) -> None:
        net, log, cfg = self.network, self.log, self.cfg
        pos = agent.pose.position
        refs = net.in_range(pos)
        ids_in = {i for _, i in refs}
        cur = agent.current_reference

        entering = [(d, i) for d, i in refs if i not in agent.seen and net.status[i] != agent.status]
        if entering and cur in ids_in:
            new = entering[0][1]
            pending = pending_bridges((self.routers[t] for t in self.transit), net)
            decision = on_new_reference(pos, cur, new, self.strategy, net, pending)
            if decision.deploy:
                if agent.routers_remaining > 0:
                    agent.routers_remaining -= 1
                    local = self.strategy is TriangularStrategy.LOCAL
                    r = self._new_router(agent.status, EntityPose(pos, agent.pose.heading),
                                         RouterMode.TRIANGLE, goal=decision.goal,
                                         triangle_disabled=local, bridge=(cur, new))
                    self.transit.append(r.id)
                    if local:
                        net.disabled[cur] = True
                        net.disabled[new] = True
                    log.append(step, "TriangleDeployed", (agent.id, r.id, cur, new), (pos, decision.goal))
                else:
                    log.append(step, "RoutersDepleted", (agent.id,), (pos,))
            agent.current_reference = new
            log.append(step, "ReferenceSwitched", (agent.id, new), (pos,))
            if net.status[new] != agent.status:
                agent.status = net.status[new]
                log.append(step, "StatusAdopted", (agent.id, agent.status), (pos,))
        elif cur not in ids_in:
            if refs:
                new = refs[0][1]
                agent.current_reference = new
                log.append(step, "ReferenceSwitched", (agent.id, new), (pos,))
                if net.status[new] != agent.status:
                    agent.status = net.status[new]
                    log.append(step, "StatusAdopted", (agent.id, agent.status), (pos,))
            elif cur is not None:
                agent.current_reference = None
                log.append(step, "Disconnected", (agent.id,), (pos,))

        placed = None
        if (agent.current_reference in ids_in
                and should_release([(i, d) for d, i in refs], cfg.release_threshold, self.r_c)):
            if agent.routers_remaining > 0:
                agent.routers_remaining -= 1
                ref_pos = net.positions[agent.current_reference]
                spot = greedy_place(pos, ref_pos, cfg.placement_offset)
                r = self._new_router(agent.status, EntityPose(spot, 0.0), RouterMode.STATIONARY)
                commits.append(r)
                placed = r.id
                agent.current_reference = r.id
                log.append(step, "GreedyPlaced", (agent.id, r.id), (spot,))
            elif not agent.depleted_logged:
                agent.depleted_logged = True
                log.append(step, "RoutersDepleted", (agent.id,), (pos,))

        agent.seen = frozenset(ids_in | ({placed} if placed is not None else set()))
        agent.pose = step_random_walk(agent.pose, self.map, self.rngs[agent.id], cfg.agent_speed,
                                      cfg.dt, cfg.turn_probability, cfg.sonar_range)

    def tick_transit(self, router: DeployedRouter, step: int, commits: list) -> bool:
        cfg = self.cfg
        res = step_goto(router.pose, router.goal, self.map, cfg.router_speed, cfg.dt,
                        router.avoid, cfg.ir_range, cfg.max_avoid_steps)
        router.pose, router.avoid = res.pose, res.avoid
        if res.status == GotoStatus.MOVED:
            return False
        router.mode = RouterMode.STATIONARY
        router.blocked = res.status == GotoStatus.BLOCKED
        commits.append(router)
        outcome = "Reached" if not router.blocked else "Blocked"
        self.log.append(step, "TriangleResolved" + outcome, (router.id,), (router.pose.position,))
        return True

    # -- engine interface
    def step(self, step: int) -> None:
        commits: list[DeployedRouter] = []
        for agent in self.agents:
            self.tick_agent(agent, step, commits)
        done = [rid for rid in sorted(self.transit) if self.tick_transit(self.routers[rid], step, commits)]
        for rid in done:
            self.transit.remove(rid)
        # commit in id order so concurrent releases resolve deterministically
        for r in sorted(commits, key=lambda r: r.id):
            self._commit(step, r)
        if commits:
            self._coverage = self.grid.fraction

    def coverage(self) -> float:
        return self._coverage

    def done(self) -> bool:
        return not self.agents and not self.transit

    def settling(self) -> bool:
        return bool(self.transit)

    def sample(self) -> tuple[float, int, int, int]:
        n_stat = len(self.network)
        return self._coverage, n_stat, n_stat + len(self.transit), self.network.n_components

    # -- introspection
    def stationary_records(self, include_blocked: bool = True) -> list[NodeRecord]:
        out = []
        for nid in sorted(self.network.positions):
            if not include_blocked and nid in self.routers and self.routers[nid].blocked:
                continue
            out.append(NodeRecord(nid, self.kinds[nid], self.network.positions[nid],
                                  self.network.status[nid], True))
        return out

    def snapshot(self) -> list[NodeRecord]:
        nodes = self.stationary_records()
        for rid in sorted(self.transit):
            r = self.routers[rid]
            nodes.append(NodeRecord(rid, NodeKind.ROUTER, r.pose.position, r.status, False))
        for a in self.agents:
            nodes.append(NodeRecord(a.id, NodeKind.AGENT, a.pose.position, a.status, False))
        return sorted(nodes, key=lambda n: n.id)

    def placements(self) -> list[Point2]:
        return [self.network.positions[i] for i in sorted(self.network.positions)]


__all__ = [
    "AgentState", "DeployedRouter", "RouterMode", "TriangleError", "Decision", "NO_ACTION",
    "should_release", "greedy_place", "triangular_goal", "triangle_allowed",
    "on_new_reference", "pending_bridges", "AgentAssistedWorld", "ConfigError", "distance",
]
