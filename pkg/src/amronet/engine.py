"""Discrete-time simulation kernel shared by all deployment algorithms."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, fields
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from .geometry import Point2, WorldMap, distance, in_free_space, motion_blocked, sense_range

if TYPE_CHECKING:
    from .scenario import ScenarioSpec


class ConfigError(ValueError):
    """Invalid simulation or scenario configuration."""


@dataclass(frozen=True)
class SimConfig:
    r_c: float = 4.0
    dt: float = 0.1
    agent_speed: float = 0.4
    router_speed: float = 0.1
    sonar_range: float = 2.0
    ir_range: float = 0.14
    release_threshold: float = 0.9
    placement_offset: float = 0.1
    max_avoid_steps: int = 20
    turn_probability: float = 0.02
    seed: int = 0
    max_steps: int = 200_000
    coverage_target: float = 0.99
    sample_interval: int = 100
    cell_size: float | None = None
    coverage_denominator: str = "free"

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        for name in ("r_c", "dt", "agent_speed", "router_speed", "sonar_range", "ir_range"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if not 0 < self.release_threshold < 1:
            raise ConfigError("release_threshold must lie in (0, 1)")
        if not 0 < self.placement_offset < self.r_c:
            raise ConfigError("placement_offset must lie in (0, r_c)")
        if self.router_speed > self.agent_speed:
            raise ConfigError("router_speed must not exceed agent_speed")
        if self.max_avoid_steps < 1 or self.max_steps < 0 or self.sample_interval < 1:
            raise ConfigError("max_avoid_steps, sample_interval >= 1 and max_steps >= 0 required")
        if not 0 <= self.turn_probability <= 1:
            raise ConfigError("turn_probability must lie in [0, 1]")
        if not 0 < self.coverage_target <= 1:
            raise ConfigError("coverage_target must lie in (0, 1]")
        if self.cell_size is not None and not 0 < self.cell_size <= self.r_c / 10:
            raise ConfigError("cell_size must lie in (0, r_c/10]")
        if self.coverage_denominator not in ("free", "bounds"):
            raise ConfigError("coverage_denominator must be 'free' or 'bounds'")

    @property
    def coverage_cell(self) -> float:
        return self.cell_size if self.cell_size is not None else self.r_c / 50.0

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def entity_rng(seed: int, entity_id: int) -> random.Random:
    """Independent stream per (seed, entity) so entities never perturb each other."""
    state = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, int(entity_id)]).generate_state(2)
    return random.Random((int(state[0]) << 32) | int(state[1]))


class EntityPose(NamedTuple):
    position: Point2
    heading: float


@dataclass(frozen=True)
class Event:
    step: int
    kind: str
    node_ids: tuple[int, ...]
    positions: tuple[Point2, ...] = ()


@dataclass
class EventLog:
    records: list[Event] = field(default_factory=list)

    def append(self, step: int, kind: str, node_ids=(), positions=()) -> None:
        if self.records and step < self.records[-1].step:
            raise ValueError("event steps must be nondecreasing")
        pos = tuple(Point2(float(p[0]), float(p[1])) for p in positions)
        self.records.append(Event(step, kind, tuple(int(i) for i in node_ids), pos))

    def of_kind(self, kind: str) -> list[Event]:
        return [e for e in self.records if e.kind == kind]

    def count(self, kind: str) -> int:
        return sum(1 for e in self.records if e.kind == kind)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


class RunSample(NamedTuple):
    step: int
    time_s: float
    coverage: float
    n_routers: int
    n_deployed: int
    n_components: int


@dataclass
class RunRecord:
    run_id: int
    seed: int
    algo: str
    rows: list[RunSample] = field(default_factory=list)

    def append(self, row: RunSample) -> None:
        if self.rows and row.step <= self.rows[-1].step:
            raise ValueError("run samples must have strictly increasing steps")
        self.rows.append(row)

    @property
    def final(self) -> RunSample:
        return self.rows[-1]


# ---------------------------------------------------------------- kinematics

def step_random_walk(pose: EntityPose, world: WorldMap, rng: random.Random, speed: float,
                     dt: float, turn_probability: float = 0.02,
                     sense_max: float = 2.0) -> EntityPose:
    """Constant-speed random walk with wall lookahead."""
    step = speed * dt
    lookahead = 5.0 * step
    p, heading = pose
    turn = rng.random() < turn_probability
    if turn or sense_range(world, p, heading, max(sense_max, lookahead)) < lookahead:
        heading = rng.uniform(-math.pi, math.pi)
    q = Point2(p[0] + step * math.cos(heading), p[1] + step * math.sin(heading))
    if motion_blocked(world, p, q):
        return EntityPose(p, heading)
    return EntityPose(q, heading)


@dataclass
class AvoidState:
    steps: int = 0
    side: int = 0


class GotoStatus:
    MOVED = "moved"
    REACHED = "reached"
    BLOCKED = "blocked"


class GotoResult(NamedTuple):
    status: str
    pose: EntityPose
    avoid: AvoidState


def step_goto(pose: EntityPose, goal, world: WorldMap, speed: float, dt: float,
              avoid: AvoidState, ir_range: float = 0.14, max_avoid_steps: int = 20) -> GotoResult:
    """Head for goal, wall-follow around obstacles seen within ir_range.

    Gives up (BLOCKED) after max_avoid_steps consecutive avoidance steps.
    """
    step = speed * dt
    p = pose.position
    goal = Point2(float(goal[0]), float(goal[1]))
    if not (math.isfinite(goal[0]) and math.isfinite(goal[1])):
        raise ValueError("goal must be finite")
    d = distance(p, goal)
    if d <= step and not motion_blocked(world, p, goal):
        return GotoResult(GotoStatus.REACHED, EntityPose(goal, pose.heading), AvoidState())
    heading = math.atan2(goal[1] - p[1], goal[0] - p[0]) if d > 0 else pose.heading
    ahead = min(d, ir_range)
    adv = min(step, d)
    q = Point2(p[0] + adv * math.cos(heading), p[1] + adv * math.sin(heading))
    if sense_range(world, p, heading, ahead) >= ahead and not motion_blocked(world, p, q):
        return GotoResult(GotoStatus.MOVED, EntityPose(q, heading), AvoidState())

    # obstacle ahead: sidestep along it, keeping the side chosen at first contact
    side = avoid.side
    if side == 0:
        left = sense_range(world, p, heading + math.pi / 2, ir_range)
        right = sense_range(world, p, heading - math.pi / 2, ir_range)
        side = 1 if left >= right else -1
    side_heading = heading + side * math.pi / 2
    q = Point2(p[0] + step * math.cos(side_heading), p[1] + step * math.sin(side_heading))
    new_pose = EntityPose(p, side_heading) if motion_blocked(world, p, q) else EntityPose(q, side_heading)
    nxt = AvoidState(avoid.steps + 1, side)
    if nxt.steps >= max_avoid_steps:
        return GotoResult(GotoStatus.BLOCKED, new_pose, nxt)
    return GotoResult(GotoStatus.MOVED, new_pose, nxt)


def random_free_point(world: WorldMap, rng: random.Random, center, half_width: float,
                      tries: int = 10_000) -> Point2:
    """Uniform point in the square of given half width around center, in free space."""
    for _ in range(tries):
        q = Point2(center[0] + rng.uniform(-half_width, half_width),
                   center[1] + rng.uniform(-half_width, half_width))
        if in_free_space(world, q):
            return q
    raise ConfigError(f"no free space near {tuple(center)}")


# ---------------------------------------------------------------- run loop

def _make_world(spec: "ScenarioSpec", log: EventLog):
    algo = spec.algorithm
    if algo == "agent_assisted":
        from .agent_assisted import AgentAssistedWorld
        return AgentAssistedWorld(spec, log)
    if algo == "self_spreading":
        from .self_spreading import SelfSpreadingWorld
        return SelfSpreadingWorld(spec, log)
    if algo in ("potential", "dssa"):
        from .forces import ForceWorld
        return ForceWorld(spec, log)
    raise ConfigError(f"unknown algorithm {algo!r}")


def run(spec: "ScenarioSpec", run_id: int = 0, observer=None) -> tuple[EventLog, RunRecord]:
    """Run one scenario to coverage_target, algorithm completion or max_steps.

    ``observer(world, step)`` is called at every sampled step; tests use it
    to check invariants on live state.
    """
    spec.validate()
    cfg = spec.config
    log = EventLog()
    world = _make_world(spec, log)
    record = RunRecord(run_id, cfg.seed, spec.algorithm)

    def sample(step: int) -> None:
        cov, n_routers, n_deployed, n_comp = world.sample()
        record.append(RunSample(step, round(step * cfg.dt, 10), cov, n_routers, n_deployed, n_comp))
        if observer is not None:
            observer(world, step)

    step = 0
    sample(0)
    while step < cfg.max_steps:
        if world.done():
            break
        # a released bridging router finishes its trip before the target counts as met
        if world.coverage() >= cfg.coverage_target and not getattr(world, "settling", bool)():
            break
        step += 1
        world.step(step)
        if step % cfg.sample_interval == 0:
            sample(step)
    if record.rows[-1].step != step:
        sample(step)
    log.append(step, "RunFinished", (), ())
    return log, record
