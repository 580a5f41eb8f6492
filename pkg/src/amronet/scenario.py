"""Scenario specification and TOML loading.

Keys carry their units (``r_c_m``, ``dt_s``...).  Unknown keys are rejected so
that typos never silently fall back to defaults.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .engine import ConfigError, SimConfig
from .geometry import GeometryError, Point2, Rect, WorldMap, in_free_space

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ALGORITHMS = ("agent_assisted", "self_spreading", "potential", "dssa")


class TriangularStrategy(str, Enum):
    GLOBAL = "global"
    LOCAL = "local"


@dataclass(frozen=True)
class ForceParams:
    k_cover: float = 1.0
    k_degree: float = 1.0
    critical_degree: int = 1
    damping: float = 0.25
    safety: float = 0.8
    r_s: float = 0.5
    k_obstacle: float = 1.0
    max_force: float = 100.0
    literal_signs: bool = False
    freeze_tolerance: float = 1e-3
    freeze_steps: int = 50

    def validate(self) -> None:
        for name in ("k_cover", "k_degree", "damping", "safety", "r_s", "k_obstacle", "max_force"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"force.{name} must be positive")
        if self.critical_degree < 1:
            raise ConfigError("force.critical_degree must be >= 1")
        if self.freeze_steps < 1 or self.freeze_tolerance < 0:
            raise ConfigError("force freeze rule must be positive")


@dataclass(frozen=True)
class ScenarioSpec:
    world: WorldMap
    base_stations: tuple[Point2, ...]
    algorithm: str = "agent_assisted"
    agents_per_base_station: int = 1
    n_routers: int | None = None
    strategy: TriangularStrategy = TriangularStrategy.GLOBAL
    config: SimConfig = field(default_factory=SimConfig)
    replicates: int = 1
    seeds: tuple[int, ...] = (0,)
    base_region: float = 1.0
    agent_start_spread: float = 0.5
    force: ForceParams = field(default_factory=ForceParams)
    name: str = "scenario"

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if not self.base_stations:
            raise ConfigError("at least one base station is required")
        for i, bs in enumerate(self.base_stations):
            if not in_free_space(self.world, bs):
                raise ConfigError(f"base station {i} at {tuple(bs)} is not in free space")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if len(self.seeds) != self.replicates:
            raise ConfigError(f"seed list has {len(self.seeds)} entries, replicates = {self.replicates}")
        if self.agents_per_base_station < 0:
            raise ConfigError("agents_per_base_station must be >= 0")
        if self.n_routers is not None and self.n_routers < 0:
            raise ConfigError("n_routers must be >= 0")
        if self.algorithm != "agent_assisted" and self.n_routers is None:
            raise ConfigError(f"{self.algorithm} needs n_routers")
        if self.base_region <= 0 or self.agent_start_spread < 0:
            raise ConfigError("base_region_m must be positive and agent_start_spread_m >= 0")
        self.config.validate()
        self.force.validate()

    def with_seed(self, seed: int) -> "ScenarioSpec":
        return replace(self, config=replace(self.config, seed=int(seed)))

    @property
    def n_base_stations(self) -> int:
        return len(self.base_stations)


# ---------------------------------------------------------------- file format

_SIM_KEYS = {
    "r_c_m": "r_c", "dt_s": "dt", "agent_speed_m_per_s": "agent_speed",
    "router_speed_m_per_s": "router_speed", "sonar_range_m": "sonar_range",
    "ir_range_m": "ir_range", "release_threshold": "release_threshold",
    "placement_offset_m": "placement_offset", "max_avoid_steps": "max_avoid_steps",
    "turn_probability": "turn_probability", "max_steps": "max_steps",
    "coverage_target": "coverage_target", "sample_interval_steps": "sample_interval",
    "cell_size_m": "cell_size", "coverage_denominator": "coverage_denominator",
}
_FORCE_KEYS = {
    "k_cover": "k_cover", "k_degree": "k_degree", "critical_degree": "critical_degree",
    "damping": "damping", "safety": "safety", "r_s_m": "r_s", "k_obstacle": "k_obstacle",
    "max_force": "max_force", "literal_signs": "literal_signs",
    "freeze_tolerance": "freeze_tolerance", "freeze_steps": "freeze_steps",
}
_TOP_KEYS = {
    "name", "algorithm", "triangular_strategy", "agents_per_base_station", "n_routers",
    "replicates", "seeds", "base_region_m", "agent_start_spread_m", "map", "base_station",
    "sim", "force",
}


def _check_keys(table: dict, allowed, where: str) -> None:
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _rect(value, where: str) -> Rect:
    try:
        x0, y0, x1, y1 = (float(v) for v in value)
        return Rect(x0, y0, x1, y1)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected [x0, y0, x1, y1], got {value!r} ({exc})") from None


def _point(value, where: str) -> Point2:
    try:
        x, y = (float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected [x, y], got {value!r}") from None
    return Point2(x, y)


def parse_scenario(data: dict) -> ScenarioSpec:
    _check_keys(data, _TOP_KEYS, "scenario")
    m = data.get("map", {})
    _check_keys(m, {"bounds_m", "obstacles_m"}, "[map]")
    if "bounds_m" not in m:
        raise ConfigError("[map] needs bounds_m")
    try:
        world = WorldMap(_rect(m["bounds_m"], "map.bounds_m"),
                         tuple(_rect(o, f"map.obstacles_m[{i}]")
                               for i, o in enumerate(m.get("obstacles_m", []))))
    except GeometryError as exc:
        raise ConfigError(f"[map]: {exc}") from None

    stations = []
    for i, bs in enumerate(data.get("base_station", [])):
        _check_keys(bs, {"position_m"}, f"[[base_station]] #{i}")
        if "position_m" not in bs:
            raise ConfigError(f"[[base_station]] #{i} needs position_m")
        stations.append(_point(bs["position_m"], f"base_station[{i}].position_m"))

    sim_raw = data.get("sim", {})
    _check_keys(sim_raw, _SIM_KEYS, "[sim]")
    force_raw = data.get("force", {})
    _check_keys(force_raw, _FORCE_KEYS, "[force]")

    if "seeds" in data:
        seeds = tuple(int(s) for s in data["seeds"])
        replicates = int(data.get("replicates", len(seeds)))
    else:
        replicates = int(data.get("replicates", 1))
        seeds = tuple(range(replicates))
    try:
        cfg = SimConfig(**{_SIM_KEYS[k]: v for k, v in sim_raw.items()},
                        seed=seeds[0] if seeds else 0)
    except TypeError as exc:
        raise ConfigError(f"[sim]: {exc}") from None
    force = ForceParams(**{_FORCE_KEYS[k]: v for k, v in force_raw.items()})
    try:
        strategy = TriangularStrategy(data.get("triangular_strategy", "global"))
    except ValueError:
        raise ConfigError(f"triangular_strategy must be 'global' or 'local'") from None

    spec = ScenarioSpec(
        world=world,
        base_stations=tuple(stations),
        algorithm=data.get("algorithm", "agent_assisted"),
        agents_per_base_station=int(data.get("agents_per_base_station", 1)),
        n_routers=None if data.get("n_routers") is None else int(data["n_routers"]),
        strategy=strategy,
        config=cfg,
        replicates=replicates,
        seeds=seeds,
        base_region=float(data.get("base_region_m", 1.0)),
        agent_start_spread=float(data.get("agent_start_spread_m", 0.5)),
        force=force,
        name=str(data.get("name", "scenario")),
    )
    spec.validate()
    return spec


def load_scenario(path) -> ScenarioSpec:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: malformed TOML: {exc}") from None
    return parse_scenario(data)


def dump_scenario(spec: ScenarioSpec) -> str:
    """Serialise a spec back to the TOML dialect read by load_scenario."""
    def fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return f'"{v}"'
        if isinstance(v, (list, tuple)):
            return "[" + ", ".join(fmt(x) for x in v) + "]"
        return repr(v)

    lines = [
        f"name = {fmt(spec.name)}",
        f"algorithm = {fmt(spec.algorithm)}",
        f"triangular_strategy = {fmt(spec.strategy.value)}",
        f"agents_per_base_station = {spec.agents_per_base_station}",
    ]
    if spec.n_routers is not None:
        lines.append(f"n_routers = {spec.n_routers}")
    lines += [
        f"replicates = {spec.replicates}",
        f"seeds = {fmt(list(spec.seeds))}",
        f"base_region_m = {fmt(spec.base_region)}",
        f"agent_start_spread_m = {fmt(spec.agent_start_spread)}",
        "",
        "[map]",
        f"bounds_m = {fmt(list(spec.world.bounds.as_tuple()))}",
        f"obstacles_m = {fmt([list(o.as_tuple()) for o in spec.world.obstacles])}",
        "",
        "[sim]",
    ]
    cfg = spec.config
    for key, attr in _SIM_KEYS.items():
        v = getattr(cfg, attr)
        if v is not None:
            lines.append(f"{key} = {fmt(v)}")
    lines += ["", "[force]"]
    for key, attr in _FORCE_KEYS.items():
        lines.append(f"{key} = {fmt(getattr(spec.force, attr))}")
    for bs in spec.base_stations:
        lines += ["", "[[base_station]]", f"position_m = {fmt(list(bs))}"]
    return "\n".join(lines) + "\n"
