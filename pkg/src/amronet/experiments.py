"""Replicated runs, confidence intervals, study presets and file exports."""

from __future__ import annotations

import csv
import io
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from scipy import stats

from .comm_graph import NodeRecord, build, components
from .engine import ConfigError, RunRecord, RunSample, SimConfig, run
from .geometry import Point2, Rect, WorldMap
from .patterns import PatternKind, estimated_count, min_count
from .scenario import ScenarioSpec, TriangularStrategy

CSV_HEADER = ("run_id", "seed", "algo", "step", "time_s", "coverage", "n_routers",
              "n_deployed", "n_components")


@dataclass(frozen=True)
class AggregateRecord:
    mean: float
    half_width: float
    n: int

    @property
    def interval(self) -> tuple[float, float]:
        return self.mean - self.half_width, self.mean + self.half_width


def t_interval(values, confidence: float = 0.95) -> AggregateRecord:
    """Mean and Student-t confidence half-width."""
    vals = [float(v) for v in values]
    n = len(vals)
    if n == 0:
        raise ValueError("no values to aggregate")
    mean = math.fsum(vals) / n
    if n < 2:
        return AggregateRecord(mean, 0.0, n)
    sd = statistics.stdev(vals)
    t = stats.t.ppf(0.5 + confidence / 2, n - 1)
    return AggregateRecord(mean, float(t * sd / math.sqrt(n)), n)


@dataclass(frozen=True)
class ReplicateResult:
    spec: ScenarioSpec
    records: tuple[RunRecord, ...]
    routers: AggregateRecord
    deployed: AggregateRecord
    coverage: AggregateRecord


def _one(args) -> RunRecord:
    spec, run_id = args
    return run(spec, run_id)[1]


def run_replicates(spec: ScenarioSpec, workers: int = 1, first_run_id: int = 0) -> ReplicateResult:
    """One run per seed; aggregates do not depend on execution order."""
    spec.validate()
    jobs = [(spec.with_seed(s), first_run_id + k) for k, s in enumerate(spec.seeds)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_one, jobs))
    else:
        records = [_one(j) for j in jobs]
    records.sort(key=lambda r: (r.seed, r.run_id))
    finals = [r.final for r in records]
    return ReplicateResult(
        spec, tuple(records),
        t_interval(f.n_routers for f in finals),
        t_interval(f.n_deployed for f in finals),
        t_interval(f.coverage for f in finals),
    )


# ---------------------------------------------------------------- presets

ARENA = 32.0
FIG5_RC = (4.0, 6.0, 8.0, 10.0)
SMALL_MAP = Rect(-3.0, -3.0, 3.0, 3.0)


def small_obstacles() -> tuple[Rect, ...]:
    """Four 0.95 m squares near the corners of the 6x6 map, about 10% of its area."""
    s = 0.95
    return (Rect(-2.5, 1.5, -2.5 + s, 1.5 + s), Rect(2.5 - s, 1.5, 2.5, 1.5 + s),
            Rect(-2.5, -1.5 - s, -2.5 + s, -1.5), Rect(2.5 - s, -1.5 - s, 2.5, -1.5))


def arena_obstacles() -> tuple[Rect, ...]:
    """The small-map obstacle layout scaled onto the 32x32 arena."""
    k = ARENA / SMALL_MAP.width
    c = ARENA / 2
    return tuple(Rect(c + o.x0 * k, c + o.y0 * k, c + o.x1 * k, c + o.y1 * k) for o in small_obstacles())


def corner_bases(n: int, size: float = ARENA, inset: float = 0.5) -> tuple[Point2, ...]:
    corners = [(inset, inset), (size - inset, size - inset),
               (inset, size - inset), (size - inset, inset)]
    if not 1 <= n <= 4:
        raise ConfigError("corner_bases supports 1 to 4 base stations")
    return tuple(Point2(*c) for c in corners[:n])


def _fig5(map_name: str) -> list[ScenarioSpec]:
    obstacles = arena_obstacles() if map_name == "obstacles" else ()
    world = WorldMap(Rect(0.0, 0.0, ARENA, ARENA), obstacles)
    specs = []
    for r_c in FIG5_RC:
        for n_agents in range(1, 5):
            seeds = tuple(range(5 * (n_agents - 1), 5 * n_agents))
            specs.append(ScenarioSpec(
                world=world, base_stations=corner_bases(1), algorithm="agent_assisted",
                agents_per_base_station=n_agents, config=SimConfig(r_c=r_c, max_steps=400_000),
                replicates=len(seeds), seeds=seeds,
                name=f"fig5-{map_name}-rc{r_c:g}-agents{n_agents}"))
    return specs


def _fig7() -> list[ScenarioSpec]:
    world = WorldMap.empty(ARENA, ARENA)
    seeds = tuple(range(10))
    return [ScenarioSpec(world=world, base_stations=corner_bases(n), algorithm="agent_assisted",
                         agents_per_base_station=apbs, config=SimConfig(r_c=4.0, max_steps=400_000),
                         replicates=len(seeds), seeds=seeds, name=f"fig7-n{n}-apbs{apbs}")
            for n in range(1, 5) for apbs in range(1, 4)]


SPREAD_HORIZON = 10_000


def _fig10(with_obstacles: bool) -> list[ScenarioSpec]:
    world = WorldMap(SMALL_MAP, small_obstacles() if with_obstacles else ())
    cfg = SimConfig(r_c=1.0, coverage_target=1.0, max_steps=SPREAD_HORIZON, sample_interval=100)
    seeds = tuple(range(50))
    tag = "fig11" if with_obstacles else "fig10"
    return [ScenarioSpec(world=world, base_stations=(Point2(0.0, 0.0),), algorithm=algo,
                         n_routers=30, strategy=TriangularStrategy.LOCAL, config=cfg,
                         replicates=len(seeds), seeds=seeds, base_region=1.0,
                         name=f"{tag}-{algo}")
            for algo in ("self_spreading", "potential", "dssa")]


PRESETS = ("fig5", "fig7", "fig10", "fig11")


def preset(name: str) -> list[ScenarioSpec]:
    if name == "fig5":
        return _fig5("empty") + _fig5("obstacles")
    if name == "fig7":
        return _fig7()
    if name == "fig10":
        return _fig10(False)
    if name == "fig11":
        return _fig10(True)
    raise ConfigError(f"unknown preset {name!r}; expected one of {PRESETS}")


def pattern_reference(r_c: float, size: float = ARENA) -> dict[str, int]:
    """Static-pattern node counts for a size x size square."""
    bounds = Rect(0.0, 0.0, size, size)
    out = {f"{k.value}_min": min_count(k, bounds, r_c) for k in PatternKind}
    out.update({f"{k.value}_est": estimated_count(k, bounds.area, r_c) for k in PatternKind})
    return out


# ---------------------------------------------------------------- export

def csv_text(records) -> str:
    records = list(records)
    if not records:
        raise ValueError("no records to export")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in records:
        for row in rec.rows:
            w.writerow([rec.run_id, rec.seed, rec.algo, row.step, repr(float(row.time_s)),
                        repr(float(row.coverage)), row.n_routers, row.n_deployed, row.n_components])
    return buf.getvalue()


def export_csv(records, path) -> Path:
    path = Path(path)
    try:
        path.write_text(csv_text(records))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path) -> list[RunRecord]:
    out: dict[tuple[int, int, str], RunRecord] = {}
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        if tuple(rd.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected header {rd.fieldnames}")
        for row in rd:
            key = (int(row["run_id"]), int(row["seed"]), row["algo"])
            rec = out.setdefault(key, RunRecord(*key))
            rec.append(RunSample(int(row["step"]), float(row["time_s"]), float(row["coverage"]),
                                 int(row["n_routers"]), int(row["n_deployed"]),
                                 int(row["n_components"])))
    return list(out.values())


_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
            "#7f7f7f", "#bcbd22", "#17becf")


def snapshot_svg(world: WorldMap, nodes: list[NodeRecord], r_c: float, scale: float = 20.0) -> str:
    """Static picture: bounds, obstacles, r_c disks, links, nodes coloured by component."""
    b = world.bounds
    graph = build(nodes, r_c)
    label = components(graph)
    pos = {n.id: n.position for n in nodes}

    def xy(p):
        return (p[0] - b.x0) * scale, (b.y1 - p[1]) * scale

    w, h = b.width * scale, b.height * scale
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1f}" height="{h:.1f}" '
           f'viewBox="0 0 {w:.1f} {h:.1f}">',
           f'<rect x="0" y="0" width="{w:.1f}" height="{h:.1f}" fill="white" stroke="black"/>']
    for ob in world.obstacles:
        x, y = xy((ob.x0, ob.y1))
        out.append(f'<rect class="obstacle" x="{x:.2f}" y="{y:.2f}" width="{ob.width * scale:.2f}" '
                   f'height="{ob.height * scale:.2f}" fill="#444"/>')
    for n in nodes:
        x, y = xy(n.position)
        colour = _PALETTE[label[n.id] % len(_PALETTE)]
        out.append(f'<circle class="disk" cx="{x:.2f}" cy="{y:.2f}" r="{r_c * scale:.2f}" '
                   f'fill="{colour}" fill-opacity="0.3" stroke="none"/>')
    for u, v in sorted(graph.edges):
        (x1, y1), (x2, y2) = xy(pos[u]), xy(pos[v])
        out.append(f'<line class="edge" x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                   f'stroke="black" stroke-width="1"/>')
    for n in nodes:
        x, y = xy(n.position)
        colour = _PALETTE[label[n.id] % len(_PALETTE)]
        shape = "square" if n.kind == "base_station" else "node"
        rad = 5 if shape == "square" else 3
        out.append(f'<circle class="{shape}" cx="{x:.2f}" cy="{y:.2f}" r="{rad}" fill="{colour}" '
                   f'stroke="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def export_snapshot(world: WorldMap, nodes: list[NodeRecord], r_c: float, path) -> Path:
    path = Path(path)
    try:
        path.write_text(snapshot_svg(world, nodes, r_c))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def final_world(spec: ScenarioSpec, run_id: int = 0):
    """Run a scenario and return (world, record) with the world in its final state."""
    holder = {}
    _, record = run(spec, run_id, observer=lambda w, s: holder.__setitem__("w", w))
    return holder["w"], record


__all__ = [
    "AggregateRecord", "ReplicateResult", "t_interval", "run_replicates", "preset", "PRESETS",
    "pattern_reference", "corner_bases", "small_obstacles", "arena_obstacles", "csv_text",
    "export_csv", "read_csv", "snapshot_svg", "export_snapshot", "final_world", "CSV_HEADER",
    "SPREAD_HORIZON",
]
