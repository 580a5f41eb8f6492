"""Command line entry point: ``amronet {run,preset,patterns,coverage}``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .comm_graph import NodeKind, NodeRecord
from .engine import ConfigError
from .experiments import (PRESETS, export_csv, export_snapshot, final_world, pattern_reference,
                          preset, run_replicates)
from .geometry import GeometryError, Rect, WorldMap
from .patterns import PatternKind, best_placement, estimated_count, generate
from .scenario import ScenarioSpec, load_scenario


def _seeded(spec: ScenarioSpec, seed: int | None) -> ScenarioSpec:
    if seed is None:
        return spec
    return replace(spec, replicates=1, seeds=(seed,))


def _out(args, name: str) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def _summary(res) -> str:
    r, c = res.routers, res.coverage
    return (f"{res.spec.name}: routers {r.mean:.2f} ± {r.half_width:.2f}, "
            f"coverage {c.mean:.4f} ± {c.half_width:.4f} (n={r.n})")


def cmd_run(args) -> int:
    spec = _seeded(load_scenario(args.scenario), args.seed)
    res = run_replicates(spec, workers=args.workers)
    csv_path = Path(args.csv) if args.csv else _out(args, f"{spec.name}.csv")
    export_csv(res.records, csv_path)
    print(_summary(res))
    print(f"wrote {csv_path}")
    if args.svg:
        world, _ = final_world(spec.with_seed(spec.seeds[0]))
        export_snapshot(spec.world, world.snapshot(), spec.config.r_c, args.svg)
        print(f"wrote {args.svg}")
    return 0


def cmd_preset(args) -> int:
    specs = [_seeded(s, args.seed) for s in preset(args.name)]
    records, run_id = [], 0
    for spec in specs:
        res = run_replicates(spec, workers=args.workers, first_run_id=run_id)
        run_id += len(res.records)
        records.extend(res.records)
        print(_summary(res), flush=True)
    if args.name == "fig5":
        for r_c in sorted({s.config.r_c for s in specs}):
            print(f"patterns r_c={r_c:g}: {pattern_reference(r_c)}")
    csv_path = Path(args.csv) if args.csv else _out(args, f"{args.name}.csv")
    export_csv(records, csv_path)
    print(f"wrote {csv_path}")
    return 0


def cmd_patterns(args) -> int:
    bounds = Rect(*args.bounds)
    kind = PatternKind(args.kind)
    anchored = generate(kind, bounds, args.rc)
    best = best_placement(kind, bounds, args.rc)
    print(f"{kind.value}: anchored {len(anchored)}, min_count {best.count} "
          f"(offset {best.offset[0]:.4g},{best.offset[1]:.4g}, coverage {best.coverage:.4f}), "
          f"estimate {estimated_count(kind, bounds.area, args.rc)}")
    if args.svg:
        nodes = [NodeRecord(i, NodeKind.ROUTER, p, 0, True) for i, p in enumerate(best.points)]
        export_snapshot(WorldMap(bounds), nodes, args.rc, args.svg)
        print(f"wrote {args.svg}")
    return 0


def cmd_coverage(args) -> int:
    spec = load_scenario(args.scenario)
    seed = spec.seeds[0] if args.seed is None else args.seed
    world, record = final_world(spec.with_seed(seed))
    f = record.final
    print(f"{spec.name} seed {seed}: coverage {f.coverage:.4f}, routers {f.n_routers}, "
          f"components {f.n_components}, steps {f.step}")
    if args.snapshot or args.svg:
        svg = Path(args.svg) if args.svg else _out(args, f"{spec.name}-seed{seed}.svg")
        export_snapshot(spec.world, world.snapshot(), spec.config.r_c, svg)
        print(f"wrote {svg}")
    if args.csv:
        export_csv([record], args.csv)
        print(f"wrote {args.csv}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amronet", description="Mobile router network simulator")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="run this seed only")
    common.add_argument("--out-dir", default="out", help="directory for default output files")
    common.add_argument("--csv", default=None, help="CSV output path")
    common.add_argument("--svg", default=None, help="SVG snapshot path")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="run a scenario file for all its seeds")
    r.add_argument("scenario")
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=cmd_run)

    pr = sub.add_parser("preset", parents=[common], help="run a built-in study")
    pr.add_argument("name", choices=PRESETS)
    pr.add_argument("--workers", type=int, default=1)
    pr.set_defaults(func=cmd_preset)

    pa = sub.add_parser("patterns", parents=[common], help="static pattern node counts")
    pa.add_argument("kind", choices=[k.value for k in PatternKind])
    pa.add_argument("--bounds", type=float, nargs=4, metavar=("X0", "Y0", "X1", "Y1"),
                    default=(0.0, 0.0, 32.0, 32.0))
    pa.add_argument("--rc", type=float, default=4.0)
    pa.set_defaults(func=cmd_patterns)

    c = sub.add_parser("coverage", parents=[common], help="final coverage of one run")
    c.add_argument("scenario")
    c.add_argument("--snapshot", action="store_true", help="write an SVG of the final state")
    c.set_defaults(func=cmd_coverage)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GeometryError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
