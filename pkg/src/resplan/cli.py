"""``resplan`` command line: plan, gen, bench, field.

Exit codes: 0 success, 2 planning failure, 3 input or parse error.
"""
import argparse
import math
import sys

from .errors import ConfigError, DensityUnreachable, GridFormatError, IoFailure, PlanFailure
from .kinematics import Pose2D

EXIT_OK = 0
EXIT_PLAN_FAILURE = 2
EXIT_INPUT_ERROR = 3


class _InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for planning failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _pose(text: str) -> Pose2D:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y,T but got {text!r}")
    if len(vals) != 3 or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected X,Y,T but got {text!r}")
    return Pose2D(*vals)


def _size(text: str):
    parts = text.lower().split("x")
    try:
        w, h = float(parts[0]), float(parts[1])
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"expected WxH in meters but got {text!r}")
    if len(parts) != 2 or not (w > 0 and h > 0):
        raise argparse.ArgumentTypeError(f"expected WxH in meters but got {text!r}")
    return w, h


def _float_list(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers but got {text!r}")


def _load_grid(path):
    from .gridmap import OccupancyGrid

    try:
        return OccupancyGrid.load(path)
    except OSError as exc:
        raise _InputError(f"cannot read map {path}: {exc}")


def cmd_plan(args) -> int:
    from .config import load_config
    from .pipeline import PlanningQuery, plan_resilient, write_trajectory

    grid = _load_grid(args.map)
    cfg = load_config(args.config) if args.config else None
    query = PlanningQuery(grid, args.start, args.goal)
    for name, pose in (("start", query.start), ("goal", query.goal)):
        if not grid.contains(pose.x, pose.y):
            raise _InputError(f"{name} pose lies outside the map")
    result = plan_resilient(query, cfg) if cfg is not None else plan_resilient(query)
    write_trajectory(result.trajectory, args.out_traj)
    if args.out_svg:
        from .svg import render_svg

        render_svg(grid, [result.path], args.out_svg, start=query.start, goal=query.goal)
    rep = result.report
    print(f"samples={len(result.trajectory)} duration={result.trajectory.duration:.3f}s "
          f"recovery={'yes' if rep.fired else 'no'} searches={rep.searches} expansions={rep.expansions}")
    return EXIT_OK


def cmd_gen(args) -> int:
    from .gridmap import OccupancyGrid, obstacle_density
    from .scenarios import ScenarioSpec, generate_scenario

    w, h = args.size
    base = OccupancyGrid.empty(int(round(w / args.resolution)), int(round(h / args.resolution)), args.resolution)
    start = args.start or Pose2D(min(2.0, 0.25 * w), 0.5 * h, 0.0)
    goal = args.goal or Pose2D(w - min(2.0, 0.25 * w), 0.5 * h, 0.0)
    try:
        spec = ScenarioSpec(seed=args.seed, base_grid=base, target_density=args.density,
                            min_spacing=args.min_spacing, start=start, goal=goal)
    except ValueError as exc:
        raise _InputError(str(exc))
    grid = generate_scenario(spec)
    grid.save(args.out)
    print(f"density={obstacle_density(base, grid):.2f}%")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import BenchSettings, run_benchmark, write_csv
    from .config import load_config
    from .pipeline import PlannerConfig

    cfg = load_config(args.config) if args.config else PlannerConfig()
    if not args.densities or args.trials < 1:
        raise _InputError("need at least one density and one trial")
    settings = BenchSettings(resolution=args.resolution, timing_repeats=args.timing)

    def progress(r):
        if args.verbose:
            print(f"{r.scenario_id}: {'ok' if r.success else 'FAIL'} {r.message}", file=sys.stderr)

    results = run_benchmark(args.densities, args.trials, args.seed, cfg, settings, args.svg_dir, progress)
    write_csv(results, args.out)
    ok = sum(r.success for r in results)
    print(f"trials={len(results)} successes={ok}")
    return EXIT_OK


def cmd_field(args) -> int:
    from .gridmap import FieldMap
    from .svg import render_field_svg

    grid = _load_grid(args.map)
    render_field_svg(FieldMap.build(grid), args.out_svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="resplan", description="Resilient car-like trajectory planning toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("plan", help="plan one query and write the timed trajectory")
    sp.add_argument("--map", required=True)
    sp.add_argument("--start", required=True, type=_pose, help="X,Y,T")
    sp.add_argument("--goal", required=True, type=_pose, help="X,Y,T")
    sp.add_argument("--config", help="flat JSON config (defaults when omitted)")
    sp.add_argument("--out-traj", required=True)
    sp.add_argument("--out-svg")
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("gen", help="generate a random obstacle map")
    sp.add_argument("--size", required=True, type=_size, help="WxH in meters")
    sp.add_argument("--resolution", required=True, type=float)
    sp.add_argument("--density", required=True, type=float, help="percent")
    sp.add_argument("--min-spacing", type=float, default=2.5)
    sp.add_argument("--seed", required=True, type=int)
    sp.add_argument("--start", type=_pose, help="X,Y,T kept clear (default: left middle)")
    sp.add_argument("--goal", type=_pose, help="X,Y,T kept clear (default: right middle)")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("bench", help="run the obstacle-density benchmark")
    sp.add_argument("--densities", type=_float_list, default=[20.0, 30.0, 40.0, 50.0])
    sp.add_argument("--trials", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--svg-dir")
    sp.add_argument("--config")
    sp.add_argument("--resolution", type=float, default=0.1)
    sp.add_argument("--timing", type=int, default=0, metavar="N",
                    help="time N extra planning calls per trial to fill the frequency columns")
    sp.add_argument("-v", "--verbose", action="store_true")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("field", help="render the Voronoi field of a map")
    sp.add_argument("--map", required=True)
    sp.add_argument("--out-svg", required=True)
    sp.set_defaults(func=cmd_field)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PlanFailure as exc:
        print(f"planning failed: {exc}", file=sys.stderr)
        return EXIT_PLAN_FAILURE
    except (_InputError, ConfigError, GridFormatError, DensityUnreachable, IoFailure, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
