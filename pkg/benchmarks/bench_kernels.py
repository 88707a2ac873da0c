"""Compiled vs numpy kernels on one generated scenario.

    python3 benchmarks/bench_kernels.py [--repeats N] [--density D] [--seed S]

Each kernel is warmed once (JIT compile or cache load) and then timed as the
best of N runs. Results are checked for agreement before timing is reported.
"""
import argparse
import time

import numpy as np

from resplan import kernels
from resplan.gridmap import FieldMap, OccupancyGrid
from resplan.hybrid_astar import FootprintChecker, PrimitiveTable, search
from resplan.kinematics import Pose2D, VehicleParams
from resplan.scenarios import ScenarioSpec, derive_seed, generate_scenario


def best_of(fn, repeats):
    fn()
    times = []
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--density", type=float, default=30.0)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args(argv)

    base = OccupancyGrid.empty(240, 120, 0.1)
    grid = generate_scenario(ScenarioSpec(seed=derive_seed(args.seed, args.density, 0), base_grid=base,
                                          target_density=args.density))
    occ = grid.occupied
    vp = VehicleParams()
    fmap = FieldMap.build(grid)
    checker = FootprintChecker(grid, vp)
    table = PrimitiveTable(vp, 0.05)
    rng = np.random.default_rng(0)

    d2, sr, sc = kernels.edt_nb(occ)
    basins = (sr * 7 + sc) % 5  # any basin labelling exercises the edge rule
    poses = np.column_stack([rng.uniform(1, 23, 4000), rng.uniform(1, 11, 4000), rng.uniform(-3.1, 3.1, 4000)])
    starts = np.arange(len(poses), dtype=np.int64)
    ends = starts + 1
    fp_args = (checker.clear, True, 0.0, 0.0, 0.1, checker.front, checker.rear, checker.half_w,
               poses[:, 0].copy(), poses[:, 1].copy(), poses[:, 2].copy(), starts, ends)
    P = np.column_stack([np.linspace(2, 22, 81), 6 + 0.3 * np.sin(np.linspace(0, 6, 81))])
    movable = np.ones(len(P), dtype=bool)
    movable[[0, -1]] = False
    sm_args = (*fmap.kernel_args, 0.5, 0.3, 0.2, 1 / 1.6, False, 1e-6)

    cases = [
        ("distance transform", lambda: kernels.edt_nb(occ), lambda: kernels.edt_np(occ),
         lambda a, b: np.array_equal(a[0], b[0])),
        ("voronoi edges", lambda: kernels.gvd_edges_nb(occ, basins, d2, sr, sc, kernels.SQRT2),
         lambda: kernels.gvd_edges_np(occ, basins, d2, sr, sc, kernels.SQRT2), np.array_equal),
        ("footprint (4000 poses)", lambda: kernels.footprint_hits_nb(checker.rowcum, *fp_args),
         lambda: kernels.footprint_hits_np(occ, *fp_args), np.array_equal),
        ("smoothing gradient", lambda: kernels.smooth_grad_nb(P, movable, *sm_args),
         lambda: kernels.smooth_grad_np(P, movable, *sm_args), lambda a, b: np.allclose(a, b, atol=1e-6)),
    ]
    start, goal = Pose2D(2.0, 6.0, 0.0), Pose2D(22.0, 6.0, 0.0)
    if checker.free(start) and checker.free(goal):
        cases.append(("hybrid A* search",
                      lambda: search(grid, start, goal, vp, checker=checker, table=table, use_numba=True),
                      lambda: search(grid, start, goal, vp, checker=checker, table=table, use_numba=False),
                      lambda a, b: a.cost == b.cost and a.expansions == b.expansions))

    print(f"{'kernel':<24}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}  agree")
    for name, fast, slow, same in cases:
        agree = same(fast(), slow())
        tf = best_of(fast, args.repeats)
        ts = best_of(slow, max(1, args.repeats // 2))
        print(f"{name:<24}{tf * 1e3:>12.2f}{ts * 1e3:>12.2f}{ts / tf:>10.1f}  {agree}")


if __name__ == "__main__":
    main()
