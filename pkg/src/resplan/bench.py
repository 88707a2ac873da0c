"""Obstacle-density benchmark: seeded scenarios, resilient planning, per-trial metrics and CSV output."""
import dataclasses
import math
import time
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy import ndimage
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import DensityUnreachable, NoReferencePath, PlanFailure
from .gridmap import OccupancyGrid
from .kinematics import Pose2D, VehicleParams, wrap_angle
from .pipeline import Planner, PlannerConfig, PlanningQuery, execute
from .scenarios import ScenarioSpec, derive_seed, generate_scenario, splitmix64

CSV_HEADER = "density,trial,success,distance_m,time_s,effort,v_min,v_max,freq_hz_mean,freq_hz_sd,path_eff,recovery_fired"
METRICS = ("distance_m", "time_s", "effort", "v_min", "v_max", "freq_hz_mean", "freq_hz_sd", "path_eff")
GENERATION_RETRIES = 8
XY_TOL = 0.2
YAW_TOL = 0.1


@dataclasses.dataclass(frozen=True)
class BenchSettings:
    """Map and protocol for one benchmark run."""
    width_m: float = 24.0
    height_m: float = 12.0
    resolution: float = 0.1
    start: Pose2D = Pose2D(2.0, 6.0, 0.0)
    goal: Pose2D = Pose2D(22.0, 6.0, 0.0)
    min_spacing: float = 2.5
    corridor_margin: float = 0.4  # guaranteed free width beyond the footprint width
    timing_repeats: int = 0  # plan_resilient calls timed per trial; 0 leaves the frequency columns NaN

    def base_grid(self) -> OccupancyGrid:
        w = int(round(self.width_m / self.resolution))
        h = int(round(self.height_m / self.resolution))
        return OccupancyGrid.empty(w, h, self.resolution)


@dataclasses.dataclass
class ScenarioResult:
    density: float
    trial: int
    seed: int
    success: bool
    traverse_distance: float = math.nan
    traverse_time: float = math.nan
    control_effort: float = math.nan
    speed_min: float = math.nan
    speed_max: float = math.nan
    planning_frequency_mean: float = math.nan
    planning_frequency_sd: float = math.nan
    path_efficiency: float = math.nan
    recovery_fired: bool = False
    searches: int = 0
    message: str = ""
    path: object = dataclasses.field(default=None, repr=False, compare=False)  # PosePath of a successful plan

    @property
    def scenario_id(self) -> str:
        return f"d{self.density:g}-t{self.trial}"


# -- path efficiency ------------------------------------------------------------


def _grid_graph(free: np.ndarray, res: float):
    H, W = free.shape
    idx = np.arange(H * W).reshape(H, W)
    rows, cols, wts = [], [], []
    for dj, di, w in ((0, 1, 1.0), (1, 0, 1.0), (1, 1, math.sqrt(2.0)), (1, -1, math.sqrt(2.0))):
        a = free[max(0, -dj):H - max(0, dj), max(0, -di):W - max(0, di)]
        b = free[max(0, dj):H + min(0, dj), max(0, di):W + min(0, di)]
        ia = idx[max(0, -dj):H - max(0, dj), max(0, -di):W - max(0, di)]
        ib = idx[max(0, dj):H + min(0, dj), max(0, di):W + min(0, di)]
        ok = a & b
        rows.append(ia[ok])
        cols.append(ib[ok])
        wts.append(np.full(int(ok.sum()), w * res))
    r, c, w = np.concatenate(rows), np.concatenate(cols), np.concatenate(wts)
    return coo_matrix((w, (r, c)), shape=(H * W, H * W)).tocsr()


def shortest_reference_length(grid: OccupancyGrid, start, goal, params: VehicleParams = VehicleParams()) -> float:
    """8-connected shortest path between the start and goal cells on the footprint-inflated grid.

    Cells within half the footprint width of an obstacle (center to center) are blocked.
    """
    d2 = ndimage.distance_transform_edt(~grid.occupied) if grid.occupied.any() else None
    free = ~grid.occupied
    if d2 is not None:
        free &= d2 * grid.resolution > 0.5 * params.footprint_width
    si, sj = grid.cell_of(start[0], start[1])
    gi, gj = grid.cell_of(goal[0], goal[1])
    if not (free[sj, si] and free[gj, gi]):
        raise NoReferencePath("start or goal lies in the inflated obstacle region")
    W = grid.width
    dist = dijkstra(_grid_graph(free, grid.resolution), directed=False, indices=sj * W + si)
    length = float(dist[gj * W + gi])
    if not math.isfinite(length):
        raise NoReferencePath("the inflated grid separates start from goal")
    return length


def path_efficiency(actual_length: float, grid: OccupancyGrid, start, goal,
                    params: VehicleParams = VehicleParams(), reference: Optional[float] = None) -> float:
    """Shortest reference length over the length actually driven."""
    if not actual_length > 0:
        raise ValueError("actual_length must be positive")
    if reference is None:
        reference = shortest_reference_length(grid, start, goal, params)
    return reference / actual_length


# -- benchmark ------------------------------------------------------------------


def scenario_for(master_seed: int, density: float, trial: int, settings: BenchSettings, vehicle: VehicleParams):
    """Generated grid and the seed that produced it.

    A seed whose generation stalls below the density band is replaced by
    ``splitmix64(seed ^ attempt)``, so retries stay reproducible.
    """
    base = settings.base_grid()
    seed = derive_seed(master_seed, density, trial)
    last = None
    for attempt in range(GENERATION_RETRIES):
        s = seed if attempt == 0 else splitmix64(seed ^ attempt)
        spec = ScenarioSpec(seed=s, base_grid=base, target_density=density, min_spacing=settings.min_spacing,
                            start=settings.start, goal=settings.goal,
                            corridor=vehicle.footprint_width + settings.corridor_margin, vehicle=vehicle)
        try:
            return generate_scenario(spec), s
        except DensityUnreachable as exc:
            last = exc
    raise last


def run_trial(grid: OccupancyGrid, density: float, trial: int, seed: int, settings: BenchSettings,
              planner: Planner, clock: Callable[[], float] = time.perf_counter) -> ScenarioResult:
    query = PlanningQuery(grid, settings.start, settings.goal)
    try:
        res = planner.plan(query)
    except PlanFailure as exc:
        rep = exc.report
        return ScenarioResult(density, trial, seed, False, recovery_fired=bool(rep and rep.fired),
                              searches=rep.searches if rep else 0, message=str(exc))
    trace = execute(res.trajectory)
    fp = trace.final_pose
    g = settings.goal
    reached = (math.hypot(fp.x - g.x, fp.y - g.y) <= XY_TOL and abs(wrap_angle(fp.theta - g.theta)) <= YAW_TOL)
    out = ScenarioResult(density, trial, seed, reached, recovery_fired=res.report.fired,
                         searches=res.report.searches, message="" if reached else "final pose outside tolerance",
                         path=res.path)
    if not reached:
        return out
    out.traverse_distance = trace.total_distance
    out.traverse_time = trace.total_time
    out.control_effort = trace.control_effort
    out.speed_min = trace.speed_min
    out.speed_max = trace.speed_max
    try:
        out.path_efficiency = path_efficiency(trace.total_distance, grid, settings.start, g,
                                              planner.config.vehicle)
    except NoReferencePath:
        pass
    if settings.timing_repeats > 0:
        freqs = []
        for _ in range(settings.timing_repeats):
            t = clock()
            planner.plan(query)
            freqs.append(1.0 / max(clock() - t, 1e-9))
        out.planning_frequency_mean = float(np.mean(freqs))
        out.planning_frequency_sd = float(np.std(freqs))
    return out


def run_benchmark(densities: Sequence[float], trials: int, seed: int, config: PlannerConfig = PlannerConfig(),
                  settings: BenchSettings = BenchSettings(), svg_dir=None,
                  progress: Callable[[ScenarioResult], None] = None) -> List[ScenarioResult]:
    """Every (density, trial) pair in order; failures are recorded, never raised."""
    if not densities or trials < 1:
        raise ValueError("need at least one density and one trial")
    planner = Planner(config)
    results = []
    for density in densities:
        for trial in range(trials):
            try:
                grid, s = scenario_for(seed, density, trial, settings, config.vehicle)
            except DensityUnreachable as exc:
                r = ScenarioResult(float(density), trial, derive_seed(seed, density, trial), False, message=str(exc))
                results.append(r)
                continue
            r = run_trial(grid, float(density), trial, s, settings, planner)
            results.append(r)
            if svg_dir is not None:
                _render_trial(grid, r, settings, svg_dir)
            if progress is not None:
                progress(r)
    return results


def _render_trial(grid, result: ScenarioResult, settings: BenchSettings, svg_dir):
    from .svg import render_svg

    out = Path(svg_dir)
    out.mkdir(parents=True, exist_ok=True)
    trajs = [result.path] if result.path is not None else []
    render_svg(grid, trajs, out / f"{result.scenario_id}.svg", start=settings.start, goal=settings.goal)


# -- CSV ------------------------------------------------------------------------


def _num(x: float) -> str:
    return "NaN" if not math.isfinite(x) else f"{x + 0.0:.4f}"


def _row_values(r: ScenarioResult):
    return (r.traverse_distance, r.traverse_time, r.control_effort, r.speed_min, r.speed_max,
            r.planning_frequency_mean, r.planning_frequency_sd, r.path_efficiency)


def result_row(r: ScenarioResult) -> str:
    cells = [_num(r.density), str(r.trial), "1" if r.success else "0"]
    cells += [_num(v) for v in _row_values(r)]
    cells.append("1" if r.recovery_fired else "0")
    return ",".join(cells)


def aggregate_row(rows: Sequence[ScenarioResult]) -> str:
    """``mean``-trial row: success and recovery rates, then mean+/-sd of each metric.

    Statistics use the 4-decimal values written in the trial rows (population sd over
    the finite entries), so they recompute exactly from the file.
    """
    density = rows[0].density
    cells = [_num(density), "mean", _num(sum(r.success for r in rows) / len(rows))]
    for k in range(len(METRICS)):
        vals = [float(_num(_row_values(r)[k])) for r in rows]
        vals = [v for v in vals if math.isfinite(v)]
        cells.append(f"{_num(float(np.mean(vals)))}+/-{_num(float(np.std(vals)))}" if vals else "NaN")
    cells.append(_num(sum(r.recovery_fired for r in rows) / len(rows)))
    return ",".join(cells)


def results_csv(results: Sequence[ScenarioResult]) -> str:
    lines = [CSV_HEADER]
    groups = {}
    for r in results:
        groups.setdefault(r.density, []).append(r)
    for density, rows in groups.items():
        lines.extend(result_row(r) for r in rows)
        lines.append(aggregate_row(rows))
    return "\n".join(lines) + "\n"


def write_csv(results: Sequence[ScenarioResult], path) -> None:
    Path(path).write_text(results_csv(results), encoding="ascii", newline="\n")


def success_rates(results: Sequence[ScenarioResult]) -> dict:
    out = {}
    for r in results:
        n, k = out.get(r.density, (0, 0))
        out[r.density] = (n + 1, k + int(r.success))
    return {d: k / n for d, (n, k) in out.items()}
