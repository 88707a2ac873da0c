"""Resilient planning: straight-line route, feasibility monitor, hybrid A* recovery,
smoothing, goal alignment, time parameterization and an ideal executor."""
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .dubins import connect, shortest_csc
from .errors import ExpansionLimit, NoPath, PlanFailure, SearchFailure
from .gridmap import FieldMap, OccupancyGrid
from .hybrid_astar import (
    FootprintChecker,
    HeuristicWeights,
    PrimitiveTable,
    SearchLimits,
    dense_poses,
    search,
)
from .kinematics import FORWARD, REVERSE, Pose2D, VehicleParams, wrap_angle, wrap_angles
from .smoother import SmoothingWeights, Waypath, descend, resample, vertex_headings


@dataclass(frozen=True)
class GoalAlignmentConfig:
    d_i: float = 1.0
    d_r: float = 0.1
    activation_radius: float = 3.0

    def __post_init__(self):
        if min(self.d_i, self.d_r, self.activation_radius) <= 0:
            raise ValueError("goal-alignment distances must be positive")
        if not self.d_r < self.d_i:
            raise ValueError("d_r must be smaller than d_i")
        if not self.activation_radius > self.d_i:
            raise ValueError("activation_radius must exceed d_i")


@dataclass(frozen=True, eq=False)
class PlanningQuery:
    grid: OccupancyGrid
    start: Pose2D
    goal: Pose2D
    waypoints: Tuple[Pose2D, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "start", Pose2D(*self.start).normalized())
        object.__setattr__(self, "goal", Pose2D(*self.goal).normalized())
        object.__setattr__(self, "waypoints", tuple(Pose2D(*w) for w in self.waypoints))


@dataclass(frozen=True)
class PlannerConfig:
    vehicle: VehicleParams = VehicleParams()
    heuristic: HeuristicWeights = HeuristicWeights()
    limits: SearchLimits = SearchLimits()
    smoothing: SmoothingWeights = SmoothingWeights()
    alignment: GoalAlignmentConfig = GoalAlignmentConfig()
    lambda_v: float = 1.0
    d_obs_max: float = 2.5
    skip_threshold: float = 2.0
    dt: float = 0.05
    recovery: bool = True
    smoothing_enabled: bool = True
    smoothing_spacing: float = 0.25
    backoff: float = 1.0  # recovery search starts this far before the blockage
    rejoin_distance: float = 3.0  # route length the rejoin leg spans past the search target
    target_clearance: float = 1.0  # free route length required past a search target
    max_recoveries: int = 20

    def __post_init__(self):
        for name in ("lambda_v", "d_obs_max", "dt", "smoothing_spacing", "rejoin_distance", "target_clearance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.skip_threshold < 0 or self.backoff < 0:
            raise ValueError("skip_threshold and backoff must be non-negative")
        if self.max_recoveries < 1:
            raise ValueError("max_recoveries must be >= 1")


# -- dense pose paths --------------------------------------------------------


class PosePath:
    """Dense poses with per-sample travel direction.

    ``direction[k]`` is the sign of the motion that arrives at sample ``k``;
    sample 0 copies sample 1. A cusp is a sample where the sign flips.
    """

    __slots__ = ("poses", "direction", "s")

    def __init__(self, poses, direction=None):
        poses = np.array(poses, dtype=float).reshape(-1, 3)
        if len(poses) == 0:
            raise ValueError("a pose path needs at least one pose")
        if direction is None:
            direction = np.full(len(poses), FORWARD, dtype=np.int64)
        direction = np.array(direction, dtype=np.int64)
        if len(direction) > 1:
            direction[0] = direction[1]
        d = np.diff(poses[:, :2], axis=0)
        self.poses = poses
        self.direction = direction
        self.s = np.concatenate([[0.0], np.cumsum(np.hypot(d[:, 0], d[:, 1]))])

    def __len__(self):
        return len(self.poses)

    @property
    def length(self) -> float:
        return float(self.s[-1])

    def pose(self, i) -> Pose2D:
        x, y, th = self.poses[i]
        return Pose2D(float(x), float(y), float(th))

    def index_at(self, s: float) -> int:
        """Last sample whose arc length does not exceed ``s`` (clamped)."""
        return int(np.clip(np.searchsorted(self.s, s, side="right") - 1, 0, len(self) - 1))

    def cusps(self) -> List[int]:
        return [int(k) - 1 for k in np.flatnonzero(np.diff(self.direction[1:]) != 0) + 2]

    def runs(self) -> List[Tuple[int, int]]:
        """Inclusive (first, last) sample ranges of constant direction; cusps are shared."""
        if len(self) == 1:
            return [(0, 0)]
        bounds = [0] + self.cusps() + [len(self) - 1]
        return list(zip(bounds[:-1], bounds[1:]))

    def head(self, i) -> "PosePath":
        return PosePath(self.poses[:i], self.direction[:i]) if i > 0 else None

    @staticmethod
    def join(parts: Sequence[Tuple[np.ndarray, np.ndarray]]) -> "PosePath":
        poses = np.concatenate([p for p, _ in parts if len(p)])
        dirs = np.concatenate([d for p, d in parts if len(p)])
        return PosePath(poses, dirs)


def densify(points: np.ndarray, headings: np.ndarray, step: float) -> np.ndarray:
    """Insert linearly interpolated poses so consecutive samples are <= step apart."""
    out = [np.array([[points[0, 0], points[0, 1], headings[0]]])]
    for a in range(len(points) - 1):
        seg = points[a + 1] - points[a]
        n = max(1, math.ceil(math.hypot(seg[0], seg[1]) / step - 1e-12))
        f = np.arange(1, n + 1) / n
        dth = wrap_angle(headings[a + 1] - headings[a])
        chunk = np.column_stack([points[a, 0] + f * seg[0], points[a, 1] + f * seg[1],
                                 wrap_angles(headings[a] + f * dth)])
        chunk[-1] = (points[a + 1, 0], points[a + 1, 1], headings[a + 1])
        out.append(chunk)
    return np.concatenate(out)


# -- route construction ------------------------------------------------------


def global_path(query: PlanningQuery, skip_threshold: float = 2.0) -> Waypath:
    """Straight lines start -> waypoints -> goal, skipping waypoints within the threshold of the robot."""
    sx, sy = query.start.x, query.start.y
    pts = [(sx, sy)]
    for w in query.waypoints:
        if math.hypot(w.x - sx, w.y - sy) > skip_threshold:
            pts.append((w.x, w.y))
    pts.append((query.goal.x, query.goal.y))
    return Waypath(pts)


def goal_alignment(goal, cfg: GoalAlignmentConfig = GoalAlignmentConfig()):
    """Intermediate pose d_i behind the goal along its heading, and its arrival test."""
    gx, gy, gth = goal
    inter = Pose2D(gx - cfg.d_i * math.cos(gth), gy - cfg.d_i * math.sin(gth), wrap_angle(gth))

    def arrival_test(pose) -> bool:
        return math.hypot(pose[0] - inter.x, pose[1] - inter.y) <= cfg.d_r

    return inter, arrival_test


def _activation_point(points: np.ndarray, goal, radius: float):
    """Where the polyline last enters the activation circle, as (segment index, point)."""
    gx, gy = goal[0], goal[1]
    for a in range(len(points) - 2, -1, -1):
        p, q = points[a], points[a + 1]
        if math.hypot(p[0] - gx, p[1] - gy) <= radius:
            continue
        # p outside, q inside (the polyline ends at the goal): solve |p + u(q-p) - g| = radius
        d = q - p
        f = p - (gx, gy)
        A = d @ d
        B = 2.0 * (f @ d)
        C = f @ f - radius * radius
        u = (-B - math.sqrt(max(B * B - 4 * A * C, 0.0))) / (2 * A)
        return a, p + min(max(u, 0.0), 1.0) * d
    return None


def route_vertices(query: PlanningQuery, route: Waypath, cfg: GoalAlignmentConfig,
                   radius: float = VehicleParams().rho_min) -> List[Pose2D]:
    """Poses the drivable route passes through, with goal alignment applied.

    Interior vertices face their outgoing segment. The route ends A -> I -> goal
    where A is the activation-circle crossing and I the intermediate pose; A is
    dropped when the start is already inside the circle or when the turning
    radius makes the leg through A longer than going straight for I.
    """
    pts = route.points
    goal = query.goal
    inter, _ = goal_alignment(goal, cfg)
    hit = _activation_point(pts, goal, cfg.activation_radius)
    interior = [] if hit is None else list(pts[1:hit[0] + 1]) + [hit[1]]
    nxt = interior[1:] + [np.array([inter.x, inter.y])]
    verts = [query.start]
    for p, q in zip(interior, nxt):
        prev = verts[-1]
        if math.hypot(p[0] - prev[0], p[1] - prev[1]) < 1e-9 or math.hypot(q[0] - p[0], q[1] - p[1]) < 1e-9:
            continue
        verts.append(Pose2D(float(p[0]), float(p[1]), math.atan2(q[1] - p[1], q[0] - p[0])))
    if hit is not None and len(verts) >= 2 and np.allclose(verts[-1][:2], hit[1]):
        # A is a construction point: drop it when passing through it costs a detour (typically a loop)
        prev, a = verts[-2], verts[-1]
        via = shortest_csc(prev, a, radius).length + shortest_csc(a, inter, radius).length
        if shortest_csc(prev, inter, radius).length < via - 1e-9:
            verts.pop()
    verts.append(inter)
    verts.append(goal)
    return verts


def realize(vertices: Sequence, params: VehicleParams, step: float) -> PosePath:
    """Chain forward minimum-radius connections through the vertex poses."""
    parts = [(np.array([vertices[0][:3]], dtype=float), np.array([FORWARD]))]
    for a, b in zip(vertices[:-1], vertices[1:]):
        leg = connect(a, b, params, step)
        parts.append((leg, np.full(len(leg), FORWARD)))
    return PosePath.join(parts)


class Feasibility(NamedTuple):
    feasible: bool
    first_blocked_index: Optional[int]


def _as_pose_path(path, step: float) -> PosePath:
    if isinstance(path, PosePath):
        return path
    pts = path.points if isinstance(path, Waypath) else np.asarray(path, dtype=float).reshape(-1, 2)
    d = np.diff(pts, axis=0)
    if len(d) == 0 or not np.hypot(d[:, 0], d[:, 1]).any():
        return PosePath(np.array([[pts[0, 0], pts[0, 1], 0.0]]))
    rows = []
    for a in range(len(d)):
        L = math.hypot(*d[a])
        if L == 0.0:
            continue
        th = math.atan2(d[a, 1], d[a, 0])
        n = max(1, math.ceil(L / step - 1e-12))
        f = np.arange(0, n) / n
        rows.append(np.column_stack([pts[a, 0] + f * d[a, 0], pts[a, 1] + f * d[a, 1], np.full(n, th)]))
        last = (pts[a + 1, 0], pts[a + 1, 1], th)
    rows.append(np.array([last]))
    return PosePath(np.concatenate(rows))


def check_feasibility(path, grid: OccupancyGrid, params: VehicleParams, checker: FootprintChecker = None,
                      start_index: int = 0) -> Feasibility:
    """Footprint-check every sample (a Waypath is walked at <= 0.5 * resolution, facing each segment)."""
    pp = _as_pose_path(path, 0.5 * grid.resolution)
    if checker is None:
        checker = FootprintChecker(grid, params)
    hits = checker.pose_hits(pp.poses[start_index:])
    if not hits.any():
        return Feasibility(True, None)
    return Feasibility(False, start_index + int(np.argmax(hits)))


# -- time parameterization and execution ---------------------------------------


@dataclass(frozen=True, eq=False)
class TimedTrajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    v: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        if n == 0 or any(len(a) != n for a in (self.x, self.y, self.theta, self.v, self.omega)):
            raise ValueError("trajectory arrays must be non-empty and equally long")
        if self.t[0] != 0.0 or (n > 1 and not (np.diff(self.t) > 0).all()):
            raise ValueError("t must start at 0 and increase strictly")

    def __len__(self):
        return len(self.t)

    @property
    def duration(self) -> float:
        return float(self.t[-1])

    @property
    def samples(self):
        return [(float(t), Pose2D(float(x), float(y), float(th)), float(v), float(w))
                for t, x, y, th, v, w in zip(self.t, self.x, self.y, self.theta, self.v, self.omega)]

    @property
    def poses(self) -> np.ndarray:
        return np.column_stack([self.x, self.y, self.theta])

    @property
    def final_pose(self) -> Pose2D:
        return Pose2D(float(self.x[-1]), float(self.y[-1]), float(self.theta[-1]))


def _profile_length(L, v_max, a_max):
    """Duration and peak speed of a rest-to-rest trapezoid (or triangle) over length L."""
    if L <= 0:
        return 0.0, 0.0
    if L >= v_max * v_max / a_max:
        return L / v_max + v_max / a_max, v_max
    peak = math.sqrt(L * a_max)
    return 2.0 * peak / a_max, peak


def _profile_at(t, L, T, peak, a_max):
    """Distance travelled and speed at times t of the rest-to-rest profile."""
    t_acc = peak / a_max
    s_acc = 0.5 * peak * t_acc
    t = np.asarray(t, dtype=float)
    s = np.where(t <= t_acc, 0.5 * a_max * t * t,
                 np.where(t <= T - t_acc, s_acc + peak * (t - t_acc), L - 0.5 * a_max * (T - t) ** 2))
    v = np.where(t <= t_acc, a_max * t, np.where(t <= T - t_acc, peak, a_max * (T - t)))
    return np.clip(s, 0.0, L), np.clip(v, 0.0, peak)


def time_parameterize(path, params: VehicleParams, dt: float = 0.05) -> TimedTrajectory:
    """Rest-to-rest trapezoidal speed profile per direction run, sampled every dt.

    Each run also gets a sample at its exact end time. omega is the heading rate
    along the path at the sampled speed.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    pp = path if isinstance(path, PosePath) else _as_pose_path(path, 0.05)
    cols = [[] for _ in range(6)]
    t0 = 0.0
    p0 = pp.poses[0]
    if pp.length == 0.0:
        return TimedTrajectory(*(np.array([c]) for c in (0.0, p0[0], p0[1], p0[2], 0.0, 0.0)))
    for r, (a, b) in enumerate(pp.runs()):
        sub = pp.poses[a:b + 1]
        s = pp.s[a:b + 1] - pp.s[a]
        L = float(s[-1])
        sign = float(pp.direction[b])
        T, peak = _profile_length(L, params.v_max, params.a_max)
        if T == 0.0:
            continue
        n = int(math.floor(T / dt - 1e-9))
        tl = np.concatenate([np.arange(0 if not cols[0] else 1, n + 1) * dt, [T]])
        sd, v = _profile_at(tl, L, T, peak, params.a_max)
        idx = np.clip(np.searchsorted(s, sd, side="right") - 1, 0, len(s) - 2)
        ds = s[idx + 1] - s[idx]
        f = np.where(ds > 0, (sd - s[idx]) / np.where(ds > 0, ds, 1.0), 0.0)
        dth = wrap_angles(sub[idx + 1, 2] - sub[idx, 2])
        x = sub[idx, 0] + f * (sub[idx + 1, 0] - sub[idx, 0])
        y = sub[idx, 1] + f * (sub[idx + 1, 1] - sub[idx, 1])
        th = wrap_angles(sub[idx, 2] + f * dth)
        rate = np.where(ds > 0, dth / np.where(ds > 0, ds, 1.0), 0.0)
        for c, vals in zip(cols, (t0 + tl, x, y, th, sign * v, rate * v)):
            c.append(vals)
        t0 += T
    arrays = [np.concatenate(c) for c in cols]
    # pin the terminal pose to the path end exactly
    arrays[1][-1], arrays[2][-1], arrays[3][-1] = pp.poses[-1]
    arrays[4][-1] = arrays[5][-1] = 0.0
    return TimedTrajectory(*arrays)


class ExecutionTrace(NamedTuple):
    total_distance: float
    total_time: float
    control_effort: float
    speed_min: float
    speed_max: float
    final_pose: Pose2D


def execute(traj: TimedTrajectory) -> ExecutionTrace:
    """Ideal tracking: the robot is exactly where the trajectory says."""
    t, v, w = traj.t, traj.v, traj.omega
    if len(t) > 1:
        effort = float(np.trapezoid(v * v + w * w, t))
        dist = float(np.trapezoid(np.abs(v), t))
    else:
        effort = dist = 0.0
    return ExecutionTrace(dist, traj.duration, effort, float(v.min()), float(v.max()), traj.final_pose)


# -- trajectory file -----------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{float(x) + 0.0:.6g}"


def write_trajectory(traj: TimedTrajectory, path) -> None:
    lines = ["t,x,y,theta,v,omega"]
    for row in zip(traj.t, traj.x, traj.y, traj.theta, traj.v, traj.omega):
        lines.append(",".join(_fmt(c) for c in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def read_trajectory(path) -> TimedTrajectory:
    rows = Path(path).read_text(encoding="ascii").splitlines()
    if not rows or rows[0] != "t,x,y,theta,v,omega":
        raise ValueError("not a trajectory file")
    data = np.array([[float(c) for c in r.split(",")] for r in rows[1:]], dtype=float).reshape(-1, 6)
    return TimedTrajectory(*data.T.copy())


# -- resilient planning ----------------------------------------------------------


@dataclass
class RecoveryReport:
    fired: bool = False
    searches: int = 0
    expansions: int = 0
    smoothing_accepted: List[bool] = field(default_factory=list)
    splices: List[Tuple[int, int]] = field(default_factory=list)  # (first, last) sample of each inserted piece
    goal_by_search: bool = False
    alignment_reached: bool = False
    stage_seconds: dict = field(default_factory=lambda: {
        "route": 0.0, "feasibility": 0.0, "search": 0.0, "smoothing": 0.0, "timing": 0.0})
    total_seconds: float = 0.0


class PlanResult(NamedTuple):
    trajectory: TimedTrajectory
    report: RecoveryReport
    path: PosePath


class Planner:
    """Runs :func:`plan_resilient` with one configuration, caching per-grid state."""

    def __init__(self, config: PlannerConfig = PlannerConfig()):
        self.config = config
        self.table = PrimitiveTable(config.vehicle, 0.05)
        self._grid = None
        self._checker = None
        self._fmap = None

    def _prepare(self, grid: OccupancyGrid):
        if grid is not self._grid:
            self._grid = grid
            self._checker = FootprintChecker(grid, self.config.vehicle)
            self._fmap = None
            step = 0.5 * grid.resolution
            if self.table.step != step:
                self.table = PrimitiveTable(self.config.vehicle, step)

    def field_map(self) -> FieldMap:
        if self._fmap is None:
            self._fmap = FieldMap.build(self._grid, self.config.lambda_v, self.config.d_obs_max)
        return self._fmap

    def plan(self, query: PlanningQuery) -> PlanResult:
        return plan_resilient(query, self.config, planner=self)


def _free_from(hits: np.ndarray, i: int, path: PosePath, length: float) -> bool:
    j = path.index_at(path.s[i] + length)
    return not hits[i:j + 1].any()


def _smooth_piece(poses: np.ndarray, dirs: np.ndarray, planner: Planner, cfg: PlannerConfig):
    """Smooth each constant-direction run of a search path; None when the result collides."""
    pp = PosePath(poses, dirs)
    step = 0.5 * planner._grid.resolution
    fmap = planner.field_map()
    out_p = [poses[:1]]
    out_d = [dirs[:1]]
    for a, b in pp.runs():
        sub = poses[a:b + 1]
        sign = int(pp.direction[b])
        pts = resample(sub[:, :2], cfg.smoothing_spacing).points
        if len(pts) >= 3:
            pts = descend(pts, fmap, cfg.smoothing).path.points
        heads = vertex_headings(pts, np.full(len(pts) - 1, sign < 0), first=sub[0, 2], last=sub[-1, 2])
        dense = densify(pts, heads, step)[1:]
        out_p.append(dense)
        out_d.append(np.full(len(dense), sign))
    sm = np.concatenate(out_p)
    if planner._checker.pose_hits(sm).any():
        return None
    return sm, np.concatenate(out_d)


def plan_resilient(query: PlanningQuery, config: PlannerConfig = PlannerConfig(), planner: Planner = None,
                   clock: Callable[[], float] = time.perf_counter) -> PlanResult:
    """Plan along the straight-line route, repairing blocked stretches with hybrid A* + smoothing.

    Raises :class:`PlanFailure` when the start/goal collide, recovery is disabled
    and the route is blocked, or a recovery search fails.
    """
    if planner is None:
        planner = Planner(config)
    cfg = planner.config
    grid = query.grid
    planner._prepare(grid)
    checker = planner._checker
    vp = cfg.vehicle
    step = 0.5 * grid.resolution
    report = RecoveryReport()
    t_begin = clock()

    if not checker.free(query.start):
        raise PlanFailure("start pose is in collision", report=report)
    if not checker.free(query.goal):
        raise PlanFailure("goal pose is in collision", report=report)

    t = clock()
    route = global_path(query, cfg.skip_threshold)
    path = realize(route_vertices(query, route, cfg.alignment, vp.rho_min), vp, step)
    report.stage_seconds["route"] += clock() - t

    locked = 0
    while True:
        t = clock()
        hits = checker.pose_hits(path.poses)
        report.stage_seconds["feasibility"] += clock() - t
        rest = np.flatnonzero(hits[locked:])
        if rest.size == 0:
            break
        blocked = locked + int(rest[0])
        if not cfg.recovery:
            raise PlanFailure(f"route blocked at sample {blocked}; recovery disabled", report=report)
        if report.searches >= cfg.max_recoveries:
            raise PlanFailure("recovery budget exhausted", report=report)
        report.fired = True

        # the last committed pose is free, so a search may always start there
        si = max(locked - 1, 0, path.index_at(path.s[blocked] - cfg.backoff))
        if si == blocked:
            raise PlanFailure("blocked at a committed pose", report=report)
        ti = None
        for k in range(blocked + 1, len(path)):
            if not hits[k] and _free_from(hits, k, path, cfg.target_clearance):
                ti = k
                break
        to_goal = ti is None or path.length - path.s[ti] < cfg.rejoin_distance
        target = query.goal if to_goal else path.pose(ti)

        t = clock()
        report.searches += 1
        try:
            res = search(grid, path.pose(si), target, vp, cfg.heuristic, cfg.limits, checker, planner.table)
        except SearchFailure as exc:
            report.expansions += exc.expansions
            report.stage_seconds["search"] += clock() - t
            report.total_seconds = clock() - t_begin
            raise PlanFailure(f"recovery search failed: {exc}", cause=exc, report=report) from exc
        report.expansions += res.expansions
        report.stage_seconds["search"] += clock() - t

        raw_p, raw_d = dense_poses(res, planner.table)
        piece = None
        if cfg.smoothing_enabled and len(raw_p) > 2:
            t = clock()
            piece = _smooth_piece(raw_p, raw_d, planner, cfg)
            report.stage_seconds["smoothing"] += clock() - t
        report.smoothing_accepted.append(piece is not None)
        seg_p, seg_d = piece if piece is not None else (raw_p, raw_d)

        parts = [(path.poses[:si], path.direction[:si]), (seg_p, seg_d)]
        first = si
        last = si + len(seg_p) - 1
        if to_goal:
            report.goal_by_search = True
            path = PosePath.join(parts)
            locked = len(path)
            report.splices.append((first, last))
            continue
        ri = path.index_at(path.s[ti] + cfg.rejoin_distance)
        leg = connect(seg_p[-1], path.poses[ri], vp, step)
        if len(leg):
            parts.append((leg[:-1], np.full(len(leg) - 1, FORWARD)))
            parts.append((path.poses[ri:], path.direction[ri:]))
        else:
            parts.append((path.poses[ri + 1:], path.direction[ri + 1:]))
        path = PosePath.join(parts)
        report.splices.append((first, last + max(len(leg) - 1, 0)))
        locked = last + 1

    t = clock()
    traj = time_parameterize(path, vp, cfg.dt)
    report.stage_seconds["timing"] += clock() - t
    _, arrived = goal_alignment(query.goal, cfg.alignment)
    report.alignment_reached = bool(any(arrived(p) for p in path.poses))
    report.total_seconds = clock() - t_begin
    return PlanResult(traj, report, path)
