"""Hybrid A* over arc primitives with steering and steering-change penalties."""
import heapq
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional

import numpy as np

from . import kernels
from ._jit import USE_NUMBA
from .errors import ExpansionLimit, NoPath
from .gridmap import OccupancyGrid
from .kinematics import (
    FORWARD,
    REVERSE,
    MotionPrimitive,
    Pose2D,
    VehicleParams,
    arc_offsets,
    control_set,
    transform,
    wrap_angle,
)

THETA_BINS = 72


@dataclass(frozen=True)
class HeuristicWeights:
    lambda_f: float = 1.0
    lambda_b: float = 1.0
    lambda_s: float = 0.5
    lambda_sc: float = 0.01
    lambda_heu: float = 5.0
    eta: float = 1.0001

    def __post_init__(self):
        for name in ("lambda_f", "lambda_b", "lambda_s", "lambda_sc", "lambda_heu"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not self.eta > 1.0:
            raise ValueError("eta must exceed 1")


@dataclass(frozen=True)
class SearchLimits:
    max_expansions: int = 200_000
    goal_xy_tol: float = 0.2
    goal_theta_tol: float = 0.1

    def __post_init__(self):
        if self.max_expansions < 1:
            raise ValueError("max_expansions must be >= 1")
        if self.goal_xy_tol <= 0 or self.goal_theta_tol <= 0:
            raise ValueError("goal tolerances must be positive")


@dataclass(eq=False)
class SearchNode:
    state: Pose2D
    direction: int = 0  # sign of the arriving arc; 0 at the root
    arrived_by: Optional[MotionPrimitive] = None
    parent: Optional["SearchNode"] = None
    g_score: float = 0.0
    f_score: float = 0.0

    @property
    def last_steering(self) -> float:
        return 0.0 if self.arrived_by is None else self.arrived_by.steering


def transition_cost(parent: SearchNode, primitive: MotionPrimitive, weights: HeuristicWeights) -> float:
    a = primitive.arc_length
    d = primitive.steering
    lam = weights.lambda_f if a > 0 else weights.lambda_b
    return (parent.g_score + lam * abs(a) + weights.lambda_s * abs(d) * abs(a)
            + weights.lambda_sc * abs(d - parent.last_steering))


def heuristic_cost(state, goal, weights: HeuristicWeights) -> float:
    """Weighted planar distance; heading is left to the goal test."""
    return weights.lambda_heu * weights.eta * math.hypot(state[0] - goal[0], state[1] - goal[1])


class FootprintChecker:
    """Oriented-rectangle collision queries against one grid.

    ``margin`` pads the rectangle on every side. The clearance early-out never
    changes an answer, it only skips cell scans for poses far from obstacles.
    """

    def __init__(self, grid: OccupancyGrid, params: VehicleParams, margin: float = 0.0, use_clearance: bool = True):
        self.grid = grid
        self.front = params.front_extent + margin
        self.rear = params.rear_overhang + margin
        self.half_w = 0.5 * params.footprint_width + margin
        self.clear = None
        if use_clearance:
            self.clear = kernels.clearance_cells(grid.occupied)
        self.rowcum = kernels.row_prefix(grid.occupied)
        self._args = (grid.occupied, self.clear, grid.origin_x, grid.origin_y, grid.resolution,
                      self.front, self.rear, self.half_w)

    def pose_hits(self, poses: np.ndarray) -> np.ndarray:
        poses = np.atleast_2d(np.asarray(poses, dtype=float))
        return kernels.footprint_hits(*self._args, poses[:, 0], poses[:, 1], poses[:, 2], rowcum=self.rowcum)

    def group_hits(self, poses: np.ndarray, starts, ends) -> np.ndarray:
        return kernels.footprint_hits(*self._args, poses[:, 0], poses[:, 1], poses[:, 2], starts, ends,
                                      rowcum=self.rowcum)

    def free(self, pose) -> bool:
        return not bool(self.pose_hits(np.array([pose[:3]], dtype=float))[0])


def collision_free(state, grid: OccupancyGrid, params: VehicleParams, margin: float = 0.0) -> bool:
    """True iff no occupied cell center lies inside the footprint and the footprint stays on the grid."""
    return FootprintChecker(grid, params, margin, use_clearance=False).free(state)


class PrimitiveTable:
    """Both control sets with their origin-relative samples stacked for batched checks."""

    def __init__(self, params: VehicleParams, step: float):
        self.primitives: List[MotionPrimitive] = control_set(FORWARD, params) + control_set(REVERSE, params)
        chunks = [arc_offsets(p, params, step) for p in self.primitives]
        lens = np.array([len(c) for c in chunks], dtype=np.int64)
        self.ends = np.cumsum(lens)
        self.starts = self.ends - lens
        self.offsets = np.concatenate(chunks)
        self.steering = np.array([p.steering for p in self.primitives])
        self.arc = np.array([p.arc_length for p in self.primitives])
        self.step = step

    def __len__(self):
        return len(self.primitives)


class SearchResult(NamedTuple):
    path: List[tuple]  # (Pose2D, arriving MotionPrimitive or None for the start)
    cost: float
    expansions: int

    @property
    def poses(self) -> List[Pose2D]:
        return [p for p, _ in self.path]

    @property
    def primitives(self) -> List[MotionPrimitive]:
        return [m for _, m in self.path[1:]]


def _bin_key(x, y, th, direction, ox, oy, res):
    tb = int(math.floor((th + math.pi) / (2.0 * math.pi) * THETA_BINS)) % THETA_BINS
    return (int(math.floor((x - ox) / res)), int(math.floor((y - oy) / res)), tb, direction)


def search(grid: OccupancyGrid, start, goal, vparams: VehicleParams,
           weights: HeuristicWeights = HeuristicWeights(), limits: SearchLimits = SearchLimits(),
           checker: FootprintChecker = None, table: PrimitiveTable = None, use_numba: bool = None) -> SearchResult:
    """Best-first search from ``start`` until a popped node meets the goal tolerances.

    ``use_numba`` overrides the global backend choice (both loops return the same path).
    Raises :class:`NoPath` when the open set empties and :class:`ExpansionLimit`
    after ``limits.max_expansions`` expansions.
    """
    start = Pose2D(*start).normalized()
    goal = Pose2D(*goal).normalized()
    if checker is None:
        checker = FootprintChecker(grid, vparams)
    if table is None:
        table = PrimitiveTable(vparams, 0.5 * grid.resolution)
    if not checker.free(start):
        raise NoPath("start pose is in collision", 0)
    if not checker.free(goal):
        raise NoPath("goal pose is in collision", 0)

    lam_dir = np.where(table.arc > 0, weights.lambda_f, weights.lambda_b)
    # cost of each primitive without the steering-change term
    base_cost = lam_dir * np.abs(table.arc) + weights.lambda_s * np.abs(table.steering) * np.abs(table.arc)
    directions = np.where(table.arc > 0, FORWARD, REVERSE).astype(np.int64)
    run = _search_numba if (USE_NUMBA if use_numba is None else use_numba) else _search_python
    return run(grid, start, goal, weights, limits, checker, table, base_cost, directions)


def _search_numba(grid, start, goal, weights, limits, checker, table, base_cost, directions):
    clear = checker.clear
    out = kernels.search_nb(
        checker.rowcum, clear if clear is not None else np.zeros((1, 1)), clear is not None,
        float(grid.origin_x), float(grid.origin_y), float(grid.resolution),
        checker.front, checker.rear, checker.half_w,
        table.offsets, table.starts, table.ends, table.steering, base_cost, directions,
        weights.lambda_sc, weights.lambda_heu * weights.eta,
        start.x, start.y, start.theta, goal.x, goal.y, goal.theta,
        float(limits.goal_xy_tol), float(limits.goal_theta_tol), int(limits.max_expansions))
    status, node, expansions, xs, ys, ths, gs, parents, prims = out
    if status == kernels.SEARCH_LIMIT:
        raise ExpansionLimit(f"no path within {limits.max_expansions} expansions", expansions)
    if status == kernels.SEARCH_EXHAUSTED:
        raise NoPath("open set exhausted", expansions)
    cost = float(gs[node])
    path = []
    while node >= 0:
        k = prims[node]
        path.append((Pose2D(float(xs[node]), float(ys[node]), float(ths[node])),
                     table.primitives[k] if k >= 0 else None))
        node = parents[node]
    path.reverse()
    return SearchResult(path, cost, int(expansions))


def _search_python(grid, start, goal, weights, limits, checker, table, base_cost, directions):
    ox, oy, res = grid.origin_x, grid.origin_y, grid.resolution
    gx, gy, gth = goal
    lam_heu = weights.lambda_heu * weights.eta

    h0 = lam_heu * math.hypot(start.x - gx, start.y - gy)
    root = SearchNode(start, 0, None, None, 0.0, h0)
    counter = 0
    open_heap = [(root.f_score, root.f_score - root.g_score, counter, root)]
    best_g = {_bin_key(*start, 0, ox, oy, res): 0.0}
    closed = set()
    expansions = 0

    while open_heap:
        _, _, _, node = heapq.heappop(open_heap)
        x, y, th = node.state
        key = _bin_key(x, y, th, node.direction, ox, oy, res)
        if key in closed:
            continue
        closed.add(key)
        if math.hypot(x - gx, y - gy) <= limits.goal_xy_tol and abs(wrap_angle(th - gth)) <= limits.goal_theta_tol:
            return _reconstruct(node, expansions)
        if expansions >= limits.max_expansions:
            raise ExpansionLimit(f"no path within {limits.max_expansions} expansions", expansions)
        expansions += 1

        samples = transform(node.state, table.offsets)
        blocked = checker.group_hits(samples, table.starts, table.ends)
        ends = samples[table.ends - 1]
        step_cost = base_cost + weights.lambda_sc * np.abs(table.steering - node.last_steering)
        hs = lam_heu * np.hypot(ends[:, 0] - gx, ends[:, 1] - gy)
        for k in np.flatnonzero(~blocked):
            cx, cy, cth = ends[k]
            d = int(directions[k])
            ckey = _bin_key(cx, cy, cth, d, ox, oy, res)
            if ckey in closed:
                continue
            g = node.g_score + float(step_cost[k])  # same association as the compiled loop
            if g >= best_g.get(ckey, math.inf):
                continue
            best_g[ckey] = g
            h = float(hs[k])
            child = SearchNode(Pose2D(float(cx), float(cy), float(cth)), d, table.primitives[k], node, g, g + h)
            counter += 1
            heapq.heappush(open_heap, (g + h, h, counter, child))

    raise NoPath("open set exhausted", expansions)


def _reconstruct(node: SearchNode, expansions: int) -> SearchResult:
    cost = node.g_score
    path = []
    while node is not None:
        path.append((node.state, node.arrived_by))
        node = node.parent
    path.reverse()
    return SearchResult(path, cost, expansions)


def path_cost(path, weights: HeuristicWeights) -> float:
    """Re-sum transition costs along a returned path."""
    node = SearchNode(path[0][0])
    for pose, prim in path[1:]:
        g = transition_cost(node, prim, weights)
        node = SearchNode(pose, prim.direction, prim, node, g, g)
    return node.g_score


def dense_poses(result: SearchResult, table: PrimitiveTable):
    """Every intermediate pose of a search result, with the travel direction of each sample.

    Samples are built with the same offsets the search checked, so they are
    collision-free exactly when the search says so.
    """
    index = {p: i for i, p in enumerate(table.primitives)}
    poses = [np.array([result.path[0][0]], dtype=float)]
    dirs = [np.array([0], dtype=np.int64)]
    for (prev, _), (_, prim) in zip(result.path[:-1], result.path[1:]):
        k = index[prim]
        seg = transform(prev, table.offsets[table.starts[k]:table.ends[k]])
        poses.append(seg)
        dirs.append(np.full(len(seg), prim.direction, dtype=np.int64))
    d = np.concatenate(dirs)
    if len(d) > 1:
        d[0] = d[1]
    return np.concatenate(poses), d
