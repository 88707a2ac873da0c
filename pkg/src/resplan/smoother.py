"""Gradient-descent smoothing against the Voronoi field, a curvature bound and a displacement penalty."""
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple

import numpy as np

from . import kernels
from .errors import DegenerateSegment, OutOfBounds
from .gridmap import FieldMap
from .kinematics import wrap_angles

CURVATURE_MODES = ("literal", "hinge")


@dataclass(frozen=True)
class SmoothingWeights:
    lambda_obs: float = 0.5
    lambda_cur: float = 0.3
    lambda_path: float = 0.2
    k_max: float = 1.0 / 1.6
    max_iters: int = 200
    initial_step: float = 0.1
    min_step: float = 1e-4
    curvature_mode: str = "literal"
    fd_step: float = 1e-6

    def __post_init__(self):
        if min(self.lambda_obs, self.lambda_cur, self.lambda_path) < 0:
            raise ValueError("weights must be non-negative")
        if self.k_max <= 0:
            raise ValueError("k_max must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 < self.min_step <= self.initial_step:
            raise ValueError("need 0 < min_step <= initial_step")
        if self.curvature_mode not in CURVATURE_MODES:
            raise ValueError(f"curvature_mode must be one of {CURVATURE_MODES}")

    @property
    def hinge(self) -> bool:
        return self.curvature_mode == "hinge"


class Waypath:
    """Immutable ordered (x, y) points."""

    __slots__ = ("_points",)

    def __init__(self, points):
        pts = np.array(points, dtype=float).reshape(-1, 2)
        if len(pts) < 2:
            raise ValueError("a path needs at least two points")
        pts.setflags(write=False)
        self._points = pts

    @property
    def points(self) -> np.ndarray:
        return self._points

    def __len__(self):
        return len(self._points)

    def __eq__(self, other):
        return isinstance(other, Waypath) and np.array_equal(self._points, other._points)

    def __repr__(self):
        return f"Waypath({len(self)} points)"

    def length(self) -> float:
        d = np.diff(self._points, axis=0)
        return float(np.hypot(d[:, 0], d[:, 1]).sum())


def _pts(path) -> np.ndarray:
    return path.points if isinstance(path, Waypath) else np.asarray(path, dtype=float).reshape(-1, 2)


def _check_bounds(P: np.ndarray, fmap: FieldMap):
    x0, y0, x1, y1 = fmap.grid.extent
    bad = (P[:, 0] < x0) | (P[:, 0] > x1) | (P[:, 1] < y0) | (P[:, 1] > y1)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise OutOfBounds(f"point {i} ({P[i, 0]:.3f}, {P[i, 1]:.3f}) is outside the grid")


def cost_obs(path, fmap: FieldMap) -> float:
    P = _pts(path)
    _check_bounds(P, fmap)
    return float(fmap.field_at(P).sum())


def vertex_curvatures(path) -> np.ndarray:
    """Wrapped heading change at each interior vertex over the incoming segment length."""
    P = _pts(path)
    d = np.diff(P, axis=0)
    seg = np.hypot(d[:, 0], d[:, 1])
    if (seg == 0).any():
        raise DegenerateSegment(f"points {int(np.flatnonzero(seg == 0)[0])} and next coincide")
    heading = np.arctan2(d[:, 1], d[:, 0])
    return wrap_angles(np.diff(heading)) / seg[:-1]


def cost_curvature(path, k_max: float, mode: str = "literal") -> float:
    k = vertex_curvatures(path)
    if mode == "hinge":
        return float((np.maximum(np.abs(k) - k_max, 0.0) ** 2).sum())
    return float(((k - np.sign(k) * k_max) ** 2).sum())


def cost_path(path) -> float:
    P = _pts(path)
    if len(P) < 3:
        raise ValueError("cost_path needs at least three points")
    dd = P[2:] - 2.0 * P[1:-1] + P[:-2]
    return float((dd * dd).sum())


def total_cost(path, fmap: FieldMap, w: SmoothingWeights) -> float:
    return (w.lambda_obs * cost_obs(path, fmap) + w.lambda_cur * cost_curvature(path, w.k_max, w.curvature_mode)
            + w.lambda_path * cost_path(path))


class SmoothingResult(NamedTuple):
    path: Waypath
    costs: List[float]  # accepted objective values, starting with the input's
    iterations: int


def _kernel_args(fmap: FieldMap, w: SmoothingWeights):
    return (*fmap.kernel_args, w.lambda_obs, w.lambda_cur, w.lambda_path, w.k_max, w.hinge)


def objective(P: np.ndarray, fmap: FieldMap, w: SmoothingWeights) -> float:
    """Same value as :func:`total_cost`, through the accelerated kernel and without validation."""
    return float(kernels.smooth_cost(np.ascontiguousarray(P, dtype=float), *_kernel_args(fmap, w)))


def gradient(P: np.ndarray, fmap: FieldMap, w: SmoothingWeights, movable=None) -> np.ndarray:
    P = np.ascontiguousarray(P, dtype=float)
    if movable is None:
        movable = np.ones(len(P), dtype=bool)
        movable[0] = movable[-1] = False
    return kernels.smooth_grad(P, np.ascontiguousarray(movable, dtype=np.bool_), *_kernel_args(fmap, w), w.fd_step)


def descend(path, fmap: FieldMap, w: SmoothingWeights = SmoothingWeights(), anchors=None) -> SmoothingResult:
    """Backtracking gradient descent on interior points.

    The step is a maximum per-point displacement in meters, halved from
    ``initial_step`` down to ``min_step`` until the objective drops and no point
    enters an occupied cell. ``anchors`` marks extra fixed indices (e.g. cusps).
    """
    P = np.array(_pts(path), dtype=float)
    _check_bounds(P, fmap)
    n = len(P)
    movable = np.ones(n, dtype=bool)
    movable[0] = movable[-1] = False
    if anchors is not None:
        movable[np.asarray(anchors, dtype=np.int64)] = False
    src = path if isinstance(path, Waypath) else Waypath(P)
    J = objective(P, fmap, w)
    costs = [J]
    if n < 3 or not movable.any():
        return SmoothingResult(src, costs, 0)
    grid = fmap.grid
    step = w.initial_step
    it = 0
    for it in range(1, w.max_iters + 1):
        G = gradient(P, fmap, w, movable)
        gmax = float(np.hypot(G[:, 0], G[:, 1]).max())
        if not gmax > 1e-12:
            it -= 1
            break
        direction = -G / gmax
        accepted = False
        while step >= w.min_step:
            Q = P + step * direction
            if not grid.points_occupied(Q[movable]).any():
                Jq = objective(Q, fmap, w)
                if Jq < J:
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            it -= 1
            break
        P, J = Q, Jq
        costs.append(J)
        step = min(2.0 * step, w.initial_step)
    if len(costs) == 1:
        return SmoothingResult(src, costs, 0)
    return SmoothingResult(Waypath(P), costs, it)


def smooth(path, fmap: FieldMap, w: SmoothingWeights = SmoothingWeights(), anchors=None) -> Waypath:
    return descend(path, fmap, w, anchors).path


def resample(path, spacing: float) -> Waypath:
    """Equal arc-length subdivision with ``ceil(length / spacing)`` segments; endpoints kept exactly."""
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    P = _pts(path)
    d = np.diff(P, axis=0)
    seg = np.hypot(d[:, 0], d[:, 1])
    keep = np.concatenate([[True], seg > 0])
    P, seg = P[keep], seg[seg > 0]
    total = float(seg.sum())
    if total == 0.0:
        return Waypath([P[0], P[-1]])
    n = max(1, math.ceil(total / spacing - 1e-9))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    t = np.linspace(0.0, total, n + 1)
    out = np.column_stack([np.interp(t, s, P[:, 0]), np.interp(t, s, P[:, 1])])
    out[0], out[-1] = P[0], P[-1]
    return Waypath(out)


def segment_headings(points: np.ndarray, reverse=None) -> np.ndarray:
    """Vehicle heading over each segment; ``reverse[i]`` flips segment ``i`` by pi."""
    P = _pts(points)
    d = np.diff(P, axis=0)
    h = np.arctan2(d[:, 1], d[:, 0])
    if reverse is not None:
        h = np.where(np.asarray(reverse, dtype=bool), h + math.pi, h)
    return wrap_angles(h)


def vertex_headings(points: np.ndarray, reverse=None, first=None, last=None) -> np.ndarray:
    """Per-point heading: circular mean of the adjacent segments, endpoints optionally pinned."""
    h = segment_headings(points, reverse)
    n = len(h) + 1
    out = np.empty(n)
    out[0] = h[0] if first is None else first
    out[-1] = h[-1] if last is None else last
    if n > 2:
        a, b = h[:-1], h[1:]
        out[1:-1] = wrap_angles(a + 0.5 * wrap_angles(b - a))
    return out
