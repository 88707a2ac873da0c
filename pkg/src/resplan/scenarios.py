"""Seeded random obstacle fields at a controlled density."""
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import kernels
from .errors import DensityUnreachable
from .gridmap import EIGHT_CONNECTED, OccupancyGrid, obstacle_density
from .kinematics import Pose2D, VehicleParams

MASK64 = (1 << 64) - 1
MAX_ATTEMPTS = 10_000
ANCHOR_PROBABILITY = 0.9


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, density: float, trial: int) -> int:
    """Trial seed: splitmix64 chained over master, density in hundredths of a percent, trial."""
    h = splitmix64(master & MASK64)
    h = splitmix64(h ^ (int(round(density * 100)) & MASK64))
    return splitmix64(h ^ (trial & MASK64))


@dataclass(frozen=True, eq=False)
class ScenarioSpec:
    seed: int
    base_grid: OccupancyGrid
    target_density: float
    min_spacing: float = 2.5
    start: Pose2D = Pose2D(2.0, 6.0, 0.0)
    goal: Pose2D = Pose2D(22.0, 6.0, 0.0)
    side_min: float = 0.5
    side_max: float = 1.5
    corridor: float = 1.14  # free width kept open between start and goal
    vehicle: VehicleParams = VehicleParams()

    def __post_init__(self):
        if not 0 < self.target_density < 100:
            raise ValueError("target_density must lie in (0, 100)")
        if self.min_spacing <= 0:
            raise ValueError("min_spacing must be positive")
        if not 0 < self.side_min <= self.side_max:
            raise ValueError("need 0 < side_min <= side_max")


def _footprint_distance(cx, cy, pose, vp: VehicleParams) -> np.ndarray:
    """Distance from points to the footprint rectangle at ``pose`` (0 inside)."""
    c, s = math.cos(pose[2]), math.sin(pose[2])
    dx, dy = cx - pose[0], cy - pose[1]
    lon = dx * c + dy * s
    lat = -dx * s + dy * c
    mid = 0.5 * (vp.front_extent - vp.rear_overhang)
    ex = np.maximum(np.abs(lon - mid) - 0.5 * vp.footprint_length, 0.0)
    ey = np.maximum(np.abs(lat) - 0.5 * vp.footprint_width, 0.0)
    return np.hypot(ex, ey)


def _cell_centers(grid: OccupancyGrid):
    res = grid.resolution
    xs = grid.origin_x + (np.arange(grid.width) + 0.5) * res
    ys = grid.origin_y + (np.arange(grid.height) + 0.5) * res
    return np.meshgrid(xs, ys)


def _connected(occ: np.ndarray, res: float, half_width: float, a, b) -> bool:
    """Is there an 8-connected chain of cells with clearance >= half_width from a to b?

    Clearance counts both obstacles and the map border.
    """
    H, W = occ.shape
    padded = np.pad(occ, 1, constant_values=True)
    d2, _, _ = kernels.edt(padded)
    clear = np.sqrt(d2[1:-1, 1:-1]) * res
    # the border cells sit half a cell outside the map
    ok = clear >= half_width + 0.5 * res
    ok[a[1], a[0]] = ok[b[1], b[0]] = True
    labels, _ = ndimage.label(ok, structure=EIGHT_CONNECTED)
    return labels[a[1], a[0]] != 0 and labels[a[1], a[0]] == labels[b[1], b[0]]


def generate_scenario(spec: ScenarioSpec) -> OccupancyGrid:
    """Place axis-aligned rectangles until the density target is met.

    A rectangle that overlaps or touches exactly one existing obstacle merges
    with it; otherwise it must keep ``min_spacing`` (cell-center metric) from
    every obstacle. Distinct obstacles therefore stay ``min_spacing`` apart.
    Placements that would push density past the target band or cut the
    start-goal corridor are rejected.
    """
    base = spec.base_grid
    res = base.resolution
    occ = base.occupied.copy()
    H, W = occ.shape
    rng = np.random.default_rng(spec.seed & MASK64)
    cx, cy = _cell_centers(base)
    vp = spec.vehicle
    keep_out = np.zeros_like(occ)
    for pose in (spec.start, spec.goal):
        keep_out |= _footprint_distance(cx, cy, pose, vp) < spec.min_spacing
    a_cell = base.cell_of(spec.start.x, spec.start.y)
    b_cell = base.cell_of(spec.goal.x, spec.goal.y)
    limit2 = (spec.min_spacing / res) ** 2
    free_before = int((~base.occupied).sum())
    lo, hi = spec.target_density - 0.25, spec.target_density + 2.0
    x_max, y_max = base.origin_x + W * res, base.origin_y + H * res

    def density(n_occ):
        return 100.0 * (n_occ - int(base.occupied.sum())) / free_before

    def refresh(occ):
        labels, n_comp = ndimage.label(occ, structure=EIGHT_CONNECTED)
        d2, sr, sc = kernels.edt(occ)
        edge = occ & ~ndimage.binary_erosion(occ, structure=EIGHT_CONNECTED, border_value=1)
        return labels, n_comp, d2, sr, sc, np.nonzero(edge), {}

    labels, n_comp, d2, sr, sc, edge, others_d2 = refresh(occ)
    n_occ = int(occ.sum())
    for _ in range(MAX_ATTEMPTS):
        if density(n_occ) >= lo:
            break
        w = rng.uniform(spec.side_min, spec.side_max)
        h = rng.uniform(spec.side_min, spec.side_max)
        if n_comp and rng.random() < ANCHOR_PROBABILITY:
            # grow an existing obstacle: the rectangle covers one of its boundary cells
            k = rng.integers(len(edge[0]))
            ax, ay = cx[0, edge[1][k]], cy[edge[0][k], 0]
            x0 = min(max(rng.uniform(ax - w, ax), base.origin_x), x_max - w)
            y0 = min(max(rng.uniform(ay - h, ay), base.origin_y), y_max - h)
        else:
            x0 = rng.uniform(base.origin_x, x_max - w)
            y0 = rng.uniform(base.origin_y, y_max - h)
        # cells whose centers fall inside the rectangle
        i0 = max(0, math.ceil((x0 - base.origin_x) / res - 0.5))
        i1 = min(W - 1, math.floor((x0 + w - base.origin_x) / res - 0.5))
        j0 = max(0, math.ceil((y0 - base.origin_y) / res - 0.5))
        j1 = min(H - 1, math.floor((y0 + h - base.origin_y) / res - 0.5))
        if i1 < i0 or j1 < j0:
            continue
        box = (slice(j0, j1 + 1), slice(i0, i1 + 1))
        if keep_out[box].any():
            continue
        ring = (slice(max(j0 - 1, 0), j1 + 2), slice(max(i0 - 1, 0), i1 + 2))
        touching = set(np.unique(labels[ring]).tolist()) - {0}
        if len(touching) > 1:
            continue
        close = d2[box] < limit2
        close_labels = set(np.unique(labels[sr[box][close], sc[box][close]]).tolist()) if close.any() else set()
        if not close_labels <= touching:
            continue
        if touching:
            # a second obstacle can hide behind the nearest one; measure it directly
            (keep,) = touching
            if keep not in others_d2:
                others = occ & (labels != keep)
                others_d2[keep] = kernels.edt(others)[0] if others.any() else None
            od2 = others_d2[keep]
            if od2 is not None and (od2[box] < limit2).any():
                continue
        added = int((~occ[box]).sum())
        if density(n_occ + added) > hi:
            continue
        trial = occ.copy()
        trial[box] = True
        if not _connected(trial, res, 0.5 * spec.corridor, a_cell, b_cell):
            continue
        occ = trial
        n_occ += added
        labels, n_comp, d2, sr, sc, edge, others_d2 = refresh(occ)
    if density(n_occ) >= lo:
        return base.with_occupied(occ)
    raise DensityUnreachable(
        f"reached {density(n_occ):.1f}% of {spec.target_density}% "
        f"after {MAX_ATTEMPTS} placements")
