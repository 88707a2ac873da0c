"""Occupancy grids, distance/Voronoi maps, the Voronoi field and environment metrics."""
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from . import kernels
from .errors import (
    DimensionMismatch,
    EmptyMap,
    GridFormatError,
    InsufficientObstacles,
    NoFreeSpace,
    NoVoronoiEdge,
    OutOfBounds,
)

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    """Row ``j`` covers world y in ``[origin_y + j*res, origin_y + (j+1)*res)``; row 0 is the lowest."""

    occupied: np.ndarray
    resolution: float
    origin_x: float = 0.0
    origin_y: float = 0.0

    def __post_init__(self):
        occ = np.ascontiguousarray(self.occupied, dtype=bool)
        if occ.ndim != 2 or occ.shape[0] == 0 or occ.shape[1] == 0:
            raise ValueError("occupancy must be a non-empty 2-D array")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        occ.setflags(write=False)
        object.__setattr__(self, "occupied", occ)

    @classmethod
    def empty(cls, width: int, height: int, resolution: float, origin_x=0.0, origin_y=0.0):
        return cls(np.zeros((height, width), dtype=bool), resolution, origin_x, origin_y)

    @property
    def width(self) -> int:
        return self.occupied.shape[1]

    @property
    def height(self) -> int:
        return self.occupied.shape[0]

    @property
    def cells(self) -> np.ndarray:
        return self.occupied.ravel()

    @property
    def extent(self) -> Tuple[float, float, float, float]:
        return (self.origin_x, self.origin_y,
                self.origin_x + self.width * self.resolution, self.origin_y + self.height * self.resolution)

    def contains(self, x: float, y: float) -> bool:
        x0, y0, x1, y1 = self.extent
        return x0 <= x <= x1 and y0 <= y <= y1

    def cell_of(self, x: float, y: float) -> Tuple[int, int]:
        """(col, row) of the cell containing a world point, clamped to the grid."""
        i = int(math.floor((x - self.origin_x) / self.resolution))
        j = int(math.floor((y - self.origin_y) / self.resolution))
        return min(max(i, 0), self.width - 1), min(max(j, 0), self.height - 1)

    def cell_center(self, i: int, j: int) -> Tuple[float, float]:
        return (self.origin_x + (i + 0.5) * self.resolution, self.origin_y + (j + 0.5) * self.resolution)

    def point_occupied(self, x: float, y: float) -> bool:
        """True for points inside an occupied cell or outside the grid."""
        if not self.contains(x, y):
            return True
        i, j = self.cell_of(x, y)
        return bool(self.occupied[j, i])

    def points_occupied(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        x0, y0, x1, y1 = self.extent
        out = (pts[:, 0] < x0) | (pts[:, 0] > x1) | (pts[:, 1] < y0) | (pts[:, 1] > y1)
        i = np.clip(np.floor((pts[:, 0] - x0) / self.resolution).astype(np.int64), 0, self.width - 1)
        j = np.clip(np.floor((pts[:, 1] - y0) / self.resolution).astype(np.int64), 0, self.height - 1)
        return out | self.occupied[j, i]

    def with_occupied(self, occupied: np.ndarray) -> "OccupancyGrid":
        return OccupancyGrid(occupied, self.resolution, self.origin_x, self.origin_y)

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        header = f"{self.width} {self.height} {self.resolution!r} {float(self.origin_x)!r} {float(self.origin_y)!r}"
        rows = ["".join("#" if v else "." for v in row) for row in self.occupied]
        return "\n".join([header, *rows]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "OccupancyGrid":
        lines = text.split("\n")
        if not lines or lines[-1] != "":
            raise GridFormatError("grid file must be newline-terminated")
        lines = lines[:-1]
        parts = lines[0].split(" ") if lines else []
        if len(parts) != 5:
            raise GridFormatError("header must be 'width height resolution origin_x origin_y'")
        try:
            width, height = int(parts[0]), int(parts[1])
            res, ox, oy = float(parts[2]), float(parts[3]), float(parts[4])
        except ValueError as exc:
            raise GridFormatError(f"bad header: {lines[0]!r}") from exc
        if width <= 0 or height <= 0 or not res > 0:
            raise GridFormatError("width, height and resolution must be positive")
        rows = lines[1:]
        if len(rows) != height:
            raise GridFormatError(f"expected {height} rows, found {len(rows)}")
        occ = np.zeros((height, width), dtype=bool)
        for j, row in enumerate(rows):
            if len(row) != width:
                raise GridFormatError(f"row {j} has {len(row)} cells, expected {width}")
            bad = set(row) - {".", "#"}
            if bad:
                raise GridFormatError(f"row {j} contains invalid characters {sorted(bad)!r}")
            occ[j] = np.frombuffer(row.encode("ascii"), dtype=np.uint8) == ord("#")
        return cls(occ, res, ox, oy)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="ascii", newline="\n")

    @classmethod
    def load(cls, path) -> "OccupancyGrid":
        try:
            data = Path(path).read_bytes()
            text = data.decode("ascii")
        except UnicodeDecodeError as exc:
            raise GridFormatError(f"{path}: not an ASCII grid file") from exc
        return cls.from_text(text)


# -- distance and Voronoi maps -------------------------------------------------


def _distance_and_sites(grid: OccupancyGrid):
    d2, sr, sc = kernels.edt(grid.occupied)
    return d2, sr, sc


def compute_distance_map(grid: OccupancyGrid) -> np.ndarray:
    """Per-cell distance (m) from each cell center to the nearest occupied cell center."""
    if not grid.occupied.any():
        raise EmptyMap("grid has no occupied cell")
    d2, _, _ = _distance_and_sites(grid)
    return np.sqrt(d2) * grid.resolution


def obstacle_components(grid: OccupancyGrid) -> Tuple[np.ndarray, int]:
    """8-connected labelling of occupied cells (0 = free)."""
    labels, n = ndimage.label(grid.occupied, structure=EIGHT_CONNECTED)
    return labels, n


@dataclass(frozen=True, eq=False)
class VoronoiMap:
    edges: np.ndarray
    d_vor: np.ndarray
    basins: np.ndarray  # obstacle-component label of each cell's nearest occupied cell


def compute_voronoi(grid: OccupancyGrid, d_obs: np.ndarray = None) -> VoronoiMap:
    """Discrete generalized Voronoi diagram of the obstacle components.

    A free cell is an edge cell when an 8-neighbour belongs to a different nearest
    basin, the second basin is within sqrt(2) cells of the first, and the cell is
    nearer the bisector than that neighbour. ``d_obs`` is accepted for callers that
    already hold it; sites are recomputed either way.
    """
    if not grid.occupied.any():
        raise NoVoronoiEdge("grid has no obstacles")
    labels, n = obstacle_components(grid)
    if n < 2:
        raise NoVoronoiEdge("fewer than two obstacle basins")
    d2, sr, sc = _distance_and_sites(grid)
    basins = labels[sr, sc].astype(np.int64)
    edges = kernels.gvd_edges(grid.occupied, basins, d2, sr, sc)
    if not edges.any():
        raise NoVoronoiEdge("no free cell separates the obstacle basins")
    ed2, _, _ = kernels.edt(edges)
    return VoronoiMap(edges=edges, d_vor=np.sqrt(ed2) * grid.resolution, basins=basins)


@dataclass(frozen=True, eq=False)
class FieldMap:
    grid: OccupancyGrid
    d_obs: np.ndarray
    d_vor: np.ndarray
    edges: np.ndarray
    lambda_v: float = 1.0
    d_obs_max: float = 2.5
    has_obstacles: bool = True
    has_voronoi: bool = True

    @classmethod
    def build(cls, grid: OccupancyGrid, lambda_v: float = 1.0, d_obs_max: float = 2.5) -> "FieldMap":
        if lambda_v <= 0 or d_obs_max <= 0:
            raise ValueError("lambda_v and d_obs_max must be positive")
        shape = grid.occupied.shape
        try:
            d_obs = compute_distance_map(grid)
            has_obs = True
        except EmptyMap:
            d_obs = np.full(shape, np.inf)
            has_obs = False
        try:
            vor = compute_voronoi(grid)
            edges, d_vor, has_vor = vor.edges, vor.d_vor, True
        except NoVoronoiEdge:
            edges, d_vor, has_vor = np.zeros(shape, dtype=bool), np.full(shape, np.inf), False
        for arr in (d_obs, d_vor, edges):
            arr.setflags(write=False)
        return cls(grid, d_obs, d_vor, edges, float(lambda_v), float(d_obs_max), has_obs, has_vor)

    @property
    def kernel_args(self):
        g = self.grid
        return (self.d_obs, self.d_vor, self.has_obstacles, self.has_voronoi,
                float(g.origin_x), float(g.origin_y), float(g.resolution), self.lambda_v, self.d_obs_max)

    def d_obs_at(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if not self.has_obstacles:
            return np.full(len(pts), np.inf)
        g = self.grid
        return kernels.bilinear(self.d_obs, g.origin_x, g.origin_y, g.resolution, pts[:, 0], pts[:, 1])

    def d_vor_at(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if not self.has_voronoi:
            return np.full(len(pts), np.inf)
        g = self.grid
        return kernels.bilinear(self.d_vor, g.origin_x, g.origin_y, g.resolution, pts[:, 0], pts[:, 1])

    def field_at(self, pts) -> np.ndarray:
        """Voronoi field at many in-bounds points (no bounds check)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if not self.has_obstacles:
            return np.zeros(len(pts))
        return kernels.field_values_np(self.d_obs_at(pts), self.d_vor_at(pts), self.has_voronoi,
                                       self.lambda_v, self.d_obs_max)

    def field_grid(self) -> np.ndarray:
        """Voronoi field evaluated at every cell center."""
        if not self.has_obstacles:
            return np.zeros(self.grid.occupied.shape)
        return kernels.field_values_np(self.d_obs, self.d_vor, self.has_voronoi, self.lambda_v, self.d_obs_max)


def voronoi_field(fmap: FieldMap, p) -> float:
    """A * S * R at a world point, with F = 0 wherever d_obs >= d_obs_max."""
    x, y = float(p[0]), float(p[1])
    if not fmap.grid.contains(x, y):
        raise OutOfBounds(f"point ({x:.3f}, {y:.3f}) is outside the grid")
    return float(fmap.field_at([(x, y)])[0])


# -- environment metrics -----------------------------------------------------


def obstacle_density(before: OccupancyGrid, after: OccupancyGrid) -> float:
    """Percentage of the previously free area taken by new obstacles."""
    if before.occupied.shape != after.occupied.shape:
        raise DimensionMismatch(f"{before.occupied.shape} vs {after.occupied.shape}")
    free_before = int((~before.occupied).sum())
    if free_before == 0:
        raise NoFreeSpace("the reference grid has no free cell")
    free_after = int((~after.occupied).sum())
    return 100.0 * (free_before - free_after) / free_before


def component_clearances(grid: OccupancyGrid, limit: int = None) -> List[Tuple[float, int, int]]:
    """Minimum center-to-center clearance (m) for pairs of obstacle components, ascending.

    With ``limit`` only the ``limit`` smallest pairs are guaranteed; pairs whose
    bounding boxes are already farther apart than the current ``limit``-th best are skipped.
    """
    labels, n = obstacle_components(grid)
    if n < 2:
        return []
    objs = ndimage.find_objects(labels)
    # boundary cells carry every minimum-distance pair
    eroded = ndimage.binary_erosion(grid.occupied, structure=EIGHT_CONNECTED, border_value=0)
    boundary = grid.occupied & ~eroded
    pts, trees, boxes = [], [], []
    for k in range(1, n + 1):
        sl = objs[k - 1]
        sub = (labels[sl] == k) & boundary[sl]
        jj, ii = np.nonzero(sub)
        p = np.column_stack([ii + sl[1].start, jj + sl[0].start]).astype(float)
        pts.append(p)
        trees.append(cKDTree(p))
        boxes.append((sl[1].start, sl[0].start, sl[1].stop - 1, sl[0].stop - 1))
    boxes = np.array(boxes, dtype=float)
    cand = []
    for a in range(n):
        gx = np.maximum(0.0, np.maximum(boxes[a, 0] - boxes[:, 2], boxes[:, 0] - boxes[a, 2]))
        gy = np.maximum(0.0, np.maximum(boxes[a, 1] - boxes[:, 3], boxes[:, 1] - boxes[a, 3]))
        lb = np.hypot(gx, gy)
        for b in range(a + 1, n):
            cand.append((lb[b], a, b))
    cand.sort()
    out = []
    for lb, a, b in cand:
        if limit is not None and len(out) >= limit:
            out.sort()
            if lb > out[limit - 1][0]:
                break
        small, big = (a, b) if len(pts[a]) <= len(pts[b]) else (b, a)
        d, _ = trees[big].query(pts[small], k=1)
        out.append((float(d.min()), a + 1, b + 1))
    out.sort()
    out = [(d * grid.resolution, a, b) for d, a, b in out]
    return out if limit is None else out[:limit]


def narrow_gap_metric(grid: OccupancyGrid) -> float:
    """Mean of the two smallest inter-component clearances (the only one if there is one)."""
    gaps = component_clearances(grid, limit=2)
    if not gaps:
        raise InsufficientObstacles("need at least two obstacle components")
    return float(np.mean([g[0] for g in gaps[:2]]))
