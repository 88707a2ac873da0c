"""Static SVG plots of grids, Voronoi edges, field levels and trajectories."""
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import IoFailure
from .gridmap import FieldMap, OccupancyGrid

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2")
DASHES = ("none", "6 3", "2 2", "8 2 2 2")


class _Canvas:
    def __init__(self, grid: OccupancyGrid, px_per_m: float):
        self.grid = grid
        self.scale = px_per_m
        x0, y0, x1, y1 = grid.extent
        self.x0, self.y1 = x0, y1
        self.w = (x1 - x0) * px_per_m
        self.h = (y1 - y0) * px_per_m
        self.body = []

    def xy(self, x, y):
        # world y grows upward, SVG y downward
        return (x - self.x0) * self.scale, (self.y1 - y) * self.scale

    def cell_runs(self, mask: np.ndarray, fill: str, opacity: float = 1.0):
        """One rect per horizontal run of set cells."""
        g = self.grid
        c = g.resolution * self.scale
        op = "" if opacity >= 1.0 else f' fill-opacity="{opacity:g}"'
        for j, row in enumerate(mask):
            if not row.any():
                continue
            padded = np.concatenate([[False], row, [False]])
            edges = np.flatnonzero(padded[1:] != padded[:-1])
            for a, b in zip(edges[::2], edges[1::2]):
                x, y = self.xy(g.origin_x + a * g.resolution, g.origin_y + (j + 1) * g.resolution)
                self.body.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{(b - a) * c:.2f}" '
                                 f'height="{c:.2f}" fill="{fill}"{op}/>')

    def polyline(self, pts, stroke: str, dash: str, width: float = 2.0):
        coords = " ".join("{:.2f},{:.2f}".format(*self.xy(x, y)) for x, y in pts)
        dash_attr = "" if dash == "none" else f' stroke-dasharray="{dash}"'
        self.body.append(f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
                         f'stroke-width="{width:g}"{dash_attr}/>')

    def marker(self, pose, fill: str, label: str):
        x, y = self.xy(pose[0], pose[1])
        r = 4.0
        self.body.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r:g}" fill="{fill}"><title>{label}</title></circle>')
        if len(pose) > 2:
            tx, ty = x + 3 * r * np.cos(pose[2]), y - 3 * r * np.sin(pose[2])
            self.body.append(f'<line x1="{x:.2f}" y1="{y:.2f}" x2="{tx:.2f}" y2="{ty:.2f}" '
                             f'stroke="{fill}" stroke-width="2"/>')

    def text(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w:.0f}" height="{self.h:.0f}" '
                f'viewBox="0 0 {self.w:.2f} {self.h:.2f}">')
        frame = f'<rect x="0" y="0" width="{self.w:.2f}" height="{self.h:.2f}" fill="white" stroke="black"/>'
        return "\n".join(['<?xml version="1.0" encoding="UTF-8"?>', head, frame, *self.body, "</svg>"]) + "\n"


def _write(text: str, out) -> None:
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {out}: {exc}") from exc


def render_svg(grid: OccupancyGrid, trajectories: Sequence = (), out=None, edges: Optional[np.ndarray] = None,
               start=None, goal=None, px_per_m: float = 40.0) -> str:
    """Obstacles, optional Voronoi edges, one styled polyline per trajectory and start/goal markers.

    Each trajectory is an (n, >=2) array of world x, y (a TimedTrajectory or
    PosePath works through its ``poses``). Returns the SVG text and writes it
    when ``out`` is given.
    """
    cv = _Canvas(grid, px_per_m)
    cv.cell_runs(grid.occupied, "#404040")
    if edges is not None:
        cv.cell_runs(np.asarray(edges, dtype=bool), "#2ca02c", 0.6)
    for k, traj in enumerate(trajectories):
        pts = np.asarray(getattr(traj, "poses", traj), dtype=float)
        cv.polyline(pts[:, :2], PALETTE[k % len(PALETTE)], DASHES[(k // len(PALETTE)) % len(DASHES)])
    if start is not None:
        cv.marker(start, "#1f77b4", "start")
    if goal is not None:
        cv.marker(goal, "#d62728", "goal")
    text = cv.text()
    if out is not None:
        _write(text, out)
    return text


def render_field_svg(fmap: FieldMap, out=None, levels: int = 8, px_per_m: float = 40.0) -> str:
    """Voronoi-field heat levels (darker is higher), obstacles and GVD edges."""
    cv = _Canvas(fmap.grid, px_per_m)
    field = fmap.field_grid()
    free = ~fmap.grid.occupied
    bins = np.minimum((field * levels).astype(int), levels - 1)
    for b in range(levels):
        mask = free & (field > 0) & (bins == b)
        shade = int(round(255 * (1.0 - (b + 1) / (levels + 1))))
        cv.cell_runs(mask, f"#ff{shade:02x}{shade:02x}")
    cv.cell_runs(fmap.grid.occupied, "#404040")
    cv.cell_runs(fmap.edges, "#2ca02c")
    text = cv.text()
    if out is not None:
        _write(text, out)
    return text

