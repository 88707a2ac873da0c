import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resplan.errors import (
    DimensionMismatch,
    EmptyMap,
    GridFormatError,
    InsufficientObstacles,
    NoFreeSpace,
    NoVoronoiEdge,
    OutOfBounds,
)
from resplan.gridmap import (
    FieldMap,
    OccupancyGrid,
    component_clearances,
    compute_distance_map,
    compute_voronoi,
    narrow_gap_metric,
    obstacle_density,
    voronoi_field,
)

from conftest import random_grid
from oracles import (
    brute_component_clearances,
    brute_distance_cells,
    field_by_hand,
    flood_components,
    per_component_distances,
)


def grid_with(cells, shape, resolution=1.0):
    occ = np.zeros(shape, dtype=bool)
    for j, i in cells:
        occ[j, i] = True
    return OccupancyGrid(occ, resolution)


class TestOccupancyGrid:
    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            OccupancyGrid(np.zeros((0, 3), dtype=bool), 1.0)
        with pytest.raises(ValueError):
            OccupancyGrid(np.zeros((3, 3), dtype=bool), 0.0)

    def test_cells_are_row_major(self):
        g = grid_with([(1, 2)], (2, 3))
        assert g.cells.tolist() == [False, False, False, False, False, True]
        assert len(g.cells) == g.width * g.height

    def test_point_queries(self):
        g = OccupancyGrid(np.array([[0, 1], [0, 0]], dtype=bool), 0.5, origin_x=1.0, origin_y=2.0)
        assert g.point_occupied(1.75, 2.25)
        assert not g.point_occupied(1.25, 2.25)
        assert g.point_occupied(0.0, 0.0)
        pts = np.array([[1.75, 2.25], [1.25, 2.75], [5.0, 5.0]])
        assert g.points_occupied(pts).tolist() == [True, False, True]
        assert g.cell_center(1, 0) == (1.75, 2.25)

    def test_text_round_trip(self):
        g = random_grid(3, shape=(7, 11), p=0.3, resolution=0.25)
        g = OccupancyGrid(g.occupied, 0.25, -1.5, 2.0)
        text = g.to_text()
        assert text.splitlines()[0] == "11 7 0.25 -1.5 2.0"
        back = OccupancyGrid.from_text(text)
        assert np.array_equal(back.occupied, g.occupied)
        assert (back.resolution, back.origin_x, back.origin_y) == (0.25, -1.5, 2.0)
        assert back.to_text() == text

    def test_row_zero_is_lowest(self):
        g = OccupancyGrid.from_text("2 2 1.0 0.0 0.0\n#.\n..\n")
        assert g.point_occupied(0.5, 0.5)
        assert not g.point_occupied(0.5, 1.5)

    @pytest.mark.parametrize("text", [
        "2 1 1.0 0 0\n..",            # no trailing newline
        "2 1 1.0 0\n..\n",            # short header
        "2 2 1.0 0 0\n..\n",          # missing row
        "2 1 1.0 0 0\n...\n",         # wide row
        "2 1 1.0 0 0\n.o\n",          # bad character
        "2 1 1.0 0 0\n.. \n",         # trailing whitespace
        "2 1 -1.0 0 0\n..\n",         # bad resolution
        "x 1 1.0 0 0\n..\n",
    ])
    def test_rejects_malformed(self, text):
        with pytest.raises(GridFormatError):
            OccupancyGrid.from_text(text)

    def test_load_save(self, tmp_path):
        g = random_grid(1, shape=(5, 6), p=0.4)
        g.save(tmp_path / "m.txt")
        assert np.array_equal(OccupancyGrid.load(tmp_path / "m.txt").occupied, g.occupied)
        (tmp_path / "bad.txt").write_bytes("1 1 1.0 0 0\n\xe9\n".encode("latin-1"))
        with pytest.raises(GridFormatError):
            OccupancyGrid.load(tmp_path / "bad.txt")


class TestDistanceMap:
    def test_single_center(self):
        d = compute_distance_map(grid_with([(1, 1)], (3, 3)))
        assert d[0, 0] == pytest.approx(math.sqrt(2)) and d[0, 1] == 1.0 and d[1, 1] == 0.0

    def test_all_occupied(self):
        assert not compute_distance_map(OccupancyGrid(np.ones((4, 5), dtype=bool), 1.0)).any()

    def test_empty_raises(self):
        with pytest.raises(EmptyMap):
            compute_distance_map(OccupancyGrid.empty(4, 4, 1.0))

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_brute_force(self, seed):
        g = random_grid(seed, p=0.02 + 0.01 * (seed % 5))
        assert np.array_equal(compute_distance_map(g), brute_distance_cells(g.occupied))

    def test_scales_with_resolution(self):
        g = random_grid(4, shape=(20, 30), resolution=0.1)
        assert np.allclose(compute_distance_map(g), 0.1 * brute_distance_cells(g.occupied))

    @given(st.integers(0, 10_000))
    def test_zero_exactly_on_obstacles(self, seed):
        g = random_grid(seed, shape=(15, 15), p=0.1)
        d = compute_distance_map(g)
        assert np.array_equal(d == 0, g.occupied)


class TestVoronoi:
    def test_bisector(self):
        vor = compute_voronoi(grid_with([(5, 0), (5, 10)], (11, 11)))
        cols = set(np.nonzero(vor.edges)[1].tolist())
        assert cols == {5}
        assert np.array_equal(vor.d_vor == 0, vor.edges)

    def test_single_basin(self):
        with pytest.raises(NoVoronoiEdge):
            compute_voronoi(grid_with([(2, 2), (2, 3), (3, 3)], (8, 8)))
        with pytest.raises(NoVoronoiEdge):
            compute_voronoi(OccupancyGrid.empty(5, 5, 1.0))

    @pytest.mark.parametrize("seed", range(20))
    def test_edges_against_brute_basins(self, seed):
        g = random_grid(seed, p=0.03)
        comp, n = flood_components(g.occupied)
        if n < 2:
            pytest.skip("single basin")
        vor = compute_voronoi(g)
        assert vor.edges.any()
        assert not (vor.edges & g.occupied).any()
        for j, i in zip(*np.nonzero(vor.edges)):
            near = sorted(per_component_distances(g.occupied, comp, n, j, i))
            assert near[1] - near[0] <= math.sqrt(2) + 1e-12
        assert np.array_equal(vor.d_vor, brute_distance_cells(vor.edges))


class TestField:
    def test_hand_value(self):
        assert field_by_hand(1.0, 1.0, 1.0, 2.0) == 0.1875

    def test_on_obstacle_is_one(self):
        fm = FieldMap.build(grid_with([(5, 0), (5, 10)], (11, 11)))
        assert voronoi_field(fm, (0.5, 5.5)) == 1.0

    def test_on_edge_is_zero(self):
        fm = FieldMap.build(grid_with([(5, 0), (5, 10)], (11, 11)))
        assert voronoi_field(fm, (5.5, 5.5)) == 0.0

    def test_hand_evaluation_on_map(self):
        # obstacle columns 0 and 4: cell column 1 is 1 cell from an obstacle and 1 from the edge (column 2)
        occ = np.zeros((5, 5), dtype=bool)
        occ[:, 0] = occ[:, 4] = True
        fm = FieldMap.build(OccupancyGrid(occ, 1.0), lambda_v=1.0, d_obs_max=2.0)
        assert fm.d_obs[2, 1] == 1.0 and fm.d_vor[2, 1] == 1.0
        assert voronoi_field(fm, (1.5, 2.5)) == pytest.approx(0.1875, abs=1e-12)

    def test_far_field_zero(self):
        fm = FieldMap.build(grid_with([(0, 0), (0, 1)], (30, 30)), d_obs_max=2.5)
        assert voronoi_field(fm, (20.5, 20.5)) == 0.0

    def test_no_obstacles(self):
        fm = FieldMap.build(OccupancyGrid.empty(6, 6, 1.0))
        assert not fm.has_obstacles and voronoi_field(fm, (3.0, 3.0)) == 0.0

    def test_single_basin_uses_limit(self):
        fm = FieldMap.build(grid_with([(5, 5)], (11, 11)), lambda_v=1.0, d_obs_max=2.0)
        assert not fm.has_voronoi
        assert voronoi_field(fm, (6.5, 5.5)) == pytest.approx(field_by_hand(1.0, math.inf, 1.0, 2.0))

    def test_out_of_bounds(self):
        fm = FieldMap.build(grid_with([(1, 1)], (3, 3)))
        with pytest.raises(OutOfBounds):
            voronoi_field(fm, (-0.1, 1.0))

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            FieldMap.build(grid_with([(1, 1)], (3, 3)), lambda_v=0.0)

    @pytest.mark.parametrize("seed", range(10))
    def test_cell_centers_match_hand_formula(self, seed):
        g = random_grid(seed, shape=(25, 25), p=0.04)
        fm = FieldMap.build(g, lambda_v=0.8, d_obs_max=3.0)
        F = fm.field_grid()
        for j, i in [(0, 0), (3, 7), (12, 12), (24, 1), (10, 20)]:
            assert F[j, i] == pytest.approx(field_by_hand(fm.d_obs[j, i], fm.d_vor[j, i], 0.8, 3.0), abs=1e-12)
            assert voronoi_field(fm, g.cell_center(i, j)) == pytest.approx(F[j, i], abs=1e-12)

    @given(st.integers(0, 10_000), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_bounded(self, seed, u, v):
        g = random_grid(seed, shape=(20, 20), p=0.05, resolution=0.5)
        fm = FieldMap.build(g, lambda_v=1.0, d_obs_max=2.5)
        F = fm.field_grid()
        assert F.min() >= 0.0 and F.max() <= 1.0
        assert np.all(F[fm.d_obs >= 2.5] == 0.0)
        val = voronoi_field(fm, (u * 10.0, v * 10.0))
        assert 0.0 <= val <= 1.0

    @pytest.mark.parametrize("half", [4, 7, 10])
    def test_monotone_from_wall_to_edge(self, half):
        occ = np.zeros((2 * half + 1, 12), dtype=bool)
        occ[0, :] = occ[-1, :] = True
        fm = FieldMap.build(OccupancyGrid(occ, 0.25), lambda_v=1.0, d_obs_max=2.5)
        assert fm.edges[half, 5]
        F = fm.field_grid()
        for i in range(12):
            ray = F[: half + 1, i]
            assert np.all(np.diff(ray) <= 1e-15)
            assert ray[-1] == 0.0


class TestMetrics:
    def test_density_example(self):
        before = OccupancyGrid.empty(10, 10, 1.0)
        occ = np.zeros((10, 10), dtype=bool)
        occ[:2, :] = True
        assert obstacle_density(before, before.with_occupied(occ)) == 20.0

    @given(st.integers(0, 10_000))
    def test_density_self_zero(self, seed):
        g = random_grid(seed, shape=(9, 9), p=0.3)
        assert obstacle_density(g, g) == 0.0

    def test_density_errors(self):
        with pytest.raises(DimensionMismatch):
            obstacle_density(OccupancyGrid.empty(3, 3, 1.0), OccupancyGrid.empty(4, 3, 1.0))
        full = OccupancyGrid(np.ones((3, 3), dtype=bool), 1.0)
        with pytest.raises(NoFreeSpace):
            obstacle_density(full, full)

    def test_narrow_gap_example(self):
        # pairs 3 m and 5 m apart; cross pairs are far
        g = grid_with([(2, 2), (2, 5), (30, 2), (30, 7)], (40, 40))
        assert narrow_gap_metric(g) == pytest.approx(4.0)
        assert narrow_gap_metric(g) == pytest.approx(np.mean(brute_component_clearances(g.occupied, 1.0)[:2]))

    def test_single_gap(self):
        assert narrow_gap_metric(grid_with([(3, 3), (3, 5)], (10, 10), resolution=1.0)) == 2.0

    def test_insufficient(self):
        with pytest.raises(InsufficientObstacles):
            narrow_gap_metric(grid_with([(3, 3), (3, 4)], (10, 10)))

    @pytest.mark.parametrize("seed", range(8))
    def test_clearances_match_all_pairs(self, seed):
        g = random_grid(seed, shape=(30, 30), p=0.02, resolution=0.2)
        brute = brute_component_clearances(g.occupied, 0.2)
        fast = [d for d, _, _ in component_clearances(g)]
        assert np.allclose(fast, brute)
        if len(brute) >= 2:
            assert [d for d, _, _ in component_clearances(g, limit=2)] == pytest.approx(brute[:2])
