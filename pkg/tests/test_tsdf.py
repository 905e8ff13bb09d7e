import io
import math

import numpy as np
import pytest

from voxnav.geometry import Point3
from voxnav.slam_map import LandmarkObservation, SlamMap
from voxnav.tsdf import (
    FREE,
    OCCUPIED,
    OccupancyGrid,
    TsdfConfig,
    TsdfGrid,
    binarize,
    carve_trajectory,
    filter_small_components,
    integrate_observation,
    integrate_slam_map,
    trajectory_voxels,
)

CFG = TsdfConfig(truncation_distance=0.5, max_ray_length=5.0)
AXIS_OBS = LandmarkObservation(Point3(0.125, 0.125, 0.125), Point3(1.125, 0.125, 0.125))


class TestIntegrateObservation:
    def test_axis_aligned_projective_distances(self):
        # Ray of length 1.0 along +x, extended 0.5 past the landmark; the
        # stored value at voxel i is 1.0 - 0.25*i clamped to +-0.5.
        grid = integrate_observation(TsdfGrid(0.25), AXIS_OBS, CFG)
        expected = {0: 0.5, 1: 0.5, 2: 0.5, 3: 0.25, 4: 0.0, 5: -0.25, 6: -0.5}
        assert set(grid.voxels) == {(i, 0, 0) for i in expected}
        for i, value in expected.items():
            distance, weight = grid.voxels[(i, 0, 0)]
            assert distance == pytest.approx(value)
            assert weight == 1.0

    def test_repeated_observation_averages_and_counts(self):
        grid = TsdfGrid(0.25)
        integrate_observation(grid, AXIS_OBS, CFG)
        integrate_observation(grid, AXIS_OBS, CFG)
        distance, weight = grid.voxels[(3, 0, 0)]
        assert distance == pytest.approx(0.25)
        assert weight == 2.0

    def test_overlong_ray_skipped(self):
        far = LandmarkObservation(Point3(0, 0, 0), Point3(CFG.max_ray_length + 0.01, 0, 0))
        grid = integrate_observation(TsdfGrid(0.25), far, CFG)
        assert grid.voxels == {}
        assert grid.skipped_observations == 1

    def test_clamped_magnitudes(self):
        grid = integrate_observation(TsdfGrid(0.25), AXIS_OBS, CFG)
        assert all(abs(d) <= CFG.truncation_distance for d, _ in grid.voxels.values())


class TestIntegrateSlamMap:
    def test_empty_observations_empty_grid(self):
        slam = SlamMap(observations=[], trajectory=[Point3(0, 0, 0)])
        assert integrate_slam_map(slam, CFG, 0.25).voxels == {}

    def test_permutation_invariance(self):
        rng = np.random.default_rng(3)
        observations = []
        for _ in range(60):
            origin = Point3(*rng.uniform(0, 0.5, 3))
            landmark = Point3(*(np.asarray(origin) + rng.uniform(0.3, 2.0, 3)))
            observations.append(LandmarkObservation(origin, landmark))
        forward = SlamMap(observations=observations, trajectory=[Point3(0, 0, 0)])
        shuffled = list(observations)
        rng.shuffle(shuffled)
        backward = SlamMap(observations=shuffled, trajectory=[Point3(0, 0, 0)])
        ga = integrate_slam_map(forward, CFG, 0.25)
        gb = integrate_slam_map(backward, CFG, 0.25)
        assert set(ga.voxels) == set(gb.voxels)
        for idx, (da, wa) in ga.voxels.items():
            db, wb = gb.voxels[idx]
            assert da == pytest.approx(db, abs=1e-9)
            assert wa == wb


class TestBinarize:
    def test_threshold_at_ninety_percent(self):
        grid = TsdfGrid(0.25)
        grid.voxels[(0, 0, 0)] = (0.50, 1.0)   # clamped far-from-surface
        grid.voxels[(1, 0, 0)] = (0.10, 1.0)   # near-surface band
        grid.voxels[(2, 0, 0)] = (0.45, 1.0)   # exactly at the threshold
        grid.voxels[(3, 0, 0)] = (-0.3, 1.0)   # behind the surface
        occ = binarize(grid, CFG)
        assert occ.state((0, 0, 0)) is FREE
        assert occ.state((1, 0, 0)) is OCCUPIED
        assert occ.state((2, 0, 0)) is FREE
        assert occ.state((3, 0, 0)) is OCCUPIED
        assert occ.state((9, 9, 9)) is None

    def test_pure_per_voxel_function(self):
        grid = TsdfGrid(0.25)
        grid.voxels[(0, 0, 0)] = (0.2, 4.0)
        alone = binarize(grid, CFG).state((0, 0, 0))
        grid.voxels[(5, 5, 5)] = (0.5, 1.0)
        assert binarize(grid, CFG).state((0, 0, 0)) is alone


def grid_from(free=(), occupied=()):
    occ = OccupancyGrid(0.25)
    for idx in free:
        occ.states[idx] = FREE
    for idx in occupied:
        occ.states[idx] = OCCUPIED
    return occ


class TestFilterSmallComponents:
    def test_isolated_voxel_becomes_free(self):
        occ = grid_from(occupied=[(0, 0, 0)])
        assert filter_small_components(occ, 10).state((0, 0, 0)) is FREE

    def test_large_component_kept(self):
        wall = [(i, j, 0) for i in range(10) for j in range(100)]
        occ = grid_from(occupied=wall)
        filtered = filter_small_components(occ, 10)
        assert all(filtered.state(v) is OCCUPIED for v in wall)

    def test_corner_touching_pair_is_one_component(self):
        occ = grid_from(occupied=[(0, 0, 0), (1, 1, 1)])
        filtered = filter_small_components(occ, 3)
        assert filtered.state((0, 0, 0)) is FREE
        assert filtered.state((1, 1, 1)) is FREE

    def test_free_and_unknown_untouched_and_occupied_never_grows(self):
        occ = grid_from(free=[(5, 5, 5)], occupied=[(0, 0, 0), (0, 0, 1), (20, 20, 20)])
        filtered = filter_small_components(occ, 2)
        assert filtered.state((5, 5, 5)) is FREE
        assert filtered.state((7, 7, 7)) is None
        before = len(occ.occupied_indices())
        assert len(filtered.occupied_indices()) <= before


class TestCarveTrajectory:
    def test_pose_in_unknown_voxel_freed(self):
        occ = grid_from()
        carved = carve_trajectory(occ, [Point3(0.1, 0.1, 0.1)])
        assert carved.state((0, 0, 0)) is FREE

    def test_already_free_unchanged(self):
        occ = grid_from(free=[(0, 0, 0)])
        carved = carve_trajectory(occ, [Point3(0.1, 0.1, 0.1)])
        assert carved.states == occ.states

    def test_intermediate_voxels_freed(self):
        poses = [Point3(0.125, 0.125, 0.125), Point3(1.125, 0.125, 0.125)]
        carved = carve_trajectory(grid_from(), poses)
        assert set(carved.states) == {(i, 0, 0) for i in range(5)}
        assert all(st is FREE for st in carved.states.values())

    def test_trajectory_voxels_deduplicated_in_order(self):
        poses = [Point3(0.1, 0.1, 0.1), Point3(0.2, 0.1, 0.1), Point3(0.6, 0.1, 0.1)]
        voxels = trajectory_voxels(poses, 0.25)
        assert voxels == [(0, 0, 0), (1, 0, 0), (2, 0, 0)]


class TestDumpFormat:
    def test_occupancy_dump_round_trip(self):
        occ = grid_from(free=[(0, 0, 0), (-1, 2, 3)], occupied=[(5, 5, 5)])
        buf = io.StringIO()
        occ.dump_text(buf)
        loaded = OccupancyGrid.load_text(io.StringIO(buf.getvalue()), 0.25)
        assert loaded.states == occ.states

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TsdfConfig(truncation_distance=0.0)
        with pytest.raises(ValueError):
            TsdfConfig(occupancy_threshold_fraction=1.0)
        with pytest.raises(ValueError):
            TsdfConfig(truncation_distance=0.5, max_ray_length=0.4)
