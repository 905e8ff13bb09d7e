import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voxnav.geometry import Aabb, Point3, traverse_ray, voxel_center, world_to_voxel

from oracles import sampled_segment_voxels


class TestWorldToVoxel:
    def test_positive_point(self):
        assert world_to_voxel((0.1, 0.1, 0.1), 0.25) == (0, 0, 0)

    def test_negative_floor(self):
        assert world_to_voxel((-0.1, 0.0, 0.6), 0.25) == (-1, 0, 2)

    def test_boundary_belongs_to_upper_voxel(self):
        assert world_to_voxel((0.25, 0.0, 0.0), 0.25) == (1, 0, 0)

    def test_center_round_trip(self):
        assert world_to_voxel(voxel_center((3, -2, 7), 0.5), 0.5) == (3, -2, 7)


class TestTraverseRay:
    def test_axis_aligned_unit_segment(self):
        voxels = traverse_ray(Point3(0.125, 0.125, 0.125), Point3(1.125, 0.125, 0.125), 0.25)
        assert voxels == [(0, 0, 0), (1, 0, 0), (2, 0, 0), (3, 0, 0), (4, 0, 0)]

    def test_same_voxel_single_element(self):
        voxels = traverse_ray(Point3(0.05, 0.05, 0.05), Point3(0.2, 0.2, 0.2), 0.25)
        assert voxels == [(0, 0, 0)]

    def test_diagonal_corner_crossing(self):
        # The segment passes exactly through a voxel corner; the walk stays
        # face-connected by stepping through one tie-break voxel. The sampled
        # oracle set (which skips zero-measure corner grazes) is a subset.
        voxels = traverse_ray(Point3(0.1, 0.1, 0.1), Point3(0.4, 0.4, 0.1), 0.25)
        assert len(voxels) == 3
        assert voxels[0] == (0, 0, 0)
        assert voxels[-1] == (1, 1, 0)
        oracle = sampled_segment_voxels((0.1, 0.1, 0.1), (0.4, 0.4, 0.1), 0.25)
        assert oracle <= set(voxels)

    def test_zero_length_segment_rejected(self):
        with pytest.raises(ValueError):
            traverse_ray(Point3(1.0, 1.0, 1.0), Point3(1.0, 1.0, 1.0), 0.25)

    def test_face_connected_steps(self):
        voxels = traverse_ray(Point3(-0.9, 0.2, 0.33), Point3(1.4, -1.1, 0.8), 0.25)
        for a, b in zip(voxels, voxels[1:]):
            assert sum(abs(x - y) for x, y in zip(a, b)) == 1

    @staticmethod
    def _boundary_crossings(origin, endpoint, voxel_size):
        times = []
        for axis in range(3):
            o, e = origin[axis] / voxel_size, endpoint[axis] / voxel_size
            d = e - o
            if d == 0.0:
                continue
            lo, hi = min(o, e), max(o, e)
            for k in range(math.floor(lo), math.ceil(hi) + 1):
                t = (k - o) / d
                if -1e-9 <= t <= 1 + 1e-9:
                    times.append(t)
        return sorted(times)

    @settings(max_examples=150, deadline=None)
    @given(
        coords=st.lists(
            st.floats(min_value=-2.0, max_value=2.0, allow_nan=False), min_size=6, max_size=6
        ),
        voxel_size=st.sampled_from([0.1, 0.25, 0.5]),
    )
    def test_matches_dense_sampling_oracle(self, coords, voxel_size):
        # Exact set equality with the point-sampling oracle is only claimed
        # for segments in generic position: simultaneous boundary crossings
        # (edge/corner grazes) are tie-broken by the walk and carry zero
        # measure for the oracle, so such draws are skipped.
        origin, endpoint = Point3(*coords[:3]), Point3(*coords[3:])
        if origin.distance_to(endpoint) < 1e-6:
            return
        times = self._boundary_crossings(origin, endpoint, voxel_size)
        gaps = [b - a for a, b in zip(times, times[1:])]
        if times and (min(times) < 1e-6 or max(times) > 1 - 1e-6 or (gaps and min(gaps) < 1e-6)):
            return
        voxels = traverse_ray(origin, endpoint, voxel_size)
        oracle = sampled_segment_voxels(origin, endpoint, voxel_size)
        assert set(voxels) == oracle
        assert voxels[0] == world_to_voxel(origin, voxel_size)
        assert voxels[-1] == world_to_voxel(endpoint, voxel_size)


class TestAabb:
    def test_contains_half_open(self):
        box = Aabb(Point3(0, 0, 0), Point3(1, 1, 1))
        assert box.contains((0.0, 0.5, 0.999))
        assert not box.contains((1.0, 0.5, 0.5))

    def test_surface_distance_on_face_is_zero(self):
        box = Aabb(Point3(0, 0, 0), Point3(1, 1, 1))
        assert box.surface_distance((1.0, 0.5, 0.5)) == 0.0
        assert box.surface_distance((0.5, 0.5, 0.5)) == pytest.approx(0.5)
        assert box.surface_distance((2.0, 0.5, 0.5)) == pytest.approx(1.0)

    def test_around_points(self):
        box = Aabb.around([(1, 2, 3), (-1, 5, 0)])
        assert box.lo == Point3(-1, 2, 0)
        assert box.hi == Point3(1, 5, 3)
