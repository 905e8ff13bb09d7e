import io
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voxnav.errors import ParseError, ValidationError
from voxnav.geometry import Point3
from voxnav.slam_map import (
    LandmarkObservation,
    SlamMap,
    parse_slam_map,
    serialize_slam_map,
    slam_map_stats,
)


def parse_text(text, **kwargs):
    return parse_slam_map(io.StringIO(text), **kwargs)


class TestParse:
    def test_minimal_map(self):
        slam = parse_text("T 0 0 0\nO 0 0 0 1 0 0\n")
        assert len(slam.trajectory) == 1
        assert len(slam.observations) == 1
        assert slam.observations[0].landmark == Point3(1.0, 0.0, 0.0)

    def test_zero_length_ray_rejected(self):
        with pytest.raises(ValidationError):
            parse_text("T 0 0 0\nO 1 2 3 1 2 3\n")

    def test_missing_coordinate_names_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_text("T 0 0 0\nT 1.0 2.0\n")

    def test_non_numeric_field(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_text("T 0 zero 0\n")

    def test_unknown_record_type(self):
        with pytest.raises(ParseError, match="line 1"):
            parse_text("X 1 2 3\n")

    def test_non_finite_coordinate(self):
        with pytest.raises(ValidationError, match="line 1"):
            parse_text("T 0 inf 0\n")

    def test_empty_trajectory_rejected(self):
        with pytest.raises(ValidationError):
            parse_text("O 0 0 0 1 0 0\n")

    def test_empty_observations_flag(self):
        with pytest.raises(ValidationError):
            parse_text("T 0 0 0\n")
        slam = parse_text("T 0 0 0\n", allow_empty_observations=True)
        assert slam.observations == []

    def test_comments_blank_lines_and_timestamps(self):
        slam = parse_text("# header\n\nT 0 0 0 12.5\nO 0 0 0 1 0 0\n")
        assert len(slam.trajectory) == 1

    def test_order_preserved(self):
        slam = parse_text("T 0 0 0\nT 1 0 0\nO 0 0 0 1 0 0\nO 1 0 0 2 0 0\n")
        assert slam.trajectory == [Point3(0, 0, 0), Point3(1, 0, 0)]
        assert slam.observations[0].landmark.x == 1.0
        assert slam.observations[1].landmark.x == 2.0


class TestRoundTrip:
    @settings(max_examples=80, deadline=None)
    @given(
        poses=st.lists(
            st.tuples(*[st.floats(-100, 100, allow_nan=False) for _ in range(3)]),
            min_size=1,
            max_size=5,
        ),
        rays=st.lists(
            st.tuples(*[st.floats(-100, 100, allow_nan=False) for _ in range(6)]),
            min_size=0,
            max_size=5,
        ),
    )
    def test_serialize_parse_serialize_is_stable(self, poses, rays):
        observations = []
        for r in rays:
            observer, landmark = Point3(*r[:3]), Point3(*r[3:])
            if round(observer.x, 6) == round(landmark.x, 6) and round(
                observer.y, 6
            ) == round(landmark.y, 6) and round(observer.z, 6) == round(landmark.z, 6):
                continue
            observations.append(LandmarkObservation(observer, landmark))
        slam = SlamMap(observations=observations, trajectory=[Point3(*p) for p in poses])
        first = io.StringIO()
        serialize_slam_map(slam, first)
        reparsed = parse_slam_map(io.StringIO(first.getvalue()), allow_empty_observations=True)
        second = io.StringIO()
        serialize_slam_map(reparsed, second)
        assert first.getvalue() == second.getvalue()

    def test_six_decimal_values_round_trip_exactly(self):
        slam = SlamMap(
            observations=[LandmarkObservation(Point3(0.125, -3.5, 2.25), Point3(1.0, 2.0, 3.0))],
            trajectory=[Point3(-1.5, 0.25, 7.0)],
        )
        buf = io.StringIO()
        serialize_slam_map(slam, buf)
        assert parse_slam_map(io.StringIO(buf.getvalue())) == slam


class TestStats:
    def test_three_four_five_triangle(self):
        slam = SlamMap(observations=[], trajectory=[Point3(0, 0, 0), Point3(3, 4, 0)])
        assert slam_map_stats(slam).trajectory_length_m == pytest.approx(5.0)

    def test_single_pose_degenerate(self):
        slam = SlamMap(observations=[], trajectory=[Point3(1, 2, 3)])
        stats = slam_map_stats(slam)
        assert stats.trajectory_length_m == 0.0
        assert stats.bounding_box.lo == stats.bounding_box.hi == Point3(1, 2, 3)

    def test_bounding_box_covers_landmarks(self):
        slam = SlamMap(
            observations=[
                LandmarkObservation(Point3(0, 0, 0), Point3(1, 0, 0)),
                LandmarkObservation(Point3(0, 0, 0), Point3(-1, 0, 0)),
            ],
            trajectory=[Point3(0, 0, 0)],
        )
        box = slam_map_stats(slam).bounding_box
        assert box.lo.x == -1.0
        assert box.hi.x == 1.0
        assert slam_map_stats(slam).observation_count == 2
