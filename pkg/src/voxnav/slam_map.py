"""Sparse SLAM map ingest: observation rays, explorer trajectory and their
line-record text format.

File format (UTF-8, whitespace separated, one record per line):
  ``T x y z [t]``            trajectory pose; optional timestamp is ignored
  ``O ox oy oz lx ly lz``    observation: observer position, then landmark
  ``# ...``                  comment
Units are meters. Coordinates serialize with 6 decimals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable

from .errors import ParseError, ValidationError
from .geometry import Aabb, Point3

COORD_FORMAT = "%.6f"


@dataclass(frozen=True)
class LandmarkObservation:
    """One observer-position -> landmark-position ray."""

    observer: Point3
    landmark: Point3

    def ray_length(self) -> float:
        return self.observer.distance_to(self.landmark)


@dataclass
class SlamMap:
    observations: list[LandmarkObservation]
    trajectory: list[Point3]


@dataclass(frozen=True)
class SlamMapStats:
    observation_count: int
    trajectory_length_m: float
    bounding_box: Aabb


def _parse_floats(fields: list[str], line_number: int) -> list[float]:
    values = []
    for field in fields:
        try:
            values.append(float(field))
        except ValueError:
            raise ParseError(f"non-numeric field {field!r}", line_number) from None
    return values


def _checked_point(values: list[float], line_number: int) -> Point3:
    p = Point3(*values)
    if not p.is_finite():
        raise ValidationError(f"line {line_number}: non-finite coordinate in {values}")
    return p


def parse_slam_map(source: Iterable[str] | IO[str], allow_empty_observations: bool = False) -> SlamMap:
    """Parse the line-record SLAM map format, preserving record order.

    Raises ParseError for malformed lines (with the line number) and
    ValidationError for well-formed but invalid content (zero-length rays,
    non-finite coordinates, empty trajectory).
    """
    observations: list[LandmarkObservation] = []
    trajectory: list[Point3] = []
    for line_number, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        tag = fields[0]
        if tag == "T":
            if len(fields) not in (4, 5):
                raise ParseError(f"trajectory record needs 3 coordinates (+ optional timestamp), got {len(fields) - 1} fields", line_number)
            values = _parse_floats(fields[1:], line_number)
            trajectory.append(_checked_point(values[:3], line_number))
        elif tag == "O":
            if len(fields) != 7:
                raise ParseError(f"observation record needs 6 coordinates, got {len(fields) - 1} fields", line_number)
            values = _parse_floats(fields[1:], line_number)
            observer = _checked_point(values[:3], line_number)
            landmark = _checked_point(values[3:], line_number)
            if observer == landmark:
                raise ValidationError(f"line {line_number}: zero-length observation ray at {observer}")
            observations.append(LandmarkObservation(observer, landmark))
        else:
            raise ParseError(f"unknown record type {tag!r}", line_number)

    if not trajectory:
        raise ValidationError("trajectory is empty")
    if not observations and not allow_empty_observations:
        raise ValidationError("map contains no observations")
    return SlamMap(observations=observations, trajectory=trajectory)


def serialize_slam_map(slam_map: SlamMap, sink: IO[str]) -> None:
    """Write the map in the line-record format (6-decimal coordinates)."""
    for pose in slam_map.trajectory:
        sink.write("T %s %s %s\n" % tuple(COORD_FORMAT % c for c in pose))
    for obs in slam_map.observations:
        coords = tuple(obs.observer) + tuple(obs.landmark)
        sink.write("O %s %s %s %s %s %s\n" % tuple(COORD_FORMAT % c for c in coords))


def slam_map_stats(slam_map: SlamMap) -> SlamMapStats:
    length = 0.0
    for a, b in zip(slam_map.trajectory, slam_map.trajectory[1:]):
        length += a.distance_to(b)
    points: list[Point3] = list(slam_map.trajectory)
    for obs in slam_map.observations:
        points.append(obs.observer)
        points.append(obs.landmark)
    return SlamMapStats(
        observation_count=len(slam_map.observations),
        trajectory_length_m=length,
        bounding_box=Aabb.around(points),
    )
