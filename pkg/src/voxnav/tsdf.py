"""Sparse TSDF integration of landmark rays and derivation of a ternary
occupancy grid (Free / Occupied / Unknown).

Sign convention of the stored projective distance: positive between observer
and landmark, zero at the landmark, negative up to one truncation distance
behind it. Each ray is extended one truncation distance past its landmark so
surfaces acquire a negative band. Fusion is a weighted running average with
unit per-observation weight.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import IO

from .errors import FormatError
from .geometry import Point3, VoxelIndex, traverse_ray, world_to_voxel
from .slam_map import LandmarkObservation, SlamMap


class VoxelState(enum.IntEnum):
    FREE = 1
    OCCUPIED = 2


FREE = VoxelState.FREE
OCCUPIED = VoxelState.OCCUPIED

# 26-neighborhood offsets, used by the occupied-component filter.
_NEIGHBORS_26 = [
    (di, dj, dk)
    for di in (-1, 0, 1)
    for dj in (-1, 0, 1)
    for dk in (-1, 0, 1)
    if (di, dj, dk) != (0, 0, 0)
]
_NEIGHBORS_6 = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]


@dataclass
class TsdfConfig:
    truncation_distance: float = 0.5
    max_ray_length: float = 5.0
    occupancy_threshold_fraction: float = 0.9
    min_component_size: int = 5

    def __post_init__(self):
        if self.truncation_distance <= 0.0:
            raise ValueError("truncation_distance must be positive")
        if not 0.0 < self.occupancy_threshold_fraction < 1.0:
            raise ValueError("occupancy_threshold_fraction must be in (0, 1)")
        if self.max_ray_length <= self.truncation_distance:
            raise ValueError("max_ray_length must exceed truncation_distance")
        if self.min_component_size < 0:
            raise ValueError("min_component_size must be non-negative")


@dataclass
class TsdfGrid:
    """Sparse voxel map of (truncated projective distance, fusion weight)."""

    voxel_size: float
    voxels: dict[VoxelIndex, tuple[float, float]] = field(default_factory=dict)
    skipped_observations: int = 0

    def __post_init__(self):
        if self.voxel_size <= 0.0:
            raise ValueError("voxel_size must be positive")

    def dump_text(self, sink: IO[str]) -> None:
        for idx in sorted(self.voxels):
            distance, weight = self.voxels[idx]
            sink.write(f"{idx[0]} {idx[1]} {idx[2]} {distance:.6f} {weight:.6f}\n")


@dataclass
class OccupancyGrid:
    """Ternary occupancy: stored voxels are Free or Occupied, absent = Unknown."""

    voxel_size: float
    states: dict[VoxelIndex, VoxelState] = field(default_factory=dict)

    def state(self, idx: VoxelIndex) -> VoxelState | None:
        return self.states.get(idx)

    def is_free(self, idx: VoxelIndex) -> bool:
        return self.states.get(idx) is FREE

    def free_indices(self) -> list[VoxelIndex]:
        return sorted(idx for idx, st in self.states.items() if st is FREE)

    def occupied_indices(self) -> list[VoxelIndex]:
        return sorted(idx for idx, st in self.states.items() if st is OCCUPIED)

    def counts(self) -> tuple[int, int]:
        free = sum(1 for st in self.states.values() if st is FREE)
        return free, len(self.states) - free

    def copy(self) -> "OccupancyGrid":
        return OccupancyGrid(self.voxel_size, dict(self.states))

    def dump_text(self, sink: IO[str]) -> None:
        for idx in sorted(self.states):
            tag = "F" if self.states[idx] is FREE else "O"
            sink.write(f"{idx[0]} {idx[1]} {idx[2]} {tag}\n")

    @staticmethod
    def load_text(source, voxel_size: float) -> "OccupancyGrid":
        states: dict[VoxelIndex, VoxelState] = {}
        for line_number, raw in enumerate(source, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 4 or fields[3] not in ("F", "O"):
                raise FormatError(f"line {line_number}: bad occupancy record {line!r}")
            try:
                idx = (int(fields[0]), int(fields[1]), int(fields[2]))
            except ValueError:
                raise FormatError(f"line {line_number}: bad voxel index in {line!r}") from None
            states[idx] = FREE if fields[3] == "F" else OCCUPIED
        return OccupancyGrid(voxel_size, states)


def integrate_observation(grid: TsdfGrid, obs: LandmarkObservation, cfg: TsdfConfig) -> TsdfGrid:
    """Fuse one observation ray into the grid (in place; returns the grid).

    Rays longer than max_ray_length are skipped and counted in
    grid.skipped_observations.
    """
    ray_length = obs.ray_length()
    if ray_length > cfg.max_ray_length:
        grid.skipped_observations += 1
        return grid

    s = grid.voxel_size
    trunc = cfg.truncation_distance
    ox, oy, oz = obs.observer
    ux = (obs.landmark.x - ox) / ray_length
    uy = (obs.landmark.y - oy) / ray_length
    uz = (obs.landmark.z - oz) / ray_length
    end = Point3(
        obs.landmark.x + ux * trunc,
        obs.landmark.y + uy * trunc,
        obs.landmark.z + uz * trunc,
    )
    voxels = grid.voxels
    for idx in traverse_ray(obs.observer, end, s):
        cx = (idx[0] + 0.5) * s - ox
        cy = (idx[1] + 0.5) * s - oy
        cz = (idx[2] + 0.5) * s - oz
        sdf = ray_length - (cx * ux + cy * uy + cz * uz)
        if sdf > trunc:
            sdf = trunc
        elif sdf < -trunc:
            sdf = -trunc
        old = voxels.get(idx)
        if old is None:
            voxels[idx] = (sdf, 1.0)
        else:
            old_d, old_w = old
            new_w = old_w + 1.0
            voxels[idx] = ((old_d * old_w + sdf) / new_w, new_w)
    return grid


def integrate_slam_map(slam_map: SlamMap, cfg: TsdfConfig, voxel_size: float) -> TsdfGrid:
    grid = TsdfGrid(voxel_size)
    for obs in slam_map.observations:
        integrate_observation(grid, obs, cfg)
    return grid


def binarize(grid: TsdfGrid, cfg: TsdfConfig) -> OccupancyGrid:
    """Threshold stored distances at occupancy_threshold_fraction * truncation.

    The comparison uses the signed distance, so the negative behind-surface
    band maps to Occupied.
    """
    threshold = cfg.occupancy_threshold_fraction * cfg.truncation_distance
    states = {
        idx: (OCCUPIED if distance < threshold else FREE)
        for idx, (distance, _weight) in grid.voxels.items()
    }
    return OccupancyGrid(grid.voxel_size, states)


def filter_small_components(occ: OccupancyGrid, min_component_size: int) -> OccupancyGrid:
    """Relabel 26-connected Occupied components smaller than the limit as Free.

    These voxels were observed, so outlier removal frees them rather than
    resetting them to Unknown.
    """
    result = occ.copy()
    occupied = {idx for idx, st in occ.states.items() if st is OCCUPIED}
    seen: set[VoxelIndex] = set()
    for start in occupied:
        if start in seen:
            continue
        component = [start]
        seen.add(start)
        cursor = 0
        while cursor < len(component):
            i, j, k = component[cursor]
            cursor += 1
            for di, dj, dk in _NEIGHBORS_26:
                nb = (i + di, j + dj, k + dk)
                if nb in occupied and nb not in seen:
                    seen.add(nb)
                    component.append(nb)
        if len(component) < min_component_size:
            for idx in component:
                result.states[idx] = FREE
    return result


def trajectory_voxels(trajectory: list[Point3], voxel_size: float) -> list[VoxelIndex]:
    """Ordered, de-duplicated voxels covered by the trajectory polyline."""
    ordered: list[VoxelIndex] = []
    seen: set[VoxelIndex] = set()

    def visit(idx: VoxelIndex) -> None:
        if idx not in seen:
            seen.add(idx)
            ordered.append(idx)

    if not trajectory:
        return ordered
    visit(world_to_voxel(trajectory[0], voxel_size))
    for a, b in zip(trajectory, trajectory[1:]):
        if a == b:
            continue
        for idx in traverse_ray(a, b, voxel_size):
            visit(idx)
    return ordered


def carve_trajectory(occ: OccupancyGrid, trajectory: list[Point3]) -> OccupancyGrid:
    """Force every voxel touched by the trajectory polyline to Free."""
    result = occ.copy()
    for idx in trajectory_voxels(trajectory, occ.voxel_size):
        result.states[idx] = FREE
    return result
