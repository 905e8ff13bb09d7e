"""Synthetic indoor scenes with ground-truth occupancy and a simulated
sparse-landmark explorer.

Scenes are axis-aligned box worlds: an enclosed shell (floor, ceiling,
perimeter walls) plus preset-specific interior obstacles. The explorer
follows a fixed polyline per preset; observations are cast as uniform
random ray bundles from each pose, terminating at the nearest obstacle
surface within range.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import ConfigError
from .geometry import Aabb, Point3, VoxelIndex
from .slam_map import LandmarkObservation, SlamMap
from .tsdf import FREE, OCCUPIED, OccupancyGrid

PRESET_NAMES = ("office", "warehouse", "open_space", "pillars", "two_room", "corridor")

_WALL = 0.3
_POSE_SPACING = 0.35
_POSE_HEIGHT = 1.3


@dataclass(frozen=True)
class SceneSpec:
    bounds: Aabb
    obstacles: list[Aabb]
    preset_name: str


@dataclass(frozen=True)
class ObservationModel:
    max_range: float = 5.0
    rays_per_pose: int = 140
    landmark_noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_range <= 0.0:
            raise ValueError("max_range must be positive")
        if self.rays_per_pose <= 0:
            raise ValueError("rays_per_pose must be positive")
        if self.landmark_noise_sigma < 0.0:
            raise ValueError("landmark_noise_sigma must be non-negative")


@dataclass(frozen=True)
class GroundTruth:
    occupancy: OccupancyGrid


def _box(x0, y0, z0, x1, y1, z1) -> Aabb:
    return Aabb(Point3(x0, y0, z0), Point3(x1, y1, z1))


def _shell(width: float, depth: float, height: float) -> tuple[Aabb, list[Aabb]]:
    """Enclosing bounds and wall/floor/ceiling slabs for an interior box
    spanning (0,0,0)..(width,depth,height)."""
    w = _WALL
    bounds = _box(-w, -w, -w, width + w, depth + w, height + w)
    obstacles = [
        _box(-w, -w, -w, width + w, depth + w, 0.0),            # floor
        _box(-w, -w, height, width + w, depth + w, height + w),  # ceiling
        _box(-w, -w, 0.0, 0.0, depth + w, height),               # west wall
        _box(width, -w, 0.0, width + w, depth + w, height),      # east wall
        _box(0.0, -w, 0.0, width, 0.0, height),                  # south wall
        _box(0.0, depth, 0.0, width, depth + w, height),         # north wall
    ]
    return bounds, obstacles


def _wall_with_gap(x0, x1, y0, y1, z1, gap_axis, gap_lo, gap_hi) -> list[Aabb]:
    """Interior wall slab split around one doorway gap."""
    if gap_axis == "x":
        return [
            _box(x0, y0, 0.0, gap_lo, y1, z1),
            _box(gap_hi, y0, 0.0, x1, y1, z1),
        ]
    return [
        _box(x0, y0, 0.0, x1, gap_lo, z1),
        _box(x0, gap_hi, 0.0, x1, y1, z1),
    ]


def _resample(waypoints_xy: list[tuple[float, float]], z: float, spacing: float) -> list[Point3]:
    poses = [Point3(waypoints_xy[0][0], waypoints_xy[0][1], z)]
    for (ax, ay), (bx, by) in zip(waypoints_xy, waypoints_xy[1:]):
        seg = math.hypot(bx - ax, by - ay)
        steps = max(1, math.ceil(seg / spacing))
        for n in range(1, steps + 1):
            t = n / steps
            poses.append(Point3(ax + t * (bx - ax), ay + t * (by - ay), z))
    return poses


def _preset_corridor():
    bounds, obstacles = _shell(6.4, 1.8, 2.6)
    trajectory = [(0.9, 0.9), (5.5, 0.9)]
    return bounds, obstacles, trajectory


def _preset_two_room():
    bounds, obstacles = _shell(6.3, 3.0, 2.6)
    obstacles += _wall_with_gap(3.0, 3.3, 0.0, 3.0, 2.6, "y", 0.9, 2.1)
    trajectory = [
        (0.8, 0.8), (0.8, 2.2), (2.0, 1.5), (3.15, 1.5),
        (4.3, 1.5), (5.5, 0.8), (5.5, 2.2),
    ]
    return bounds, obstacles, trajectory


def _preset_office():
    bounds, obstacles = _shell(11.0, 8.0, 2.8)
    # Central corridor y in [3.1, 4.9]; two rooms below it, two above.
    # Both corridor walls carry doorways at x 2.0-3.2 and 7.8-9.0.
    for y0, y1 in ((2.8, 3.1), (4.9, 5.2)):
        obstacles += [
            _box(0.0, y0, 0.0, 2.0, y1, 2.8),
            _box(3.2, y0, 0.0, 7.8, y1, 2.8),
            _box(9.0, y0, 0.0, 11.0, y1, 2.8),
        ]
    # Room dividers inside the south and north halves.
    obstacles += [
        _box(5.35, 0.0, 0.0, 5.65, 2.8, 2.8),
        _box(5.35, 5.2, 0.0, 5.65, 8.0, 2.8),
    ]
    trajectory = [
        (1.2, 1.4), (4.2, 1.4), (2.6, 1.4), (2.6, 4.0),
        (8.4, 4.0), (8.4, 1.4), (9.8, 1.4), (6.6, 1.4),
        (8.4, 1.4), (8.4, 4.0), (2.6, 4.0), (2.6, 6.6),
        (1.2, 6.6), (4.2, 6.6), (2.6, 6.6), (2.6, 4.0),
        (8.4, 4.0), (8.4, 6.6), (6.6, 6.6), (9.8, 6.6),
    ]
    return bounds, obstacles, trajectory


def _preset_warehouse():
    bounds, obstacles = _shell(14.0, 12.0, 2.6)
    for x0 in (3.2, 6.5, 9.8):
        obstacles.append(_box(x0, 1.5, 0.0, x0 + 0.9, 10.5, 2.6))
    trajectory = [
        (1.6, 0.8), (1.6, 11.2), (12.3, 11.2), (12.3, 0.8),
        (1.6, 0.8), (5.3, 0.8), (5.3, 11.2), (5.3, 0.8),
        (8.6, 0.8), (8.6, 11.2),
    ]
    return bounds, obstacles, trajectory


def _preset_open_space():
    bounds, obstacles = _shell(13.0, 9.0, 3.0)
    obstacles.append(_box(5.5, 0.0, 0.0, 7.5, 2.0, 3.0))  # storage block
    # Partial wall with one gap into the top strip.
    obstacles += [
        _box(0.0, 6.8, 0.0, 8.5, 7.1, 3.0),
        _box(9.7, 6.8, 0.0, 13.0, 7.1, 3.0),
    ]
    trajectory = [
        (1.0, 1.0), (1.0, 5.5), (4.0, 3.0), (8.0, 5.0),
        (11.5, 1.5), (11.5, 5.5), (9.1, 6.0), (9.1, 8.0),
        (2.0, 8.0),
    ]
    return bounds, obstacles, trajectory


def _preset_pillars():
    bounds, obstacles = _shell(5.5, 5.5, 3.0)
    # A row of pillars across the room; the explorer only circles the
    # perimeter and never passes between them. Cross-room rays still observe
    # the gaps, so portals can appear where nobody ever walked.
    for cy in (1.8, 3.7):
        obstacles.append(_box(2.55, cy - 0.2, 0.0, 2.95, cy + 0.2, 3.0))
    trajectory = [
        (0.8, 0.8), (0.8, 4.7), (2.0, 4.7), (2.0, 0.8),
        (3.5, 0.8), (3.5, 4.7), (4.7, 4.7), (4.7, 0.8),
        (0.8, 0.8),
    ]
    return bounds, obstacles, trajectory


_PRESETS = {
    "corridor": _preset_corridor,
    "two_room": _preset_two_room,
    "office": _preset_office,
    "warehouse": _preset_warehouse,
    "open_space": _preset_open_space,
    "pillars": _preset_pillars,
}


def build_preset(name: str, bounds_scale: float = 1.0, rng=None) -> tuple[SceneSpec, list[Point3]]:
    """Deterministic scene and explorer trajectory for a named preset.

    `bounds_scale` scales the whole scene uniformly. The rng argument is
    accepted for interface symmetry; preset layouts are fixed.
    """
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose one of {', '.join(PRESET_NAMES)}")
    if bounds_scale <= 0.0:
        raise ValueError("bounds_scale must be positive")
    bounds, obstacles, waypoints = _PRESETS[name]()
    k = bounds_scale

    def scale_box(b: Aabb) -> Aabb:
        return Aabb(Point3(*(c * k for c in b.lo)), Point3(*(c * k for c in b.hi)))

    scene = SceneSpec(
        bounds=scale_box(bounds),
        obstacles=[scale_box(b) for b in obstacles],
        preset_name=name,
    )
    trajectory = _resample(
        [(x * k, y * k) for x, y in waypoints], _POSE_HEIGHT * k, _POSE_SPACING * k
    )
    return scene, trajectory


def scene_to_json(scene: SceneSpec, sink: IO[str]) -> None:
    payload = {
        "preset": scene.preset_name,
        "bounds": [list(scene.bounds.lo), list(scene.bounds.hi)],
        "obstacles": [[list(b.lo), list(b.hi)] for b in scene.obstacles],
    }
    json.dump(payload, sink, indent=1)
    sink.write("\n")


def scene_from_json(source: IO[str]) -> SceneSpec:
    payload = json.load(source)
    return SceneSpec(
        bounds=Aabb(Point3.of(payload["bounds"][0]), Point3.of(payload["bounds"][1])),
        obstacles=[Aabb(Point3.of(lo), Point3.of(hi)) for lo, hi in payload["obstacles"]],
        preset_name=payload["preset"],
    )


def rasterize(scene: SceneSpec, voxel_size: float) -> GroundTruth:
    """Complete occupancy over the scene bounds: a voxel is Occupied iff its
    center lies inside an obstacle box, Free otherwise."""
    s = voxel_size
    lo, hi = scene.bounds.lo, scene.bounds.hi
    i_lo = [math.ceil(lo[a] / s - 0.5) for a in range(3)]
    i_hi = [math.ceil(hi[a] / s - 0.5) - 1 for a in range(3)]
    axes = [np.arange(i_lo[a], i_hi[a] + 1) for a in range(3)]
    ii, jj, kk = np.meshgrid(*axes, indexing="ij")
    indices = np.stack([ii.ravel(), jj.ravel(), kk.ravel()], axis=1)
    centers = (indices + 0.5) * s
    occupied = np.zeros(len(indices), dtype=bool)
    for box in scene.obstacles:
        inside = np.all((centers >= np.asarray(box.lo)) & (centers < np.asarray(box.hi)), axis=1)
        occupied |= inside
    states: dict[VoxelIndex, object] = {}
    for row, occ_flag in zip(indices, occupied):
        states[(int(row[0]), int(row[1]), int(row[2]))] = OCCUPIED if occ_flag else FREE
    return GroundTruth(OccupancyGrid(voxel_size, states))


def simulate_observations(
    scene: SceneSpec, trajectory: list[Point3], model: ObservationModel
) -> SlamMap:
    """Cast seeded uniform ray bundles from every pose; each nearest obstacle
    hit within range becomes a landmark observation (optionally perturbed by
    isotropic Gaussian noise)."""
    rng = np.random.default_rng(model.rng_seed)
    lows = np.array([b.lo for b in scene.obstacles], dtype=float)
    highs = np.array([b.hi for b in scene.obstacles], dtype=float)
    observations: list[LandmarkObservation] = []
    for pose in trajectory:
        raw = rng.normal(size=(model.rays_per_pose, 3))
        norms = np.linalg.norm(raw, axis=1)
        norms[norms < 1e-12] = 1.0
        dirs = raw / norms[:, None]
        p = np.asarray(pose, dtype=float)
        safe = np.where(dirs == 0.0, 1e-300, dirs)
        t_lo = (lows[None, :, :] - p[None, None, :]) / safe[:, None, :]
        t_hi = (highs[None, :, :] - p[None, None, :]) / safe[:, None, :]
        t_near = np.minimum(t_lo, t_hi).max(axis=2)
        t_far = np.maximum(t_lo, t_hi).min(axis=2)
        hit = (t_near <= t_far) & (t_near > 1e-9)
        t_near = np.where(hit, t_near, np.inf)
        t_best = t_near.min(axis=1)
        valid = np.isfinite(t_best) & (t_best <= model.max_range)
        landmarks = p[None, :] + dirs[valid] * t_best[valid][:, None]
        if model.landmark_noise_sigma > 0.0 and len(landmarks):
            landmarks = landmarks + rng.normal(
                0.0, model.landmark_noise_sigma, size=landmarks.shape
            )
        for row in landmarks:
            landmark = Point3.of(row)
            if landmark != pose:
                observations.append(LandmarkObservation(pose, landmark))
    return SlamMap(observations=observations, trajectory=list(trajectory))
