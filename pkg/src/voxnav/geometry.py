"""Primitive 3D geometry: points, axis-aligned boxes, voxel indexing and
exact voxel ray traversal.

Voxel convention: voxel (i, j, k) covers the half-open cube
[i*s, (i+1)*s) x [j*s, (j+1)*s) x [k*s, (k+1)*s) for voxel size s, so a
point exactly on a lower face belongs to the upper voxel.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple

import numpy as np

VoxelIndex = tuple[int, int, int]


class Point3(NamedTuple):
    x: float
    y: float
    z: float

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)

    def distance_to(self, other: "Point3") -> float:
        return math.dist(self, other)

    @staticmethod
    def of(values) -> "Point3":
        return Point3(float(values[0]), float(values[1]), float(values[2]))


class Aabb(NamedTuple):
    """Axis-aligned box; `lo` is inclusive, `hi` is exclusive for containment."""

    lo: Point3
    hi: Point3

    def contains(self, p) -> bool:
        return (
            self.lo[0] <= p[0] < self.hi[0]
            and self.lo[1] <= p[1] < self.hi[1]
            and self.lo[2] <= p[2] < self.hi[2]
        )

    def volume(self) -> float:
        return max(0.0, (self.hi.x - self.lo.x)) * max(0.0, (self.hi.y - self.lo.y)) * max(
            0.0, (self.hi.z - self.lo.z)
        )

    def surface_distance(self, p) -> float:
        """Distance from p to the box boundary (0 if exactly on a face)."""
        dx = max(self.lo.x - p[0], 0.0, p[0] - self.hi.x)
        dy = max(self.lo.y - p[1], 0.0, p[1] - self.hi.y)
        dz = max(self.lo.z - p[2], 0.0, p[2] - self.hi.z)
        outside = math.sqrt(dx * dx + dy * dy + dz * dz)
        if outside > 0.0:
            return outside
        # Inside: distance to the nearest face.
        return min(
            p[0] - self.lo.x, self.hi.x - p[0],
            p[1] - self.lo.y, self.hi.y - p[1],
            p[2] - self.lo.z, self.hi.z - p[2],
        )

    @staticmethod
    def around(points: Iterable) -> "Aabb":
        pts = list(points)
        if not pts:
            raise ValueError("cannot bound an empty point set")
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        zs = [p[2] for p in pts]
        return Aabb(Point3(min(xs), min(ys), min(zs)), Point3(max(xs), max(ys), max(zs)))


def world_to_voxel(p, voxel_size: float) -> VoxelIndex:
    """Voxel index of the point under the lower-inclusive convention."""
    if voxel_size <= 0.0:
        raise ValueError("voxel_size must be positive")
    return (
        math.floor(p[0] / voxel_size),
        math.floor(p[1] / voxel_size),
        math.floor(p[2] / voxel_size),
    )


def voxel_center(idx: VoxelIndex, voxel_size: float) -> Point3:
    return Point3(
        (idx[0] + 0.5) * voxel_size,
        (idx[1] + 0.5) * voxel_size,
        (idx[2] + 0.5) * voxel_size,
    )


def _axis_init(origin: float, cell: int, d: float) -> tuple[float, float]:
    """Initial (t_max, t_delta) of one axis for the grid walk."""
    if d > 0.0:
        return (cell + 1.0 - origin) / d, 1.0 / d
    if d < 0.0:
        return (cell - origin) / d, -1.0 / d
    return math.inf, math.inf


def traverse_ray(origin, endpoint, voxel_size: float) -> list[VoxelIndex]:
    """Walk the voxels crossed by the segment origin -> endpoint.

    Returns the face-connected voxel sequence from the origin's voxel to the
    endpoint's voxel: the voxels whose interior the segment intersects, with
    ties at face/edge/corner crossings broken in axis order x, y, z.
    """
    if voxel_size <= 0.0:
        raise ValueError("voxel_size must be positive")
    ox, oy, oz = origin[0] / voxel_size, origin[1] / voxel_size, origin[2] / voxel_size
    ex, ey, ez = endpoint[0] / voxel_size, endpoint[1] / voxel_size, endpoint[2] / voxel_size
    dx, dy, dz = ex - ox, ey - oy, ez - oz
    if dx == 0.0 and dy == 0.0 and dz == 0.0:
        raise ValueError("zero-length segment")

    i, j, k = math.floor(ox), math.floor(oy), math.floor(oz)
    ie, je, ke = math.floor(ex), math.floor(ey), math.floor(ez)
    step_x = 1 if dx > 0.0 else -1
    step_y = 1 if dy > 0.0 else -1
    step_z = 1 if dz > 0.0 else -1
    tmax_x, tdelta_x = _axis_init(ox, i, dx)
    tmax_y, tdelta_y = _axis_init(oy, j, dy)
    tmax_z, tdelta_z = _axis_init(oz, k, dz)

    visited = [(i, j, k)]
    max_steps = abs(ie - i) + abs(je - j) + abs(ke - k)
    for _ in range(max_steps):
        if i == ie and j == je and k == ke:
            break
        if tmax_x <= tmax_y and tmax_x <= tmax_z:
            i += step_x
            tmax_x += tdelta_x
        elif tmax_y <= tmax_z:
            j += step_y
            tmax_y += tdelta_y
        else:
            k += step_z
            tmax_z += tdelta_z
        visited.append((i, j, k))
    return visited


def ray_box_entry(origin: np.ndarray, direction: np.ndarray, box: Aabb) -> float | None:
    """Slab-method entry parameter of a ray into a box, or None if missed.

    Only strictly positive entry distances count: a ray starting inside or on
    the box does not report a hit.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = (np.asarray(box.lo) - origin) / direction
        hi = (np.asarray(box.hi) - origin) / direction
    t_near = np.nanmax(np.minimum(lo, hi))
    t_far = np.nanmin(np.maximum(lo, hi))
    if t_near > t_far or t_far < 0.0 or t_near <= 0.0:
        return None
    return float(t_near)
