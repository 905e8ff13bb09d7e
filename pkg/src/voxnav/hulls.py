"""Convex hulls in vertex plus half-space form.

Hulls are computed with Quickhull (scipy's qhull binding). Degenerate inputs
(fewer than 4 points, collinear or coplanar sets) are symmetrically inflated
by EPS_DEGENERATE along the coordinate axes before hulling, so every input
point stays inside the returned hull.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull as _QHull
from scipy.spatial import QhullError

from .geometry import Aabb, Point3, VoxelIndex

EPS_HULL = 1e-9
EPS_DEGENERATE = 1e-6

_AXIS_OFFSETS = np.array(
    [
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ]
)


@dataclass(frozen=True)
class ConvexHull:
    """Hull as vertices (V, 3) and outward half-spaces n . x <= d."""

    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    volume: float

    def contains(self, p, eps: float = EPS_HULL) -> bool:
        point = np.asarray(p, dtype=float)
        return bool(np.all(self.normals @ point <= self.offsets + eps))

    def contains_many(self, points: np.ndarray, eps: float = EPS_HULL) -> np.ndarray:
        """Boolean containment mask for an (N, 3) point array."""
        return np.all(points @ self.normals.T <= self.offsets[None, :] + eps, axis=1)

    def bounding_box(self) -> Aabb:
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return Aabb(Point3.of(lo), Point3.of(hi))


def _from_qhull(points: np.ndarray) -> ConvexHull:
    hull = _QHull(points)
    # qhull equations are n . x + b <= 0 with unit n; convert to n . x <= d.
    normals = hull.equations[:, :3].copy()
    offsets = -hull.equations[:, 3].copy()
    vertices = points[hull.vertices].copy()
    return ConvexHull(vertices=vertices, normals=normals, offsets=offsets, volume=float(hull.volume))


def compute_hull(points) -> ConvexHull:
    """Minimal convex hull of the points, inflating degenerate inputs."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, 3)
    if pts.shape[0] == 0:
        raise ValueError("cannot hull an empty point set")
    if pts.shape[0] >= 4:
        try:
            return _from_qhull(pts)
        except QhullError:
            pass
    inflated = (pts[:, None, :] + EPS_DEGENERATE * _AXIS_OFFSETS[None, :, :]).reshape(-1, 3)
    return _from_qhull(inflated)


def hull_contains(hull: ConvexHull, p, eps: float = EPS_HULL) -> bool:
    return hull.contains(p, eps)


def voxel_region_hull(voxels, voxel_size: float) -> ConvexHull:
    """Convex hull of the union of voxel cubes.

    Built from the corner lattice points of boundary voxels only; interior
    voxel corners can never be hull vertices.
    """
    voxel_set = set(voxels)
    if not voxel_set:
        raise ValueError("cannot hull an empty voxel set")
    corners: set[VoxelIndex] = set()
    for i, j, k in voxel_set:
        boundary = (
            (i + 1, j, k) not in voxel_set
            or (i - 1, j, k) not in voxel_set
            or (i, j + 1, k) not in voxel_set
            or (i, j - 1, k) not in voxel_set
            or (i, j, k + 1) not in voxel_set
            or (i, j, k - 1) not in voxel_set
        )
        if boundary:
            for di in (0, 1):
                for dj in (0, 1):
                    for dk in (0, 1):
                        corners.add((i + di, j + dj, k + dk))
    pts = np.array(sorted(corners), dtype=float) * voxel_size
    return compute_hull(pts)
