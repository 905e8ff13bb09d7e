"""Independent reference implementations used to verify the fast paths."""

from __future__ import annotations

import heapq
import math

import numpy as np

from voxnav.geometry import Point3, traverse_ray, voxel_center
from voxnav.tsdf import FREE


def sampled_segment_voxels(origin, endpoint, voxel_size, step=1e-4):
    """Voxel set collected by densely sampling points along the segment."""
    a = np.asarray(origin, dtype=float)
    b = np.asarray(endpoint, dtype=float)
    length = float(np.linalg.norm(b - a))
    n = max(2, int(math.ceil(length / step)) + 1)
    t = np.linspace(0.0, 1.0, n)
    points = a[None, :] + t[:, None] * (b - a)[None, :]
    indices = np.floor(points / voxel_size).astype(np.int64)
    return {tuple(row) for row in np.unique(indices, axis=0)}


def segment_free_both_ways(occ, a, b):
    """Brute-force sight test matching the pipeline's symmetric semantics."""
    states = occ.states
    for seg in (traverse_ray(a, b, occ.voxel_size), traverse_ray(b, a, occ.voxel_size)):
        for idx in seg:
            if states.get(idx) is not FREE:
                return False
    return True


def find_convexity_violation(occ, voxels):
    """First pair of cluster voxel centers that cannot see each other."""
    s = occ.voxel_size
    ordered = sorted(voxels)
    centers = [voxel_center(v, s) for v in ordered]
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            if not segment_free_both_ways(occ, centers[i], centers[j]):
                return ordered[i], ordered[j]
    return None


_OFFSETS_26 = [
    (di, dj, dk, math.sqrt(di * di + dj * dj + dk * dk))
    for di in (-1, 0, 1)
    for dj in (-1, 0, 1)
    for dk in (-1, 0, 1)
    if (di, dj, dk) != (0, 0, 0)
]


def dijkstra_grid_length(occ, start, goal):
    """Optimal 26-connected path length between voxel indices, or None."""
    if start == goal:
        return 0.0
    s = occ.voxel_size
    states = occ.states
    dist = {start: 0.0}
    heap = [(0.0, start)]
    done = set()
    while heap:
        d, cur = heapq.heappop(heap)
        if cur == goal:
            return d
        if cur in done:
            continue
        done.add(cur)
        ci, cj, ck = cur
        for di, dj, dk, w in _OFFSETS_26:
            nb = (ci + di, cj + dj, ck + dk)
            if states.get(nb) is not FREE:
                continue
            nd = d + w * s
            if nd < dist.get(nb, math.inf):
                dist[nb] = nd
                heapq.heappush(heap, (nd, nb))
    return None


def dijkstra_graph_length(adjacency, start, goal):
    """Shortest path length over an adjacency-list graph, or None."""
    dist = {start: 0.0}
    heap = [(0.0, start)]
    done = set()
    while heap:
        d, cur = heapq.heappop(heap)
        if cur == goal:
            return d
        if cur in done:
            continue
        done.add(cur)
        for nb, w in adjacency.get(cur, ()):
            nd = d + w
            if nd < dist.get(nb, math.inf):
                dist[nb] = nd
                heapq.heappush(heap, (nd, nb))
    return None


def augmented_plan_adjacency(topo, nav, a, b, cluster_a, cluster_b):
    """The same A/B-augmented graph plan() searches, built independently."""
    adjacency = nav.adjacency()
    adjacency[-1] = []
    adjacency[-2] = []
    point_a = Point3.of(a)
    point_b = Point3.of(b)
    for temp, cid, point in ((-1, cluster_a, point_a), (-2, cluster_b, point_b)):
        for portal in topo.portals_of(cid):
            w = point.distance_to(portal.center)
            adjacency[temp].append((portal.id, w))
            adjacency[portal.id].append((temp, w))
    if cluster_a == cluster_b:
        d = point_a.distance_to(point_b)
        adjacency[-1].append((-2, d))
        adjacency[-2].append((-1, d))
    return adjacency


def semi_extent_by_counting(values, fraction):
    """Smallest half-width covering at least the given fraction of values."""
    ordered = sorted(abs(v) for v in values)
    k = max(0, math.ceil(fraction * len(ordered)) - 1)
    return ordered[k]
