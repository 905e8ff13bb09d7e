"""Convex free-space clusters: compact growing from trajectory seeds and
obstacle-ratio merging of adjacent clusters.

Growing repeats three steps until no voxel can be added: collect the free
face-neighbors of the cluster, gate them by compactness (distance to the
centroid at most r_min + delta, where r_min is the smallest principal
semi-extent covering the compactness fraction of the cluster), and keep only
candidates whose sight lines to every cluster voxel cross free voxels alone.
Unknown voxels block sight lines and are never added.

Merging repeatedly combines adjacent cluster pairs whose joint convex hull
contains less than the configured fraction of non-free voxel centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import PipelineError
from .geometry import Point3, VoxelIndex
from .hulls import EPS_HULL, ConvexHull, voxel_region_hull
from .tsdf import FREE, OccupancyGrid, trajectory_voxels
from . import _kernels

_NEIGHBORS_6 = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]


@dataclass
class GrowConfig:
    compactness_fraction: float = 0.98
    delta_margin: float | None = None  # None resolves to 2 * voxel_size
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.compactness_fraction <= 1.0:
            raise ValueError("compactness_fraction must be in (0, 1]")
        if self.delta_margin is not None and self.delta_margin < 0.0:
            raise ValueError("delta_margin must be non-negative")

    def resolved_delta(self, voxel_size: float) -> float:
        return 2.0 * voxel_size if self.delta_margin is None else self.delta_margin


@dataclass
class MergeConfig:
    obstacle_ratio_threshold: float = 0.05
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.obstacle_ratio_threshold < 1.0:
            raise ValueError("obstacle_ratio_threshold must be in [0, 1)")


@dataclass
class VoxelCluster:
    """A convex free-space region; hull covers the full voxel cubes.

    voxels/centroid are None for clusters reconstructed from serialized maps.
    """

    id: int
    voxels: frozenset[VoxelIndex] | None
    centroid: Point3 | None
    hull: ConvexHull
    volume_m3: float
    voxel_size: float


def make_cluster(
    cluster_id: int,
    voxels,
    voxel_size: float,
    hull: ConvexHull | None = None,
) -> VoxelCluster:
    voxel_set = frozenset(voxels)
    if not voxel_set:
        raise ValueError("cluster must contain at least one voxel")
    arr = np.array(sorted(voxel_set), dtype=np.float64)
    centroid = Point3.of((arr + 0.5).mean(axis=0) * voxel_size)
    return VoxelCluster(
        id=cluster_id,
        voxels=voxel_set,
        centroid=centroid,
        hull=hull if hull is not None else voxel_region_hull(voxel_set, voxel_size),
        volume_m3=len(voxel_set) * voxel_size**3,
        voxel_size=voxel_size,
    )


class _FreeSpaceIndex:
    """Dense blocked mask over the grid's bounding box for the sight kernels.

    Everything that is not stored Free (Occupied, Unknown, outside the box)
    is blocked. Frame coordinates are voxel units shifted by `offset`.
    """

    __slots__ = ("blocked", "offset", "voxel_size")

    def __init__(self, blocked: np.ndarray, offset: np.ndarray, voxel_size: float):
        self.blocked = blocked
        self.offset = offset
        self.voxel_size = voxel_size

    @staticmethod
    def from_grid(occ: OccupancyGrid) -> "_FreeSpaceIndex":
        if not occ.states:
            raise ValueError("occupancy grid is empty")
        all_idx = np.array(list(occ.states.keys()), dtype=np.int64)
        lo = all_idx.min(axis=0) - 1
        hi = all_idx.max(axis=0) + 1
        blocked = np.ones(tuple(hi - lo + 1), dtype=np.uint8)
        free = [idx for idx, st in occ.states.items() if st is FREE]
        if free:
            free_arr = np.array(free, dtype=np.int64) - lo
            blocked[free_arr[:, 0], free_arr[:, 1], free_arr[:, 2]] = 0
        return _FreeSpaceIndex(blocked, lo.astype(np.float64), occ.voxel_size)

    def frame_centers(self, indices) -> np.ndarray:
        arr = np.asarray(list(indices), dtype=np.float64).reshape(-1, 3)
        return arr - self.offset[None, :] + 0.5


def seed_cluster(
    occ: OccupancyGrid,
    trajectory: list[Point3],
    already_clustered,
    rng: np.random.Generator,
) -> VoxelIndex | None:
    """Uniformly random unclustered trajectory voxel, or None when all are taken."""
    if not trajectory:
        raise ValueError("trajectory is empty")
    eligible = [
        v for v in trajectory_voxels(trajectory, occ.voxel_size) if v not in already_clustered
    ]
    if not eligible:
        return None
    for v in eligible:
        if occ.state(v) is not FREE:
            raise PipelineError(
                f"trajectory voxel {v} is {occ.state(v)}; carve the trajectory before growing"
            )
    return eligible[int(rng.integers(len(eligible)))]


def adjacent_free_candidates(occ: OccupancyGrid, cluster: VoxelCluster) -> set[VoxelIndex]:
    """Free face-neighbors of the cluster; Unknown neighbors are excluded."""
    return _frontier(occ, cluster.voxels)


def _frontier(occ: OccupancyGrid, voxels) -> set[VoxelIndex]:
    states = occ.states
    out: set[VoxelIndex] = set()
    for i, j, k in voxels:
        for di, dj, dk in _NEIGHBORS_6:
            nb = (i + di, j + dj, k + dk)
            if nb not in voxels and states.get(nb) is FREE:
                out.add(nb)
    return out


def _principal_semi_extent(centers: np.ndarray, fraction: float) -> float:
    """Smallest per-axis semi-extent covering `fraction` of the points.

    Axes come from the eigen-decomposition of the point covariance; the
    semi-extent of an axis is the ceil(fraction * N)-th smallest absolute
    projection onto it.
    """
    centered = centers - centers.mean(axis=0)
    cov = centered.T @ centered / centers.shape[0]
    _eigvals, axes = np.linalg.eigh(cov)
    abs_proj = np.abs(centered @ axes)
    kth = max(0, math.ceil(fraction * centers.shape[0]) - 1)
    extents = np.partition(abs_proj, kth, axis=0)[kth]
    return float(extents.min())


def _compact_keep(
    centers: np.ndarray,
    candidates: list[VoxelIndex],
    voxel_size: float,
    fraction: float,
    delta: float,
) -> list[VoxelIndex]:
    if centers.shape[0] < 4 or not candidates:
        return list(candidates)
    r_min = _principal_semi_extent(centers, fraction)
    centroid = centers.mean(axis=0)
    cand_centers = (np.array(candidates, dtype=np.float64) + 0.5) * voxel_size
    dist = np.linalg.norm(cand_centers - centroid[None, :], axis=1)
    limit = r_min + delta
    return [c for c, d in zip(candidates, dist) if d <= limit]


def compact_filter(cluster: VoxelCluster, candidates, cfg: GrowConfig) -> set[VoxelIndex]:
    """Keep candidates within r_min + delta of the cluster centroid.

    Clusters of fewer than 4 voxels have a rank-deficient covariance and pass
    every candidate through.
    """
    if cluster.voxels is None:
        raise ValueError("cluster has no voxel set")
    centers = (np.array(sorted(cluster.voxels), dtype=np.float64) + 0.5) * cluster.voxel_size
    kept = _compact_keep(
        centers,
        sorted(candidates),
        cluster.voxel_size,
        cfg.compactness_fraction,
        cfg.resolved_delta(cluster.voxel_size),
    )
    return set(kept)


def convexity_filter(occ: OccupancyGrid, cluster: VoxelCluster, candidates) -> set[VoxelIndex]:
    """Keep candidates whose segments to every cluster voxel center cross
    only Free voxels. All candidates are judged against the cluster as passed
    in (batch semantics)."""
    if cluster.voxels is None:
        raise ValueError("cluster has no voxel set")
    cand = sorted(candidates)
    if not cand:
        return set()
    space = _FreeSpaceIndex.from_grid(occ)
    keep = _kernels.filter_visible(
        space.blocked,
        space.frame_centers(cand),
        space.frame_centers(sorted(cluster.voxels)),
    )
    return {c for c, k in zip(cand, keep) if k}


def grow_cluster(
    occ: OccupancyGrid,
    seed: VoxelIndex,
    cfg: GrowConfig,
    claimed=frozenset(),
    cluster_id: int = 0,
    _space: _FreeSpaceIndex | None = None,
) -> VoxelCluster:
    """Grow one cluster from a free seed voxel to its compact-convex fixpoint.

    Voxels in `claimed` belong to other clusters: they are never added, but
    being free space they do not block sight lines.
    """
    if occ.state(seed) is not FREE:
        raise ValueError(f"seed voxel {seed} is not free")
    space = _space if _space is not None else _FreeSpaceIndex.from_grid(occ)
    s = occ.voxel_size
    delta = cfg.resolved_delta(s)
    voxels: set[VoxelIndex] = {seed}

    while True:
        candidates = sorted(_frontier(occ, voxels) - claimed)
        if not candidates:
            break
        member_arr = np.array(sorted(voxels), dtype=np.float64)
        centers = (member_arr + 0.5) * s
        candidates = _compact_keep(centers, candidates, s, cfg.compactness_fraction, delta)
        if not candidates:
            break
        cand_frame = space.frame_centers(candidates)
        member_frame = member_arr - space.offset[None, :] + 0.5
        keep = _kernels.filter_visible(space.blocked, cand_frame, member_frame)
        survivors = [c for c, k in zip(candidates, keep) if k]
        if not survivors:
            break
        # Survivors may be mutually blocked; accept greedily in lexicographic
        # order so the cluster stays pairwise convex-free.
        mutual = _kernels.mutually_visible_subset(space.blocked, space.frame_centers(survivors))
        added = [c for c, k in zip(survivors, mutual) if k]
        if not added:
            break
        voxels.update(added)
    return make_cluster(cluster_id, voxels, s)


def grow_all(occ: OccupancyGrid, trajectory: list[Point3], cfg: GrowConfig) -> list[VoxelCluster]:
    """Grow clusters from random trajectory seeds until the whole trajectory
    is covered by clustered space. Clusters are voxel-disjoint with ids dense
    from 0; later clusters cannot enter voxels claimed by earlier ones."""
    rng = np.random.default_rng(cfg.rng_seed)
    space = _FreeSpaceIndex.from_grid(occ)
    claimed: set[VoxelIndex] = set()
    clusters: list[VoxelCluster] = []
    while True:
        seed = seed_cluster(occ, trajectory, claimed, rng)
        if seed is None:
            break
        cluster = grow_cluster(
            occ, seed, cfg, claimed=claimed, cluster_id=len(clusters), _space=space
        )
        clusters.append(cluster)
        claimed.update(cluster.voxels)
    return clusters


def obstacle_ratio(occ: OccupancyGrid, hull: ConvexHull) -> float:
    """Fraction of non-free (occupied or unknown) voxel centers inside the hull."""
    box = hull.bounding_box()
    s = occ.voxel_size
    i_lo = [math.ceil(box.lo[a] / s - 0.5) for a in range(3)]
    i_hi = [math.floor(box.hi[a] / s - 0.5) for a in range(3)]
    if any(i_hi[a] < i_lo[a] for a in range(3)):
        raise ValueError("hull contains no voxel centers")
    ii, jj, kk = np.meshgrid(
        np.arange(i_lo[0], i_hi[0] + 1),
        np.arange(i_lo[1], i_hi[1] + 1),
        np.arange(i_lo[2], i_hi[2] + 1),
        indexing="ij",
    )
    indices = np.stack([ii.ravel(), jj.ravel(), kk.ravel()], axis=1)
    centers = (indices + 0.5) * s
    inside = hull.contains_many(centers, EPS_HULL)
    total = int(inside.sum())
    if total == 0:
        raise ValueError("hull contains no voxel centers")
    states = occ.states
    blocked = sum(
        1 for idx in indices[inside] if states.get((int(idx[0]), int(idx[1]), int(idx[2]))) is not FREE
    )
    return blocked / total


def _adjacent_pairs(clusters: list[VoxelCluster]) -> list[tuple[int, int]]:
    """Unordered list-position pairs of clusters sharing at least one face."""
    owner: dict[VoxelIndex, int] = {}
    for pos, cluster in enumerate(clusters):
        for v in cluster.voxels:
            owner[v] = pos
    pairs: set[tuple[int, int]] = set()
    for pos, cluster in enumerate(clusters):
        for i, j, k in cluster.voxels:
            for di, dj, dk in _NEIGHBORS_6:
                other = owner.get((i + di, j + dj, k + dk))
                if other is not None and other != pos:
                    pairs.add((min(pos, other), max(pos, other)))
    return sorted(pairs)


def merge_pass(
    occ: OccupancyGrid,
    clusters: list[VoxelCluster],
    cfg: MergeConfig,
    rng: np.random.Generator,
) -> tuple[list[VoxelCluster], int]:
    """One randomized sweep over adjacent cluster pairs.

    Each cluster takes part in at most one merge per pass; a pair is merged
    when the obstacle ratio of its combined hull is below the threshold.
    Returned cluster ids are re-densified from 0.
    """
    s = occ.voxel_size
    pair_list = _adjacent_pairs(clusters)
    merges = 0
    consumed: set[int] = set()
    merged_at: dict[int, tuple[frozenset, ConvexHull]] = {}
    for pair_idx in rng.permutation(len(pair_list)):
        a, b = pair_list[pair_idx]
        if a in consumed or b in consumed:
            continue
        union = clusters[a].voxels | clusters[b].voxels
        hull = voxel_region_hull(union, s)
        if obstacle_ratio(occ, hull) < cfg.obstacle_ratio_threshold:
            consumed.add(a)
            consumed.add(b)
            merged_at[a] = (union, hull)
            merges += 1
    if not merges:
        return list(clusters), 0
    result: list[VoxelCluster] = []
    for pos, cluster in enumerate(clusters):
        if pos in merged_at:
            union, hull = merged_at[pos]
            result.append(make_cluster(len(result), union, s, hull=hull))
        elif pos in consumed:
            continue
        else:
            result.append(replace(cluster, id=len(result)))
    return result, merges


def merge_all(
    occ: OccupancyGrid,
    clusters: list[VoxelCluster],
    cfg: MergeConfig,
    rng: np.random.Generator | None = None,
) -> list[VoxelCluster]:
    """Repeat merge passes until none succeeds."""
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    current = list(clusters)
    while True:
        current, merges = merge_pass(occ, current, cfg, rng)
        if merges == 0:
            return current
