"""End-to-end build orchestration and the flat key=value configuration."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, fields
from typing import Callable

import numpy as np

from .clustering import GrowConfig, MergeConfig, VoxelCluster, grow_all, merge_pass
from .errors import ConfigError, PipelineError
from .navgraph import NavGraph, build_nav_graph
from .slam_map import SlamMap
from .topomap import TopologicalMap, build_topological_map
from .tsdf import (
    OccupancyGrid,
    TsdfConfig,
    TsdfGrid,
    binarize,
    carve_trajectory,
    filter_small_components,
    integrate_slam_map,
)

_INT_KEYS = {"min_component_size", "seed"}


@dataclass
class PipelineConfig:
    voxel_size: float = 0.25
    truncation_distance: float = 0.5
    max_ray_length: float = 5.0
    occupancy_threshold_fraction: float = 0.9
    min_component_size: int = 5
    compactness_fraction: float = 0.98
    delta_margin: float | None = None  # None resolves to 2 * voxel_size
    obstacle_ratio_threshold: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.voxel_size <= 0.0:
            raise ConfigError("voxel_size must be positive")
        try:
            self.tsdf_config()
            self.grow_config()
            self.merge_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def resolved_delta(self) -> float:
        return 2.0 * self.voxel_size if self.delta_margin is None else self.delta_margin

    def child_seed(self, slot: int) -> int:
        # Slots: 0 observations, 1 growing, 2 merging, 3 benchmark sampling.
        children = np.random.SeedSequence(self.seed).spawn(4)
        return int(children[slot].generate_state(1)[0])

    def tsdf_config(self) -> TsdfConfig:
        return TsdfConfig(
            truncation_distance=self.truncation_distance,
            max_ray_length=self.max_ray_length,
            occupancy_threshold_fraction=self.occupancy_threshold_fraction,
            min_component_size=self.min_component_size,
        )

    def grow_config(self) -> GrowConfig:
        return GrowConfig(
            compactness_fraction=self.compactness_fraction,
            delta_margin=self.resolved_delta(),
            rng_seed=self.child_seed(1),
        )

    def merge_config(self) -> MergeConfig:
        return MergeConfig(
            obstacle_ratio_threshold=self.obstacle_ratio_threshold,
            rng_seed=self.child_seed(2),
        )

    def resolved_items(self) -> list[tuple[str, object]]:
        items = []
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "delta_margin":
                value = self.resolved_delta()
            items.append((f.name, value))
        return items


def parse_config_file(source) -> dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment."""
    values: dict[str, str] = {}
    for line_number, raw in enumerate(source, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {line_number}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return values


def make_config(values: dict[str, str]) -> PipelineConfig:
    known = {f.name for f in fields(PipelineConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kwargs: dict[str, object] = {}
    for key, raw in values.items():
        try:
            kwargs[key] = int(raw) if key in _INT_KEYS else float(raw)
        except ValueError:
            raise ConfigError(f"config key {key}: bad value {raw!r}") from None
    return PipelineConfig(**kwargs)


@dataclass
class BuildResult:
    tsdf: TsdfGrid
    occupancy: OccupancyGrid
    clusters_grown: list[VoxelCluster]
    clusters_merged: list[VoxelCluster]
    merge_pass_count: int
    topo: TopologicalMap
    nav: NavGraph
    timings_ms: list[tuple[str, float]] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)


def _run_stage(name: str, timings: list[tuple[str, float]], fn: Callable):
    start = time.perf_counter()
    try:
        result = fn()
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(f"stage {name}: {exc}") from exc
    timings.append((name, (time.perf_counter() - start) * 1e3))
    return result


def build_from_slam_map(slam: SlamMap, config: PipelineConfig, carve: bool = True) -> BuildResult:
    """Full pipeline: integrate, binarize, filter, carve, grow, merge, portals."""
    timings: list[tuple[str, float]] = []
    counts: dict[str, int] = {}
    tsdf_cfg = config.tsdf_config()

    tsdf = _run_stage(
        "tsdf", timings, lambda: integrate_slam_map(slam, tsdf_cfg, config.voxel_size)
    )
    counts["tsdf_voxels"] = len(tsdf.voxels)
    counts["skipped_observations"] = tsdf.skipped_observations

    occ = _run_stage("binarize", timings, lambda: binarize(tsdf, tsdf_cfg))
    occ = _run_stage(
        "filter", timings, lambda: filter_small_components(occ, tsdf_cfg.min_component_size)
    )
    if carve:
        occ = _run_stage("carve", timings, lambda: carve_trajectory(occ, slam.trajectory))
    free_count, occupied_count = occ.counts()
    counts["free_voxels"] = free_count
    counts["occupied_voxels"] = occupied_count
    if free_count == 0:
        raise PipelineError("stage occupancy: no free space in the map")

    clusters_grown = _run_stage(
        "grow", timings, lambda: grow_all(occ, slam.trajectory, config.grow_config())
    )
    counts["clusters_before_merge"] = len(clusters_grown)

    def run_merging() -> tuple[list[VoxelCluster], int]:
        merge_cfg = config.merge_config()
        rng = np.random.default_rng(merge_cfg.rng_seed)
        current = list(clusters_grown)
        passes = 0
        while True:
            current, merges = merge_pass(occ, current, merge_cfg, rng)
            if merges == 0:
                return current, passes
            passes += 1

    clusters_merged, merge_pass_count = _run_stage("merge", timings, run_merging)
    counts["clusters_after_merge"] = len(clusters_merged)
    counts["merge_passes"] = merge_pass_count

    topo = _run_stage(
        "portals", timings, lambda: build_topological_map(clusters_merged, config.voxel_size)
    )
    counts["portals"] = len(topo.portals)
    nav = build_nav_graph(topo)

    return BuildResult(
        tsdf=tsdf,
        occupancy=occ,
        clusters_grown=clusters_grown,
        clusters_merged=clusters_merged,
        merge_pass_count=merge_pass_count,
        topo=topo,
        nav=nav,
        timings_ms=timings,
        counts=counts,
    )
