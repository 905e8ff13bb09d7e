"""Shared fixtures: presets built once per session through the full pipeline."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from voxnav.evalbench import QueryRecord, benchmark_planners
from voxnav.pipeline import BuildResult, PipelineConfig, build_from_slam_map
from voxnav.slam_map import SlamMap
from voxnav.synth import ObservationModel, SceneSpec, build_preset, rasterize, simulate_observations

SUITE_SEED = 7
ALL_PRESETS = ("corridor", "two_room", "office", "warehouse", "open_space", "pillars")


@dataclass
class BuiltScene:
    name: str
    config: PipelineConfig
    scene: SceneSpec
    trajectory: list
    slam: SlamMap
    result: BuildResult


_scene_cache: dict[tuple[str, int], BuiltScene] = {}
_benchmark_cache: dict[tuple[str, int, int], list[QueryRecord]] = {}


def build_scene(name: str, seed: int = SUITE_SEED, rays_per_pose: int = 140) -> BuiltScene:
    key = (name, seed)
    if key not in _scene_cache:
        config = PipelineConfig(seed=seed)
        scene, trajectory = build_preset(name)
        model = ObservationModel(
            max_range=config.max_ray_length,
            rays_per_pose=rays_per_pose,
            rng_seed=config.child_seed(0),
        )
        slam = simulate_observations(scene, trajectory, model)
        result = build_from_slam_map(slam, config)
        _scene_cache[key] = BuiltScene(
            name=name,
            config=config,
            scene=scene,
            trajectory=trajectory,
            slam=slam,
            result=result,
        )
    return _scene_cache[key]


def benchmark_records(name: str, n: int = 100, seed: int = SUITE_SEED) -> list[QueryRecord]:
    key = (name, n, seed)
    if key not in _benchmark_cache:
        built = build_scene(name, seed)
        rng = np.random.default_rng(built.config.child_seed(3))
        _benchmark_cache[key] = benchmark_planners(
            built.result.topo, built.result.nav, built.result.occupancy, n, rng
        )
    return _benchmark_cache[key]


@pytest.fixture(scope="session")
def two_room():
    return build_scene("two_room")


@pytest.fixture(scope="session")
def office():
    return build_scene("office")


@pytest.fixture(scope="session")
def warehouse():
    return build_scene("warehouse")


@pytest.fixture(scope="session")
def pillars():
    return build_scene("pillars")


@pytest.fixture(scope="session")
def ground_truth_office():
    built = build_scene("office")
    return rasterize(built.scene, built.config.voxel_size)
