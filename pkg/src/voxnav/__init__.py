"""voxnav: topological navigation maps from sparse visual-SLAM landmarks.

Pipeline: landmark rays -> sparse TSDF -> ternary occupancy -> compact convex
voxel clusters -> portal graph -> fast global A* planning, with a synthetic
scene harness and a grid-A* baseline for evaluation.
"""

from .clustering import (
    GrowConfig,
    MergeConfig,
    VoxelCluster,
    adjacent_free_candidates,
    compact_filter,
    convexity_filter,
    grow_all,
    grow_cluster,
    make_cluster,
    merge_all,
    merge_pass,
    obstacle_ratio,
    seed_cluster,
)
from .errors import (
    ConfigError,
    FormatError,
    NoPathError,
    NotLocatedError,
    ParseError,
    PipelineError,
    ValidationError,
    VoxnavError,
)
from .evalbench import (
    CaptureRatios,
    GridPath,
    QueryRecord,
    benchmark_planners,
    captured_space_ratio,
    grid_astar,
)
from .geometry import Aabb, Point3, VoxelIndex, traverse_ray, voxel_center, world_to_voxel
from .hulls import ConvexHull, compute_hull, hull_contains, voxel_region_hull
from .navgraph import NavGraph, PlanResult, build_nav_graph, plan
from .pipeline import BuildResult, PipelineConfig, build_from_slam_map
from .slam_map import (
    LandmarkObservation,
    SlamMap,
    SlamMapStats,
    parse_slam_map,
    serialize_slam_map,
    slam_map_stats,
)
from .synth import (
    GroundTruth,
    ObservationModel,
    SceneSpec,
    build_preset,
    rasterize,
    simulate_observations,
)
from .topomap import (
    Portal,
    TopologicalMap,
    build_topological_map,
    deserialize_topomap,
    drop_voxel_sets,
    extract_portals,
    serialize_topomap,
)
from .tsdf import (
    FREE,
    OCCUPIED,
    OccupancyGrid,
    TsdfConfig,
    TsdfGrid,
    VoxelState,
    binarize,
    carve_trajectory,
    filter_small_components,
    integrate_observation,
    integrate_slam_map,
    trajectory_voxels,
)

__version__ = "0.1.0"
