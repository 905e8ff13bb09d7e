"""Command line interface: synth, build, plan, benchmark, eval-capture."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import evalbench, synth
from .errors import (
    EXIT_IO_FORMAT,
    EXIT_OK,
    EXIT_USAGE,
    ConfigError,
    VoxnavError,
)
from .geometry import Point3
from .navgraph import build_nav_graph, plan
from .pipeline import BuildResult, PipelineConfig, build_from_slam_map, make_config, parse_config_file
from .slam_map import parse_slam_map, serialize_slam_map, slam_map_stats
from .topomap import deserialize_topomap, serialize_topomap
from .tsdf import binarize, filter_small_components, integrate_slam_map


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="flat key=value configuration file")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--voxel-size", type=float, help="override the voxel size in meters")
    parser.add_argument(
        "--print-config", action="store_true", help="print the resolved configuration and exit"
    )


def _resolve_config(args) -> PipelineConfig:
    values: dict[str, str] = {}
    if args.config is not None:
        with open(args.config) as fh:
            values = parse_config_file(fh)
    if args.seed is not None:
        values["seed"] = str(args.seed)
    if args.voxel_size is not None:
        values["voxel_size"] = str(args.voxel_size)
    return make_config(values)


def _print_config(config: PipelineConfig) -> None:
    for key, value in config.resolved_items():
        print(f"{key}={value}")


def _cmd_synth(args) -> int:
    config = _resolve_config(args)
    if args.print_config:
        _print_config(config)
        return EXIT_OK
    scene, trajectory = synth.build_preset(args.preset, bounds_scale=args.scale)
    model = synth.ObservationModel(
        max_range=config.max_ray_length,
        rays_per_pose=args.rays_per_pose,
        landmark_noise_sigma=args.noise_sigma,
        rng_seed=config.child_seed(0),
    )
    slam = synth.simulate_observations(scene, trajectory, model)
    ground_truth = synth.rasterize(scene, config.voxel_size)

    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "slam_map.txt", "w") as fh:
        serialize_slam_map(slam, fh)
    with open(out_dir / "ground_truth.grid", "w") as fh:
        ground_truth.occupancy.dump_text(fh)
    with open(out_dir / "scene.json", "w") as fh:
        synth.scene_to_json(scene, fh)

    stats = slam_map_stats(slam)
    free, occupied = ground_truth.occupancy.counts()
    print(f"preset={args.preset} observations={stats.observation_count} poses={len(trajectory)}")
    print(f"trajectory_length_m={stats.trajectory_length_m:.6f}")
    print(f"ground_truth_free={free} ground_truth_occupied={occupied}")
    return EXIT_OK


def _load_slam(path: Path, allow_empty: bool):
    with open(path) as fh:
        return parse_slam_map(fh, allow_empty_observations=allow_empty)


def _report_build(result: BuildResult) -> None:
    for name, ms in result.timings_ms:
        print(f"stage={name} time_ms={ms:.1f}")
    for key in sorted(result.counts):
        print(f"{key}={result.counts[key]}")


def _cmd_build(args) -> int:
    config = _resolve_config(args)
    if args.print_config:
        _print_config(config)
        return EXIT_OK
    slam = _load_slam(args.slam_map, allow_empty=True)
    result = build_from_slam_map(slam, config, carve=not args.no_carve)
    with open(args.out, "w") as fh:
        serialize_topomap(result.topo, fh)
    if args.dump_dir is not None:
        args.dump_dir.mkdir(parents=True, exist_ok=True)
        with open(args.dump_dir / "occupancy.grid", "w") as fh:
            result.occupancy.dump_text(fh)
        with open(args.dump_dir / "clusters.grid", "w") as fh:
            for cluster in result.clusters_merged:
                for idx in sorted(cluster.voxels):
                    fh.write(f"{idx[0]} {idx[1]} {idx[2]} {cluster.id}\n")
    _report_build(result)
    print(f"topomap={args.out}")
    return EXIT_OK


def _cmd_plan(args) -> int:
    config = _resolve_config(args)
    if args.print_config:
        _print_config(config)
        return EXIT_OK
    with open(args.topomap) as fh:
        topo = deserialize_topomap(fh)
    nav = build_nav_graph(topo)
    a = Point3(args.coords[0], args.coords[1], args.coords[2])
    b = Point3(args.coords[3], args.coords[4], args.coords[5])
    result = plan(topo, nav, a, b)
    for p in result.waypoints:
        print(f"{p.x:.6f} {p.y:.6f} {p.z:.6f}")
    print(f"length={result.length:.6f}")
    print(f"clusters={'-'.join(str(v) for v in result.vertex_sequence)}")
    return EXIT_OK


def _build_scene_dir(args, config: PipelineConfig):
    slam = _load_slam(args.scene_dir / "slam_map.txt", allow_empty=True)
    return slam, build_from_slam_map(slam, config)


def _cmd_benchmark(args) -> int:
    config = _resolve_config(args)
    if args.print_config:
        _print_config(config)
        return EXIT_OK
    _slam, result = _build_scene_dir(args, config)
    rng = np.random.default_rng(config.child_seed(3))
    records = evalbench.benchmark_planners(result.topo, result.nav, result.occupancy, args.n, rng)
    with open(args.out, "w") as fh:
        evalbench.write_benchmark_csv(records, fh)
    topo_norms = sorted(r.topo_norm for r in records)
    grid_norms = sorted(r.grid_norm for r in records)
    topo_times = sorted(r.topo_time_us for r in records)
    grid_times = sorted(r.grid_time_us for r in records)
    mid = len(records) // 2
    print(f"queries={len(records)}")
    print(f"mean_topo_norm={sum(topo_norms) / len(records):.6f} max_topo_norm={topo_norms[-1]:.6f}")
    print(f"mean_grid_norm={sum(grid_norms) / len(records):.6f} max_grid_norm={grid_norms[-1]:.6f}")
    print(f"median_topo_time_us={topo_times[mid]}")
    print(f"median_grid_time_us={grid_times[mid]}")
    print(f"csv={args.out}")
    return EXIT_OK


def _cmd_eval_capture(args) -> int:
    config = _resolve_config(args)
    if args.print_config:
        _print_config(config)
        return EXIT_OK
    try:
        sizes = [float(v) for v in args.voxel_sizes.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad voxel size list {args.voxel_sizes!r}") from None
    if not sizes:
        raise ConfigError("voxel size list is empty")
    with open(args.scene_dir / "scene.json") as fh:
        scene = synth.scene_from_json(fh)
    slam = _load_slam(args.scene_dir / "slam_map.txt", allow_empty=True)
    tsdf_cfg = config.tsdf_config()
    rows = []
    for size in sizes:
        tsdf = integrate_slam_map(slam, tsdf_cfg, size)
        occ = filter_small_components(binarize(tsdf, tsdf_cfg), tsdf_cfg.min_component_size)
        ratios = evalbench.captured_space_ratio(occ, synth.rasterize(scene, size))
        rows.append((size, ratios))
        print(
            f"voxel_size={size:.6f} free_captured={ratios.free_captured:.6f} "
            f"occupied_captured={ratios.occupied_captured:.6f}"
        )
    with open(args.out, "w") as fh:
        evalbench.write_capture_csv(rows, fh)
    print(f"csv={args.out}")
    return EXIT_OK


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voxnav",
        description="Topological navigation maps from sparse SLAM landmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic scene dataset")
    p_synth.add_argument("--preset", required=True, help=f"one of {', '.join(synth.PRESET_NAMES)}")
    p_synth.add_argument("--out", type=Path, required=True, help="output directory")
    p_synth.add_argument("--scale", type=float, default=1.0, help="uniform scene scale factor")
    p_synth.add_argument("--rays-per-pose", type=int, default=140)
    p_synth.add_argument("--noise-sigma", type=float, default=0.0)
    _add_common(p_synth)
    p_synth.set_defaults(fn=_cmd_synth)

    p_build = sub.add_parser("build", help="build a topomap from a SLAM map file")
    p_build.add_argument("slam_map", type=Path)
    p_build.add_argument("--out", type=Path, required=True, help="topomap output file")
    p_build.add_argument("--no-carve", action="store_true", help="skip trajectory carving")
    p_build.add_argument(
        "--dump-dir", type=Path, help="write intermediate occupancy/cluster dumps here"
    )
    _add_common(p_build)
    p_build.set_defaults(fn=_cmd_build)

    p_plan = sub.add_parser("plan", help="plan an A-to-B path on a topomap file")
    p_plan.add_argument("topomap", type=Path)
    p_plan.add_argument("coords", type=float, nargs=6, metavar="COORD", help="ax ay az bx by bz")
    _add_common(p_plan)
    p_plan.set_defaults(fn=_cmd_plan)

    p_bench = sub.add_parser("benchmark", help="compare planners on a synth scene")
    p_bench.add_argument("scene_dir", type=Path)
    p_bench.add_argument("--n", type=int, default=100, help="number of queries")
    p_bench.add_argument("--out", type=Path, required=True, help="CSV output file")
    _add_common(p_bench)
    p_bench.set_defaults(fn=_cmd_benchmark)

    p_cap = sub.add_parser("eval-capture", help="capture-ratio sweep over voxel sizes")
    p_cap.add_argument("scene_dir", type=Path)
    p_cap.add_argument(
        "--voxel-sizes", required=True, help="comma separated sizes, e.g. 0.1,0.15,0.2"
    )
    p_cap.add_argument("--out", type=Path, required=True, help="CSV output file")
    _add_common(p_cap)
    p_cap.set_defaults(fn=_cmd_eval_capture)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.fn(args)
    except VoxnavError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO_FORMAT


if __name__ == "__main__":
    sys.exit(main())
