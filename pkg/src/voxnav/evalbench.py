"""Evaluation harness: optimal 26-connected grid planning (the baseline the
topological planner is compared against), capture-ratio scoring against
ground truth, and the randomized planner benchmark.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass
from typing import IO

import numpy as np

from .errors import NoPathError, VoxnavError
from .geometry import Point3, voxel_center, world_to_voxel
from .navgraph import NavGraph, plan
from .synth import GroundTruth
from .topomap import TopologicalMap
from .tsdf import FREE, OCCUPIED, OccupancyGrid

_OFFSETS_26 = [
    (di, dj, dk, math.sqrt(di * di + dj * dj + dk * dk))
    for di in (-1, 0, 1)
    for dj in (-1, 0, 1)
    for dk in (-1, 0, 1)
    if (di, dj, dk) != (0, 0, 0)
]

BENCHMARK_CSV_HEADER = "query,direct_m,topo_m,grid_m,topo_norm,grid_norm,topo_time_us,grid_time_us"
CAPTURE_CSV_HEADER = "voxel_size,free_captured,occupied_captured"


@dataclass
class GridPath:
    waypoints: list[Point3]
    length: float


def grid_astar(occ: OccupancyGrid, a, b) -> GridPath:
    """Optimal 26-connected path between the voxels containing a and b.

    Step costs are the Euclidean center distances (1, sqrt2, sqrt3 times the
    voxel size); the heuristic is the straight-line distance, so the result
    length equals Dijkstra's.
    """
    s = occ.voxel_size
    start = world_to_voxel(a, s)
    goal = world_to_voxel(b, s)
    states = occ.states
    if states.get(start) is not FREE:
        raise ValueError(f"start voxel {start} is not free")
    if states.get(goal) is not FREE:
        raise ValueError(f"goal voxel {goal} is not free")
    if start == goal:
        return GridPath([voxel_center(start, s)], 0.0)

    gx, gy, gz = (goal[0] + 0.5) * s, (goal[1] + 0.5) * s, (goal[2] + 0.5) * s
    g_score = {start: 0.0}
    came_from: dict = {}
    closed: set = set()
    counter = 0
    h0 = math.sqrt(
        ((start[0] + 0.5) * s - gx) ** 2
        + ((start[1] + 0.5) * s - gy) ** 2
        + ((start[2] + 0.5) * s - gz) ** 2
    )
    heap = [(h0, 0, start)]
    while heap:
        _f, _c, current = heapq.heappop(heap)
        if current == goal:
            path = [current]
            while current in came_from:
                current = came_from[current]
                path.append(current)
            path.reverse()
            return GridPath([voxel_center(idx, s) for idx in path], g_score[goal])
        if current in closed:
            continue
        closed.add(current)
        ci, cj, ck = current
        g_current = g_score[current]
        for di, dj, dk, step in _OFFSETS_26:
            neighbor = (ci + di, cj + dj, ck + dk)
            if states.get(neighbor) is not FREE or neighbor in closed:
                continue
            tentative = g_current + step * s
            if tentative < g_score.get(neighbor, math.inf):
                g_score[neighbor] = tentative
                came_from[neighbor] = current
                counter += 1
                nx = (neighbor[0] + 0.5) * s - gx
                ny = (neighbor[1] + 0.5) * s - gy
                nz = (neighbor[2] + 0.5) * s - gz
                heapq.heappush(
                    heap,
                    (tentative + math.sqrt(nx * nx + ny * ny + nz * nz), counter, neighbor),
                )
    raise NoPathError(f"no grid path from {start} to {goal}")


@dataclass(frozen=True)
class CaptureRatios:
    free_captured: float
    occupied_captured: float


def captured_space_ratio(test: OccupancyGrid, reference: GroundTruth) -> CaptureRatios:
    """Fraction of reference-Free voxels that are Free in the test map, and of
    reference-Occupied voxels that are Occupied or Unknown in the test map
    (unmapped space counts as captured-occupied)."""
    ref = reference.occupancy
    if abs(test.voxel_size - ref.voxel_size) > 1e-12:
        raise ValueError(
            f"voxel size mismatch: test {test.voxel_size} vs reference {ref.voxel_size}"
        )
    free_total = 0
    free_hit = 0
    occ_total = 0
    occ_hit = 0
    test_states = test.states
    for idx, state in ref.states.items():
        if state is FREE:
            free_total += 1
            if test_states.get(idx) is FREE:
                free_hit += 1
        else:
            occ_total += 1
            if test_states.get(idx) is not FREE:
                occ_hit += 1
    return CaptureRatios(
        free_captured=free_hit / free_total if free_total else 1.0,
        occupied_captured=occ_hit / occ_total if occ_total else 1.0,
    )


@dataclass(frozen=True)
class QueryRecord:
    query: int
    direct_m: float
    topo_m: float
    grid_m: float
    topo_norm: float
    grid_norm: float
    topo_time_us: int
    grid_time_us: int


def benchmark_planners(
    topo: TopologicalMap,
    nav: NavGraph,
    occ: OccupancyGrid,
    n_queries: int,
    rng: np.random.Generator,
) -> list[QueryRecord]:
    """Sample solvable start/goal pairs from cluster-owned voxels and time
    both planners. Pairs closer than two voxel sizes are redrawn; pairs either
    planner cannot solve are skipped and redrawn."""
    if not topo.has_voxel_sets():
        raise ValueError("benchmark requires a map with voxel sets")
    s = occ.voxel_size
    pool = sorted(set().union(*(v.voxels for v in topo.vertices)))
    if len(pool) < 2:
        raise VoxnavError("not enough clustered voxels to benchmark")
    records: list[QueryRecord] = []
    attempts = 0
    max_attempts = max(200, 200 * n_queries)
    while len(records) < n_queries and attempts < max_attempts:
        attempts += 1
        ia, ib = rng.integers(len(pool), size=2)
        if ia == ib:
            continue
        a = voxel_center(pool[int(ia)], s)
        b = voxel_center(pool[int(ib)], s)
        direct = a.distance_to(b)
        if direct <= 2.0 * s:
            continue
        try:
            t0 = time.perf_counter()
            topo_result = plan(topo, nav, a, b)
            t1 = time.perf_counter()
            grid_result = grid_astar(occ, a, b)
            t2 = time.perf_counter()
        except (NoPathError, ValueError):
            continue
        records.append(
            QueryRecord(
                query=len(records),
                direct_m=direct,
                topo_m=topo_result.length,
                grid_m=grid_result.length,
                topo_norm=topo_result.length / direct,
                grid_norm=grid_result.length / direct,
                topo_time_us=int((t1 - t0) * 1e6),
                grid_time_us=int((t2 - t1) * 1e6),
            )
        )
    if len(records) < n_queries:
        raise VoxnavError(
            f"found only {len(records)} of {n_queries} solvable queries in {attempts} draws"
        )
    return records


def write_benchmark_csv(records: list[QueryRecord], sink: IO[str]) -> None:
    sink.write(BENCHMARK_CSV_HEADER + "\n")
    for r in records:
        sink.write(
            f"{r.query},{r.direct_m:.6f},{r.topo_m:.6f},{r.grid_m:.6f},"
            f"{r.topo_norm:.6f},{r.grid_norm:.6f},{r.topo_time_us},{r.grid_time_us}\n"
        )


def write_capture_csv(rows: list[tuple[float, CaptureRatios]], sink: IO[str]) -> None:
    sink.write(CAPTURE_CSV_HEADER + "\n")
    for size, ratios in rows:
        sink.write(f"{size:.6f},{ratios.free_captured:.6f},{ratios.occupied_captured:.6f}\n")
