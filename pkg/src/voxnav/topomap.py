"""Topological map: convex clusters as vertices, portals (shared voxel face
patches between adjacent clusters) as edges, point location, and the
hull-only text serialization.

File format, all reals with 6 decimals:
  TOPOMAP v1 voxel_size=<m>
  V <id> <volume_m3> <n_hull_vertices>   followed by n lines ``x y z``
  P <id> <va> <vb> <cx> <cy> <cz> <n_faces>
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .clustering import VoxelCluster
from .errors import FormatError, NotLocatedError
from .geometry import Point3, VoxelIndex, world_to_voxel
from .hulls import EPS_HULL, compute_hull

_AXES = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


@dataclass
class Portal:
    """Adjacency patch between two clusters, summarized by its center.

    shared_faces holds the face-center points while the map still has voxel
    sets; deserialized maps keep only the center and the face count.
    """

    id: int
    vertex_a: int
    vertex_b: int
    center: Point3
    shared_faces: list[Point3] | None
    face_count: int


@dataclass
class TopologicalMap:
    vertices: list[VoxelCluster]
    portals: list[Portal]
    voxel_size: float
    _owner: dict[VoxelIndex, int] | None = field(default=None, repr=False)

    def __post_init__(self):
        ids = {v.id for v in self.vertices}
        if len(ids) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        seen_pairs = set()
        for portal in self.portals:
            if portal.vertex_a not in ids or portal.vertex_b not in ids:
                raise FormatError(f"portal {portal.id} references a missing vertex")
            pair = (min(portal.vertex_a, portal.vertex_b), max(portal.vertex_a, portal.vertex_b))
            if portal.vertex_a == portal.vertex_b or pair in seen_pairs:
                raise ValueError(f"portal {portal.id} duplicates a vertex pair or self-connects")
            seen_pairs.add(pair)

    def vertex_by_id(self, vertex_id: int) -> VoxelCluster:
        for v in self.vertices:
            if v.id == vertex_id:
                return v
        raise KeyError(vertex_id)

    def has_voxel_sets(self) -> bool:
        return all(v.voxels is not None for v in self.vertices)

    def portals_of(self, vertex_id: int) -> list[Portal]:
        return [p for p in self.portals if vertex_id in (p.vertex_a, p.vertex_b)]

    def locate(self, p) -> int:
        """Cluster id containing the point.

        With voxel sets present the owning voxel decides; otherwise the
        containing hull with the smallest volume (then smallest id) wins.
        """
        if self.has_voxel_sets():
            if self._owner is None:
                owner: dict[VoxelIndex, int] = {}
                for v in self.vertices:
                    for idx in v.voxels:
                        owner[idx] = v.id
                self._owner = owner
            vid = self._owner.get(world_to_voxel(p, self.voxel_size))
            if vid is None:
                raise NotLocatedError(f"point {tuple(p)} is outside every cluster")
            return vid
        hits = [v for v in self.vertices if v.hull.contains(p, EPS_HULL)]
        if not hits:
            raise NotLocatedError(f"point {tuple(p)} is outside every cluster hull")
        best = min(hits, key=lambda v: (v.volume_m3, v.id))
        return best.id


def extract_portals(clusters: list[VoxelCluster]) -> list[Portal]:
    """One portal per unordered pair of face-adjacent clusters.

    The portal's faces are the centers of all shared voxel faces; its center
    is their mean.
    """
    owner: dict[VoxelIndex, int] = {}
    for cluster in clusters:
        if cluster.voxels is None:
            raise ValueError("portal extraction requires cluster voxel sets")
        for v in cluster.voxels:
            owner[v] = cluster.id
    voxel_size = clusters[0].voxel_size if clusters else 0.0
    faces: dict[tuple[int, int], list[Point3]] = {}
    for v, vid in owner.items():
        i, j, k = v
        for axis in _AXES:
            nb = (i + axis[0], j + axis[1], k + axis[2])
            other = owner.get(nb)
            if other is None or other == vid:
                continue
            pair = (min(vid, other), max(vid, other))
            center = Point3(
                (i + 0.5 + 0.5 * axis[0]) * voxel_size,
                (j + 0.5 + 0.5 * axis[1]) * voxel_size,
                (k + 0.5 + 0.5 * axis[2]) * voxel_size,
            )
            faces.setdefault(pair, []).append(center)
    portals = []
    for portal_id, pair in enumerate(sorted(faces)):
        patch = sorted(faces[pair])
        mean = np.mean(np.array(patch, dtype=float), axis=0)
        portals.append(
            Portal(
                id=portal_id,
                vertex_a=pair[0],
                vertex_b=pair[1],
                center=Point3.of(mean),
                shared_faces=patch,
                face_count=len(patch),
            )
        )
    return portals


def build_topological_map(clusters: list[VoxelCluster], voxel_size: float) -> TopologicalMap:
    return TopologicalMap(
        vertices=list(clusters), portals=extract_portals(clusters), voxel_size=voxel_size
    )


def drop_voxel_sets(topo: TopologicalMap) -> TopologicalMap:
    """Hull-only view of the map, as a reader of the serialized file sees it."""
    from dataclasses import replace

    vertices = [replace(v, voxels=None, centroid=None) for v in topo.vertices]
    portals = [replace(p, shared_faces=None) for p in topo.portals]
    return TopologicalMap(vertices=vertices, portals=portals, voxel_size=topo.voxel_size)


def serialize_topomap(topo: TopologicalMap, sink: IO[str]) -> None:
    sink.write(f"TOPOMAP v1 voxel_size={topo.voxel_size:.6f}\n")
    for vertex in topo.vertices:
        verts = vertex.hull.vertices
        sink.write(f"V {vertex.id} {vertex.volume_m3:.6f} {len(verts)}\n")
        for row in verts:
            sink.write(f"{row[0]:.6f} {row[1]:.6f} {row[2]:.6f}\n")
    for portal in topo.portals:
        sink.write(
            f"P {portal.id} {portal.vertex_a} {portal.vertex_b} "
            f"{portal.center.x:.6f} {portal.center.y:.6f} {portal.center.z:.6f} "
            f"{portal.face_count}\n"
        )


def deserialize_topomap(source: IO[str]) -> TopologicalMap:
    """Rebuild a hull-only map; hull half-spaces are recomputed from the
    stored vertices."""
    lines = [line.rstrip("\n") for line in source]
    if not lines:
        raise FormatError("empty topomap file")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "TOPOMAP":
        raise FormatError(f"bad topomap header: {lines[0]!r}")
    if header[1] != "v1":
        raise FormatError(f"unsupported topomap version {header[1]!r}")
    if not header[2].startswith("voxel_size="):
        raise FormatError(f"bad topomap header: {lines[0]!r}")
    try:
        voxel_size = float(header[2].split("=", 1)[1])
    except ValueError:
        raise FormatError(f"bad voxel size in header: {lines[0]!r}") from None

    vertices: list[VoxelCluster] = []
    portals: list[Portal] = []
    pos = 1
    while pos < len(lines):
        fields = lines[pos].split()
        if not fields:
            pos += 1
            continue
        if fields[0] == "V":
            if len(fields) != 4:
                raise FormatError(f"bad vertex record: {lines[pos]!r}")
            try:
                vid, volume, n_verts = int(fields[1]), float(fields[2]), int(fields[3])
            except ValueError:
                raise FormatError(f"bad vertex record: {lines[pos]!r}") from None
            rows = []
            for offset in range(n_verts):
                line_index = pos + 1 + offset
                if line_index >= len(lines):
                    raise FormatError(f"truncated vertex block for vertex {vid}")
                parts = lines[line_index].split()
                if len(parts) != 3:
                    raise FormatError(f"bad hull vertex line: {lines[line_index]!r}")
                try:
                    rows.append([float(x) for x in parts])
                except ValueError:
                    raise FormatError(f"bad hull vertex line: {lines[line_index]!r}") from None
            if not rows:
                raise FormatError(f"vertex {vid} has no hull vertices")
            vertices.append(
                VoxelCluster(
                    id=vid,
                    voxels=None,
                    centroid=None,
                    hull=compute_hull(np.array(rows)),
                    volume_m3=volume,
                    voxel_size=voxel_size,
                )
            )
            pos += 1 + n_verts
        elif fields[0] == "P":
            if len(fields) != 8:
                raise FormatError(f"bad portal record: {lines[pos]!r}")
            try:
                pid, va, vb = int(fields[1]), int(fields[2]), int(fields[3])
                center = Point3(float(fields[4]), float(fields[5]), float(fields[6]))
                n_faces = int(fields[7])
            except ValueError:
                raise FormatError(f"bad portal record: {lines[pos]!r}") from None
            portals.append(
                Portal(
                    id=pid,
                    vertex_a=va,
                    vertex_b=vb,
                    center=center,
                    shared_faces=None,
                    face_count=n_faces,
                )
            )
            pos += 1
        else:
            raise FormatError(f"unexpected record: {lines[pos]!r}")
    return TopologicalMap(vertices=vertices, portals=portals, voxel_size=voxel_size)
