"""Navigation graph (the dual of the topological graph) and A* planning.

Nodes are portal centers; within every cluster all incident portals are
pairwise connected, so any straight segment of the graph stays inside one
convex vertex hull. Queries attach the endpoints to the portal centers of
their clusters and run A* with the Euclidean heuristic, which is admissible
and consistent, so results match Dijkstra.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .errors import NoPathError
from .geometry import Point3
from .topomap import TopologicalMap

_START_NODE = -1
_GOAL_NODE = -2


@dataclass
class NavGraph:
    """Undirected graph over portal centers with Euclidean edge weights."""

    nodes: dict[int, Point3]
    edges: list[tuple[int, int, float]]

    def adjacency(self) -> dict[int, list[tuple[int, float]]]:
        adj: dict[int, list[tuple[int, float]]] = {node: [] for node in self.nodes}
        for a, b, w in self.edges:
            adj[a].append((b, w))
            adj[b].append((a, w))
        return adj


@dataclass
class PlanResult:
    waypoints: list[Point3]
    length: float
    vertex_sequence: list[int]


def build_nav_graph(topo: TopologicalMap) -> NavGraph:
    nodes = {portal.id: portal.center for portal in topo.portals}
    edges: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    for vertex in topo.vertices:
        incident = sorted(topo.portals_of(vertex.id), key=lambda p: p.id)
        for i in range(len(incident)):
            for j in range(i + 1, len(incident)):
                a, b = incident[i].id, incident[j].id
                if (a, b) in seen:
                    continue
                seen.add((a, b))
                edges.append((a, b, incident[i].center.distance_to(incident[j].center)))
    return NavGraph(nodes=nodes, edges=edges)


def _astar(
    adjacency: dict[int, list[tuple[int, float]]],
    positions: dict[int, Point3],
    start: int,
    goal: int,
) -> tuple[list[int], float]:
    goal_pos = positions[goal]
    g_score: dict[int, float] = {start: 0.0}
    came_from: dict[int, int] = {}
    counter = 0
    open_heap: list[tuple[float, int, int]] = [
        (positions[start].distance_to(goal_pos), counter, start)
    ]
    closed: set[int] = set()
    while open_heap:
        _f, _c, node = heapq.heappop(open_heap)
        if node == goal:
            path = [node]
            while node in came_from:
                node = came_from[node]
                path.append(node)
            path.reverse()
            return path, g_score[goal]
        if node in closed:
            continue
        closed.add(node)
        g_node = g_score[node]
        for neighbor, weight in adjacency.get(node, ()):
            tentative = g_node + weight
            if tentative < g_score.get(neighbor, math.inf):
                g_score[neighbor] = tentative
                came_from[neighbor] = node
                counter += 1
                heapq.heappush(
                    open_heap,
                    (tentative + positions[neighbor].distance_to(goal_pos), counter, neighbor),
                )
    raise NoPathError(f"no navigation-graph path between clusters {start} and {goal}")


def plan(topo: TopologicalMap, nav: NavGraph, a, b) -> PlanResult:
    """Shortest A-to-B path over the navigation graph.

    Raises NotLocatedError when an endpoint is in no cluster and NoPathError
    when the augmented graph does not connect them.
    """
    point_a = Point3.of(a)
    point_b = Point3.of(b)
    cluster_a = topo.locate(point_a)
    cluster_b = topo.locate(point_b)

    positions = dict(nav.nodes)
    positions[_START_NODE] = point_a
    positions[_GOAL_NODE] = point_b
    adjacency = nav.adjacency()
    adjacency[_START_NODE] = []
    adjacency[_GOAL_NODE] = []

    def attach(temp_node: int, cluster_id: int, point: Point3) -> None:
        for portal in topo.portals_of(cluster_id):
            weight = point.distance_to(portal.center)
            adjacency[temp_node].append((portal.id, weight))
            adjacency[portal.id].append((temp_node, weight))

    attach(_START_NODE, cluster_a, point_a)
    attach(_GOAL_NODE, cluster_b, point_b)
    if cluster_a == cluster_b:
        direct = point_a.distance_to(point_b)
        adjacency[_START_NODE].append((_GOAL_NODE, direct))
        adjacency[_GOAL_NODE].append((_START_NODE, direct))

    try:
        node_path, length = _astar(adjacency, positions, _START_NODE, _GOAL_NODE)
    except NoPathError:
        raise NoPathError(
            f"no path between clusters {cluster_a} and {cluster_b}"
        ) from None

    portal_path = [n for n in node_path if n >= 0]
    portal_by_id = {p.id: p for p in topo.portals}

    waypoints = [point_a] + [portal_by_id[pid].center for pid in portal_path] + [point_b]
    sequence = [cluster_a]
    for prev_id, next_id in zip(portal_path, portal_path[1:]):
        prev = portal_by_id[prev_id]
        nxt = portal_by_id[next_id]
        common = {prev.vertex_a, prev.vertex_b} & {nxt.vertex_a, nxt.vertex_b}
        sequence.append(min(common))
    if portal_path:
        sequence.append(cluster_b)
    deduped = [sequence[0]]
    for vid in sequence[1:]:
        if vid != deduped[-1]:
            deduped.append(vid)
    return PlanResult(waypoints=waypoints, length=length, vertex_sequence=deduped)
