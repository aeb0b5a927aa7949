"""Global route planning over the lane graph.

Routes are shortest by assembled arc length: lane centerlines joined by
quadratic Bezier connectors through junctions. Planning is deterministic
(ties broken by lane id).
"""

from __future__ import annotations

import heapq

import numpy as np

from pixeldrive.errors import PlanningError
from pixeldrive.miniurban.geometry import (
    cumulative_arclength,
    point_at_arclength,
    polyline_length,
    quad_bezier,
    resample_polyline,
)
from pixeldrive.miniurban.lane_graph import Lane, LaneGraph

WAYPOINT_SPACING = 1.0


def connector(u: Lane, v: Lane) -> np.ndarray:
    """Junction connector polyline from the end of ``u`` to the start of ``v``."""
    p0, p2 = u.end_point, v.polyline[0]
    tu, tv = u.end_tangent, v.start_tangent
    cross = tu[0] * tv[1] - tu[1] * tv[0]
    if abs(cross) < 1e-6:
        p1 = 0.5 * (p0 + p2)
    else:
        d = p2 - p0
        s = (d[0] * tv[1] - d[1] * tv[0]) / cross
        p1 = p0 + s * tu if s > 0 else 0.5 * (p0 + p2)
    approx = np.linalg.norm(p1 - p0) + np.linalg.norm(p2 - p1)
    n = max(2, int(np.ceil(approx)))
    return quad_bezier(p0, p1, p2, n)


def connector_length(u: Lane, v: Lane) -> float:
    return polyline_length(connector(u, v))


def shortest_lane_path(
    graph: LaneGraph,
    sources: dict[str, float],
    target_node: str,
) -> list[str]:
    """Lane sequence minimizing arc length from any source lane to target_node.

    ``sources`` maps candidate first lanes to the arc length remaining on
    them (cost of traversing that first lane). The path ends with a lane
    whose end node is ``target_node``.
    """
    if target_node not in graph.nodes:
        raise PlanningError(f"unknown target node {target_node!r}")
    dist: dict[str, float] = {}
    prev: dict[str, str | None] = {}
    heap: list[tuple[float, str]] = []
    for lane_id, cost in sorted(sources.items()):
        dist[lane_id] = cost
        prev[lane_id] = None
        heapq.heappush(heap, (cost, lane_id))

    goal: str | None = None
    while heap:
        d, lane_id = heapq.heappop(heap)
        if d > dist.get(lane_id, np.inf):
            continue
        if graph.lanes[lane_id].end == target_node:
            goal = lane_id
            break
        lane = graph.lanes[lane_id]
        for nxt in graph.successors(lane_id):
            nxt_lane = graph.lanes[nxt]
            nd = d + connector_length(lane, nxt_lane) + nxt_lane.length
            if nd < dist.get(nxt, np.inf) - 1e-12:
                dist[nxt] = nd
                prev[nxt] = lane_id
                heapq.heappush(heap, (nd, nxt))

    if goal is None:
        raise PlanningError(f"no route to node {target_node!r}")
    path = [goal]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])  # type: ignore[arg-type]
    path.reverse()
    return path


def slice_polyline(points: np.ndarray, s_from: float) -> np.ndarray:
    """Tail of a polyline starting at arc length ``s_from``."""
    cum = cumulative_arclength(points)
    if s_from <= 0:
        return points.copy()
    if s_from >= cum[-1]:
        return points[-1:].copy()
    start = point_at_arclength(points, s_from)
    i = int(np.searchsorted(cum, s_from, side="right"))
    tail = points[i:]
    if np.linalg.norm(tail[0] - start) < 1e-9:
        return tail.copy()
    return np.concatenate([start[None, :], tail])


def assemble_route(
    graph: LaneGraph,
    lane_ids: list[str],
    first_lane_s: float = 0.0,
) -> tuple[np.ndarray, list[tuple[float, str]]]:
    """Concatenate lanes and connectors into one route polyline.

    Returns the polyline and the arc length at which each lane ends on it
    (the lane-end marks double as stop-line positions for lit lanes).
    """
    first = graph.lanes[lane_ids[0]]
    pieces = [slice_polyline(first.polyline, first_lane_s)]
    lane_ends: list[tuple[float, str]] = []
    total = polyline_length(pieces[0])
    lane_ends.append((total, lane_ids[0]))
    for prev_id, next_id in zip(lane_ids[:-1], lane_ids[1:]):
        conn = connector(graph.lanes[prev_id], graph.lanes[next_id])
        pieces.append(conn[1:])
        total += polyline_length(conn)
        lane = graph.lanes[next_id]
        pieces.append(lane.polyline[1:])
        total += lane.length
        lane_ends.append((total, next_id))
    return np.concatenate(pieces), lane_ends


def plan_route(
    graph: LaneGraph,
    start_node: str,
    target_node: str,
    spacing: float = WAYPOINT_SPACING,
) -> np.ndarray:
    """Waypoints at fixed spacing along the shortest start->target route.

    The start vertex itself is excluded; ``start == target`` yields an
    empty waypoint list.
    """
    if start_node not in graph.nodes:
        raise PlanningError(f"unknown start node {start_node!r}")
    if target_node not in graph.nodes:
        raise PlanningError(f"unknown target node {target_node!r}")
    if start_node == target_node:
        return np.zeros((0, 2))
    sources = {
        lane_id: graph.lanes[lane_id].length for lane_id in graph.lanes_from(start_node)
    }
    if not sources:
        raise PlanningError(f"node {start_node!r} has no outgoing lanes")
    lane_ids = shortest_lane_path(graph, sources, target_node)
    polyline, _ = assemble_route(graph, lane_ids)
    return resample_polyline(polyline, spacing)
