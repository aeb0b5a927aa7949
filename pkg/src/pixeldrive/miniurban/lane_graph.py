"""Directed lane graph: nodes, lanes with polyline geometry, lights, crossings.

Lanes are directed centerlines already offset for right-hand traffic and
trimmed short of junction centers; junctions are open discs connecting lane
ends. Turn connectors between consecutive lanes are generated on demand by
the planner (quadratic Bezier between the trimmed endpoints).

Maps can be loaded from a declarative JSON file (nodes, lanes as polylines,
light positions, crossings) or produced by :func:`builtin_map`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from pixeldrive.errors import ConfigError
from pixeldrive.miniurban.geometry import cumulative_arclength, polyline_length

LANE_WIDTH = 3.5
JUNCTION_RADIUS = 7.0
LANE_TRIM = 6.0


@dataclass
class Lane:
    id: str
    road: str
    start: str
    end: str
    polyline: np.ndarray  # (P, 2) float64, already offset and trimmed
    cum: np.ndarray = field(init=False)
    length: float = field(init=False)

    def __post_init__(self) -> None:
        self.polyline = np.asarray(self.polyline, dtype=np.float64)
        self.cum = cumulative_arclength(self.polyline)
        self.length = float(self.cum[-1]) if len(self.cum) else 0.0

    @property
    def end_point(self) -> np.ndarray:
        return self.polyline[-1]

    @property
    def end_tangent(self) -> np.ndarray:
        d = self.polyline[-1] - self.polyline[-2]
        return d / max(np.linalg.norm(d), 1e-12)

    @property
    def start_tangent(self) -> np.ndarray:
        d = self.polyline[1] - self.polyline[0]
        return d / max(np.linalg.norm(d), 1e-12)


@dataclass
class LightSpec:
    """A traffic light guarding the end (stop line) of one lane."""

    lane: str
    group: str  # signal group within its junction: "ns" or "ew"
    junction: str


@dataclass
class Crossing:
    """Marked pedestrian crossing across a road axis."""

    center: np.ndarray  # (2,)
    direction: np.ndarray  # unit vector along the walking path
    half_len: float


class LaneGraph:
    def __init__(
        self,
        name: str,
        nodes: dict[str, np.ndarray],
        lanes: list[Lane],
        lights: list[LightSpec],
        crossings: list[Crossing],
        lane_width: float = LANE_WIDTH,
        junction_radius: float = JUNCTION_RADIUS,
    ) -> None:
        self.name = name
        self.nodes = {k: np.asarray(v, dtype=np.float64) for k, v in nodes.items()}
        self.lanes = {ln.id: ln for ln in lanes}
        self.lights = lights
        self.crossings = crossings
        self.lane_width = float(lane_width)
        self.junction_radius = float(junction_radius)

        self._out: dict[str, list[str]] = {n: [] for n in self.nodes}
        for ln in lanes:
            if ln.start not in self.nodes or ln.end not in self.nodes:
                raise ConfigError(f"lane {ln.id} references unknown node")
            self._out[ln.start].append(ln.id)
        self._light_by_lane = {ls.lane: ls for ls in lights}

        # flat segment arrays covering every lane, for fast distance queries
        seg_a, seg_b = [], []
        for ln in lanes:
            seg_a.append(ln.polyline[:-1])
            seg_b.append(ln.polyline[1:])
        self.seg_a = np.concatenate(seg_a) if seg_a else np.zeros((0, 2))
        self.seg_b = np.concatenate(seg_b) if seg_b else np.zeros((0, 2))
        self.junction_centers = (
            np.stack([self.nodes[n] for n in sorted(self.nodes)])
            if self.nodes
            else np.zeros((0, 2))
        )

    def successors(self, lane_id: str) -> list[str]:
        """Lanes reachable from the end of ``lane_id`` (U-turns excluded)."""
        lane = self.lanes[lane_id]
        return [
            nxt
            for nxt in self._out[lane.end]
            if self.lanes[nxt].road != lane.road
        ]

    def lanes_from(self, node: str) -> list[str]:
        return list(self._out[node])

    def light_for_lane(self, lane_id: str) -> LightSpec | None:
        return self._light_by_lane.get(lane_id)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        pts = np.concatenate([ln.polyline for ln in self.lanes.values()])
        return pts.min(axis=0), pts.max(axis=0)

    def distance_to_drivable(self, p: np.ndarray) -> float:
        """Distance from ``p`` to the nearest drivable surface boundary.

        Negative inside the road corridor or a junction disc, positive
        outside (off-road).
        """
        ab = self.seg_b - self.seg_a
        ap = p[None, :] - self.seg_a
        denom = np.maximum(np.sum(ab * ab, axis=1), 1e-12)
        t = np.clip(np.sum(ap * ab, axis=1) / denom, 0.0, 1.0)
        closest = self.seg_a + t[:, None] * ab
        d_lane = np.sqrt(np.min(np.sum((p[None, :] - closest) ** 2, axis=1)))
        d_junc = np.min(np.linalg.norm(self.junction_centers - p[None, :], axis=1))
        return float(min(d_lane - self.lane_width / 2.0, d_junc - self.junction_radius))


def _offset_lane(a: np.ndarray, b: np.ndarray, half_width: float, trim: float) -> np.ndarray:
    """Straight lane centerline from node a to node b: offset right, trimmed."""
    d = b - a
    length = np.linalg.norm(d)
    u = d / length
    right = np.array([u[1], -u[0]])
    p0 = a + u * trim + right * half_width
    p1 = b - u * trim + right * half_width
    # intermediate vertices keep projection windows small
    n = max(2, int(np.ceil(np.linalg.norm(p1 - p0) / 10.0)) + 1)
    t = np.linspace(0.0, 1.0, n)[:, None]
    return p0 + t * (p1 - p0)


def _grid_map(
    name: str,
    rows: int,
    cols: int,
    spacing: float,
    lit_min_degree: int = 3,
) -> LaneGraph:
    nodes: dict[str, np.ndarray] = {}
    for r in range(rows):
        for c in range(cols):
            nodes[f"n{r}{c}"] = np.array([c * spacing, r * spacing])

    roads: list[tuple[str, str]] = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                roads.append((f"n{r}{c}", f"n{r}{c + 1}"))
            if r + 1 < rows:
                roads.append((f"n{r}{c}", f"n{r + 1}{c}"))

    lanes: list[Lane] = []
    degree = {n: 0 for n in nodes}
    for a_id, b_id in roads:
        degree[a_id] += 1
        degree[b_id] += 1
        road = f"{a_id}|{b_id}"
        a, b = nodes[a_id], nodes[b_id]
        half = LANE_WIDTH / 2.0
        lanes.append(Lane(f"{a_id}->{b_id}", road, a_id, b_id, _offset_lane(a, b, half, LANE_TRIM)))
        lanes.append(Lane(f"{b_id}->{a_id}", road, b_id, a_id, _offset_lane(b, a, half, LANE_TRIM)))

    lights: list[LightSpec] = []
    crossings: list[Crossing] = []
    lit = sorted(n for n, deg in degree.items() if deg >= lit_min_degree)
    seen_cross: set[tuple[int, int]] = set()
    for node in lit:
        for lane in lanes:
            if lane.end != node:
                continue
            tangent = lane.end_tangent
            group = "ew" if abs(tangent[0]) > abs(tangent[1]) else "ns"
            lights.append(LightSpec(lane.id, group, node))
            # crossing over the full road, 12 m upstream of the junction
            axis_a, axis_b = nodes[lane.start], nodes[lane.end]
            u = (axis_b - axis_a) / np.linalg.norm(axis_b - axis_a)
            center = nodes[node] - u * 12.0
            key = (int(round(center[0])), int(round(center[1])))
            if key not in seen_cross:
                seen_cross.add(key)
                normal = np.array([-u[1], u[0]])
                crossings.append(Crossing(center, normal, LANE_WIDTH + 1.5))

    return LaneGraph(name, nodes, lanes, lights, crossings)


_BUILTIN = {
    "grid_a": lambda: _grid_map("grid_a", 3, 3, 80.0),
    "grid_b": lambda: _grid_map("grid_b", 2, 3, 60.0),
}


def builtin_map(name: str) -> LaneGraph:
    if name not in _BUILTIN:
        raise ConfigError(f"unknown map {name!r}; built-ins: {sorted(_BUILTIN)}")
    return _BUILTIN[name]()


def resolve_map(name_or_path: str) -> LaneGraph:
    """Built-in map name, or path to a map JSON file."""
    if name_or_path in _BUILTIN:
        return _BUILTIN[name_or_path]()
    p = Path(name_or_path)
    if p.exists():
        return load_map(p)
    raise ConfigError(f"unknown map {name_or_path!r}: not a built-in and not a file")


def save_map(graph: LaneGraph, path: str | Path) -> None:
    doc = {
        "name": graph.name,
        "lane_width": graph.lane_width,
        "junction_radius": graph.junction_radius,
        "nodes": [
            {"id": n, "x": float(p[0]), "y": float(p[1])}
            for n, p in sorted(graph.nodes.items())
        ],
        "lanes": [
            {
                "id": ln.id,
                "road": ln.road,
                "start": ln.start,
                "end": ln.end,
                "polyline": [[float(x), float(y)] for x, y in ln.polyline],
            }
            for ln in graph.lanes.values()
        ],
        "lights": [
            {"lane": ls.lane, "group": ls.group, "junction": ls.junction}
            for ls in graph.lights
        ],
        "crossings": [
            {
                "x": float(c.center[0]),
                "y": float(c.center[1]),
                "ux": float(c.direction[0]),
                "uy": float(c.direction[1]),
                "half_len": float(c.half_len),
            }
            for c in graph.crossings
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True))


def load_map(path: str | Path) -> LaneGraph:
    try:
        doc = json.loads(Path(path).read_text())
        nodes = {n["id"]: np.array([n["x"], n["y"]]) for n in doc["nodes"]}
        lanes = [
            Lane(l["id"], l["road"], l["start"], l["end"], np.asarray(l["polyline"]))
            for l in doc["lanes"]
        ]
        lights = [LightSpec(d["lane"], d["group"], d["junction"]) for d in doc["lights"]]
        crossings = [
            Crossing(
                np.array([c["x"], c["y"]]),
                np.array([c["ux"], c["uy"]]),
                float(c["half_len"]),
            )
            for c in doc["crossings"]
        ]
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"malformed map file {path}: {exc}") from exc
    return LaneGraph(
        doc["name"],
        nodes,
        lanes,
        lights,
        crossings,
        lane_width=doc.get("lane_width", LANE_WIDTH),
        junction_radius=doc.get("junction_radius", JUNCTION_RADIUS),
    )


def total_polyline_length(graph: LaneGraph) -> float:
    return sum(polyline_length(ln.polyline) for ln in graph.lanes.values())
