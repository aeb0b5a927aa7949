"""Traffic lights, scripted background vehicles, and pedestrians.

Everything here is a deterministic function of (spawn randomness, simulation
clock): lights follow fixed cycles with per-junction offsets, vehicles follow
precomputed lane routes with car-following and red-light braking, pedestrians
follow fixed crossing schedules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from pixeldrive.miniurban.geometry import heading_at_arclength, point_at_arclength
from pixeldrive.miniurban.lane_graph import Crossing, LaneGraph, LightSpec
from pixeldrive.miniurban.planner import assemble_route

PHASE_GREEN = "green"
PHASE_YELLOW = "yellow"
PHASE_RED = "red"

GREEN_S = 10.0
YELLOW_S = 2.0
CYCLE_S = 2.0 * (GREEN_S + YELLOW_S)  # two alternating groups

VEHICLE_CRUISE = 3.5  # m/s
VEHICLE_ACCEL = 1.5
VEHICLE_DECEL = 3.0
VEHICLE_HALF_LEN = 2.1
VEHICLE_HALF_W = 0.9
PED_SPEED = 1.2
PED_RADIUS = 0.4


class TrafficLightController:
    """Fixed-cycle two-group controller per junction, with seeded offsets."""

    def __init__(self, graph: LaneGraph, rng: np.random.Generator) -> None:
        self.graph = graph
        junctions = sorted({ls.junction for ls in graph.lights})
        self.offsets = {j: float(rng.uniform(0.0, CYCLE_S)) for j in junctions}

    def phase(self, light: LightSpec, t: float) -> str:
        local = (t + self.offsets[light.junction]) % CYCLE_S
        # group "ns" runs green first; "ew" is shifted by half a cycle
        if light.group == "ew":
            local = (local + CYCLE_S / 2.0) % CYCLE_S
        if local < GREEN_S:
            return PHASE_GREEN
        if local < GREEN_S + YELLOW_S:
            return PHASE_YELLOW
        return PHASE_RED

    def phase_timer(self, light: LightSpec, t: float) -> float:
        """Seconds elapsed inside the current phase."""
        local = (t + self.offsets[light.junction]) % CYCLE_S
        if light.group == "ew":
            local = (local + CYCLE_S / 2.0) % CYCLE_S
        if local < GREEN_S:
            return local
        if local < GREEN_S + YELLOW_S:
            return local - GREEN_S
        return local - GREEN_S - YELLOW_S


@dataclass
class NPCVehicle:
    polyline: np.ndarray
    total_length: float
    stop_marks: list[tuple[float, LightSpec]]
    s: float
    speed: float = 0.0
    position: np.ndarray = field(default_factory=lambda: np.zeros(2))
    heading: float = 0.0

    def sync_pose(self) -> None:
        self.position = point_at_arclength(self.polyline, self.s)
        self.heading = heading_at_arclength(self.polyline, self.s)


def spawn_vehicles(
    graph: LaneGraph,
    rng: np.random.Generator,
    count: int,
    keep_clear: np.ndarray,
    clear_radius: float = 15.0,
    route_lanes: int = 40,
) -> list[NPCVehicle]:
    lane_ids = sorted(graph.lanes)
    out: list[NPCVehicle] = []
    attempts = 0
    while len(out) < count and attempts < count * 20:
        attempts += 1
        lane_id = lane_ids[int(rng.integers(len(lane_ids)))]
        lane = graph.lanes[lane_id]
        s0 = float(rng.uniform(0.0, max(lane.length - 1.0, 1.0)))
        pos = point_at_arclength(lane.polyline, s0)
        if np.linalg.norm(pos - keep_clear) < clear_radius:
            continue
        if any(np.linalg.norm(pos - v.position) < 8.0 for v in out):
            continue
        seq = [lane_id]
        while len(seq) < route_lanes:
            succ = graph.successors(seq[-1])
            if not succ:
                break
            seq.append(succ[int(rng.integers(len(succ)))])
        polyline, lane_ends = assemble_route(graph, seq, first_lane_s=s0)
        stop_marks = [
            (s_end, graph.light_for_lane(lid))
            for s_end, lid in lane_ends
            if graph.light_for_lane(lid) is not None
        ]
        veh = NPCVehicle(
            polyline=polyline,
            total_length=float(np.sum(np.linalg.norm(np.diff(polyline, axis=0), axis=1))),
            stop_marks=stop_marks,  # type: ignore[arg-type]
            s=0.0,
        )
        veh.speed = float(rng.uniform(0.5, VEHICLE_CRUISE))
        veh.sync_pose()
        out.append(veh)
    return out


def step_vehicle(
    veh: NPCVehicle,
    lights: TrafficLightController,
    t: float,
    dt: float,
    obstacles: list[tuple[np.ndarray, float]],
) -> None:
    """Advance one scripted vehicle by dt.

    ``obstacles`` are (position, radius) of every other agent including the
    ego; the vehicle brakes with a constant-time-gap rule for obstacles
    ahead in its corridor and stops for red lights at its stop marks.
    """
    if veh.s >= veh.total_length - 0.5:
        veh.speed = 0.0
        return

    target = VEHICLE_CRUISE
    fwd = np.array([np.cos(veh.heading), np.sin(veh.heading)])
    for pos, radius in obstacles:
        rel = pos - veh.position
        ahead = float(rel @ fwd)
        lateral = abs(float(fwd[0] * rel[1] - fwd[1] * rel[0]))
        if 0.0 < ahead <= 25.0 and lateral < 2.0:
            gap = ahead - VEHICLE_HALF_LEN - radius
            desired = 4.0 + 1.5 * veh.speed  # constant time gap
            if gap < 1.5:
                target = 0.0
            elif gap < desired:
                target = min(target, VEHICLE_CRUISE * (gap / desired))

    for s_mark, light in veh.stop_marks:
        d = s_mark - veh.s
        if d < -1.0:
            continue
        phase = lights.phase(light, t)
        if phase in (PHASE_RED, PHASE_YELLOW):
            d_stop = max(0.0, d - 1.0)
            target = min(target, float(np.sqrt(2.0 * VEHICLE_DECEL * d_stop)))
            if d_stop <= 0.2:
                target = 0.0
        break  # only the nearest mark matters

    if veh.speed < target:
        veh.speed = min(veh.speed + VEHICLE_ACCEL * dt, target)
    else:
        veh.speed = max(veh.speed - VEHICLE_DECEL * dt, target)
    veh.s = min(veh.s + veh.speed * dt, veh.total_length)
    veh.sync_pose()


@dataclass
class Pedestrian:
    crossing: Crossing
    wait_s: float
    phase_offset: float
    speed: float = PED_SPEED

    def position(self, t: float) -> np.ndarray:
        """Deterministic position at time t: dwell, cross, dwell, cross back."""
        span = 2.0 * self.crossing.half_len
        cross_s = span / self.speed
        period = 2.0 * (self.wait_s + cross_s)
        local = (t + self.phase_offset) % period
        a = self.crossing.center - self.crossing.direction * self.crossing.half_len
        b = self.crossing.center + self.crossing.direction * self.crossing.half_len
        if local < self.wait_s:
            return a.copy()
        local -= self.wait_s
        if local < cross_s:
            return a + self.crossing.direction * (self.speed * local)
        local -= cross_s
        if local < self.wait_s:
            return b.copy()
        local -= self.wait_s
        return b - self.crossing.direction * (self.speed * local)


def spawn_pedestrians(
    graph: LaneGraph, rng: np.random.Generator, count: int
) -> list[Pedestrian]:
    if not graph.crossings or count <= 0:
        return []
    out = []
    for _ in range(count):
        crossing = graph.crossings[int(rng.integers(len(graph.crossings)))]
        wait = float(rng.uniform(3.0, 9.0))
        offset = float(rng.uniform(0.0, 2.0 * (wait + 2.0 * crossing.half_len / PED_SPEED)))
        out.append(Pedestrian(crossing, wait, offset))
    return out
