"""The driving environment: dynamics, reward, termination, observations.

The ego is a kinematic bicycle driven by throttle/brake/steering at a fixed
10 Hz step. Observations are a K-deep stack of rendered frames plus the next
N route waypoints in the ego frame and a K-deep stack of (speed, steering)
measurements. Episodes end on collision, red-light running, being blocked,
or timeout; in benchmark mode they also end on route completion.

Determinism contract: identical (seed, scenario, command sequence) produce
bit-identical trajectories, observations, and rewards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from pixeldrive.errors import ConfigError, DataError, PlanningError, UsageError
from pixeldrive.miniurban.geometry import (
    heading_at_arclength,
    project_to_polyline,
    resample_polyline,
    wrap_angle,
)
from pixeldrive.miniurban.lane_graph import LaneGraph, resolve_map
from pixeldrive.miniurban.palettes import get_palette
from pixeldrive.miniurban.planner import assemble_route, shortest_lane_path
from pixeldrive.miniurban.render import Renderer
from pixeldrive.miniurban.scenario import ScenarioConfig
from pixeldrive.miniurban.traffic import (
    PED_RADIUS,
    PHASE_GREEN,
    TrafficLightController,
    spawn_pedestrians,
    spawn_vehicles,
    step_vehicle,
)

DT = 0.1  # seconds per step (10 FPS)
FRAME_STACK = 3  # K
NUM_WAYPOINTS = 10  # N
WAYPOINT_SPACING = 1.0

V_MAX = 6.0
V_DESIRED = 4.0
THROTTLE_ACCEL = 3.0
BRAKE_DECEL = 6.0
WHEELBASE = 2.5
MAX_STEER_ANGLE = 0.5  # rad at |steering| = 1

EGO_RADIUS = 0.9
VEHICLE_RADIUS = 1.0
OFFROAD_MARGIN = 1.0

LIGHT_LOOKAHEAD = 15.0
STOP_LOOKAHEAD = 10.0  # red light / obstacle distance that zeroes the target speed
OBSTACLE_LATERAL = 2.2

BLOCKED_SPEED = 0.1
BLOCKED_SECONDS = 90.0
TIMEOUT_STEPS = 3000
ARRIVAL_TOLERANCE = 2.0
MIN_ROUTE_LENGTH = 40.0

TERMINAL_PENALTY = -10.0

LIGHT_NONE, LIGHT_RED, LIGHT_GREEN = 0, 1, 2


@dataclass(frozen=True)
class VehicleCommand:
    """Low-level actuation: throttle, brake in [0,1], steering in [-1,1]."""

    throttle: float
    brake: float
    steering: float

    def __post_init__(self) -> None:
        eps = 1e-6
        if not (-eps <= self.throttle <= 1 + eps):
            raise DataError(f"throttle out of range: {self.throttle}")
        if not (-eps <= self.brake <= 1 + eps):
            raise DataError(f"brake out of range: {self.brake}")
        if not (-1 - eps <= self.steering <= 1 + eps):
            raise DataError(f"steering out of range: {self.steering}")

    def clipped(self) -> tuple[float, float, float]:
        return (
            float(np.clip(self.throttle, 0.0, 1.0)),
            float(np.clip(self.brake, 0.0, 1.0)),
            float(np.clip(self.steering, -1.0, 1.0)),
        )


@dataclass
class Observation:
    """K stacked frames, N ego-frame waypoints, K stacked measurements."""

    images: np.ndarray  # (K, 3, H, W) uint8, oldest -> newest
    waypoints: np.ndarray  # (N, 2) float32, ego frame, increasing arc length
    measurements: np.ndarray  # (K, 2) float32, (speed, steering), oldest -> newest

    def copy(self) -> "Observation":
        return Observation(
            self.images.copy(), self.waypoints.copy(), self.measurements.copy()
        )

    def stacked_frames(self) -> np.ndarray:
        """Channel-concatenated frames: (3K, H, W)."""
        k, c, h, w = self.images.shape
        return self.images.reshape(k * c, h, w)


@dataclass
class StepInfo:
    reward_speed: float = 0.0
    reward_position: float = 0.0
    reward_rotation: float = 0.0
    reward_terminal: float = 0.0
    collision_pedestrian: bool = False
    collision_vehicle: bool = False
    collision_layout: bool = False
    red_light_run: bool = False
    blocked: bool = False
    timeout: bool = False
    light_label: int = LIGHT_NONE
    distance: float = 0.0
    route_completion: float = 0.0
    route_complete: bool = False

    @property
    def any_collision(self) -> bool:
        return self.collision_pedestrian or self.collision_vehicle or self.collision_layout

    @property
    def terminal_infraction(self) -> bool:
        return self.any_collision or self.red_light_run or self.blocked


@dataclass
class _Route:
    lane_ids: list[str]
    polyline: np.ndarray
    cum: np.ndarray
    length: float
    stop_marks: list[tuple[float, object]]  # (arc length, LightSpec)
    target: str


class MiniUrbanEnv:
    """Deterministic 2D urban driving environment.

    Parameters
    ----------
    scenario:
        Map, traffic density, palette (and optional base seed).
    resolution:
        Square frame size in pixels.
    end_on_arrival:
        Benchmark mode: finish the episode when the target is reached
        instead of picking a new target.
    """

    def __init__(
        self,
        scenario: ScenarioConfig | dict | str,
        resolution: int = 128,
        end_on_arrival: bool = False,
        timeout_steps: int = TIMEOUT_STEPS,
        seed: int | None = None,
    ) -> None:
        if isinstance(scenario, str):
            scenario = ScenarioConfig.from_file(scenario)
        elif isinstance(scenario, dict):
            scenario = ScenarioConfig.from_mapping(scenario)
        self.scenario = scenario
        self.graph: LaneGraph = resolve_map(scenario.map)
        self.palette = get_palette(scenario.palette)
        self.resolution = int(resolution)
        self.end_on_arrival = bool(end_on_arrival)
        self.timeout_steps = int(timeout_steps)
        self.renderer = Renderer(self.graph, self.palette, self.resolution)

        base = seed if seed is not None else scenario.seed
        self._seed_seq = np.random.SeedSequence(base)
        self._done = True  # must reset() first
        self._obs: Observation | None = None

    # ------------------------------------------------------------------ reset

    def reset(
        self,
        seed: int | None = None,
        start: str | None = None,
        target: str | None = None,
    ) -> Observation:
        """Start a new episode; returns the initial observation.

        ``start``/``target`` pin the route to specific lane-graph nodes
        (used by the benchmark); otherwise both are drawn from the episode
        stream.
        """
        if seed is not None:
            self._seed_seq = np.random.SeedSequence(seed)
        self.rng = np.random.default_rng(self._seed_seq.spawn(1)[0])

        self.t = 0.0
        self.step_count = 0
        self.blocked_time = 0.0
        self._done = False

        self._place_ego(start)
        self.lights = TrafficLightController(self.graph, self.rng)
        self._plan_to_target(target)

        n_veh, n_ped = self.scenario.counts
        ego_pos = np.array([self.x, self.y])
        self.vehicles = spawn_vehicles(self.graph, self.rng, n_veh, keep_clear=ego_pos)
        self.pedestrians = spawn_pedestrians(self.graph, self.rng, n_ped)

        self.route_s = 0.0
        self.total_distance = 0.0
        self.route_driven_before = 0.0  # arc completed on earlier targets

        frame = self._render_frame()
        meas = np.array([self.v, self.steer_cmd], dtype=np.float32)
        self._frames = [frame.copy() for _ in range(FRAME_STACK)]
        self._meas = [meas.copy() for _ in range(FRAME_STACK)]
        self._obs = self._make_observation()
        return self._obs.copy()

    def _place_ego(self, start: str | None) -> None:
        if start is not None:
            if start not in self.graph.nodes:
                raise ConfigError(f"unknown start node {start!r}")
            lanes = self.graph.lanes_from(start)
            if not lanes:
                raise ConfigError(f"start node {start!r} has no outgoing lanes")
            lane_id = sorted(lanes)[int(self.rng.integers(len(lanes)))]
            s0 = 0.0
        else:
            lane_ids = sorted(self.graph.lanes)
            lane_id = lane_ids[int(self.rng.integers(len(lane_ids)))]
            lane = self.graph.lanes[lane_id]
            s0 = float(self.rng.uniform(0.0, lane.length * 0.5))
        lane = self.graph.lanes[lane_id]
        pos = lane.polyline[0] if s0 == 0.0 else None
        heading = heading_at_arclength(lane.polyline, s0)
        if pos is None:
            from pixeldrive.miniurban.geometry import point_at_arclength

            pos = point_at_arclength(lane.polyline, s0)
        self.x, self.y = float(pos[0]), float(pos[1])
        self.heading = float(heading)
        self.v = 0.0
        self.steer_cmd = 0.0
        self._current_lane = lane_id
        self._current_lane_s = s0

    def _plan_to_target(self, target: str | None) -> None:
        lane = self.graph.lanes[self._current_lane]
        remaining = lane.length - self._current_lane_s
        sources = {self._current_lane: remaining}
        if target is not None:
            if target not in self.graph.nodes:
                raise ConfigError(f"unknown target node {target!r}")
            lane_ids = shortest_lane_path(self.graph, sources, target)
        else:
            lane_ids = self._draw_target(sources)
        polyline, lane_ends = assemble_route(
            self.graph, lane_ids, first_lane_s=self._current_lane_s
        )
        from pixeldrive.miniurban.geometry import cumulative_arclength

        cum = cumulative_arclength(polyline)
        stop_marks = [
            (s_end, self.graph.light_for_lane(lid))
            for s_end, lid in lane_ends
            if self.graph.light_for_lane(lid) is not None
        ]
        self.route = _Route(
            lane_ids=lane_ids,
            polyline=polyline,
            cum=cum,
            length=float(cum[-1]),
            stop_marks=stop_marks,
            target=self.graph.lanes[lane_ids[-1]].end,
        )
        self._waypoint_grid = resample_polyline(polyline, WAYPOINT_SPACING)
        self.route_s = 0.0

    def _draw_target(self, sources: dict[str, float]) -> list[str]:
        nodes = sorted(self.graph.nodes)
        last_error: Exception | None = None
        for _ in range(32):
            target = nodes[int(self.rng.integers(len(nodes)))]
            try:
                lane_ids = shortest_lane_path(self.graph, sources, target)
            except PlanningError as exc:
                last_error = exc
                continue
            polyline, _ = assemble_route(
                self.graph, lane_ids, first_lane_s=self._current_lane_s
            )
            from pixeldrive.miniurban.geometry import polyline_length

            if polyline_length(polyline) >= MIN_ROUTE_LENGTH:
                return lane_ids
        if last_error is not None:
            raise last_error
        raise PlanningError("could not draw a target with a long enough route")

    # ------------------------------------------------------------------- step

    def step(self, cmd: VehicleCommand) -> tuple[Observation, float, bool, StepInfo]:
        if self._done:
            raise UsageError("step() called on a terminated episode; call reset()")
        throttle, brake, steering = cmd.clipped()

        # ego dynamics (kinematic bicycle, Euler at DT)
        accel = THROTTLE_ACCEL * throttle - BRAKE_DECEL * brake
        self.v = max(0.0, self.v + accel * DT)
        self.steer_cmd = steering
        steer_angle = steering * MAX_STEER_ANGLE
        self.heading = wrap_angle(
            self.heading + (self.v / WHEELBASE) * np.tan(steer_angle) * DT
        )
        self.x += self.v * np.cos(self.heading) * DT
        self.y += self.v * np.sin(self.heading) * DT
        dist = self.v * DT
        self.total_distance += dist

        self.t += DT
        self.step_count += 1

        # background agents
        ego_pos = np.array([self.x, self.y])
        ped_positions = [p.position(self.t) for p in self.pedestrians]
        for i, veh in enumerate(self.vehicles):
            obstacles = [(ego_pos, EGO_RADIUS)]
            obstacles += [
                (other.position, VEHICLE_RADIUS)
                for j, other in enumerate(self.vehicles)
                if j != i
            ]
            obstacles += [(p, PED_RADIUS) for p in ped_positions]
            step_vehicle(veh, self.lights, self.t, DT, obstacles)

        # route tracking (monotonic projection)
        prev_s = self.route_s
        window = max(5.0, self.v * DT * 4.0 + 5.0)
        s_raw, lateral = project_to_polyline(
            self.route.polyline,
            self.route.cum,
            ego_pos,
            s_lo=prev_s - 5.0,
            s_hi=prev_s + window,
        )
        self.route_s = max(prev_s, s_raw)
        route_heading = heading_at_arclength(self.route.polyline, max(s_raw, 1e-6))
        heading_err = wrap_angle(self.heading - route_heading)

        info = StepInfo(distance=dist)

        # red-light crossing: stop marks passed this step while their light is red
        ran_red = False
        for s_mark, light in self.route.stop_marks:
            if prev_s < s_mark <= self.route_s:
                if self.lights.phase(light, self.t) == "red":
                    ran_red = True

        info.light_label = self._light_label()

        # collisions, in priority order (at most one terminal flag per step)
        hit_ped = any(
            np.linalg.norm(ego_pos - p) <= EGO_RADIUS + PED_RADIUS
            for p in ped_positions
        )
        hit_veh = any(
            np.linalg.norm(ego_pos - veh.position) <= EGO_RADIUS + VEHICLE_RADIUS
            for veh in self.vehicles
        )
        off_road = self.graph.distance_to_drivable(ego_pos) > OFFROAD_MARGIN

        # blocked timer: standing still without a red light excuse
        if self.v < BLOCKED_SPEED and info.light_label != LIGHT_RED:
            self.blocked_time += DT
        else:
            self.blocked_time = 0.0

        if hit_ped:
            info.collision_pedestrian = True
        elif hit_veh:
            info.collision_vehicle = True
        elif off_road:
            info.collision_layout = True
        elif ran_red:
            info.red_light_run = True
        elif self.blocked_time >= BLOCKED_SECONDS:
            info.blocked = True

        arrived = self.route_s >= self.route.length - ARRIVAL_TOLERANCE
        info.route_completion = (
            min(1.0, self.route_s / self.route.length) if self.route.length > 0 else 1.0
        )
        if arrived:
            info.route_completion = 1.0

        done = info.terminal_infraction
        if not done and self.step_count >= self.timeout_steps:
            info.timeout = True
            done = True

        # reward
        if info.terminal_infraction:
            info.reward_terminal = TERMINAL_PENALTY
            reward = TERMINAL_PENALTY
        else:
            v_target = V_DESIRED
            if self._red_light_within(STOP_LOOKAHEAD) or self._obstacle_ahead(
                ego_pos, ped_positions
            ):
                v_target = 0.0
            info.reward_speed = 1.0 - min(1.0, abs(self.v - v_target) / V_MAX)
            info.reward_position = -0.5 * min(1.0, abs(lateral) / 2.0)
            info.reward_rotation = -0.3 * abs(heading_err)
            reward = info.reward_speed + info.reward_position + info.reward_rotation

        # arrival: finish (benchmark) or pick the next target (training)
        if arrived and not done:
            if self.end_on_arrival:
                info.route_complete = True
                done = True
            else:
                self.route_driven_before += self.route.length
                self._sync_current_lane()
                self._plan_to_target(None)

        self._done = done

        frame = self._render_frame()
        meas = np.array([self.v, self.steer_cmd], dtype=np.float32)
        self._frames = self._frames[1:] + [frame]
        self._meas = self._meas[1:] + [meas]
        self._obs = self._make_observation()
        return self._obs.copy(), float(reward), bool(done), info

    # -------------------------------------------------------------- internals

    def _sync_current_lane(self) -> None:
        """Locate the lane holding the current route position (for replans)."""
        from pixeldrive.miniurban.geometry import cumulative_arclength  # noqa: F401

        lane_id = self.route.lane_ids[-1]
        lane = self.graph.lanes[lane_id]
        # project onto the final lane of the finished route
        s, _ = project_to_polyline(
            lane.polyline,
            lane.cum,
            np.array([self.x, self.y]),
        )
        self._current_lane = lane_id
        self._current_lane_s = min(s, lane.length - 0.5)

    def _light_label(self) -> int:
        for s_mark, light in self.route.stop_marks:
            d = s_mark - self.route_s
            if 0.0 <= d <= LIGHT_LOOKAHEAD:
                phase = self.lights.phase(light, self.t)
                return LIGHT_GREEN if phase == PHASE_GREEN else LIGHT_RED
        return LIGHT_NONE

    def _red_light_within(self, lookahead: float) -> bool:
        for s_mark, light in self.route.stop_marks:
            d = s_mark - self.route_s
            if 0.0 <= d <= lookahead:
                return self.lights.phase(light, self.t) != PHASE_GREEN
        return False

    def _obstacle_ahead(self, ego_pos: np.ndarray, ped_positions) -> bool:
        candidates = [veh.position for veh in self.vehicles] + list(ped_positions)
        for pos in candidates:
            if np.linalg.norm(pos - ego_pos) > STOP_LOOKAHEAD + 5.0:
                continue
            s_a, lat_a = project_to_polyline(
                self.route.polyline,
                self.route.cum,
                pos,
                s_lo=self.route_s - 2.0,
                s_hi=self.route_s + STOP_LOOKAHEAD + 4.0,
            )
            if abs(lat_a) <= OBSTACLE_LATERAL and 0.0 < s_a - self.route_s <= STOP_LOOKAHEAD:
                return True
        return False

    def _render_frame(self) -> np.ndarray:
        phases = {
            ls.lane: self.lights.phase(ls, self.t) for ls in self.graph.lights
        }
        ped_positions = [p.position(self.t) for p in self.pedestrians]
        return self.renderer.render(
            (self.x, self.y, self.heading), self.vehicles, ped_positions, phases
        )

    def _make_observation(self) -> Observation:
        return Observation(
            images=np.stack(self._frames),
            waypoints=self._next_waypoints(),
            measurements=np.stack(self._meas),
        )

    def _next_waypoints(self) -> np.ndarray:
        """Next N route waypoints ahead of the ego, in the ego frame."""
        grid = self._waypoint_grid
        if len(grid) == 0:
            pts = np.repeat(self.route.polyline[-1][None, :], NUM_WAYPOINTS, axis=0)
        else:
            first = int(np.floor(self.route_s / WAYPOINT_SPACING))  # grid[i] is at (i+1)*spacing
            idx = np.arange(first, first + NUM_WAYPOINTS)
            idx = np.clip(idx, 0, len(grid) - 1)
            pts = grid[idx]
        rel = pts - np.array([self.x, self.y])
        cos_t, sin_t = np.cos(self.heading), np.sin(self.heading)
        fwd = rel[:, 0] * cos_t + rel[:, 1] * sin_t
        left = -rel[:, 0] * sin_t + rel[:, 1] * cos_t
        return np.stack([fwd, left], axis=1).astype(np.float32)

    # ------------------------------------------------------------- inspection

    @property
    def speed(self) -> float:
        return self.v

    @property
    def done(self) -> bool:
        return self._done

    @property
    def observation(self) -> Observation:
        if self._obs is None:
            raise UsageError("environment not reset yet")
        return self._obs.copy()

    def current_light_label(self) -> int:
        return self._light_label()

    def route_completion(self) -> float:
        if self.route.length <= 0:
            return 1.0
        return min(1.0, self.route_s / self.route.length)

    def save_frame(self, path: str) -> None:
        """Dump the newest frame to an image file (debugging aid)."""
        import matplotlib.image

        img = self._frames[-1].transpose(1, 2, 0)
        matplotlib.image.imsave(path, img)
