"""Ego-centric top-down camera.

Renders the world into an RGB frame with the ego centered and heading up.
Rendering is a pure function of world state, so identical states produce
identical pixels.
"""

from __future__ import annotations

import numpy as np

from pixeldrive.miniurban import raster
from pixeldrive.miniurban.lane_graph import LaneGraph
from pixeldrive.miniurban.palettes import (
    LIGHT_COLOR_GREEN,
    LIGHT_COLOR_RED,
    LIGHT_COLOR_YELLOW,
    Palette,
    generate_decorations,
)
from pixeldrive.miniurban.traffic import (
    PHASE_GREEN,
    PHASE_RED,
    VEHICLE_HALF_LEN,
    VEHICLE_HALF_W,
)

VIEW_SIZE = 48.0  # meters covered by the frame edge-to-edge

_PHASE_COLORS = {
    PHASE_RED: LIGHT_COLOR_RED,
    PHASE_GREEN: LIGHT_COLOR_GREEN,
    "yellow": LIGHT_COLOR_YELLOW,
}


class Renderer:
    def __init__(self, graph: LaneGraph, palette: Palette, resolution: int) -> None:
        self.graph = graph
        self.palette = palette
        self.res = int(resolution)
        self.ppm = self.res / VIEW_SIZE
        self.decorations = generate_decorations(graph, palette)

        # static geometry, world space
        self.lane_segments = [
            (ln.polyline[:-1], ln.polyline[1:]) for ln in graph.lanes.values()
        ]
        roads: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        for ln in graph.lanes.values():
            roads.setdefault(ln.road, (graph.nodes[ln.start], graph.nodes[ln.end]))
        self.road_axes = list(roads.values())
        self.junctions = graph.junction_centers
        self.light_geom = []
        for ls in graph.lights:
            lane = graph.lanes[ls.lane]
            end = lane.end_point
            tangent = lane.end_tangent
            right = np.array([tangent[1], -tangent[0]])
            self.light_geom.append((ls, end, tangent, end + right * 2.4))

    # -- coordinate transform ------------------------------------------------

    def _to_px(self, pts: np.ndarray, ego_xy: np.ndarray, cos_t: float, sin_t: float):
        rel = np.atleast_2d(pts) - ego_xy
        fwd = rel[:, 0] * cos_t + rel[:, 1] * sin_t
        left = -rel[:, 0] * sin_t + rel[:, 1] * cos_t
        row = self.res / 2.0 - fwd * self.ppm
        col = self.res / 2.0 - left * self.ppm
        return row, col

    def _axis_px(self, heading: float, ego_heading: float) -> tuple[float, float]:
        """World heading to a unit (row, col) axis in the rotated frame."""
        d = heading - ego_heading
        return -np.cos(d), -np.sin(d)

    def _visible(self, row, col, margin: float) -> bool:
        lo = -margin
        hi = self.res + margin
        return bool(np.any((row > lo) & (row < hi) & (col > lo) & (col < hi)))

    # -- frame ----------------------------------------------------------------

    def render(
        self,
        ego_pose: tuple[float, float, float],
        vehicles,
        pedestrian_positions: list[np.ndarray],
        light_phases: dict[str, str],
    ) -> np.ndarray:
        """Draw one frame; returns (3, res, res) uint8."""
        x, y, theta = ego_pose
        ego_xy = np.array([x, y])
        cos_t, sin_t = float(np.cos(theta)), float(np.sin(theta))
        pal = self.palette
        img = np.empty((self.res, self.res, 3), dtype=np.uint8)
        img[:, :] = pal.background

        half_lane_px = (self.graph.lane_width / 2.0) * self.ppm
        junc_px = self.graph.junction_radius * self.ppm

        for deco in self.decorations:
            row, col = self._to_px(np.array([[deco.x, deco.y]]), ego_xy, cos_t, sin_t)
            size_px = deco.size * self.ppm
            if not self._visible(row, col, size_px * 1.5):
                continue
            if deco.kind == "disc":
                raster.fill_disc(img, row[0], col[0], size_px, deco.color)
            else:
                ay, ax = self._axis_px(deco.angle, theta)
                raster.fill_rect(
                    img, row[0], col[0], ay, ax, size_px, size_px * 0.6, deco.color
                )

        rows, cols = self._to_px(self.junctions, ego_xy, cos_t, sin_t)
        for r, c in zip(rows, cols):
            if -junc_px < r < self.res + junc_px and -junc_px < c < self.res + junc_px:
                raster.fill_disc(img, r, c, junc_px, pal.road)

        for seg_a, seg_b in self.lane_segments:
            ra, ca = self._to_px(seg_a, ego_xy, cos_t, sin_t)
            rb, cb = self._to_px(seg_b, ego_xy, cos_t, sin_t)
            for i in range(len(ra)):
                lo = min(ra[i], rb[i], ca[i], cb[i])
                hi = max(ra[i], rb[i], ca[i], cb[i])
                if hi < -half_lane_px or lo > self.res + half_lane_px:
                    continue
                raster.fill_capsule(
                    img, ra[i], ca[i], rb[i], cb[i], half_lane_px, pal.road
                )

        for a, b in self.road_axes:
            ra, ca = self._to_px(np.array([a]), ego_xy, cos_t, sin_t)
            rb, cb = self._to_px(np.array([b]), ego_xy, cos_t, sin_t)
            lo = min(ra[0], rb[0], ca[0], cb[0])
            hi = max(ra[0], rb[0], ca[0], cb[0])
            if hi < -2 or lo > self.res + 2:
                continue
            raster.fill_capsule(
                img, ra[0], ca[0], rb[0], cb[0], max(0.6, 0.12 * self.ppm), pal.marking
            )

        for crossing in self.graph.crossings:
            row, col = self._to_px(np.array([crossing.center]), ego_xy, cos_t, sin_t)
            ext = crossing.half_len * self.ppm
            if not self._visible(row, col, ext):
                continue
            cy, cx = row[0], col[0]
            dir_heading = float(np.arctan2(crossing.direction[1], crossing.direction[0]))
            ay, ax = self._axis_px(dir_heading, theta)
            raster.fill_rect(img, cy, cx, ay, ax, ext, 1.0 * self.ppm, pal.crossing)

        for ls, stop_pt, tangent, disc_pt in self.light_geom:
            color = _PHASE_COLORS[light_phases[ls.lane]]
            row, col = self._to_px(np.array([stop_pt, disc_pt]), ego_xy, cos_t, sin_t)
            if not self._visible(row, col, 4 * self.ppm):
                continue
            lane_heading = float(np.arctan2(tangent[1], tangent[0]))
            ay, ax = self._axis_px(lane_heading + np.pi / 2.0, theta)
            raster.fill_rect(
                img,
                row[0],
                col[0],
                ay,
                ax,
                (self.graph.lane_width / 2.0) * self.ppm,
                0.45 * self.ppm,
                color,
            )
            raster.fill_disc(img, row[1], col[1], 1.0 * self.ppm, color)

        for veh in vehicles:
            row, col = self._to_px(veh.position[None, :], ego_xy, cos_t, sin_t)
            if not self._visible(row, col, 4 * self.ppm):
                continue
            ay, ax = self._axis_px(veh.heading, theta)
            raster.fill_rect(
                img,
                row[0],
                col[0],
                ay,
                ax,
                VEHICLE_HALF_LEN * self.ppm,
                VEHICLE_HALF_W * self.ppm,
                pal.vehicle,
            )

        for pos in pedestrian_positions:
            row, col = self._to_px(pos[None, :], ego_xy, cos_t, sin_t)
            if not self._visible(row, col, 2 * self.ppm):
                continue
            raster.fill_disc(img, row[0], col[0], 0.45 * self.ppm, pal.pedestrian)

        # ego: centered, pointing up
        cy = cx = self.res / 2.0
        raster.fill_rect(
            img,
            cy,
            cx,
            -1.0,
            0.0,
            VEHICLE_HALF_LEN * self.ppm,
            VEHICLE_HALF_W * self.ppm,
            pal.ego,
        )
        raster.fill_disc(
            img, cy - 1.4 * self.ppm, cx, 0.35 * self.ppm, (30, 30, 30)
        )

        return np.ascontiguousarray(img.transpose(2, 0, 1))
