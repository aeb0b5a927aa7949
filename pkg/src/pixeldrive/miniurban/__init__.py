"""Deterministic 2D top-down urban driving environment."""

from pixeldrive.miniurban.env import (
    MiniUrbanEnv,
    Observation,
    StepInfo,
    VehicleCommand,
    LIGHT_NONE,
    LIGHT_RED,
    LIGHT_GREEN,
)
from pixeldrive.miniurban.lane_graph import LaneGraph, builtin_map, load_map, save_map
from pixeldrive.miniurban.scenario import ScenarioConfig, DENSITY_TABLE
from pixeldrive.miniurban.planner import plan_route

__all__ = [
    "MiniUrbanEnv",
    "Observation",
    "StepInfo",
    "VehicleCommand",
    "LaneGraph",
    "ScenarioConfig",
    "DENSITY_TABLE",
    "builtin_map",
    "load_map",
    "save_map",
    "plan_route",
    "LIGHT_NONE",
    "LIGHT_RED",
    "LIGHT_GREEN",
]
