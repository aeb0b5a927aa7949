"""Render palettes (weather analogs) and static background decorations.

Palettes change the background, road, and decoration colors so that pixels
carry task-irrelevant variation between scenarios. Traffic-light colors are
identical across palettes. Decorations are a pure function of
(map, palette), so frames stay deterministic.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from pixeldrive.errors import ConfigError

RGB = tuple[int, int, int]

LIGHT_COLOR_RED: RGB = (230, 60, 50)
LIGHT_COLOR_YELLOW: RGB = (235, 200, 60)
LIGHT_COLOR_GREEN: RGB = (60, 210, 80)


@dataclass(frozen=True)
class Palette:
    name: str
    background: RGB
    road: RGB
    marking: RGB
    crossing: RGB
    vehicle: RGB
    pedestrian: RGB
    ego: RGB
    decoration_colors: tuple[RGB, ...] = field(default=())


_PALETTES: dict[str, Palette] = {}


def _register(p: Palette) -> Palette:
    _PALETTES[p.name] = p
    return p


_register(
    Palette(
        "noon",
        background=(96, 128, 88),
        road=(70, 70, 74),
        marking=(210, 210, 205),
        crossing=(150, 150, 150),
        vehicle=(40, 90, 200),
        pedestrian=(240, 150, 40),
        ego=(250, 250, 250),
        decoration_colors=((120, 150, 100), (150, 130, 90), (100, 110, 120)),
    )
)
_register(
    Palette(
        "overcast",
        background=(105, 110, 105),
        road=(80, 80, 84),
        marking=(190, 190, 190),
        crossing=(140, 140, 145),
        vehicle=(60, 100, 180),
        pedestrian=(230, 140, 50),
        ego=(245, 245, 245),
        decoration_colors=((115, 120, 110), (130, 125, 115), (95, 100, 105)),
    )
)
_register(
    Palette(
        "sunset",
        background=(140, 105, 80),
        road=(78, 66, 66),
        marking=(220, 200, 170),
        crossing=(165, 140, 125),
        vehicle=(50, 80, 170),
        pedestrian=(250, 160, 60),
        ego=(255, 245, 235),
        decoration_colors=((170, 120, 80), (150, 100, 90), (120, 90, 100)),
    )
)
_register(
    Palette(
        "rain",
        background=(78, 92, 96),
        road=(58, 60, 68),
        marking=(175, 180, 185),
        crossing=(120, 125, 132),
        vehicle=(45, 85, 170),
        pedestrian=(215, 135, 55),
        ego=(235, 240, 245),
        decoration_colors=((90, 105, 100), (105, 110, 118), (80, 88, 95)),
    )
)
_register(
    Palette(
        "dawn",
        background=(120, 110, 125),
        road=(66, 64, 74),
        marking=(200, 195, 205),
        crossing=(145, 140, 150),
        vehicle=(55, 90, 185),
        pedestrian=(235, 145, 65),
        ego=(248, 244, 250),
        decoration_colors=((135, 115, 130), (115, 105, 135), (100, 95, 115)),
    )
)
_register(
    Palette(
        "night",
        background=(40, 44, 56),
        road=(32, 32, 40),
        marking=(150, 150, 160),
        crossing=(95, 98, 108),
        vehicle=(70, 105, 190),
        pedestrian=(210, 130, 70),
        ego=(225, 228, 240),
        decoration_colors=((55, 60, 75), (48, 55, 70), (65, 62, 80)),
    )
)

TRAIN_PALETTES = ("noon", "overcast", "sunset", "rain")
TEST_PALETTES = ("dawn", "night")


def get_palette(name: str) -> Palette:
    if name not in _PALETTES:
        raise ConfigError(f"unknown palette {name!r}; known: {sorted(_PALETTES)}")
    return _PALETTES[name]


def palette_names() -> list[str]:
    return sorted(_PALETTES)


@dataclass(frozen=True)
class Decoration:
    kind: str  # "disc" or "rect"
    x: float
    y: float
    size: float
    angle: float
    color: RGB


def generate_decorations(graph, palette: Palette, count: int = 140) -> list[Decoration]:
    """Off-road clutter, deterministic per (map, palette)."""
    if not palette.decoration_colors:
        return []
    entropy = [
        zlib.crc32(graph.name.encode()),
        zlib.crc32(palette.name.encode()),
    ]
    rng = np.random.default_rng(np.random.SeedSequence(entropy))
    lo, hi = graph.bounds()
    lo = lo - 25.0
    hi = hi + 25.0
    out: list[Decoration] = []
    for _ in range(count):
        p = rng.uniform(lo, hi)
        size = float(rng.uniform(1.2, 4.5))
        kind = "disc" if rng.random() < 0.5 else "rect"
        angle = float(rng.uniform(0, np.pi))
        color = palette.decoration_colors[int(rng.integers(len(palette.decoration_colors)))]
        if graph.distance_to_drivable(p) > size + 1.5:
            out.append(Decoration(kind, float(p[0]), float(p[1]), size, angle, color))
    return out
