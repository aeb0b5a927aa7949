"""Scenario configuration: map + traffic density + palette.

Scenarios are small key-value YAML files (or inline mappings):

    map: grid_a
    density: regular
    palette: noon
    seed: 7          # optional; base seed when reset() gets none
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from pixeldrive.errors import ConfigError
from pixeldrive.miniurban.palettes import get_palette

# density name -> (vehicles, pedestrians)
DENSITY_TABLE: dict[str, tuple[int, int]] = {
    "empty": (0, 0),
    "regular": (8, 4),
    "dense": (20, 10),
}


@dataclass(frozen=True)
class ScenarioConfig:
    map: str = "grid_a"
    density: str = "empty"
    palette: str = "noon"
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.density not in DENSITY_TABLE:
            raise ConfigError(
                f"unknown density {self.density!r}; known: {sorted(DENSITY_TABLE)}"
            )
        get_palette(self.palette)  # raises ConfigError on unknown palette

    @property
    def counts(self) -> tuple[int, int]:
        return DENSITY_TABLE[self.density]

    @classmethod
    def from_mapping(cls, d: dict) -> "ScenarioConfig":
        known = {"map", "density", "palette", "seed"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown scenario keys: {sorted(extra)}")
        return cls(**{k: d[k] for k in known if k in d})

    @classmethod
    def from_file(cls, path: str | Path) -> "ScenarioConfig":
        try:
            doc = yaml.safe_load(Path(path).read_text())
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"scenario file {path} must hold a mapping")
        return cls.from_mapping(doc)

    def to_mapping(self) -> dict:
        d = {"map": self.map, "density": self.density, "palette": self.palette}
        if self.seed is not None:
            d["seed"] = self.seed
        return d
