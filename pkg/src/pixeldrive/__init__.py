"""Pixels-to-control urban driving: agent, simulator, and benchmark harness."""

__version__ = "0.1.0"

from pixeldrive.errors import ConfigError, DataError, NotReadyError, PlanningError

__all__ = [
    "ConfigError",
    "DataError",
    "NotReadyError",
    "PlanningError",
    "__version__",
]
