"""Exception hierarchy shared across the package.

The CLI maps these onto distinct process exit codes, so raising the right
class matters at the boundaries (config parsing, file loading, replay).
"""


class PixeldriveError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(PixeldriveError):
    """Invalid or inconsistent configuration (bad file, mismatched checkpoint)."""


class DataError(PixeldriveError):
    """Malformed data record (invalid transition, corrupt log, bad label)."""


class NotReadyError(PixeldriveError):
    """An operation was requested before its preconditions were met."""


class PlanningError(PixeldriveError):
    """Route planning failed (disconnected nodes, unknown node ids)."""


class UsageError(PixeldriveError):
    """API misuse, e.g. stepping an episode that already terminated."""
