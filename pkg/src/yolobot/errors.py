"""Exception types shared across the engine.

Every declared failure mode of the public API maps to one of these
classes so callers can catch precisely what they can handle.
"""


class YolobotError(Exception):
    """Base class for all errors raised by this package."""


class NonMonotonicTimestamp(YolobotError):
    """A sample's timestamp does not strictly increase the trajectory."""


class DegenerateTrajectory(YolobotError):
    """Trajectory is too small or collapsed to a point; cannot be normalized
    or featurized."""


class TooFewPoints(YolobotError):
    """Convex hull requires at least two distinct points."""


class MissingClass(YolobotError):
    """Training corpus lacks at least one example of some shape class."""


class EmptyTestSet(YolobotError):
    """Evaluation requires a non-empty test set."""


class BackendUnavailable(YolobotError):
    """Hardware/simulator backend is not initialized or was shut down."""


class SpeedOutOfRange(YolobotError):
    """Wheel command speed exceeds the configured maximum (or is negative)."""


class UnknownProfile(YolobotError):
    """No social profile preset with the given name."""


class PathOutOfArena(YolobotError):
    """An injected drag path leaves the simulated arena."""


class MalformedTrace(YolobotError):
    """A session trace file is truncated or structurally invalid."""


class ConfigError(YolobotError):
    """A configuration file or value is invalid (unknown key, bad syntax)."""
