"""Hardware abstraction: sensor readers and actuator writers.

A backend (the simulator here; physical drivers would slot in the same way)
exposes exactly four operations plus init/shutdown: read the debounced touch
state, read the motion delta since the previous read, drive the omni wheels,
and set the jewel LEDs.  Omni wheels are holonomic, so a wheel command's
heading is world-frame and independent of body orientation.

The module also provides the small stateful helpers (touch debouncing,
motion delta tracking) that any backend implementation needs.
"""

from __future__ import annotations

import abc
import enum
import math
from dataclasses import dataclass

from .errors import BackendUnavailable, SpeedOutOfRange

DEBOUNCE_WINDOW = 0.05
DEFAULT_MAX_SPEED = 0.3


@dataclass(frozen=True)
class TouchState:
    """Debounced touch-sensor reading; ``since`` is seconds since the press
    began and is meaningful only while touched."""

    touched: bool
    since: float = 0.0


@dataclass(frozen=True)
class MotionDelta:
    """Optical-sensor reading: displacement since the previous read."""

    dx: float
    dy: float
    dt: float

    def __post_init__(self) -> None:
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not (math.isfinite(self.dx) and math.isfinite(self.dy)):
            raise ValueError(f"delta must be finite, got ({self.dx}, {self.dy})")

    @property
    def magnitude(self) -> float:
        return math.hypot(self.dx, self.dy)


@dataclass(frozen=True)
class WheelCommand:
    """World-frame velocity request: heading in [0, 2*pi) radians and speed
    in m/s.  Range against the backend's max speed is checked by drive()."""

    heading: float
    speed: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.heading):
            raise ValueError(f"heading must be finite, got {self.heading}")
        if not (math.isfinite(self.speed) and self.speed >= 0.0):
            raise ValueError(f"speed must be >= 0, got {self.speed}")
        object.__setattr__(self, "heading", self.heading % math.tau)

    @property
    def velocity(self) -> tuple[float, float]:
        return (self.speed * math.cos(self.heading),
                self.speed * math.sin(self.heading))

    @classmethod
    def stop(cls) -> "WheelCommand":
        return cls(0.0, 0.0)


class LedAnimation(enum.Enum):
    SOLID = "solid"
    BLINK = "blink"
    PULSE = "pulse"


@dataclass(frozen=True)
class LedCommand:
    """Jewel LED request: RGB color, brightness in [0, 1], animation mode."""

    color: tuple[int, int, int]
    brightness: float
    animation: LedAnimation = LedAnimation.SOLID

    def __post_init__(self) -> None:
        if len(self.color) != 3 or any(
            not isinstance(c, int) or not 0 <= c <= 255 for c in self.color
        ):
            raise ValueError(f"color must be three ints in [0, 255], got {self.color}")
        if not (math.isfinite(self.brightness) and 0.0 <= self.brightness <= 1.0):
            raise ValueError(f"brightness must be in [0, 1], got {self.brightness}")

    @classmethod
    def off(cls) -> "LedCommand":
        return cls((0, 0, 0), 0.0, LedAnimation.SOLID)


class Backend(abc.ABC):
    """Contract every hardware/simulator backend implements.

    All calls are total: they return a value or raise a declared error
    within one tick, never block indefinitely.  A backend instance is owned
    by a single control loop.
    """

    @abc.abstractmethod
    def initialize(self) -> None: ...

    @abc.abstractmethod
    def shutdown(self) -> None: ...

    @abc.abstractmethod
    def read_touch(self) -> TouchState:
        """Current debounced touch state (50 ms window)."""

    @abc.abstractmethod
    def read_motion(self) -> MotionDelta:
        """Displacement since the previous read; a first read reports a zero
        delta over the elapsed time."""

    @abc.abstractmethod
    def drive(self, cmd: WheelCommand) -> None:
        """Set wheel velocity until the next command; raises SpeedOutOfRange
        beyond the configured maximum."""

    @abc.abstractmethod
    def set_led(self, cmd: LedCommand) -> None:
        """Update visible color/brightness/animation this tick."""


class TouchDebouncer:
    """Turns a raw contact flag into a debounced TouchState: a press only
    registers after it has been held for the debounce window."""

    def __init__(self, window: float = DEBOUNCE_WINDOW):
        self.window = window
        self._press_start: float | None = None

    def update(self, raw: bool, now: float) -> TouchState:
        if not raw:
            self._press_start = None
            return TouchState(False)
        if self._press_start is None:
            self._press_start = now
        held = now - self._press_start
        if held >= self.window:
            return TouchState(True, since=held)
        return TouchState(False)


class MotionTracker:
    """Computes position deltas between successive sensor reads."""

    def __init__(self, t0: float, x0: float, y0: float):
        self._t = t0
        self._x = x0
        self._y = y0

    def update(self, now: float, x: float, y: float) -> MotionDelta:
        if now <= self._t:
            raise BackendUnavailable(
                f"motion read at t={now} does not follow previous read at t={self._t}"
            )
        delta = MotionDelta(x - self._x, y - self._y, now - self._t)
        self._t, self._x, self._y = now, x, y
        return delta


def check_speed(cmd: WheelCommand, max_speed: float) -> None:
    """Shared drive() validation."""
    if cmd.speed > max_speed + 1e-12:
        raise SpeedOutOfRange(f"speed {cmd.speed} exceeds max {max_speed}")
