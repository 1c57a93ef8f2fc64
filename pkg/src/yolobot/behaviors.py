"""Simple and Composed behaviors, social profiles, and per-tick stepping.

A Simple behavior parameterizes one actuator (lights or movement) for a
duration; a Composed behavior runs several simultaneously, with at most one
movement and one light part active (a later part of the same kind replaces
the earlier one).  Stepping a behavior turns elapsed time into one wheel
command and one LED command.

Movement paths reuse the shape generators' canonical paths at zero noise,
so a movement the robot executes is recognizable by its own classifier.
The three social profiles quantify the qualitative levels fast/medium/slow
(and vibrant/warm/cold palettes) as one overridable preset table.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, replace
from functools import lru_cache

from .errors import ConfigError, UnknownProfile
from .hal import DEFAULT_MAX_SPEED, LedAnimation, LedCommand, WheelCommand
from .shapes import ShapeClass, canonical_path

RGB = tuple[int, int, int]

# LED animation timing: palette advances once per second; blink toggles
# every half second; pulse swings around 0.6x brightness at 1 Hz.
COLOR_PERIOD = 1.0
BLINK_PERIOD = 0.5
PULSE_PERIOD = 1.0


@dataclass(frozen=True)
class LightBehavior:
    palette: tuple[RGB, ...]
    brightness: float
    animation: LedAnimation = LedAnimation.SOLID

    def __post_init__(self) -> None:
        if not self.palette:
            raise ValueError("palette must not be empty")
        if not 0.0 <= self.brightness <= 1.0:
            raise ValueError(f"brightness must be in [0, 1], got {self.brightness}")


@dataclass(frozen=True)
class MovementBehavior:
    shape: ShapeClass
    speed: float
    amplitude: float

    def __post_init__(self) -> None:
        if not 0.0 < self.speed <= DEFAULT_MAX_SPEED:
            raise ValueError(f"speed must be in (0, {DEFAULT_MAX_SPEED}], got {self.speed}")
        if not 0.0 < self.amplitude <= 0.5:
            raise ValueError(f"amplitude must be in (0, 0.5], got {self.amplitude}")


@dataclass(frozen=True)
class SimpleBehavior:
    """One actuator parameterization with a duration (inf = unbounded)."""

    action: LightBehavior | MovementBehavior
    duration: float

    def __post_init__(self) -> None:
        if not self.duration > 0.0:
            raise ValueError(f"duration must be > 0, got {self.duration}")


@dataclass(frozen=True)
class ComposedBehavior:
    """Simultaneous union of simple behaviors.

    The conflict rule is applied on construction: among the given parts,
    only the last movement and the last light survive.
    """

    parts: tuple[SimpleBehavior, ...]

    def __post_init__(self) -> None:
        movement = light = None
        for part in self.parts:
            if isinstance(part.action, MovementBehavior):
                movement = part
            else:
                light = part
        kept = tuple(p for p in (movement, light) if p is not None)
        object.__setattr__(self, "parts", kept)

    @property
    def movement(self) -> SimpleBehavior | None:
        for part in self.parts:
            if isinstance(part.action, MovementBehavior):
                return part
        return None

    @property
    def light(self) -> SimpleBehavior | None:
        for part in self.parts:
            if isinstance(part.action, LightBehavior):
                return part
        return None

    @property
    def duration(self) -> float:
        return max((p.duration for p in self.parts), default=0.0)


@dataclass(frozen=True)
class SocialProfile:
    """Named parameter bundle giving the robot a character.

    ``proactivity`` is the idle time in seconds before a self-initiated
    movement; inf means the profile never initiates on its own.
    """

    name: str
    speed: float
    amplitude: float
    palette: tuple[RGB, ...]
    brightness: float
    proactivity: float


PROFILE_PRESETS: dict[str, SocialProfile] = {
    "exuberant": SocialProfile(
        name="exuberant",
        speed=0.25,
        amplitude=0.20,
        palette=((128, 0, 128), (255, 0, 0)),
        brightness=0.9,
        proactivity=10.0,
    ),
    "aloof": SocialProfile(
        name="aloof",
        speed=0.08,
        amplitude=0.06,
        palette=((0, 128, 0), (0, 0, 255)),
        brightness=0.3,
        proactivity=math.inf,
    ),
    "harmonious": SocialProfile(
        name="harmonious",
        speed=0.16,
        amplitude=0.12,
        palette=((255, 200, 0), (255, 128, 0)),
        brightness=0.6,
        proactivity=25.0,
    ),
}


def profile_preset(name: str) -> SocialProfile:
    """Look up one of the three built-in social profiles."""
    try:
        return PROFILE_PRESETS[name.lower()]
    except KeyError:
        known = ", ".join(sorted(PROFILE_PRESETS))
        raise UnknownProfile(f"unknown profile {name!r} (known: {known})") from None


class _PathTable:
    """Arc-length lookup over a canonical shape path."""

    def __init__(self, points: list[tuple[float, float]]):
        self.points = points
        self.cum = [0.0]
        for a, b in zip(points, points[1:]):
            self.cum.append(self.cum[-1] + math.dist(a, b))
        self.length = self.cum[-1]

    def point_at(self, s: float) -> tuple[float, float]:
        s = max(0.0, min(s, self.length))
        i = bisect.bisect_right(self.cum, s) - 1
        if i >= len(self.points) - 1:
            return self.points[-1]
        span = self.cum[i + 1] - self.cum[i]
        frac = 0.0 if span <= 0 else (s - self.cum[i]) / span
        ax, ay = self.points[i]
        bx, by = self.points[i + 1]
        return (ax + (bx - ax) * frac, ay + (by - ay) * frac)


@lru_cache(maxsize=128)
def _shape_path(shape: ShapeClass, amplitude: float) -> _PathTable:
    return _PathTable(canonical_path(shape, amplitude))


def movement_duration(shape: ShapeClass, speed: float, amplitude: float) -> float:
    """Time to trace the shape once at the given speed."""
    return _shape_path(shape, amplitude).length / speed


def make_movement(profile: SocialProfile, shape: ShapeClass) -> ComposedBehavior:
    """Movement behavior in the profile's style: trace the shape once while
    pulsing the profile palette."""
    duration = movement_duration(shape, profile.speed, profile.amplitude)
    return ComposedBehavior((
        SimpleBehavior(MovementBehavior(shape, profile.speed, profile.amplitude),
                       duration),
        SimpleBehavior(LightBehavior(profile.palette, profile.brightness,
                                     LedAnimation.PULSE),
                       duration),
    ))


def touch_override() -> ComposedBehavior:
    """While touched: white solid light, no movement, unbounded duration."""
    return ComposedBehavior((
        SimpleBehavior(LightBehavior(((255, 255, 255),), 0.8, LedAnimation.SOLID),
                       math.inf),
    ))


def idle_light(profile: SocialProfile) -> ComposedBehavior:
    """Resting display: the profile's colors, no movement."""
    return ComposedBehavior((
        SimpleBehavior(LightBehavior(profile.palette, profile.brightness,
                                     LedAnimation.SOLID),
                       math.inf),
    ))


def _led_at(light: LightBehavior, elapsed: float) -> LedCommand:
    color = light.palette[int(elapsed / COLOR_PERIOD) % len(light.palette)]
    b = light.brightness
    if light.animation is LedAnimation.SOLID:
        level = b
    elif light.animation is LedAnimation.BLINK:
        level = b if (elapsed % (2 * BLINK_PERIOD)) < BLINK_PERIOD else 0.0
    else:  # PULSE
        level = b * (0.6 + 0.4 * math.sin(math.tau * elapsed / PULSE_PERIOD))
        level = max(0.2 * b, min(level, b))
    return LedCommand(color, level, light.animation)


def step(
    behavior: ComposedBehavior, elapsed: float, dt: float
) -> tuple[WheelCommand, LedCommand, bool]:
    """Evaluate a behavior at ``elapsed`` seconds into its execution.

    The wheel command follows the shape path by chord: it points from the
    path position at arc length speed*elapsed to the position one tick
    later, so integrating the commands reproduces the path exactly and the
    emitted speed never exceeds the part's speed.
    """
    if elapsed < 0.0:
        raise ValueError(f"elapsed must be >= 0, got {elapsed}")
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    done = elapsed >= behavior.duration

    wheel = WheelCommand.stop()
    move = behavior.movement
    if move is not None and not done and elapsed < move.duration:
        m = move.action
        assert isinstance(m, MovementBehavior)
        table = _shape_path(m.shape, m.amplitude)
        s0 = min(m.speed * elapsed, table.length)
        s1 = min(m.speed * (elapsed + dt), table.length)
        x0, y0 = table.point_at(s0)
        x1, y1 = table.point_at(s1)
        vx, vy = (x1 - x0) / dt, (y1 - y0) / dt
        speed = math.hypot(vx, vy)
        if speed > 1e-12:
            wheel = WheelCommand(math.atan2(vy, vx), speed)

    light = behavior.light
    if light is not None:
        assert isinstance(light.action, LightBehavior)
        led = _led_at(light.action, elapsed)
    else:
        led = LedCommand.off()
    return wheel, led, done


# ---------------------------------------------------------------------------
# Profile/behavior configuration files: line-oriented `key = value`, e.g.
#   exuberant.speed = 0.25
#   aloof.palette = 0,128,0 0,0,255
# Unknown keys are errors.

_SCALAR_KEYS = {"speed", "amplitude", "brightness", "proactivity"}


def _parse_palette(value: str) -> tuple[RGB, ...]:
    colors = []
    for token in value.split():
        parts = token.split(",")
        if len(parts) != 3:
            raise ConfigError(f"palette entry {token!r} is not r,g,b")
        r, g, b = (int(p) for p in parts)
        colors.append((r, g, b))
    if not colors:
        raise ConfigError("palette must list at least one color")
    return tuple(colors)


def load_profiles(text: str) -> dict[str, SocialProfile]:
    """Apply `key = value` overrides on top of the preset table."""
    profiles = dict(PROFILE_PRESETS)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        name, _, field_name = key.partition(".")
        if name not in profiles or not field_name:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        profile = profiles[name]
        if field_name in _SCALAR_KEYS:
            try:
                profiles[name] = replace(profile, **{field_name: float(value)})
            except ValueError:
                raise ConfigError(f"line {lineno}: bad number {value!r}") from None
        elif field_name == "palette":
            profiles[name] = replace(profile, palette=_parse_palette(value))
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return profiles


def load_profiles_file(path: str) -> dict[str, SocialProfile]:
    with open(path, "r", encoding="ascii") as fh:
        return load_profiles(fh.read())
