"""Interaction planning: the storytelling arc, creativity techniques, and
the per-tick state machine.

The session clock drives a three-phase arc (rising action, climax, falling
action).  During rising and falling action the robot applies the mirror
technique (imitate the child's recognized movement, stimulating convergent
thinking); during climax it applies contrast (perform a deliberately
different movement, stimulating divergent thinking).

The state machine has four states: Idle, Touched, Observing (a movement
segment is accumulating) and Executing (a behavior is running).  Touch
preempts everything within one tick: wheels freeze and the LEDs turn white.
Motion keeps being observed while touched, but a recognized movement's
response is deferred until release.  The robot's own executed motion is
never fed back into observation.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field

from . import behaviors
from .behaviors import ComposedBehavior, SocialProfile
from .classifier import TrainedModel, classify
from .errors import DegenerateTrajectory
from .hal import LedCommand, MotionDelta, TouchState, WheelCommand
from .shapes import SHAPE_CLASSES, ShapeClass
from .trajectory import SegmentationConfig, TimedPoint, Trajectory

# Displacement below this (meters per tick) counts as stillness.
MOTION_EPSILON = 1e-6


class ArcPhase(enum.Enum):
    RISING_ACTION = "rising"
    CLIMAX = "climax"
    FALLING_ACTION = "falling"
    ENDED = "ended"

    @property
    def label(self) -> str:
        return self.value


class InteractionState(enum.Enum):
    IDLE = "idle"
    TOUCHED = "touched"
    OBSERVING = "observing"
    EXECUTING = "executing"

    @property
    def label(self) -> str:
        return self.value


class Technique(enum.Enum):
    MIRROR = "mirror"
    CONTRAST = "contrast"

    @property
    def label(self) -> str:
        return self.value


@dataclass(frozen=True)
class ArcSchedule:
    """Phase durations in seconds."""

    rising: float = 120.0
    climax: float = 60.0
    falling: float = 120.0

    def __post_init__(self) -> None:
        for name in ("rising", "climax", "falling"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} duration must be > 0")

    @property
    def total(self) -> float:
        return self.rising + self.climax + self.falling


def phase_of(t: float, sched: ArcSchedule) -> ArcPhase:
    """Arc phase at session time ``t``."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t < sched.rising:
        return ArcPhase.RISING_ACTION
    if t < sched.rising + sched.climax:
        return ArcPhase.CLIMAX
    if t < sched.total:
        return ArcPhase.FALLING_ACTION
    return ArcPhase.ENDED


def technique_for(phase: ArcPhase) -> Technique | None:
    """Mirror during rising/falling action, contrast during climax, nothing
    once the arc has ended."""
    if phase in (ArcPhase.RISING_ACTION, ArcPhase.FALLING_ACTION):
        return Technique.MIRROR
    if phase is ArcPhase.CLIMAX:
        return Technique.CONTRAST
    return None


def respond(last: ShapeClass, technique: Technique, rng: random.Random) -> ShapeClass:
    """Pick the response shape: mirror repeats the recognized shape,
    contrast draws uniformly among the five other shapes."""
    if technique is Technique.MIRROR:
        return last
    others = [s for s in SHAPE_CLASSES if s is not last]
    return rng.choice(others)


@dataclass(frozen=True)
class Event:
    """One planner log entry."""

    t: float
    state: InteractionState
    phase: ArcPhase
    name: str
    shape: ShapeClass | None = None
    technique: Technique | None = None
    cause: str | None = None

    def format(self) -> str:
        parts = [
            f"t={self.t:.9g}",
            f"state={self.state.label}",
            f"phase={self.phase.label}",
            f"event={self.name}",
        ]
        if self.shape is not None:
            parts.append(f"shape={self.shape.label}")
        if self.technique is not None:
            parts.append(f"technique={self.technique.label}")
        if self.cause is not None:
            parts.append(f"cause={self.cause}")
        return " ".join(parts)


@dataclass
class TickResult:
    state: InteractionState
    wheel: WheelCommand
    led: LedCommand
    events: list[Event] = field(default_factory=list)
    behavior: ComposedBehavior | None = None


class Planner:
    """Single-owner state machine advanced once per control-loop tick.

    Deterministic: a fixed seed, sensor trace, and configuration always
    produce the same event log.
    """

    def __init__(
        self,
        profile: SocialProfile,
        model: TrainedModel,
        schedule: ArcSchedule = ArcSchedule(),
        seed: int = 0,
        seg_cfg: SegmentationConfig = SegmentationConfig(),
    ):
        self.profile = profile
        self.model = model
        self.schedule = schedule
        self.seg_cfg = seg_cfg
        self._rng = random.Random(seed)
        self.state = InteractionState.IDLE
        self._phase = ArcPhase.RISING_ACTION
        self._behavior: ComposedBehavior | None = None
        self._behavior_start = 0.0
        self._pending: ShapeClass | None = None
        self._last_activity = 0.0
        # Open observation segment: start time plus accumulated positions.
        self._seg_start: float | None = None
        self._seg_points: list[TimedPoint] = []
        self._seg_pos = (0.0, 0.0)

    @property
    def phase(self) -> ArcPhase:
        """Arc phase as of the last tick."""
        return self._phase

    # -- helpers ----------------------------------------------------------

    def _emit(self, events: list[Event], t: float, name: str, **kw) -> None:
        events.append(Event(t, self.state, self._phase, name, **kw))

    def _reset_segment(self) -> None:
        self._seg_start = None
        self._seg_points = []
        self._seg_pos = (0.0, 0.0)

    def _start_execution(
        self, events: list[Event], now: float, shape: ShapeClass,
        technique: Technique | None, cause: str,
    ) -> None:
        self.state = InteractionState.EXECUTING
        self._behavior = behaviors.make_movement(self.profile, shape)
        self._behavior_start = now
        self._reset_segment()
        self._emit(events, now, "execute", shape=shape, technique=technique,
                   cause=cause)

    def _respond_to(self, events: list[Event], now: float,
                    recognized: ShapeClass) -> None:
        technique = technique_for(self._phase)
        if technique is None:
            # Arc has ended: acknowledge but stop initiating behaviors.
            return
        shape = respond(recognized, technique, self._rng)
        self._start_execution(events, now, shape, technique, "response")

    def _close_segment(self, events: list[Event], now: float) -> None:
        traj = Trajectory(tuple(self._seg_points))
        self._reset_segment()
        if len(traj) < self.seg_cfg.min_points:
            return
        if traj.path_length() < self.seg_cfg.min_path_length:
            return
        try:
            shape, confidence = classify(self.model, traj)
        except DegenerateTrajectory:
            return
        self._emit(events, now, "recognize", shape=shape,
                   cause=f"confidence:{confidence:.2f}")
        if self.state is InteractionState.TOUCHED:
            self._pending = shape
        else:
            self._respond_to(events, now, shape)

    # -- the tick ---------------------------------------------------------

    def tick(self, touch: TouchState, motion: MotionDelta | None,
             now: float, dt: float) -> TickResult:
        events: list[Event] = []

        phase = phase_of(now, self.schedule)
        if phase is not self._phase:
            self._phase = phase
            self._emit(events, now, "arc", cause=phase.label)

        # Malformed sensor values are dropped (and logged), never fatal.
        if motion is not None and not (
            math.isfinite(motion.dx) and math.isfinite(motion.dy)
        ):
            self._emit(events, now, "sensor_drop", cause="non-finite-motion")
            motion = None

        # Touch preempts everything within this same tick.
        if touch.touched and self.state is not InteractionState.TOUCHED:
            if self.state is InteractionState.EXECUTING:
                self._behavior = None
            self.state = InteractionState.TOUCHED
            self._emit(events, now, "touch")
        elif not touch.touched and self.state is InteractionState.TOUCHED:
            self.state = InteractionState.IDLE
            self._emit(events, now, "release")

        if touch.touched:
            self._last_activity = now

        # Observation: accumulate drag motion while not executing.
        if self.state is not InteractionState.EXECUTING and motion is not None:
            if motion.magnitude > MOTION_EPSILON:
                self._last_activity = now
                if self._seg_start is None:
                    self._seg_start = now - dt
                    self._seg_points = [TimedPoint(now - dt, 0.0, 0.0)]
                    self._seg_pos = (0.0, 0.0)
                    if self.state is InteractionState.IDLE:
                        self.state = InteractionState.OBSERVING
                        self._emit(events, now, "observe")
                x = self._seg_pos[0] + motion.dx
                y = self._seg_pos[1] + motion.dy
                self._seg_pos = (x, y)
                self._seg_points.append(TimedPoint(now, x, y))
            if (
                self._seg_start is not None
                and now - self._seg_start >= self.seg_cfg.window
            ):
                if self.state is InteractionState.OBSERVING:
                    self.state = InteractionState.IDLE
                self._close_segment(events, now)

        # A movement recognized while touched answers after release.
        if self.state is InteractionState.IDLE and self._pending is not None:
            pending, self._pending = self._pending, None
            self._respond_to(events, now, pending)

        # Proactive profiles self-initiate after enough idle time.
        if (
            self.state is InteractionState.IDLE
            and self._phase is not ArcPhase.ENDED
            and math.isfinite(self.profile.proactivity)
            and now - self._last_activity >= self.profile.proactivity
        ):
            shape = self._rng.choice(SHAPE_CLASSES)
            self._start_execution(events, now, shape, None, "proactive")

        # Actuation for the final state of this tick.
        if self.state is InteractionState.TOUCHED:
            wheel, led, _ = behaviors.step(behaviors.touch_override(), 0.0, dt)
        elif self.state is InteractionState.EXECUTING and self._behavior is not None:
            elapsed = now - self._behavior_start
            wheel, led, done = behaviors.step(self._behavior, elapsed, dt)
            if done:
                self._behavior = None
                self.state = InteractionState.IDLE
                self._last_activity = now
                self._emit(events, now, "complete")
                _, led, _ = behaviors.step(behaviors.idle_light(self.profile), now, dt)
        else:
            wheel, led, _ = behaviors.step(behaviors.idle_light(self.profile), now, dt)

        return TickResult(self.state, wheel, led, events, self._behavior)


def format_log(events: list[Event]) -> str:
    """Serialize an event list to the line-oriented log format."""
    return "".join(e.format() + "\n" for e in events)
