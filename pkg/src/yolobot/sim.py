"""Deterministic virtual robot: fixed-step kinematics, drag injection,
session traces, and replay verification.

The simulation advances on a fixed tick.  Each tick: scripted or live
inputs are applied (drag displacement, raw touch flag), sensors are read
through the HAL, the planner decides, actuator commands are applied, and
one trace record is appended.  Identical configuration, inputs, and seed
produce byte-identical trace files; replay re-executes a trace's inputs
and reports the first divergence, if any.

Drag is authoritative position displacement (a child's hand overpowers the
wheels), and the wheels are frozen whenever the debounced touch flag is
set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import trajectory
from .behaviors import SocialProfile
from .classifier import TrainedModel, default_model
from .errors import MalformedTrace, PathOutOfArena
from .hal import (
    Backend,
    BackendUnavailable,
    LedCommand,
    MotionDelta,
    MotionTracker,
    TouchDebouncer,
    TouchState,
    WheelCommand,
    check_speed,
)
from .planner import ArcSchedule, Event, Planner
from .shapes import ShapeClass, canonical_path
from .trajectory import Trajectory

SCRIPT_GRACE = 5.0


@dataclass(frozen=True)
class SimConfig:
    tick: float = 0.05
    arena_width: float = 2.0
    arena_height: float = 2.0
    max_speed: float = 0.3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tick <= 0:
            raise ValueError(f"tick must be > 0, got {self.tick}")
        if self.arena_width <= 0 or self.arena_height <= 0:
            raise ValueError("arena sides must be > 0")
        if self.max_speed <= 0:
            raise ValueError(f"max_speed must be > 0, got {self.max_speed}")


@dataclass(frozen=True)
class RobotState:
    """Snapshot of the simulated robot after a tick."""

    x: float
    y: float
    vx: float
    vy: float
    led: LedCommand
    touched: bool


@dataclass(frozen=True)
class TickInputs:
    """External inputs applied during one tick."""

    drag_dx: float = 0.0
    drag_dy: float = 0.0
    touch: bool = False


def clamp_to_arena(x: float, y: float, cfg: SimConfig) -> tuple[float, float]:
    return (min(max(x, 0.0), cfg.arena_width), min(max(y, 0.0), cfg.arena_height))


def step_sim(
    state: RobotState,
    inputs: TickInputs,
    wheel: WheelCommand,
    led: LedCommand,
    cfg: SimConfig,
    touched: bool,
) -> RobotState:
    """Advance the robot by one tick.

    Drag displacement is applied as-is; wheel velocity integrates over the
    tick unless the (debounced) touch flag freezes the wheels.  Position is
    clamped to the arena.
    """
    vx, vy = (0.0, 0.0) if touched else wheel.velocity
    x = state.x + inputs.drag_dx + vx * cfg.tick
    y = state.y + inputs.drag_dy + vy * cfg.tick
    x, y = clamp_to_arena(x, y, cfg)
    return RobotState(x, y, vx, vy, led, touched)


class SimBackend(Backend):
    """HAL backend over the simulated world."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self._initialized = False
        self.t = 0.0
        self.state = RobotState(
            cfg.arena_width / 2.0, cfg.arena_height / 2.0, 0.0, 0.0,
            LedCommand.off(), False,
        )
        self._raw_touch = False
        self._debouncer = TouchDebouncer()
        self._tracker: MotionTracker | None = None
        self._wheel = WheelCommand.stop()
        self._led = LedCommand.off()

    def initialize(self) -> None:
        self._initialized = True
        self._tracker = MotionTracker(self.t, self.state.x, self.state.y)

    def shutdown(self) -> None:
        self._initialized = False

    def _require_init(self) -> None:
        if not self._initialized or self._tracker is None:
            raise BackendUnavailable("backend not initialized")

    def apply_inputs(self, t: float, inputs: TickInputs) -> None:
        """Advance the clock and apply external inputs for this tick: the
        drag moves the robot immediately (the hand wins over the wheels)."""
        self._require_init()
        self.t = t
        self._raw_touch = inputs.touch
        if inputs.drag_dx or inputs.drag_dy:
            x, y = clamp_to_arena(
                self.state.x + inputs.drag_dx, self.state.y + inputs.drag_dy, self.cfg
            )
            self.state = RobotState(
                x, y, self.state.vx, self.state.vy, self.state.led,
                self.state.touched,
            )

    def read_touch(self) -> TouchState:
        self._require_init()
        return self._debouncer.update(self._raw_touch, self.t)

    def read_motion(self) -> MotionDelta:
        self._require_init()
        assert self._tracker is not None
        return self._tracker.update(self.t, self.state.x, self.state.y)

    def drive(self, cmd: WheelCommand) -> None:
        self._require_init()
        check_speed(cmd, self.cfg.max_speed)
        self._wheel = cmd

    def set_led(self, cmd: LedCommand) -> None:
        self._require_init()
        self._led = cmd

    def integrate(self, touched: bool) -> RobotState:
        """Apply the stored wheel command over one tick (unless touched) and
        snapshot the post-tick robot state."""
        self._require_init()
        vx, vy = (0.0, 0.0) if touched else self._wheel.velocity
        x, y = clamp_to_arena(
            self.state.x + vx * self.cfg.tick, self.state.y + vy * self.cfg.tick,
            self.cfg,
        )
        self.state = RobotState(x, y, vx, vy, self._led, touched)
        return self.state


@dataclass(frozen=True)
class TickRecord:
    """One trace row: post-tick robot state, the tick's raw inputs, and any
    planner events."""

    t: float
    state: RobotState
    inputs: TickInputs
    planner_state: str
    phase: str
    events: tuple[Event, ...]


@dataclass(frozen=True)
class SessionTrace:
    cfg: SimConfig
    profile: SocialProfile
    schedule: ArcSchedule
    records: tuple[TickRecord, ...]

    def events(self) -> list[Event]:
        out: list[Event] = []
        for rec in self.records:
            out.extend(rec.events)
        return out


# -- scripted inputs ---------------------------------------------------------


@dataclass(frozen=True)
class ScriptAction:
    """One timed external input.

    kind "touch": set the raw touch flag to ``on``.
    kind "drag": trace a generated shape (or an explicit trajectory) under
    the robot over ``duration`` seconds.
    """

    t: float
    kind: str
    on: bool = False
    shape: ShapeClass | None = None
    amplitude: float = 0.3
    duration: float = 2.8
    traj: Trajectory | None = None


def parse_script(text: str) -> list[ScriptAction]:
    """Parse the script file format.

    Lines: ``touch <t> on|off`` or ``drag <t> <shape> [amplitude]
    [duration]``; '#' comments and blank lines are ignored.
    """
    actions: list[ScriptAction] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        try:
            if fields[0] == "touch" and len(fields) == 3:
                actions.append(ScriptAction(float(fields[1]), "touch",
                                            on=fields[2] == "on"))
            elif fields[0] == "drag" and 3 <= len(fields) <= 5:
                amplitude = float(fields[3]) if len(fields) > 3 else 0.3
                duration = float(fields[4]) if len(fields) > 4 else 2.8
                actions.append(ScriptAction(
                    float(fields[1]), "drag",
                    shape=ShapeClass.from_label(fields[2]),
                    amplitude=amplitude, duration=duration,
                ))
            else:
                raise ValueError(f"unrecognized script line: {raw!r}")
        except (ValueError, IndexError) as exc:
            raise ValueError(f"script line {lineno}: {exc}") from exc
    return sorted(actions, key=lambda a: a.t)


def example_script(sched: ArcSchedule) -> list[ScriptAction]:
    """The illustrative play session: the child drags a shape during rising
    action (answered by mirror) and another during climax (answered by
    contrast)."""
    t1 = min(10.0, sched.rising / 4.0)
    t2 = sched.rising + min(10.0, sched.climax / 4.0)
    return [
        ScriptAction(t1, "touch", on=True),
        ScriptAction(t1 + 0.1, "drag", shape=ShapeClass.CIRCLE),
        ScriptAction(t1 + 3.3, "touch", on=False),
        ScriptAction(t2, "touch", on=True),
        ScriptAction(t2 + 0.1, "drag", shape=ShapeClass.RECT),
        ScriptAction(t2 + 3.3, "touch", on=False),
    ]


class _ActiveDrag:
    """Tick-aligned delta stream interpolated from a trajectory."""

    def __init__(self, traj: Trajectory, start_t: float):
        self.points = [(p.t - traj.points[0].t, p.x, p.y) for p in traj.points]
        self.start_t = start_t
        self.duration = self.points[-1][0]
        self._last = (self.points[0][1], self.points[0][2])

    def _position(self, tau: float) -> tuple[float, float]:
        pts = self.points
        if tau <= 0:
            return pts[0][1], pts[0][2]
        if tau >= self.duration:
            return pts[-1][1], pts[-1][2]
        lo, hi = 0, len(pts) - 1
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if pts[mid][0] <= tau:
                lo = mid
            else:
                hi = mid
        t0, x0, y0 = pts[lo]
        t1, x1, y1 = pts[hi]
        frac = (tau - t0) / (t1 - t0)
        return (x0 + (x1 - x0) * frac, y0 + (y1 - y0) * frac)

    def delta_at(self, t: float) -> tuple[float, float]:
        x, y = self._position(t - self.start_t)
        dx, dy = x - self._last[0], y - self._last[1]
        self._last = (x, y)
        return dx, dy

    def finished(self, t: float) -> bool:
        return t - self.start_t > self.duration


class Session:
    """A live simulated play session; the bridge and run_session both drive
    this object one tick at a time."""

    def __init__(
        self,
        cfg: SimConfig,
        profile: SocialProfile,
        sched: ArcSchedule = ArcSchedule(),
        model: TrainedModel | None = None,
    ):
        self.cfg = cfg
        self.profile = profile
        self.sched = sched
        self.model = model if model is not None else default_model()
        self.backend = SimBackend(cfg)
        self.backend.initialize()
        self.planner = Planner(profile, self.model, sched, seed=cfg.seed)
        self.t = 0.0
        self.records: list[TickRecord] = []
        self._drags: list[_ActiveDrag] = []
        self._touch = False

    def set_touch(self, on: bool) -> None:
        self._touch = on

    def set_profile(self, profile: SocialProfile) -> None:
        """Switch the planner's social profile at the next tick boundary."""
        self.profile = profile
        self.planner.profile = profile

    def inject_drag_path(self, traj: Trajectory) -> None:
        """Schedule a drag path; its deltas reach the optical sensor
        tick-aligned.  Raises PathOutOfArena if the path would leave the
        arena from the robot's current position."""
        if len(traj) == 0:
            return
        x0, y0 = traj.points[0].x, traj.points[0].y
        for p in traj.points:
            x = self.backend.state.x + (p.x - x0)
            y = self.backend.state.y + (p.y - y0)
            if not (0.0 <= x <= self.cfg.arena_width
                    and 0.0 <= y <= self.cfg.arena_height):
                raise PathOutOfArena(
                    f"drag path point ({x:.3f}, {y:.3f}) leaves the arena"
                )
        if len(traj) < 2:
            return
        self._drags.append(_ActiveDrag(traj, self.t))

    def inject_shape_drag(self, shape: ShapeClass, amplitude: float = 0.3,
                          duration: float = 2.8) -> None:
        """Drag the canonical path of a shape under the robot."""
        pts = canonical_path(shape, amplitude)
        n = len(pts)
        traj = trajectory.from_points(
            (duration * k / (n - 1), x, y) for k, (x, y) in enumerate(pts)
        )
        self.inject_drag_path(traj)

    def queue_drag_delta(self, dx: float, dy: float) -> None:
        """Apply a raw displacement at the next tick (live pointer input)."""
        self._drags.append(_InstantDrag(dx, dy))

    def tick_once(self) -> TickRecord:
        self.t = round(self.t / self.cfg.tick + 1) * self.cfg.tick
        dx = dy = 0.0
        for drag in self._drags:
            ddx, ddy = drag.delta_at(self.t)
            dx += ddx
            dy += ddy
        self._drags = [d for d in self._drags if not d.finished(self.t)]
        inputs = TickInputs(dx, dy, self._touch)

        self.backend.apply_inputs(self.t, inputs)
        touch = self.backend.read_touch()
        motion = self.backend.read_motion()
        out = self.planner.tick(touch, motion, self.t, self.cfg.tick)
        self.backend.drive(out.wheel)
        self.backend.set_led(out.led)
        state = self.backend.integrate(touch.touched)

        record = TickRecord(
            t=self.t,
            state=state,
            inputs=inputs,
            planner_state=out.state.label,
            phase=self.planner.phase.label,
            events=tuple(out.events),
        )
        self.records.append(record)
        return record

    def trace(self) -> SessionTrace:
        return SessionTrace(self.cfg, self.profile, self.sched,
                            tuple(self.records))


def run_session(
    cfg: SimConfig,
    profile: SocialProfile,
    sched: ArcSchedule,
    script: Sequence[ScriptAction] = (),
    model: TrainedModel | None = None,
) -> SessionTrace:
    """Run a full scripted session to the end of the arc (or until the
    script has played out plus a grace period, whichever is later)."""
    session = Session(cfg, profile, sched, model)
    pending = sorted(script, key=lambda a: a.t)
    last_script_t = max((a.t + (a.duration if a.kind == "drag" else 0.0)
                         for a in pending), default=0.0)
    stop_t = max(sched.total, last_script_t + SCRIPT_GRACE)
    idx = 0
    while session.t < stop_t - 1e-9:
        next_t = session.t + cfg.tick
        while idx < len(pending) and pending[idx].t <= next_t:
            action = pending[idx]
            idx += 1
            if action.kind == "touch":
                session.set_touch(action.on)
            elif action.traj is not None:
                session.inject_drag_path(action.traj)
            else:
                assert action.shape is not None
                session.inject_shape_drag(action.shape, action.amplitude,
                                          action.duration)
        session.tick_once()
    return session.trace()


# -- trace files --------------------------------------------------------------

_TRACE_FIXED_FIELDS = 12


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def dump_trace(trace: SessionTrace) -> str:
    """Serialize to the line-oriented trace format.

    Header: ``#cfg key=value`` lines.  One line per tick with fixed field
    order ``t x y vx vy touched led_r led_g led_b led_bright state phase``
    followed by optional tokens: raw inputs (``touch:0|1`` on change,
    ``drag:dx,dy`` when nonzero) and planner events (``ev:name,k=v,...``).
    A ``#end ticks=N`` line closes the file.
    """
    p = trace.profile
    palette = ";".join(",".join(str(c) for c in rgb) for rgb in p.palette)
    lines = [
        f"#cfg tick={_fmt(trace.cfg.tick)}",
        f"#cfg arena_width={_fmt(trace.cfg.arena_width)}",
        f"#cfg arena_height={_fmt(trace.cfg.arena_height)}",
        f"#cfg max_speed={_fmt(trace.cfg.max_speed)}",
        f"#cfg seed={trace.cfg.seed}",
        f"#cfg profile={p.name}",
        f"#cfg profile_speed={_fmt(p.speed)}",
        f"#cfg profile_amplitude={_fmt(p.amplitude)}",
        f"#cfg profile_brightness={_fmt(p.brightness)}",
        f"#cfg profile_proactivity={_fmt(p.proactivity)}",
        f"#cfg profile_palette={palette}",
        f"#cfg rising={_fmt(trace.schedule.rising)}",
        f"#cfg climax={_fmt(trace.schedule.climax)}",
        f"#cfg falling={_fmt(trace.schedule.falling)}",
    ]
    prev_touch = False
    for rec in trace.records:
        s = rec.state
        fields = [
            _fmt(rec.t), _fmt(s.x), _fmt(s.y), _fmt(s.vx), _fmt(s.vy),
            "1" if s.touched else "0",
            str(s.led.color[0]), str(s.led.color[1]), str(s.led.color[2]),
            _fmt(s.led.brightness),
            rec.planner_state, rec.phase,
        ]
        if rec.inputs.touch != prev_touch:
            fields.append(f"touch:{1 if rec.inputs.touch else 0}")
            prev_touch = rec.inputs.touch
        if rec.inputs.drag_dx or rec.inputs.drag_dy:
            # Inputs must round-trip exactly for replay to be bit-faithful,
            # so they carry full precision unlike the 9-digit state fields.
            fields.append(
                f"drag:{rec.inputs.drag_dx:.17g},{rec.inputs.drag_dy:.17g}"
            )
        for ev in rec.events:
            token = f"ev:{ev.name}"
            if ev.shape is not None:
                token += f",shape={ev.shape.label}"
            if ev.technique is not None:
                token += f",technique={ev.technique.label}"
            if ev.cause is not None:
                token += f",cause={ev.cause}"
            fields.append(token)
        lines.append(" ".join(fields))
    lines.append(f"#end ticks={len(trace.records)}")
    return "\n".join(lines) + "\n"


def save_trace(trace: SessionTrace, path: str) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dump_trace(trace))


@dataclass(frozen=True)
class ParsedTrace:
    cfg: SimConfig
    profile: SocialProfile
    schedule: ArcSchedule
    rows: tuple[tuple[str, ...], ...]       # fixed fields + extra tokens per tick
    inputs: tuple[TickInputs, ...]          # reconstructed raw inputs per tick


def parse_trace(text: str) -> ParsedTrace:
    """Parse and structurally validate a trace file; raises MalformedTrace
    on truncation or schema violations."""
    header: dict[str, str] = {}
    rows: list[tuple[str, ...]] = []
    end_count: int | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#cfg "):
            key, _, value = line[len("#cfg "):].partition("=")
            header[key] = value
        elif line.startswith("#end"):
            try:
                end_count = int(line.split("ticks=", 1)[1])
            except (IndexError, ValueError):
                raise MalformedTrace("unreadable #end line") from None
        elif line.startswith("#"):
            continue
        else:
            fields = tuple(line.split(" "))
            if len(fields) < _TRACE_FIXED_FIELDS:
                raise MalformedTrace(f"short record line: {raw!r}")
            rows.append(fields)
    if end_count is None:
        raise MalformedTrace("missing #end line (truncated trace)")
    if end_count != len(rows):
        raise MalformedTrace(
            f"#end declares {end_count} ticks but {len(rows)} records present"
        )
    try:
        palette = tuple(
            tuple(int(c) for c in rgb.split(","))
            for rgb in header["profile_palette"].split(";")
        )
        profile = SocialProfile(
            name=header["profile"],
            speed=float(header["profile_speed"]),
            amplitude=float(header["profile_amplitude"]),
            palette=palette,  # type: ignore[arg-type]
            brightness=float(header["profile_brightness"]),
            proactivity=float(header["profile_proactivity"]),
        )
        cfg = SimConfig(
            tick=float(header["tick"]),
            arena_width=float(header["arena_width"]),
            arena_height=float(header["arena_height"]),
            max_speed=float(header["max_speed"]),
            seed=int(header["seed"]),
        )
        sched = ArcSchedule(
            rising=float(header["rising"]),
            climax=float(header["climax"]),
            falling=float(header["falling"]),
        )
    except (KeyError, ValueError) as exc:
        raise MalformedTrace(f"bad or missing header: {exc}") from exc

    inputs: list[TickInputs] = []
    touch = False
    prev_t = -math.inf
    for fields in rows:
        try:
            t = float(fields[0])
        except ValueError:
            raise MalformedTrace(f"bad timestamp in record: {fields[0]!r}") from None
        if t <= prev_t:
            raise MalformedTrace(f"non-increasing record time {t}")
        prev_t = t
        drag = (0.0, 0.0)
        for token in fields[_TRACE_FIXED_FIELDS:]:
            if token.startswith("touch:"):
                touch = token[len("touch:"):] == "1"
            elif token.startswith("drag:"):
                try:
                    dx, dy = (float(v) for v in token[len("drag:"):].split(","))
                except ValueError:
                    raise MalformedTrace(f"bad drag token {token!r}") from None
                drag = (dx, dy)
        inputs.append(TickInputs(drag[0], drag[1], touch))
    return ParsedTrace(cfg, profile, sched, tuple(rows), tuple(inputs))


def load_trace(path: str) -> ParsedTrace:
    with open(path, "r", encoding="ascii") as fh:
        return parse_trace(fh.read())


@dataclass(frozen=True)
class ReplayReport:
    """Outcome of re-executing a trace's inputs."""

    ticks_checked: int
    divergence: tuple[int, str, str, str] | None = None  # (tick, field, want, got)

    @property
    def ok(self) -> bool:
        return self.divergence is None

    def format(self) -> str:
        if self.ok:
            return f"replay ok: {self.ticks_checked} ticks, zero divergences"
        i, fld, want, got = self.divergence
        return (f"replay DIVERGED at tick {i} field {fld}: "
                f"trace has {want!r}, re-execution produced {got!r}")


_FIELD_NAMES = ("t", "x", "y", "vx", "vy", "touched", "led_r", "led_g",
                "led_b", "led_bright", "state", "phase")


def replay(parsed: ParsedTrace, model: TrainedModel | None = None) -> ReplayReport:
    """Re-execute a parsed trace's inputs and compare every tick record.

    Comparison is on the formatted field strings, so a same-build replay
    must match exactly.
    """
    session = Session(parsed.cfg, parsed.profile, parsed.schedule, model)
    for i, (fields, inputs) in enumerate(zip(parsed.rows, parsed.inputs)):
        session.set_touch(inputs.touch)
        if inputs.drag_dx or inputs.drag_dy:
            # Replay feeds recorded deltas directly for this tick.
            session.queue_drag_delta(inputs.drag_dx, inputs.drag_dy)
        rec = session.tick_once()
        s = rec.state
        got = [
            _fmt(rec.t), _fmt(s.x), _fmt(s.y), _fmt(s.vx), _fmt(s.vy),
            "1" if s.touched else "0",
            str(s.led.color[0]), str(s.led.color[1]), str(s.led.color[2]),
            _fmt(s.led.brightness), rec.planner_state, rec.phase,
        ]
        for j, (want_v, got_v) in enumerate(zip(fields[:_TRACE_FIXED_FIELDS], got)):
            if want_v != got_v:
                return ReplayReport(i, (i, _FIELD_NAMES[j], want_v, got_v))
        want_events = [f for f in fields[_TRACE_FIXED_FIELDS:] if f.startswith("ev:")]
        got_events = []
        for ev in rec.events:
            token = f"ev:{ev.name}"
            if ev.shape is not None:
                token += f",shape={ev.shape.label}"
            if ev.technique is not None:
                token += f",technique={ev.technique.label}"
            if ev.cause is not None:
                token += f",cause={ev.cause}"
            got_events.append(token)
        if want_events != got_events:
            return ReplayReport(i, (i, "events", " ".join(want_events),
                                    " ".join(got_events)))
    return ReplayReport(len(parsed.rows))


class _InstantDrag:
    """A displacement consumed entirely by the next tick (live pointer
    deltas, replayed recorded deltas)."""

    def __init__(self, dx: float, dy: float):
        self._dx, self._dy = dx, dy

    def delta_at(self, t: float) -> tuple[float, float]:
        return self._dx, self._dy

    def finished(self, t: float) -> bool:
        return True
