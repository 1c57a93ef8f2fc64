"""WebSocket bridge between the live simulator and a browser play surface.

One UI client at a time connects to ``/ws`` and speaks length-delimited
JSON text messages, each carrying a ``kind``, a server-assigned gapless
sequence number ``seq``, and the session time ``t``:

    client -> server:
        hello  {version}
        drag   {t, dx, dy}      pointer displacement in arena meters
        touch  {t, on}          raw touch flag
        config {key, value}     "profile" or "arc" ("rising,climax,falling")
    server -> client:
        hello  {version}
        state  {t, x, y, r, g, b, bright, phase, state, dropped}
        event  {t, event, shape?, technique?, cause?}

Inbound messages land in a mailbox drained once per tick, so the simulation
loop never races the network pump.  Outbound messages go through a bounded
buffer: a slow client drops oldest-first and the running drop count is
reported in the next ``state`` message.  Malformed input closes the
connection with a diagnostic payload.
"""

from __future__ import annotations

import asyncio
import json
from collections import deque
from dataclasses import dataclass

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .behaviors import SocialProfile, profile_preset
from .classifier import TrainedModel
from .planner import ArcSchedule
from .sim import Session, SessionTrace, SimConfig

PROTOCOL_VERSION = 1
OUTPUT_BUFFER_LIMIT = 1000

_CLIENT_KINDS = {"hello", "drag", "touch", "config"}


@dataclass
class BridgeSettings:
    cfg: SimConfig
    profile: SocialProfile
    schedule: ArcSchedule
    model: TrainedModel | None = None
    profiles: dict[str, SocialProfile] | None = None
    # Wall seconds per simulated tick; 0 runs as fast as the loop allows.
    pace: float | None = None

    def tick_pace(self) -> float:
        return self.cfg.tick if self.pace is None else self.pace


class BridgeSession:
    """Per-connection state: the simulation, its mailbox, and the outbound
    buffer."""

    def __init__(self, settings: BridgeSettings):
        self.settings = settings
        self.session = Session(
            settings.cfg, settings.profile, settings.schedule, settings.model
        )
        self.mailbox: deque[dict] = deque()
        self.outbox: deque[dict] = deque()
        self.dropped = 0
        self.seq = 0
        self.closed = False

    def queue(self, message: dict) -> None:
        if len(self.outbox) >= OUTPUT_BUFFER_LIMIT:
            self.outbox.popleft()
            self.dropped += 1
        self.outbox.append(message)

    def next_frame(self) -> str:
        """Serialize the oldest queued message, stamping its sequence number
        at send time so the wire stream stays gapless across drops."""
        message = self.outbox.popleft()
        message["seq"] = self.seq
        self.seq += 1
        return json.dumps(message, separators=(",", ":"))

    def _apply_config(self, key: str, value: str) -> None:
        if key == "profile":
            table = self.settings.profiles or {}
            profile = table.get(value.lower()) or profile_preset(value)
            self.session.set_profile(profile)
        elif key == "arc":
            rising, climax, falling = (float(v) for v in value.split(","))
            self.session.planner.schedule = ArcSchedule(rising, climax, falling)
        else:
            raise ValueError(f"unknown config key {key!r}")

    def drain_mailbox(self) -> None:
        """Apply queued client inputs at the tick boundary.

        At most one drag delta is consumed per tick, in arrival order, so a
        burst of queued pointer samples plays out as the stroke it traced
        instead of collapsing into a single displacement.  (A well-behaved
        client decimates pointer input to the tick rate anyway.)
        """
        drag_applied = False
        while self.mailbox:
            if self.mailbox[0]["kind"] == "drag" and drag_applied:
                break
            msg = self.mailbox.popleft()
            kind = msg["kind"]
            if kind == "drag":
                self.session.queue_drag_delta(float(msg["dx"]), float(msg["dy"]))
                drag_applied = True
            elif kind == "touch":
                self.session.set_touch(bool(msg["on"]))
            elif kind == "config":
                self._apply_config(str(msg["key"]), str(msg["value"]))

    def tick(self) -> None:
        self.drain_mailbox()
        rec = self.session.tick_once()
        for ev in rec.events:
            message = {"kind": "event", "t": round(ev.t, 6), "event": ev.name}
            if ev.shape is not None:
                message["shape"] = ev.shape.label
            if ev.technique is not None:
                message["technique"] = ev.technique.label
            if ev.cause is not None:
                message["cause"] = ev.cause
            self.queue(message)
        s = rec.state
        self.queue({
            "kind": "state",
            "t": round(rec.t, 6),
            "x": round(s.x, 6),
            "y": round(s.y, 6),
            "r": s.led.color[0],
            "g": s.led.color[1],
            "b": s.led.color[2],
            "bright": round(s.led.brightness, 4),
            "phase": rec.phase,
            "state": rec.planner_state,
            "dropped": self.dropped,
        })

    def trace(self) -> SessionTrace:
        return self.session.trace()


def build_app(settings: BridgeSettings) -> FastAPI:
    """FastAPI application hosting the bridge; at most one client at a
    time."""
    app = FastAPI()
    app.state.active: BridgeSession | None = None
    app.state.last_trace: SessionTrace | None = None

    async def pump_out(ws: WebSocket, bridge: BridgeSession) -> None:
        while bridge.outbox:
            await ws.send_text(bridge.next_frame())

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        if app.state.active is not None:
            await ws.accept()
            await ws.send_text(json.dumps(
                {"kind": "error", "error": "session busy: one client only"}
            ))
            await ws.close(code=1008)
            return
        await ws.accept()
        bridge = BridgeSession(settings)
        app.state.active = bridge
        try:
            raw = await ws.receive_text()
            try:
                hello = json.loads(raw)
                if hello.get("kind") != "hello":
                    raise ValueError("first message must be hello")
            except (json.JSONDecodeError, ValueError) as exc:
                await ws.send_text(json.dumps({"kind": "error", "error": str(exc)}))
                await ws.close(code=1002)
                return
            bridge.queue({"kind": "hello", "t": 0.0,
                          "version": PROTOCOL_VERSION})
            await pump_out(ws, bridge)

            pace = settings.tick_pace()
            arc_end = settings.schedule.total

            async def receiver() -> None:
                while True:
                    text = await ws.receive_text()
                    try:
                        msg = json.loads(text)
                        kind = msg.get("kind")
                        if kind not in _CLIENT_KINDS:
                            raise ValueError(f"unknown message kind {kind!r}")
                    except (json.JSONDecodeError, ValueError) as exc:
                        await ws.send_text(json.dumps(
                            {"kind": "error", "error": str(exc)}
                        ))
                        await ws.close(code=1002)
                        return
                    bridge.mailbox.append(msg)

            recv_task = asyncio.create_task(receiver())
            try:
                while not recv_task.done():
                    bridge.tick()
                    await pump_out(ws, bridge)
                    if bridge.session.t >= arc_end:
                        break
                    if pace > 0:
                        await asyncio.sleep(pace)
                    else:
                        await asyncio.sleep(0)
                if not recv_task.done():
                    # Arc over: say goodbye so the client sees a clean close.
                    await ws.close(code=1000)
            finally:
                recv_task.cancel()
        except WebSocketDisconnect:
            pass
        finally:
            app.state.last_trace = bridge.trace()
            app.state.active = None

    return app


def serve(settings: BridgeSettings, host: str = "127.0.0.1",
          port: int = 8765, trace_out: str | None = None) -> None:
    """Run the bridge server until interrupted (CLI entry).

    Raises OSError up front if the port is taken (uvicorn would sys.exit
    from deep inside otherwise).  If ``trace_out`` is set, the last
    session's trace is written on shutdown.
    """
    import socket

    import uvicorn

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    finally:
        probe.close()

    app = build_app(settings)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    finally:
        if trace_out and app.state.last_trace is not None:
            from .sim import save_trace

            save_trace(app.state.last_trace, trace_out)
