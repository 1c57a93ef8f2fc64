import math

import pytest

from yolobot.behaviors import profile_preset
from yolobot.errors import MalformedTrace, PathOutOfArena
from yolobot.hal import LedCommand, WheelCommand
from yolobot.planner import ArcSchedule
from yolobot.shapes import ShapeClass
from yolobot.sim import (
    RobotState,
    ScriptAction,
    Session,
    SimConfig,
    TickInputs,
    dump_trace,
    example_script,
    parse_script,
    parse_trace,
    replay,
    run_session,
    step_sim,
)
from yolobot.trajectory import from_points

SHORT = ArcSchedule(12, 6, 12)


def idle_state(cfg=SimConfig()):
    return RobotState(cfg.arena_width / 2, cfg.arena_height / 2, 0.0, 0.0,
                      LedCommand.off(), False)


class TestStepSim:
    def test_twenty_ticks_integrate_commanded_velocity(self):
        cfg = SimConfig()
        state = idle_state(cfg)
        wheel = WheelCommand(0.0, 0.1)
        for _ in range(20):
            state = step_sim(state, TickInputs(), wheel, LedCommand.off(), cfg,
                             touched=False)
        assert state.x - cfg.arena_width / 2 == pytest.approx(0.1, abs=1e-9)

    def test_drag_displaces_robot(self):
        cfg = SimConfig()
        state = step_sim(idle_state(cfg), TickInputs(0.2, 0.0), WheelCommand.stop(),
                         LedCommand.off(), cfg, touched=False)
        assert state.x == pytest.approx(1.2)

    def test_wall_clamp(self):
        cfg = SimConfig()
        state = RobotState(cfg.arena_width, 1.0, 0, 0, LedCommand.off(), False)
        state = step_sim(state, TickInputs(), WheelCommand(0.0, 0.3),
                         LedCommand.off(), cfg, touched=False)
        assert state.x == cfg.arena_width

    def test_touch_freezes_wheels(self):
        cfg = SimConfig()
        state = step_sim(idle_state(cfg), TickInputs(touch=True),
                         WheelCommand(0.0, 0.3), LedCommand.off(), cfg,
                         touched=True)
        assert state.x == cfg.arena_width / 2
        assert (state.vx, state.vy) == (0.0, 0.0)


class TestInjectDragPath:
    def test_circle_drag_yields_classification_event(self, model):
        trace = run_session(
            SimConfig(seed=5), profile_preset("harmonious"), SHORT,
            [ScriptAction(1.0, "drag", shape=ShapeClass.CIRCLE)], model,
        )
        recog = [e for e in trace.events() if e.name == "recognize"]
        assert recog and recog[0].shape is ShapeClass.CIRCLE

    def test_empty_trajectory_is_noop(self, model):
        session = Session(SimConfig(), profile_preset("aloof"), SHORT, model)
        session.inject_drag_path(from_points([]))
        session.tick_once()

    def test_out_of_arena_rejected(self, model):
        session = Session(SimConfig(), profile_preset("aloof"), SHORT, model)
        way_out = from_points([(0.0, 0.0, 0.0), (1.0, 5.0, 0.0)])
        with pytest.raises(PathOutOfArena):
            session.inject_drag_path(way_out)


class TestRunSession:
    def test_aloof_empty_script_never_executes(self, model):
        trace = run_session(SimConfig(seed=1), profile_preset("aloof"), SHORT,
                            [], model)
        assert all(rec.planner_state != "executing" for rec in trace.records)

    def test_exuberant_empty_script_self_initiates(self, model):
        trace = run_session(SimConfig(seed=1), profile_preset("exuberant"),
                            ArcSchedule(15, 6, 12), [], model)
        execs = [e for e in trace.events() if e.name == "execute"]
        assert execs
        assert execs[0].t <= profile_preset("exuberant").proactivity + 10.0
        assert execs[0].cause == "proactive"

    def test_example_script_mirror_then_contrast(self, model):
        sched = ArcSchedule(20, 12, 20)
        trace = run_session(SimConfig(seed=11), profile_preset("harmonious"),
                            sched, example_script(sched), model)
        techniques = [e.technique.label for e in trace.events()
                      if e.technique is not None]
        assert techniques == ["mirror", "contrast"]

    def test_runs_to_arc_end(self, model):
        trace = run_session(SimConfig(seed=2), profile_preset("aloof"), SHORT,
                            [], model)
        assert trace.records[-1].phase == "ended"

    def test_bit_determinism(self, model):
        sched = ArcSchedule(15, 8, 15)
        args = (SimConfig(seed=33), profile_preset("exuberant"), sched,
                example_script(sched), model)
        assert dump_trace(run_session(*args)) == dump_trace(run_session(*args))

    def test_kinematic_bound(self, model):
        sched = ArcSchedule(10, 5, 10)
        trace = run_session(SimConfig(seed=4), profile_preset("exuberant"),
                            sched, example_script(sched), model)
        cfg = trace.cfg
        prev = None
        for rec in trace.records:
            if prev is not None:
                moved = math.dist((rec.state.x, rec.state.y), prev)
                drag = math.hypot(rec.inputs.drag_dx, rec.inputs.drag_dy)
                assert moved <= cfg.max_speed * cfg.tick + drag + 1e-9
            prev = (rec.state.x, rec.state.y)

    def test_arena_containment(self, model):
        sched = ArcSchedule(10, 5, 10)
        trace = run_session(SimConfig(seed=4), profile_preset("exuberant"),
                            sched, example_script(sched), model)
        for rec in trace.records:
            assert 0.0 <= rec.state.x <= trace.cfg.arena_width
            assert 0.0 <= rec.state.y <= trace.cfg.arena_height

    def test_touch_ticks_have_zero_speed_and_white_led(self, model):
        sched = ArcSchedule(15, 8, 15)
        trace = run_session(SimConfig(seed=3), profile_preset("harmonious"),
                            sched, example_script(sched), model)
        touched = [rec for rec in trace.records if rec.state.touched]
        assert touched
        for rec in touched:
            assert math.hypot(rec.state.vx, rec.state.vy) == 0.0
            assert rec.state.led.color == (255, 255, 255)


class TestReplay:
    def fresh_trace_text(self, model, seed=21):
        sched = ArcSchedule(12, 6, 12)
        trace = run_session(SimConfig(seed=seed), profile_preset("harmonious"),
                            sched, example_script(sched), model)
        return dump_trace(trace)

    def test_fresh_trace_replays_clean(self, model):
        report = replay(parse_trace(self.fresh_trace_text(model)), model)
        assert report.ok
        assert report.ticks_checked > 0

    def test_tampered_led_detected_at_tick(self, model):
        text = self.fresh_trace_text(model)
        lines = text.splitlines()
        target = None
        for i, ln in enumerate(lines):
            if ln.startswith("#"):
                continue
            fields = ln.split(" ")
            target = i
            fields[6] = str((int(fields[6]) + 1) % 256)
            lines[i] = " ".join(fields)
            break
        report = replay(parse_trace("\n".join(lines) + "\n"), model)
        assert not report.ok
        tick, field_name, _, _ = report.divergence
        assert field_name == "led_r"
        assert tick == 0

    def test_truncated_trace_malformed(self, model):
        text = self.fresh_trace_text(model)
        lines = text.splitlines()
        with pytest.raises(MalformedTrace):
            parse_trace("\n".join(lines[:-10]) + "\n")

    def test_missing_end_line_malformed(self, model):
        text = self.fresh_trace_text(model)
        lines = [ln for ln in text.splitlines() if not ln.startswith("#end")]
        with pytest.raises(MalformedTrace):
            parse_trace("\n".join(lines) + "\n")

    def test_roundtrip_header(self, model):
        text = self.fresh_trace_text(model)
        parsed = parse_trace(text)
        assert parsed.profile == profile_preset("harmonious")
        assert parsed.cfg.seed == 21
        assert parsed.schedule == ArcSchedule(12, 6, 12)


class TestScriptParsing:
    def test_parse_and_sort(self):
        text = """
        # warm up
        drag 5.0 circle 0.25 2.5
        touch 1.0 on
        touch 4.0 off
        """
        actions = parse_script(text)
        assert [a.t for a in actions] == [1.0, 4.0, 5.0]
        assert actions[2].shape is ShapeClass.CIRCLE
        assert actions[2].amplitude == 0.25
        assert actions[2].duration == 2.5

    def test_bad_line_rejected(self):
        with pytest.raises(ValueError):
            parse_script("wiggle 1.0\n")
        with pytest.raises(ValueError):
            parse_script("drag 1.0 triangle\n")
