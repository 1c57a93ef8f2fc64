import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yolobot.errors import BackendUnavailable, SpeedOutOfRange
from yolobot.hal import (
    DEBOUNCE_WINDOW,
    LedAnimation,
    LedCommand,
    MotionDelta,
    MotionTracker,
    TouchDebouncer,
    WheelCommand,
    check_speed,
)
from yolobot.sim import SimBackend, SimConfig, TickInputs


class TestTypes:
    def test_motion_delta_requires_positive_dt(self):
        with pytest.raises(ValueError):
            MotionDelta(0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            MotionDelta(math.nan, 0.0, 0.1)

    def test_wheel_command_normalizes_heading(self):
        cmd = WheelCommand(-math.pi / 2, 0.1)
        assert 0.0 <= cmd.heading < math.tau
        assert cmd.heading == pytest.approx(3 * math.pi / 2)

    def test_wheel_command_rejects_negative_speed(self):
        with pytest.raises(ValueError):
            WheelCommand(0.0, -0.1)

    def test_led_command_validation(self):
        with pytest.raises(ValueError):
            LedCommand((255, 255, 256), 0.5)
        with pytest.raises(ValueError):
            LedCommand((0, 0, 0), 1.2)
        LedCommand((255, 255, 255), 1.0, LedAnimation.PULSE)

    def test_check_speed(self):
        with pytest.raises(SpeedOutOfRange):
            check_speed(WheelCommand(0.0, 1.5), 0.3)
        check_speed(WheelCommand(0.0, 0.3), 0.3)


class TestTouchDebouncer:
    def test_press_read_after_60ms(self):
        deb = TouchDebouncer()
        deb.update(True, 1.00)
        state = deb.update(True, 1.06)
        assert state.touched
        assert state.since == pytest.approx(0.06)

    def test_no_press(self):
        assert not TouchDebouncer().update(False, 5.0).touched

    def test_short_press_filtered(self):
        deb = TouchDebouncer()
        deb.update(True, 1.00)
        assert not deb.update(True, 1.03).touched  # 30 ms held
        assert not deb.update(False, 1.04).touched
        assert not deb.update(False, 2.00).touched

    def test_window_boundary_inclusive(self):
        deb = TouchDebouncer()
        deb.update(True, 0.0)
        assert deb.update(True, DEBOUNCE_WINDOW).touched


class TestMotionTracker:
    def test_delta_definition(self):
        tracker = MotionTracker(0.0, 1.0, 1.0)
        d = tracker.update(0.05, 1.1, 1.0)
        assert (d.dx, d.dy, d.dt) == pytest.approx((0.1, 0.0, 0.05))

    def test_stationary(self):
        tracker = MotionTracker(0.0, 1.0, 1.0)
        d = tracker.update(1.0, 1.0, 1.0)
        assert (d.dx, d.dy) == (0.0, 0.0)
        assert d.dt == 1.0

    def test_rejects_non_monotonic_reads(self):
        tracker = MotionTracker(1.0, 0.0, 0.0)
        with pytest.raises(BackendUnavailable):
            tracker.update(1.0, 0.0, 0.0)

    @given(st.lists(st.tuples(st.floats(0.01, 1.0), st.floats(-1, 1),
                              st.floats(-1, 1)), min_size=2, max_size=20))
    @settings(max_examples=100)
    def test_additivity_over_partitions(self, steps):
        # Two consecutive reads sum to the single-read delta over the union.
        path = [(0.0, 0.0, 0.0)]
        t = 0.0
        for dt, dx, dy in steps:
            t += dt
            path.append((t, path[-1][1] + dx, path[-1][2] + dy))
        fine = MotionTracker(0.0, 0.0, 0.0)
        total_dx = total_dy = total_dt = 0.0
        for t, x, y in path[1:]:
            d = fine.update(t, x, y)
            total_dx += d.dx
            total_dy += d.dy
            total_dt += d.dt
        coarse = MotionTracker(0.0, 0.0, 0.0).update(*path[-1])
        assert total_dx == pytest.approx(coarse.dx, abs=1e-9)
        assert total_dy == pytest.approx(coarse.dy, abs=1e-9)
        assert total_dt == pytest.approx(coarse.dt, abs=1e-9)


class TestSimBackendHal:
    def make(self):
        backend = SimBackend(SimConfig())
        backend.initialize()
        return backend

    def test_requires_initialization(self):
        backend = SimBackend(SimConfig())
        with pytest.raises(BackendUnavailable):
            backend.read_touch()

    def test_drive_integrates_commanded_velocity(self):
        backend = self.make()
        cmd = WheelCommand(0.0, 0.1)
        start_x = backend.state.x
        for k in range(20):  # 1 second of 0.05 s ticks
            backend.apply_inputs((k + 1) * 0.05, TickInputs())
            backend.drive(cmd)
            backend.integrate(touched=False)
        assert backend.state.x - start_x == pytest.approx(0.1, abs=1e-6)

    def test_zero_speed_holds_position(self):
        backend = self.make()
        pos = (backend.state.x, backend.state.y)
        backend.apply_inputs(0.05, TickInputs())
        backend.drive(WheelCommand.stop())
        backend.integrate(touched=False)
        assert (backend.state.x, backend.state.y) == pos

    def test_drive_rejects_overspeed(self):
        backend = self.make()
        with pytest.raises(SpeedOutOfRange):
            backend.drive(WheelCommand(0.0, 1.5))

    def test_drive_then_read_motion_reports_displacement(self):
        backend = self.make()
        backend.apply_inputs(0.05, TickInputs())
        backend.read_motion()
        backend.drive(WheelCommand(math.pi / 2, 0.2))
        backend.integrate(touched=False)
        backend.apply_inputs(0.10, TickInputs())
        d = backend.read_motion()
        assert d.dy == pytest.approx(0.2 * 0.05, abs=1e-9)
        assert d.dx == pytest.approx(0.0, abs=1e-12)

    def test_set_led_reflected_in_state(self):
        backend = self.make()
        led = LedCommand((255, 255, 255), 1.0)
        backend.apply_inputs(0.05, TickInputs())
        backend.set_led(led)
        state = backend.integrate(touched=False)
        assert state.led == led

    def test_touch_freezes_wheels(self):
        backend = self.make()
        backend.apply_inputs(0.05, TickInputs(touch=True))
        backend.drive(WheelCommand(0.0, 0.2))
        state = backend.integrate(touched=True)
        assert (state.vx, state.vy) == (0.0, 0.0)
