"""Timestamped 2-D motion trajectories: ingestion, segmentation, normalization.

A trajectory is the raw optical-sensor record of robot motion: an ordered
sequence of (t, x, y) samples with strictly increasing timestamps.  The
recognizer consumes fixed-duration windows of it, each normalized to a
canonical frame (centroid at origin, bounding-box diagonal 1) so that
mouse-scale and robot-scale strokes share one model.

All operations here are pure value transformations; nothing is mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import DegenerateTrajectory, NonMonotonicTimestamp


@dataclass(frozen=True)
class TimedPoint:
    """One motion sample: seconds since session start plus a 2-D position in
    meters."""

    t: float
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t) and self.t >= 0.0):
            raise ValueError(f"t must be finite and >= 0, got {self.t}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Trajectory:
    """Ordered, strictly time-increasing sequence of samples.

    The empty trajectory is a valid value; feature extraction rejects it
    downstream.
    """

    points: tuple[TimedPoint, ...] = ()

    def __post_init__(self) -> None:
        for a, b in zip(self.points, self.points[1:]):
            if b.t <= a.t:
                raise NonMonotonicTimestamp(
                    f"timestamps must strictly increase: {a.t} then {b.t}"
                )

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[TimedPoint]:
        return iter(self.points)

    @property
    def duration(self) -> float:
        """Time spanned by the samples; 0.0 for fewer than two points."""
        if len(self.points) < 2:
            return 0.0
        return self.points[-1].t - self.points[0].t

    def path_length(self) -> float:
        """Total polyline length in meters."""
        return sum(
            math.hypot(b.x - a.x, b.y - a.y)
            for a, b in zip(self.points, self.points[1:])
        )

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(min_x, min_y, max_x, max_y); raises on empty trajectory."""
        if not self.points:
            raise DegenerateTrajectory("empty trajectory has no bounding box")
        xs = [p.x for p in self.points]
        ys = [p.y for p in self.points]
        return min(xs), min(ys), max(xs), max(ys)


@dataclass(frozen=True)
class SegmentationConfig:
    """Windowing parameters for cutting a stream into classifiable segments.

    Segments shorter than ``min_points`` samples or ``min_path_length``
    meters are treated as idle (no movement) and dropped.
    """

    window: float = 3.0
    min_points: int = 8
    min_path_length: float = 0.02

    def __post_init__(self) -> None:
        if self.window <= 0:
            raise ValueError(f"window must be > 0, got {self.window}")
        if self.min_points < 3:
            raise ValueError(f"min_points must be >= 3, got {self.min_points}")
        if self.min_path_length <= 0:
            raise ValueError(
                f"min_path_length must be > 0, got {self.min_path_length}"
            )


def from_points(samples: Iterable[tuple[float, float, float]]) -> Trajectory:
    """Build a trajectory from (t, x, y) triples."""
    return Trajectory(tuple(TimedPoint(t, x, y) for t, x, y in samples))


def append_sample(traj: Trajectory, p: TimedPoint) -> Trajectory:
    """Return ``traj`` with ``p`` appended; the input is left untouched.

    Raises NonMonotonicTimestamp if ``p.t`` does not strictly exceed the
    last timestamp.
    """
    if traj.points and p.t <= traj.points[-1].t:
        raise NonMonotonicTimestamp(
            f"sample at t={p.t} does not follow last t={traj.points[-1].t}"
        )
    return Trajectory(traj.points + (p,))


def partition(
    traj: Trajectory, cfg: SegmentationConfig
) -> list[tuple[Trajectory, bool]]:
    """Cut ``traj`` into consecutive time windows of at most ``cfg.window``
    seconds, flagging each as kept (True) or idle (False).

    Window boundaries are time-based: every ``window`` seconds from the
    first sample.  The windows partition the input, so concatenating all
    of them reproduces the original point sequence.
    """
    if not traj.points:
        return []
    t0 = traj.points[0].t
    buckets: list[list[TimedPoint]] = []
    for p in traj.points:
        idx = int((p.t - t0) / cfg.window)
        while len(buckets) <= idx:
            buckets.append([])
        buckets[idx].append(p)
    out: list[tuple[Trajectory, bool]] = []
    for bucket in buckets:
        if not bucket:
            continue
        seg = Trajectory(tuple(bucket))
        keep = len(seg) >= cfg.min_points and seg.path_length() >= cfg.min_path_length
        out.append((seg, keep))
    return out


def segment(traj: Trajectory, cfg: SegmentationConfig) -> list[Trajectory]:
    """Kept (non-idle) windows of ``traj``, in time order."""
    return [seg for seg, keep in partition(traj, cfg) if keep]


def normalize(traj: Trajectory) -> Trajectory:
    """Translate the centroid to the origin and scale the bounding-box
    diagonal to 1; timestamps are preserved.

    Idempotent to floating-point precision, and invariant to translation
    and uniform scaling of the input.  Raises DegenerateTrajectory for
    fewer than 2 points or a zero-diagonal (single-location) path.
    """
    pts = traj.points
    if len(pts) < 2:
        raise DegenerateTrajectory(f"need >= 2 points, got {len(pts)}")
    min_x, min_y, max_x, max_y = traj.bounding_box()
    diag = math.hypot(max_x - min_x, max_y - min_y)
    if diag <= 0.0:
        raise DegenerateTrajectory("zero bounding-box diagonal")
    cx = sum(p.x for p in pts) / len(pts)
    cy = sum(p.y for p in pts) / len(pts)
    scale = 1.0 / diag
    return Trajectory(
        tuple(
            TimedPoint(p.t, (p.x - cx) * scale, (p.y - cy) * scale) for p in pts
        )
    )


def dump(traj: Trajectory) -> str:
    """Serialize to the trajectory file format: one ``t x y`` sample per
    line, LF-terminated."""
    return "".join(f"{p.t:.9g} {p.x:.9g} {p.y:.9g}\n" for p in traj.points)


def parse(text: str) -> Trajectory:
    """Parse the trajectory file format.

    One sample per line: ``t x y`` separated by single spaces; lines
    starting with '#' are comments; blank lines are ignored.
    """
    samples: list[TimedPoint] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(" ")
        if len(fields) != 3:
            raise ValueError(f"line {lineno}: expected 't x y', got {raw!r}")
        t, x, y = (float(f) for f in fields)
        samples.append(TimedPoint(t, x, y))
    return Trajectory(tuple(samples))


def load(path: str) -> Trajectory:
    """Read a trajectory file from disk."""
    with open(path, "r", encoding="ascii") as fh:
        return parse(fh.read())


def save(traj: Trajectory, path: str) -> None:
    """Write a trajectory file to disk."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(dump(traj))
