"""Convex hulls and the shape feature vector.

A trajectory segment (already normalized: centroid at origin, bounding-box
diagonal 1) is summarized by eight numbers built from its convex hull and
its turning profile.  The features were chosen to separate the six
recognizable movement shapes:

* winding (f6, f7) separates circles/loops/curls from straight lines,
* corner count (f8) isolates rectangles and spikes,
* closure (f4) separates circles from curls,
* extent (f2) separates self-intersecting spikes from rectangles.

Turning angles are measured on the path resampled to 32 equidistant
points, which keeps angle estimates stable under noisy sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import DegenerateTrajectory, TooFewPoints
from .trajectory import Trajectory

Point = tuple[float, float]

RESAMPLE_COUNT = 32
CORNER_THRESHOLD = math.radians(80.0)
# Turns gentler than this are treated as sampling noise when accumulating
# total absolute winding.
WINDING_DEADBAND = math.radians(20.0)


@dataclass(frozen=True)
class HullPolygon:
    """Convex hull vertices in counter-clockwise order.

    Degenerate (all-collinear) hulls are represented by the two extreme
    endpoints; proper hulls carry no three consecutive collinear vertices.
    """

    vertices: tuple[Point, ...]

    @property
    def is_degenerate(self) -> bool:
        return len(self.vertices) == 2

    def area(self) -> float:
        """Enclosed area via the shoelace formula; 0 for degenerate hulls."""
        v = self.vertices
        if len(v) < 3:
            return 0.0
        acc = 0.0
        for (x0, y0), (x1, y1) in zip(v, v[1:] + v[:1]):
            acc += x0 * y1 - x1 * y0
        return 0.5 * acc

    def perimeter(self) -> float:
        """Length of the closed boundary (out-and-back for degenerate
        hulls)."""
        v = self.vertices
        if len(v) == 2:
            return 2.0 * math.dist(v[0], v[1])
        return sum(math.dist(a, b) for a, b in zip(v, v[1:] + v[:1]))


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Sequence[Point]) -> HullPolygon:
    """Monotone-chain convex hull.

    Collinear boundary points are dropped, so the result has no three
    consecutive collinear vertices.  Raises TooFewPoints for fewer than
    two distinct input points.
    """
    unique = sorted(set((float(x), float(y)) for x, y in points))
    if len(unique) < 2:
        raise TooFewPoints(f"need >= 2 distinct points, got {len(unique)}")

    def half_chain(pts: list[Point]) -> list[Point]:
        chain: list[Point] = []
        for p in pts:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0.0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half_chain(unique)
    upper = half_chain(unique[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:
        # All points collinear: keep the two extremes.
        hull = [unique[0], unique[-1]]
    return HullPolygon(tuple(hull))


@dataclass(frozen=True)
class FeatureVector:
    """Fixed-length shape descriptor.

    Components:
        hull_vertex_count: vertices on the convex hull.
        extent: hull area / minimum bounding-rectangle area, in [0, 1].
        overlap: hull perimeter / path length.
        closure: distance(first, last) / path length, in [0, 1].
        aspect: min/max bounding-rectangle side ratio, in [0, 1].
        winding_abs: total absolute turning angle / 2*pi.
        winding_net: |net signed turning angle| / 2*pi.
        corner_count: direction changes sharper than 80 degrees.

    The bounding rectangle is the hull's minimum-area enclosing rectangle,
    so every component except hull_vertex_count is rotation invariant.
    """

    hull_vertex_count: float
    extent: float
    overlap: float
    closure: float
    aspect: float
    winding_abs: float
    winding_net: float
    corner_count: float

    def as_tuple(self) -> tuple[float, ...]:
        return (
            self.hull_vertex_count,
            self.extent,
            self.overlap,
            self.closure,
            self.aspect,
            self.winding_abs,
            self.winding_net,
            self.corner_count,
        )


FEATURE_COUNT = 8


def resample_path(points: Sequence[Point], n: int = RESAMPLE_COUNT) -> list[Point]:
    """Resample a polyline to ``n`` points equally spaced by arc length.

    Endpoints are preserved.  Requires a nonzero total path length.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    cumulative = [0.0]
    for a, b in zip(points, points[1:]):
        cumulative.append(cumulative[-1] + math.dist(a, b))
    total = cumulative[-1]
    if total <= 0.0:
        raise DegenerateTrajectory("zero path length cannot be resampled")
    out: list[Point] = []
    seg = 0
    for k in range(n):
        target = total * k / (n - 1)
        while seg < len(points) - 2 and cumulative[seg + 1] < target:
            seg += 1
        span = cumulative[seg + 1] - cumulative[seg]
        frac = 0.0 if span <= 0.0 else (target - cumulative[seg]) / span
        ax, ay = points[seg]
        bx, by = points[seg + 1]
        out.append((ax + (bx - ax) * frac, ay + (by - ay) * frac))
    return out


def smooth_path(points: Sequence[Point], passes: int = 1) -> list[Point]:
    """Binomial (1, 2, 1)/4 smoothing passes; endpoints are preserved."""
    pts = list(points)
    if len(pts) < 3:
        return pts
    for _ in range(passes):
        out: list[Point] = [pts[0]]
        for a, b, c in zip(pts, pts[1:], pts[2:]):
            out.append((
                0.25 * a[0] + 0.5 * b[0] + 0.25 * c[0],
                0.25 * a[1] + 0.5 * b[1] + 0.25 * c[1],
            ))
        out.append(pts[-1])
        pts = out
    return pts


def min_bounding_rectangle(hull: HullPolygon) -> tuple[float, float]:
    """Side lengths (long, short) of the hull's minimum-area enclosing
    rectangle, found by sweeping hull edge directions (rotating calipers).

    Rotation invariant, unlike an axis-aligned box.  A degenerate hull
    yields (length, 0).
    """
    v = hull.vertices
    if len(v) == 2:
        return math.dist(v[0], v[1]), 0.0
    best: tuple[float, float] | None = None
    best_area = math.inf
    for (ax, ay), (bx, by) in zip(v, v[1:] + v[:1]):
        ex, ey = bx - ax, by - ay
        norm = math.hypot(ex, ey)
        if norm < 1e-15:
            continue
        ux, uy = ex / norm, ey / norm
        along = [x * ux + y * uy for x, y in v]
        across = [-x * uy + y * ux for x, y in v]
        w = max(along) - min(along)
        h = max(across) - min(across)
        if w * h < best_area:
            best_area = w * h
            best = (max(w, h), min(w, h))
    assert best is not None
    return best


def turning_angles(resampled: Sequence[Point]) -> list[float]:
    """Signed turn at each interior vertex of a resampled path, in
    radians; positive is counter-clockwise."""
    dirs: list[Point] = []
    for a, b in zip(resampled, resampled[1:]):
        dirs.append((b[0] - a[0], b[1] - a[1]))
    angles: list[float] = []
    for (ux, uy), (vx, vy) in zip(dirs, dirs[1:]):
        if math.hypot(ux, uy) < 1e-12 or math.hypot(vx, vy) < 1e-12:
            angles.append(0.0)
            continue
        angles.append(math.atan2(ux * vy - uy * vx, ux * vx + uy * vy))
    return angles


def count_corners(
    angles: Sequence[float], threshold: float = CORNER_THRESHOLD
) -> int:
    """Count sharp direction changes in a turning profile.

    A corner falling between two resampled vertices splits its turn across
    them, so adjacent turns are also considered pairwise: a corner is a
    single turn or an adjacent pair whose sum exceeds the threshold.  To
    count, a corner must also be locally dominant -- the flanking turns stay
    below half the threshold -- which rejects the broad phantom turns that
    heavy jitter produces.  The partner vertex of a detected corner is
    skipped to avoid double counts.
    """
    quiet = 0.4 * threshold
    corners = 0
    i = 0
    n = len(angles)
    while i < n:
        pair = angles[i] + (angles[i + 1] if i + 1 < n else 0.0)
        if abs(angles[i]) > threshold or abs(pair) > threshold:
            before = abs(angles[i - 1]) if i - 1 >= 0 else 0.0
            after = abs(angles[i + 2]) if i + 2 < n else 0.0
            if before + after < quiet:
                corners += 1
                i += 2
                continue
        i += 1
    return corners


def extract_features(seg: Trajectory) -> FeatureVector:
    """Compute the shape descriptor of a normalized segment.

    The segment must have at least 3 points and a nonzero path length
    (use ``trajectory.normalize`` first).  Deterministic: identical input
    yields identical output.
    """
    if len(seg) < 3:
        raise DegenerateTrajectory(f"need >= 3 points, got {len(seg)}")
    raw: list[Point] = [(p.x, p.y) for p in seg.points]
    if seg.path_length() <= 0.0:
        raise DegenerateTrajectory("zero path length")

    # Everything is measured on a fixed-resolution resampled curve so the
    # descriptor does not drift with the sensor's sample rate or noise
    # level.  Corners are counted on the unsmoothed curve (an exact corner
    # splits across at most two adjacent vertices there, which the pairwise
    # rule captures without loss); the other features use a denoised copy.
    resampled = resample_path(raw)
    corners = count_corners(turning_angles(resampled))
    curve = smooth_path(resampled, passes=3)

    path_len = sum(math.dist(a, b) for a, b in zip(curve, curve[1:]))
    if path_len <= 0.0:
        raise DegenerateTrajectory("zero path length after smoothing")
    hull = convex_hull(curve)
    long_side, short_side = min_bounding_rectangle(hull)
    box_area = long_side * short_side

    # A nominally straight stroke rotated through floats yields a sliver
    # hull of negligible width; its area/box ratio is noise, so treat it
    # as the degenerate (line) case.
    sliver = short_side <= 1e-9 * long_side
    extent = (0.0 if hull.is_degenerate or sliver or box_area <= 0.0
              else hull.area() / box_area)
    overlap = hull.perimeter() / path_len
    closure = math.dist(curve[0], curve[-1]) / path_len
    aspect = 0.0 if long_side <= 0.0 else short_side / long_side

    # Winding sums accumulate every jitter wiggle, so they are taken on an
    # extra-smoothed profile with a deadband, backed by the jitter-immune
    # net turn (the sum of turns telescopes to last heading minus first).
    angles = turning_angles(smooth_path(curve))
    net = abs(sum(angles))
    coarse = sum(abs(a) for a in angles if abs(a) >= WINDING_DEADBAND)
    winding_abs = max(coarse, net) / math.tau
    winding_net = net / math.tau

    return FeatureVector(
        hull_vertex_count=float(len(hull.vertices)),
        extent=extent,
        overlap=overlap,
        closure=min(closure, 1.0),
        aspect=aspect,
        winding_abs=winding_abs,
        winding_net=winding_net,
        corner_count=float(corners),
    )


def format_record(label: str, fv: FeatureVector, precision: int = 9) -> str:
    """One feature-corpus line: ``label f1 ... f8``."""
    values = " ".join(f"{v:.{precision}g}" for v in fv.as_tuple())
    return f"{label} {values}"


def parse_record(line: str) -> tuple[str, FeatureVector]:
    """Parse a feature-corpus line back into (label, features)."""
    fields = line.strip().split(" ")
    if len(fields) != 1 + FEATURE_COUNT:
        raise ValueError(f"expected label plus {FEATURE_COUNT} features: {line!r}")
    label = fields[0]
    values = [float(f) for f in fields[1:]]
    return label, FeatureVector(*values)
