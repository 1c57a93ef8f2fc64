"""The six recognizable movement shapes and their synthetic generators.

Each shape class has a parametric path builder.  Generators draw per-instance
shape parameters (aspect, turn count, rotation, ...) plus jitter and sample
drop from a seeded RNG, so a given (class, seed) pair always produces a
bit-identical trajectory.  Noise presets model the two capture conditions:
"mouse" (clean pointer strokes) and "robot" (physical drag with dropout).

The same builders, at their canonical parameters and zero noise, provide
the paths the behavior engine drives the wheels along, which guarantees an
executed movement is recognizable by the classifier.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass

from .trajectory import TimedPoint, Trajectory

Point = tuple[float, float]


class ShapeClass(enum.Enum):
    """The recognizable movement shapes; ordinals are stable for
    serialization."""

    CIRCLE = 0
    RECT = 1
    LOOP = 2
    CURL = 3
    SPIKE = 4
    LINE = 5

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def from_label(cls, label: str) -> "ShapeClass":
        try:
            return cls[label.upper()]
        except KeyError:
            raise ValueError(f"unknown shape label {label!r}") from None


SHAPE_CLASSES: tuple[ShapeClass, ...] = tuple(ShapeClass)


@dataclass(frozen=True)
class NoiseProfile:
    """Sensor-noise model: per-sample Gaussian jitter (as a fraction of the
    shape's size) and a probability of dropping samples."""

    jitter_sigma: float = 0.0
    drop_rate: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.jitter_sigma < 0:
            raise ValueError(f"jitter_sigma must be >= 0, got {self.jitter_sigma}")
        if not 0.0 <= self.drop_rate <= 0.5:
            raise ValueError(f"drop_rate must be in [0, 0.5], got {self.drop_rate}")


# Capture-condition presets (sigma, drop rate).
MOUSE_NOISE = (0.01, 0.0)
ROBOT_NOISE = (0.05, 0.1)
TRAIN_NOISE = (0.02, 0.0)

NOISE_PRESETS: dict[str, tuple[float, float]] = {
    "mouse": MOUSE_NOISE,
    "robot": ROBOT_NOISE,
    "train": TRAIN_NOISE,
    "none": (0.0, 0.0),
}


_JITTER_KERNEL = (1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0)
# Rescale so the smoothed sequence keeps a per-sample std of sigma.
_JITTER_GAIN = (sum(_JITTER_KERNEL) ** 2 / sum(k * k for k in _JITTER_KERNEL)) ** 0.5


def _correlated_noise(rng: random.Random, n: int, sigma: float) -> list[float]:
    """Jitter with short-range correlation: sensor noise drifts rather than
    flipping sign every sample.  Per-sample std is ``sigma``."""
    white = [rng.gauss(0.0, 1.0) for _ in range(n + len(_JITTER_KERNEL) - 1)]
    scale = sigma * _JITTER_GAIN / sum(_JITTER_KERNEL)
    return [
        scale * sum(k * white[i + j] for j, k in enumerate(_JITTER_KERNEL))
        for i in range(n)
    ]


def _rotate(pts: list[Point], angle: float) -> list[Point]:
    c, s = math.cos(angle), math.sin(angle)
    return [(x * c - y * s, x * s + y * c) for x, y in pts]


def _unit_scale(pts: list[Point]) -> list[Point]:
    """Scale so the longer bounding-box side is exactly 1."""
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    side = max(max(xs) - min(xs), max(ys) - min(ys))
    if side <= 0:
        return list(pts)
    return [(x / side, y / side) for x, y in pts]


def _sample_closed_polyline(
    vertices: list[Point], n: int, start_frac: float
) -> list[Point]:
    """n points uniformly spaced by arc length around a closed polygon,
    starting at ``start_frac`` of its perimeter; first and last coincide."""
    ring = vertices + [vertices[0]]
    cumulative = [0.0]
    for a, b in zip(ring, ring[1:]):
        cumulative.append(cumulative[-1] + math.dist(a, b))
    total = cumulative[-1]
    out: list[Point] = []
    for k in range(n):
        target = (start_frac * total + total * k / (n - 1)) % total
        seg = 0
        while seg < len(ring) - 2 and cumulative[seg + 1] < target:
            seg += 1
        span = cumulative[seg + 1] - cumulative[seg]
        frac = 0.0 if span <= 0 else (target - cumulative[seg]) / span
        ax, ay = ring[seg]
        bx, by = ring[seg + 1]
        out.append((ax + (bx - ax) * frac, ay + (by - ay) * frac))
    # Close exactly: the wrap-around sampling reproduces the start.
    out[-1] = out[0]
    return out


def _round_corners(vertices: list[Point], radius: float,
                   arc_samples: int = 8) -> list[Point]:
    """Replace each corner of a closed polygon with a tangent circular arc
    of the given radius (clamped to fit the adjacent edges)."""
    if radius <= 0.0:
        return list(vertices)
    out: list[Point] = []
    m = len(vertices)
    for i, (bx, by) in enumerate(vertices):
        ax, ay = vertices[(i - 1) % m]
        cx, cy = vertices[(i + 1) % m]
        la = math.hypot(ax - bx, ay - by)
        lc = math.hypot(cx - bx, cy - by)
        ux, uy = (ax - bx) / la, (ay - by) / la
        vx, vy = (cx - bx) / lc, (cy - by) / lc
        half = 0.5 * math.acos(max(-1.0, min(1.0, ux * vx + uy * vy)))
        t = min(radius / math.tan(half), 0.4 * la, 0.4 * lc)
        r = t * math.tan(half)
        px, py = bx + ux * t, by + uy * t  # tangent point on incoming edge
        qx, qy = bx + vx * t, by + vy * t  # tangent point on outgoing edge
        mx, my = ux + vx, uy + vy
        mlen = math.hypot(mx, my)
        ox, oy = bx + mx / mlen * (r / math.sin(half)), by + my / mlen * (r / math.sin(half))
        a0 = math.atan2(py - oy, px - ox)
        a1 = math.atan2(qy - oy, qx - ox)
        sweep = math.atan2(
            math.sin(a1 - a0), math.cos(a1 - a0)
        )  # shortest way around the arc center
        for k in range(arc_samples + 1):
            ang = a0 + sweep * k / arc_samples
            out.append((ox + r * math.cos(ang), oy + r * math.sin(ang)))
    return out


def _circle_path(n: int, aspect: float, coverage: float, phase: float,
                 direction: float, squareness: float = 2.0) -> list[Point]:
    """Superellipse arc sampled uniformly by arc length; exponents above 2
    square the outline off, shading hand-drawn circles toward rounded
    boxes."""
    e = 2.0 / squareness
    dense = []
    for k in range(8 * n + 1):
        theta = phase + direction * math.tau * k / (8 * n)
        c, s = math.cos(theta), math.sin(theta)
        dense.append((
            0.5 * math.copysign(abs(c) ** e, c),
            0.5 * aspect * math.copysign(abs(s) ** e, s),
        ))
    cumulative = [0.0]
    for a, b in zip(dense, dense[1:]):
        cumulative.append(cumulative[-1] + math.dist(a, b))
    perimeter = cumulative[-1]
    # Coverage is a fraction of arc length, so an under- or over-shot
    # stroke misses or repeats the same small fraction of the outline
    # whatever the parametrization speed.
    pts = []
    for k in range(n):
        target = (coverage * perimeter * k / (n - 1)) % perimeter
        seg = 0
        lo, hi = 0, len(cumulative) - 1
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if cumulative[mid] <= target:
                lo = mid
            else:
                hi = mid
        seg = lo
        span = cumulative[seg + 1] - cumulative[seg]
        frac = 0.0 if span <= 0 else (target - cumulative[seg]) / span
        ax, ay = dense[seg]
        bx, by = dense[seg + 1]
        pts.append((ax + (bx - ax) * frac, ay + (by - ay) * frac))
    return pts


def _rect_path(n: int, aspect: float, start_frac: float, direction: float,
               rounding: float = 0.0) -> list[Point]:
    w, h = 1.0, aspect
    corners = [(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)]
    if direction < 0:
        corners.reverse()
    outline = _round_corners(corners, rounding)
    # Offset into the first edge so every corner is interior to the trace.
    return _sample_closed_polyline(outline, n, start_frac * 0.25)


def _loop_path(n: int, y_scale: float, phase: float,
               direction: float) -> list[Point]:
    """Figure-eight (Gerono lemniscate): a closed stroke crossing itself
    once, with two lobes wound in opposite directions."""
    pts: list[Point] = []
    for k in range(n):
        t = phase + direction * math.tau * k / (n - 1)
        pts.append((math.cos(t), 0.5 * y_scale * math.sin(2.0 * t)))
    return pts


def curl_min_inner_fraction(turns: float) -> float:
    """Smallest inner/outer radius ratio keeping the tightest coil wider
    than ~10 resample chords, so a spiral never reads as cornered."""
    return 2.0 * 0.0806 * turns / (1.0 - 0.1613 * turns)


def _curl_path(n: int, turns: float, inner: float, direction: float,
               outward: bool) -> list[Point]:
    """Archimedean spiral from inner radius to 0.5 over ``turns``
    revolutions."""
    r_outer = 0.5
    r_inner = inner * r_outer
    pts = []
    for k in range(n):
        u = k / (n - 1)
        if not outward:
            u = 1.0 - u
        theta = direction * turns * math.tau * u
        r = r_inner + (r_outer - r_inner) * u
        pts.append((r * math.cos(theta), r * math.sin(theta)))
    return pts


def _spike_path(n: int, tip_scales: list[float], start_frac: float,
                direction: float, blunt: float = 0.0) -> list[Point]:
    """Five-pointed star traced tip to every second tip, so the stroke
    crosses itself."""
    tips = []
    for i in range(5):
        angle = math.pi / 2 + i * 2.0 * math.tau / 5.0  # skip one tip each hop
        r = 0.5 * tip_scales[i % len(tip_scales)]
        tips.append((r * math.cos(angle), r * math.sin(angle)))
    if direction < 0:
        tips.reverse()
    outline = _round_corners(tips, blunt)
    return _sample_closed_polyline(outline, n, start_frac * 0.2)


def _line_path(n: int) -> list[Point]:
    return [(k / (n - 1), 0.0) for k in range(n)]


def base_path(shape: ShapeClass, n: int, rng: random.Random) -> list[Point]:
    """Unit-size path for ``shape`` with per-instance parameters drawn from
    ``rng``.  The draw order is fixed, so a given RNG state always yields
    the same path."""
    if shape is ShapeClass.CIRCLE:
        aspect = rng.uniform(0.72, 1.0)
        coverage = rng.uniform(0.97, 1.03)
        phase = rng.uniform(0.0, math.tau)
        direction = rng.choice((-1.0, 1.0))
        squareness = 2.0 + 1.6 * rng.random() ** 2
        pts = _circle_path(n, aspect, coverage, phase, direction, squareness)
    elif shape is ShapeClass.RECT:
        aspect = rng.uniform(0.5, 0.9)
        start_frac = rng.uniform(0.15, 0.85)
        direction = rng.choice((-1.0, 1.0))
        rotation = rng.uniform(0.0, math.tau)
        # Quadratic weighting keeps most rectangles crisp while letting a
        # minority shade toward rounded, circle-like outlines.
        rounding = 0.4 * rng.random() * aspect
        pts = _rotate(_rect_path(n, aspect, start_frac, direction, rounding),
                      rotation)
    elif shape is ShapeClass.LOOP:
        y_scale = rng.uniform(0.55, 1.05)
        phase = rng.uniform(0.0, math.tau)
        direction = rng.choice((-1.0, 1.0))
        rotation = rng.uniform(0.0, math.tau)
        pts = _rotate(_loop_path(n, y_scale, phase, direction), rotation)
    elif shape is ShapeClass.CURL:
        turns = rng.uniform(1.1, 2.45)
        inner = rng.uniform(curl_min_inner_fraction(turns), 0.85)
        direction = rng.choice((-1.0, 1.0))
        outward = rng.random() < 0.5
        rotation = rng.uniform(0.0, math.tau)
        pts = _rotate(_curl_path(n, turns, inner, direction, outward), rotation)
    elif shape is ShapeClass.SPIKE:
        tip_scales = [rng.uniform(0.9, 1.1) for _ in range(5)]
        start_frac = rng.uniform(0.2, 0.8)
        direction = rng.choice((-1.0, 1.0))
        rotation = rng.uniform(0.0, math.tau)
        blunt = 0.5 * rng.random() * 0.5
        pts = _rotate(_spike_path(n, tip_scales, start_frac, direction, blunt),
                      rotation)
    elif shape is ShapeClass.LINE:
        rotation = rng.uniform(0.0, math.tau)
        pts = _rotate(_line_path(n), rotation)
    else:  # pragma: no cover
        raise ValueError(f"unhandled shape {shape}")
    return _unit_scale(pts)


# Canonical (mid-range) parameters for movement execution.
def canonical_path(shape: ShapeClass, amplitude: float, n: int = 129) -> list[Point]:
    """Noise-free path for ``shape`` scaled so its longer bounding-box side
    equals ``amplitude`` meters.  Used to drive the wheels; a LINE path has
    length exactly ``amplitude``."""
    if shape is ShapeClass.CIRCLE:
        pts = _circle_path(n, 1.0, 1.0, math.pi / 2, 1.0)
    elif shape is ShapeClass.RECT:
        pts = _rect_path(n, 0.62, 0.5, 1.0)
    elif shape is ShapeClass.LOOP:
        pts = _loop_path(n, 0.75, 0.0, 1.0)
    elif shape is ShapeClass.CURL:
        pts = _curl_path(n, 2.0, curl_min_inner_fraction(2.0) * 1.2, 1.0, True)
    elif shape is ShapeClass.SPIKE:
        pts = _spike_path(n, [1.0], 0.5, 1.0)
    elif shape is ShapeClass.LINE:
        pts = _line_path(n)
    else:  # pragma: no cover
        raise ValueError(f"unhandled shape {shape}")
    pts = _unit_scale(pts)
    return [(x * amplitude, y * amplitude) for x, y in pts]


def generate_shape(
    shape: ShapeClass,
    noise: NoiseProfile,
    n_samples: int,
    amplitude: float = 0.5,
    t0: float = 0.0,
    duration: float = 2.8,
) -> Trajectory:
    """Synthesize one noisy trajectory of ``shape``.

    Deterministic for a given ``noise.seed``.  Samples span ``duration``
    seconds starting at ``t0`` (the default fits inside one 3-second
    segmentation window).  Jitter is applied in unit-shape space, so
    ``jitter_sigma`` is a fraction of the shape's size regardless of
    ``amplitude``.
    """
    if n_samples < 16:
        raise ValueError(f"n_samples must be >= 16, got {n_samples}")
    rng = random.Random(noise.seed)
    pts = base_path(shape, n_samples, rng)
    if noise.jitter_sigma > 0:
        jx = _correlated_noise(rng, n_samples, noise.jitter_sigma)
        jy = _correlated_noise(rng, n_samples, noise.jitter_sigma)
        pts = [(x + dx, y + dy) for (x, y), dx, dy in zip(pts, jx, jy)]
    keep = [True] * n_samples
    if noise.drop_rate > 0:
        for i in range(1, n_samples - 1):  # endpoints always survive
            if rng.random() < noise.drop_rate:
                keep[i] = False
        if sum(keep) < 4:
            keep = [True] * n_samples
    samples = []
    for k, ((x, y), kept) in enumerate(zip(pts, keep)):
        if not kept:
            continue
        t = t0 + duration * k / (n_samples - 1)
        samples.append(TimedPoint(t, x * amplitude, y * amplitude))
    return Trajectory(tuple(samples))


def instance_seed(base_seed: int, class_index: int, instance: int) -> int:
    """Disjoint per-instance seed so corpora built from different base seeds
    never share instances."""
    return (base_seed << 20) ^ (class_index << 14) ^ instance


def make_corpus(
    n_per_class: int,
    jitter_sigma: float,
    drop_rate: float,
    base_seed: int,
    n_samples: int = 64,
) -> list[tuple[Trajectory, ShapeClass]]:
    """Generate ``n_per_class`` examples of every shape class."""
    corpus: list[tuple[Trajectory, ShapeClass]] = []
    for ci, shape in enumerate(SHAPE_CLASSES):
        for i in range(n_per_class):
            noise = NoiseProfile(
                jitter_sigma=jitter_sigma,
                drop_rate=drop_rate,
                seed=instance_seed(base_seed, ci, i),
            )
            corpus.append((generate_shape(shape, noise, n_samples), shape))
    return corpus
