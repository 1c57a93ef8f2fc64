import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yolobot.errors import DegenerateTrajectory, TooFewPoints
from yolobot.geometry import (
    FeatureVector,
    convex_hull,
    count_corners,
    extract_features,
    format_record,
    min_bounding_rectangle,
    parse_record,
    resample_path,
    smooth_path,
    turning_angles,
)
from yolobot.shapes import NoiseProfile, ShapeClass, canonical_path, generate_shape
from yolobot.trajectory import from_points, normalize


from oracles import brute_force_hull


def traj_of(pts, duration=2.8):
    n = len(pts)
    return from_points((duration * k / (n - 1), x, y) for k, (x, y) in enumerate(pts))


class TestConvexHull:
    def test_square_excludes_center(self):
        pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)]
        hull = convex_hull(pts)
        assert set(hull.vertices) == {(0, 0), (1, 0), (1, 1), (0, 1)}
        assert (0.5, 0.5) not in hull.vertices

    def test_collinear_degenerate(self):
        hull = convex_hull([(0, 0), (1, 0), (2, 0)])
        assert hull.vertices == ((0.0, 0.0), (2.0, 0.0))
        assert hull.is_degenerate
        assert hull.area() == 0.0
        assert hull.perimeter() == pytest.approx(4.0)

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            convex_hull([(1, 1)])
        with pytest.raises(TooFewPoints):
            convex_hull([(1, 1), (1, 1)])

    def test_counter_clockwise_and_convex(self):
        rng = random.Random(9)
        pts = [(rng.random(), rng.random()) for _ in range(40)]
        hull = convex_hull(pts)
        v = hull.vertices
        for a, b, c in zip(v, v[1:] + v[:1], v[2:] + v[:2]):
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            assert cross > 0.0  # strict: no collinear triples survive

    def test_all_points_inside_hull(self):
        rng = random.Random(10)
        pts = [(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(60)]
        hull = convex_hull(pts)
        v = hull.vertices
        for p in pts:
            for a, b in zip(v, v[1:] + v[:1]):
                cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
                assert cross >= -1e-9

    def test_matches_brute_force_oracle_on_random_sets(self):
        rng = random.Random(123)
        for _ in range(200):
            n = rng.randint(4, 50)
            pts = [(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n)]
            assert set(convex_hull(pts).vertices) == brute_force_hull(pts)

    # Grid coordinates keep points well separated: near-coincident points
    # hit float absorption differently in algebraically equal predicates,
    # which is outside the contract (it is defined on random point sets).
    @given(st.lists(st.tuples(st.integers(-1000, 1000), st.integers(-1000, 1000)),
                    min_size=4, max_size=30, unique=True))
    @settings(max_examples=100)
    def test_oracle_property(self, grid_pts):
        pts = [(x / 100.0, y / 100.0) for x, y in grid_pts]
        oracle = brute_force_hull(pts)
        if not oracle:  # fully collinear draw
            return
        assert set(convex_hull(pts).vertices) == oracle


class TestMinBoundingRectangle:
    def test_axis_rectangle(self):
        hull = convex_hull([(0, 0), (2, 0), (2, 1), (0, 1)])
        long_side, short_side = min_bounding_rectangle(hull)
        assert (long_side, short_side) == pytest.approx((2.0, 1.0))

    def test_rotation_invariant(self):
        rng = random.Random(3)
        pts = [(rng.random(), rng.random()) for _ in range(30)]
        base = min_bounding_rectangle(convex_hull(pts))
        ang = 1.1
        rot = [(x * math.cos(ang) - y * math.sin(ang),
                x * math.sin(ang) + y * math.cos(ang)) for x, y in pts]
        other = min_bounding_rectangle(convex_hull(rot))
        assert base == pytest.approx(other, rel=1e-9)

    def test_degenerate(self):
        hull = convex_hull([(0, 0), (3, 4)])
        assert min_bounding_rectangle(hull) == (5.0, 0.0)


class TestResampleAndCorners:
    def test_resample_preserves_endpoints_and_spacing(self):
        pts = [(float(k), 0.0) for k in range(5)]
        res = resample_path(pts, 9)
        assert res[0] == (0.0, 0.0) and res[-1] == (4.0, 0.0)
        gaps = [math.dist(a, b) for a, b in zip(res, res[1:])]
        assert all(g == pytest.approx(0.5) for g in gaps)

    def test_zero_length_rejected(self):
        with pytest.raises(DegenerateTrajectory):
            resample_path([(1.0, 1.0), (1.0, 1.0)])

    def test_single_right_angle_counted_once(self):
        pts = [(x / 10, 0.0) for x in range(11)] + [(1.0, y / 10) for y in range(1, 11)]
        angles = turning_angles(resample_path(pts))
        assert count_corners(angles) == 1

    def test_gentle_arc_has_no_corners(self):
        pts = [(math.cos(a), math.sin(a))
               for a in [k * math.tau / 63 for k in range(64)]]
        assert count_corners(turning_angles(resample_path(pts))) == 0


class TestExtractFeatures:
    def test_unit_circle_64(self):
        pts = [(math.cos(math.tau * k / 63), math.sin(math.tau * k / 63))
               for k in range(64)]
        fv = extract_features(normalize(traj_of(pts)))
        assert fv.closure == pytest.approx(0.0, abs=0.05)
        assert fv.winding_abs == pytest.approx(1.0, abs=0.1)
        assert fv.winding_net == pytest.approx(1.0, abs=0.1)
        assert fv.corner_count == 0.0

    def test_straight_line_32(self):
        pts = [(k / 31.0, 0.0) for k in range(32)]
        fv = extract_features(normalize(traj_of(pts)))
        assert fv.winding_abs == pytest.approx(0.0, abs=0.05)
        assert fv.closure == pytest.approx(1.0, abs=0.05)
        assert fv.extent == 0.0
        assert fv.hull_vertex_count == 2.0

    def test_axis_aligned_rectangle(self):
        fv = extract_features(normalize(traj_of(canonical_path(ShapeClass.RECT, 0.3, 65))))
        assert fv.corner_count == 4.0
        assert fv.winding_net == pytest.approx(1.0, abs=0.1)

    def test_rejects_too_few_points(self):
        with pytest.raises(DegenerateTrajectory):
            extract_features(traj_of([(0.0, 0.0), (1.0, 1.0)], duration=1.0))

    def test_deterministic_bits(self):
        traj = normalize(generate_shape(ShapeClass.CURL, NoiseProfile(0.02, 0.0, 11), 64))
        assert extract_features(traj).as_tuple() == extract_features(traj).as_tuple()

    def test_feature_ranges(self):
        for shape in ShapeClass:
            for seed in range(5):
                traj = generate_shape(shape, NoiseProfile(0.03, 0.05, seed), 64)
                fv = extract_features(normalize(traj))
                values = fv.as_tuple()
                assert all(math.isfinite(v) for v in values)
                assert 0.0 <= fv.extent <= 1.0
                assert 0.0 <= fv.closure <= 1.0
                assert 0.0 <= fv.aspect <= 1.0
                assert fv.hull_vertex_count == int(fv.hull_vertex_count) >= 0
                assert fv.corner_count == int(fv.corner_count) >= 0

    def test_rotation_invariance_of_f2_to_f8(self):
        rng = random.Random(77)
        for shape in ShapeClass:
            base_traj = generate_shape(shape, NoiseProfile(0.0, 0.0, 21), 64)
            base = extract_features(normalize(base_traj)).as_tuple()
            for _ in range(3):
                ang = rng.uniform(0, math.tau)
                c, s = math.cos(ang), math.sin(ang)
                rotated = from_points(
                    (p.t, p.x * c - p.y * s, p.x * s + p.y * c)
                    for p in base_traj.points
                )
                rot = extract_features(normalize(rotated)).as_tuple()
                for i in range(1, 8):  # f2..f8; f1 may wobble with sampling
                    tol = max(2e-2 * abs(base[i]), 5e-3)
                    assert abs(rot[i] - base[i]) <= tol, (shape, i, base[i], rot[i])


class TestCorpusFormat:
    def test_roundtrip(self):
        fv = FeatureVector(7, 0.5, 1.25, 0.0, 0.9, 1.0, 1.0, 4)
        label, parsed = parse_record(format_record("rect", fv))
        assert label == "rect"
        assert parsed.as_tuple() == pytest.approx(fv.as_tuple())

    def test_arity_checked(self):
        with pytest.raises(ValueError):
            parse_record("circle 1 2 3")


class TestSmoothPath:
    def test_preserves_endpoints(self):
        pts = [(0.0, 0.0), (1.0, 2.0), (2.0, -1.0), (3.0, 0.5)]
        sm = smooth_path(pts, passes=3)
        assert sm[0] == pts[0] and sm[-1] == pts[-1]
