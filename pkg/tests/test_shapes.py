import math

import pytest

from yolobot.geometry import extract_features
from yolobot.shapes import (
    SHAPE_CLASSES,
    NoiseProfile,
    ShapeClass,
    canonical_path,
    generate_shape,
    instance_seed,
    make_corpus,
)
from yolobot.trajectory import normalize


def features(shape, sigma, drop, seed, n=64):
    traj = generate_shape(shape, NoiseProfile(sigma, drop, seed), n)
    return extract_features(normalize(traj))


class TestShapeClass:
    def test_six_stable_ordinals(self):
        assert [s.value for s in SHAPE_CLASSES] == [0, 1, 2, 3, 4, 5]
        assert ShapeClass.from_label("spike") is ShapeClass.SPIKE
        with pytest.raises(ValueError):
            ShapeClass.from_label("triangle")


class TestNoiseProfile:
    def test_validation(self):
        with pytest.raises(ValueError):
            NoiseProfile(jitter_sigma=-0.1)
        with pytest.raises(ValueError):
            NoiseProfile(drop_rate=0.6)


class TestGenerateShape:
    def test_noiseless_circle_closes(self):
        fv = features(ShapeClass.CIRCLE, 0.0, 0.0, 0)
        assert fv.closure < 0.05

    def test_line_low_winding_at_mouse_noise(self):
        fv = features(ShapeClass.LINE, 0.01, 0.0, 0, n=32)
        assert fv.winding_abs < 0.15

    def test_same_seed_bit_identical(self):
        a = generate_shape(ShapeClass.LOOP, NoiseProfile(0.02, 0.1, 77), 64)
        b = generate_shape(ShapeClass.LOOP, NoiseProfile(0.02, 0.1, 77), 64)
        assert a == b

    def test_different_seeds_differ(self):
        a = generate_shape(ShapeClass.LOOP, NoiseProfile(0.02, 0.0, 1), 64)
        b = generate_shape(ShapeClass.LOOP, NoiseProfile(0.02, 0.0, 2), 64)
        assert a != b

    def test_minimum_sample_count(self):
        with pytest.raises(ValueError):
            generate_shape(ShapeClass.CIRCLE, NoiseProfile(), 15)

    def test_timestamps_fit_one_window(self):
        traj = generate_shape(ShapeClass.RECT, NoiseProfile(seed=4), 64)
        assert traj.points[0].t == 0.0
        assert traj.points[-1].t <= 2.8

    def test_drop_rate_removes_interior_samples(self):
        traj = generate_shape(ShapeClass.CIRCLE, NoiseProfile(0.0, 0.5, 9), 64)
        assert 16 <= len(traj) < 64

    def test_clean_spikes_never_exceed_five_corners(self):
        for seed in range(20):
            fv = features(ShapeClass.SPIKE, 0.0, 0.0, seed)
            assert fv.corner_count <= 5.0


class TestCanonicalPaths:
    def test_line_length_equals_amplitude(self):
        pts = canonical_path(ShapeClass.LINE, 0.06)
        length = sum(math.dist(a, b) for a, b in zip(pts, pts[1:]))
        assert length == pytest.approx(0.06)

    def test_unit_bbox_side(self):
        for shape in SHAPE_CLASSES:
            pts = canonical_path(shape, 0.2)
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            assert max(max(xs) - min(xs), max(ys) - min(ys)) == pytest.approx(0.2)

    def test_closed_shapes_return_to_start(self):
        for shape in (ShapeClass.CIRCLE, ShapeClass.RECT, ShapeClass.LOOP,
                      ShapeClass.SPIKE):
            pts = canonical_path(shape, 0.2)
            assert math.dist(pts[0], pts[-1]) < 1e-9


class TestCorpus:
    def test_instance_seeds_disjoint_across_bases(self):
        a = {instance_seed(42, c, i) for c in range(6) for i in range(100)}
        b = {instance_seed(1042, c, i) for c in range(6) for i in range(100)}
        assert not (a & b)

    def test_make_corpus_counts(self):
        corpus = make_corpus(3, 0.02, 0.0, 42)
        assert len(corpus) == 18
        per_class = {s: 0 for s in SHAPE_CLASSES}
        for _, label in corpus:
            per_class[label] += 1
        assert all(v == 3 for v in per_class.values())

    def test_corpus_deterministic(self):
        assert make_corpus(2, 0.01, 0.0, 5) == make_corpus(2, 0.01, 0.0, 5)
